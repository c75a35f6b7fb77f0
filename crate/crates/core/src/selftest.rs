//! Invariant suites run by `selftest`, plus the bundled scenario corpus.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohom::{self, oracle};
use crate::error::{Error, Result};
use crate::fingroup::FiniteGroup;
use crate::formulas::{self, EulerContext};
use crate::galmod::{FiniteAbelianPGroup, GaloisModule};
use crate::numfield::{product_formula_check, NumberField};
use crate::scenario::{self, Scenario};

pub const BUNDLED: &[(&str, &str)] = &[
    ("example1_sqrt-5.json", include_str!("../scenarios/example1_sqrt-5.json")),
    ("example2_sqrt-120.json", include_str!("../scenarios/example2_sqrt-120.json")),
    ("dimension_defect.json", include_str!("../scenarios/dimension_defect.json")),
    ("reduction_identities.json", include_str!("../scenarios/reduction_identities.json")),
    ("class_number_one.json", include_str!("../scenarios/class_number_one.json")),
];

pub fn bundled_scenarios() -> Vec<Scenario> {
    BUNDLED
        .iter()
        .flat_map(|(name, text)| {
            scenario::parse_file(text).unwrap_or_else(|e| panic!("bundled {name} is invalid: {e}")).scenarios
        })
        .collect()
}

pub const SUITES: &[&str] = &["product_formula", "cyclic", "engine_agreement", "bound_dominance", "reduction", "group_tables"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        Self { name: name.into(), checks: 0, failures: vec![] }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn record_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, what),
            Err(e) => {
                let msg = what();
                self.record(false, || format!("{msg}: {e}"));
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A group multiplication table supplied from a file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableFixture {
    pub table: Vec<Vec<usize>>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub seed: u64,
    pub filter: Option<String>,
    pub table: Option<TableFixture>,
}

pub fn run(opts: &Options) -> Result<Vec<SuiteResult>> {
    if let Some(f) = &opts.filter {
        if !SUITES.contains(&f.as_str()) {
            return Err(Error::Schema(format!("unknown suite {f:?}; known: {}", SUITES.join(", "))));
        }
    }
    let selected = |name: &str| opts.filter.as_deref().is_none_or(|f| f == name);
    let mut out = Vec::new();
    if selected("product_formula") {
        out.push(product_formula(opts.seed));
    }
    if selected("cyclic") {
        out.push(cyclic());
    }
    if selected("engine_agreement") {
        out.push(engine_agreement());
    }
    if selected("bound_dominance") {
        out.push(bound_dominance());
    }
    if selected("reduction") {
        out.push(reduction());
    }
    if selected("group_tables") {
        out.push(group_tables(opts.table.as_ref()));
    }
    Ok(out)
}

const CUBICS: &[[i128; 4]] = &[[-2, 0, 0, 1], [-1, -1, 0, 1], [1, 1, 0, 1], [-1, -3, 0, 1], [3, -1, 0, 1]];

pub fn product_formula(seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("product_formula");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while res.checks < 100 {
        let field = if rng.gen_bool(0.7) {
            match NumberField::quadratic(rng.gen_range(-60i64..=60)) {
                Ok(k) => k,
                Err(_) => continue,
            }
        } else {
            NumberField::new(CUBICS[rng.gen_range(0..CUBICS.len())].to_vec()).expect("fixed cubics are valid")
        };
        let num = rng.gen_range(1i64..=5000) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let den = rng.gen_range(1u64..=5000);
        res.record_result(product_formula_check(&field, num, den), || {
            format!("product formula for {num}/{den} over {:?}", field.min_poly())
        });
    }
    res
}

/// Kernel and image sizes of x -> a·x on Z/m by enumeration.
fn ker_im(a: u64, m: u64) -> (u64, u64) {
    let ker = (0..m).filter(|x| a * x % m == 0).count() as u64;
    (ker, m / ker)
}

pub fn cyclic() -> SuiteResult {
    let mut res = SuiteResult::new("cyclic");
    for n in 1..=12usize {
        let group = Arc::new(FiniteGroup::cyclic(n));
        for p in [2u64, 3, 5] {
            for k in 1..=3u32 {
                let m = p.pow(k);
                for (kind, a) in [("trivial", 1u64), ("inversion", m - 1)] {
                    // inversion only defines an action when g^n acts as 1
                    if n % 2 == 1 && a != 1 {
                        continue;
                    }
                    let images = if n == 1 { vec![] } else { vec![(1, vec![vec![a as i64]])] };
                    let module = FiniteAbelianPGroup::new(p, vec![k]).expect("valid");
                    let gm = match GaloisModule::from_generator_images(group.clone(), module, &images, None, vec![]) {
                        Ok(x) => x,
                        Err(e) => {
                            res.record(false, || format!("C{n} on Z/{m} {kind}: {e}"));
                            continue;
                        }
                    };
                    let norm = (0..n as u64).fold(0, |s, i| (s + a.pow(i as u32 % 2)) % m);
                    let (ker_aug, im_aug) = ker_im((a + m - 1) % m, m);
                    let (ker_n, im_n) = ker_im(norm, m);
                    let expected = [ker_aug, ker_n / im_aug, ker_aug / im_n];
                    let got = cohom::cohomology(&gm).map(|r| r.orders.map(|c| c.to_ratio().0));
                    res.record_result(
                        got.map(|o| o.iter().zip(expected).all(|(x, e)| *x == e.into())),
                        || format!("C{n} on Z/{m} {kind}: closed forms {expected:?}"),
                    );
                    res.record_result(cohom::herbrand_quotient(&gm).map(|q| q.is_one()), || {
                        format!("C{n} on Z/{m} {kind}: Herbrand quotient")
                    });
                }
            }
        }
    }
    res
}

/// Groups of order at most 16 for the engine comparison, S3 through its table.
pub fn small_groups() -> Vec<(String, FiniteGroup)> {
    let s3 = FiniteGroup::symmetric3();
    let s3_table = FiniteGroup::from_table(s3.table(), Some(s3.labels().to_vec())).expect("S3 table");
    vec![
        ("trivial".into(), FiniteGroup::trivial()),
        ("C2".into(), FiniteGroup::cyclic(2)),
        ("C3".into(), FiniteGroup::cyclic(3)),
        ("C4".into(), FiniteGroup::cyclic(4)),
        ("Klein4".into(), FiniteGroup::klein4()),
        ("Q8".into(), FiniteGroup::quaternion()),
        ("S3".into(), s3_table),
        ("C8".into(), FiniteGroup::cyclic(8)),
        ("C16".into(), FiniteGroup::cyclic(16)),
    ]
}

/// Elementary abelian modules over each small group: trivial ones of rank 1
/// and 2, a swap action on F_p^2 through a quotient of order 2, and the
/// integral 2-dimensional representation of S3 reduced mod p.
pub fn engine_corpus() -> Vec<(String, GaloisModule)> {
    let swap = vec![vec![0, 1], vec![1, 0]];
    let id2 = vec![vec![1, 0], vec![0, 1]];
    let mut out = Vec::new();
    for (name, g) in small_groups() {
        let g = Arc::new(g);
        for p in [2u64, 3] {
            for k in [1usize, 2] {
                let module = FiniteAbelianPGroup::elementary(p, k).expect("valid");
                let m = GaloisModule::trivial(g.clone(), module, vec![]).expect("trivial action");
                out.push((format!("{name} on F{p}^{k} trivial"), m));
            }
            'search: for a in 0..g.order() {
                for b in a..g.order() {
                    let images = vec![(a, swap.clone()), (b, if a == b { swap.clone() } else { id2.clone() })];
                    let module = FiniteAbelianPGroup::elementary(p, 2).expect("valid");
                    if let Ok(m) = GaloisModule::from_generator_images(g.clone(), module, &images, None, vec![]) {
                        if !m.is_trivial_action() {
                            out.push((format!("{name} on F{p}^2 swapped by {}", g.label(a)), m));
                            break 'search;
                        }
                    }
                }
            }
            if name == "S3" {
                let images = vec![
                    (g.element("(1 2)").expect("label"), vec![vec![-1, 1], vec![0, 1]]),
                    (g.element("(1 2 3)").expect("label"), vec![vec![0, -1], vec![1, -1]]),
                ];
                let module = FiniteAbelianPGroup::elementary(p, 2).expect("valid");
                let m = GaloisModule::from_generator_images(g.clone(), module, &images, None, vec![])
                    .expect("standard representation");
                out.push((format!("S3 on F{p}^2 standard"), m));
            }
        }
    }
    out
}

pub fn engine_agreement() -> SuiteResult {
    let mut res = SuiteResult::new("engine_agreement");
    for (name, m) in engine_corpus() {
        let ok = cohom::cohomology(&m).and_then(|a| {
            let b = oracle::cocycle_oracle(&m)?;
            Ok(a.dims == b.dims && a.tate_h0 == b.tate_h0)
        });
        res.record_result(ok, || format!("{name}: snf and fp-linear differ"));
    }
    res
}

fn context(sc: &Scenario) -> Result<Option<EulerContext>> {
    let built = sc.build()?;
    match built.module {
        Some(m) => Ok(Some(EulerContext::new(built.places, m, sc.flags.quotient_is_full, sc.flags.faithful_quotient)?)),
        None => Ok(None),
    }
}

pub fn bound_dominance() -> SuiteResult {
    let mut res = SuiteResult::new("bound_dominance");
    for sc in bundled_scenarios().iter().filter(|s| s.flags.quotient_is_full) {
        let ok = context(sc).and_then(|ctx| match ctx {
            Some(ctx) => formulas::chi2_exact_finite(&ctx).map(|e| e.lhs.le_value(&e.rhs_bound)),
            None => Ok(true),
        });
        res.record_result(ok, || format!("{}: chi2 exceeds its bound", sc.id));
    }
    res
}

/// With S ⊇ S_p and a finite place in S, the bound collapses to tate_rhs; for
/// totally imaginary K the étale characteristic does too.
pub fn reduction() -> SuiteResult {
    let mut res = SuiteResult::new("reduction");
    for sc in bundled_scenarios() {
        let ctx = match context(&sc) {
            Ok(Some(ctx)) => ctx,
            Ok(None) => continue,
            Err(e) => {
                res.record(false, || format!("{}: {e}", sc.id));
                continue;
            }
        };
        let p = ctx.module.p();
        let covers = match ctx.places.contains_all_above(p) {
            Ok(c) => c,
            Err(e) => {
                res.record(false, || format!("{}: {e}", sc.id));
                continue;
            }
        };
        if !covers {
            continue;
        }
        let tate = formulas::tate_rhs(&ctx);
        if ctx.places.has_finite_places() {
            let ok = formulas::chi2_upper_bound(&ctx).and_then(|b| Ok(b == tate.clone()?));
            res.record_result(ok, || format!("{}: bound differs from tate_rhs", sc.id));
        }
        if ctx.field().is_totally_imaginary() {
            let ok = formulas::etale_chi(&ctx).and_then(|c| Ok(c == tate.clone()?));
            res.record_result(ok, || format!("{}: etale_chi differs from tate_rhs", sc.id));
        }
    }
    res
}

pub fn group_tables(fixture: Option<&TableFixture>) -> SuiteResult {
    let mut res = SuiteResult::new("group_tables");
    if let Some(f) = fixture {
        let r = FiniteGroup::from_table(f.table.clone(), f.labels.clone());
        res.record(r.is_ok(), || format!("fixture: {}", r.unwrap_err()));
        return res;
    }
    for (name, g) in small_groups() {
        let again = FiniteGroup::from_table(g.table(), Some(g.labels().to_vec()));
        res.record(again.is_ok(), || format!("{name}: table does not revalidate"));
    }
    for name in ["Q8", "Klein4", "S3", "C_6"] {
        let ok = FiniteGroup::builtin(name).map(|g| g.order()).ok();
        res.record(ok.is_some(), || format!("builtin {name} missing"));
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_files_parse() {
        assert!(bundled_scenarios().len() >= 15);
    }

    #[test]
    fn unknown_filter_is_rejected() {
        let opts = Options { filter: Some("nope".into()), ..Default::default() };
        assert!(run(&opts).is_err());
    }

    #[test]
    fn corrupt_fixture_names_invariant() {
        let f = TableFixture { table: vec![vec![0, 1], vec![1, 1]], labels: None };
        let r = group_tables(Some(&f));
        assert!(!r.passed());
        assert!(r.failures[0].contains("violated"), "{:?}", r.failures);
    }
}
