//! Acceptance criteria, one line of output each. Run with
//! `cargo test -p eulerchar --test acceptance -- --nocapture` to see the lines.

use std::sync::Arc;
use std::time::{Duration, Instant};

use eulerchar::cardinality::FormalCardinality;
use eulerchar::cohom::{self, oracle, Engine};
use eulerchar::fingroup::FiniteGroup;
use eulerchar::formulas::{self, EulerContext};
use eulerchar::galmod::{FiniteAbelianPGroup, GaloisModule};
use eulerchar::numfield::{product_formula_check, NumberField};
use eulerchar::report::{self, Report};
use eulerchar::scenario::{self, Scenario};
use eulerchar::selftest;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXAMPLE1_BUDGET: Duration = Duration::from_secs(1);
const EXAMPLE2_BUDGET: Duration = Duration::from_secs(30);
const PRODUCT_FORMULA_SEED: u64 = 20_240_601;
const PRODUCT_FORMULA_PAIRS: usize = 100;

fn verdict(name: &str, ok: bool, detail: &str) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

fn bundled(file: &str) -> Vec<Scenario> {
    let (_, text) = selftest::BUNDLED.iter().find(|(n, _)| *n == file).expect("bundled file");
    scenario::parse_file(text).unwrap().scenarios
}

fn pp(p: u64, e: i64) -> FormalCardinality {
    FormalCardinality::prime_power(p, e)
}

fn eval_all(scs: &[Scenario]) -> (Vec<Report>, Duration) {
    let t = Instant::now();
    let out = scs.iter().map(|s| report::evaluate(s).unwrap()).collect();
    (out, t.elapsed())
}

#[test]
fn example_1_class_group_c2() {
    let (reports, elapsed) = eval_all(&bundled("example1_sqrt-5.json"));
    let mut problems = Vec::new();
    for (r, p) in reports.iter().zip([2u64, 3, 5]) {
        let res = &r.results;
        let bound = if p == 2 { pp(2, 2) } else { pp(p, 1) };
        if res.chi2_exact != Some(pp(p, 1)) {
            problems.push(format!("chi2 at {p}: {:?}", res.chi2_exact));
        }
        if res.chi2_bound != Some(bound) {
            problems.push(format!("bound at {p}: {:?}", res.chi2_bound));
        }
        if res.tight != Some(p != 2) {
            problems.push(format!("tight at {p}: {:?}", res.tight));
        }
    }
    let ledger = reports[0].results.ledger.as_ref().expect("ledger on the p=2 scenario");
    if ledger.sup_minus_d != 0 || ledger.rhs_bound != 1 {
        problems.push(format!("ledger r-d={} rhs={}", ledger.sup_minus_d, ledger.rhs_bound));
    }
    if elapsed >= EXAMPLE1_BUDGET {
        problems.push(format!("runtime {elapsed:?}"));
    }
    let detail = if problems.is_empty() {
        format!("chi2={{p:1}}, bound p/p/p^2 at 2, tight odd only, r-d=0 vs rhs 1, {elapsed:?}")
    } else {
        problems.join("; ")
    };
    verdict("example 1 (Q(sqrt -5), C2)", problems.is_empty(), &detail);
}

#[test]
fn example_2_quaternion() {
    let (reports, elapsed) = eval_all(&bundled("example2_sqrt-120.json"));
    let mut problems = Vec::new();
    for (r, p) in reports.iter().zip([2u64, 3, 5]).skip(1) {
        let res = &r.results;
        if res.chi2_exact != Some(pp(p, 1)) || res.chi2_bound != Some(pp(p, 1)) || res.tight != Some(true) {
            problems.push(format!("p={p}: {:?} {:?} {:?}", res.chi2_exact, res.chi2_bound, res.tight));
        }
    }
    let r2 = &reports[0];
    let engines: Vec<(Engine, [u64; 3])> = r2.results.cohomology.iter().map(|c| (c.engine, c.dims.unwrap())).collect();
    if engines.len() != 2 || engines[0].1 != engines[1].1 {
        problems.push(format!("engines: {engines:?}"));
    }
    let h2 = engines[0].1[2];
    let claim = r2.claims_check.iter().find(|c| c.name == "h2_dim").expect("h2 claim");
    let flagged = r2.warnings.iter().any(|w| w.starts_with("DISCREPANCY: h2_dim"));
    if flagged != (claim.claimed != serde_json::Value::from(h2)) {
        problems.push("DISCREPANCY flag does not track the h2 comparison".into());
    }
    if elapsed >= EXAMPLE2_BUDGET {
        problems.push(format!("runtime {elapsed:?}"));
    }
    let detail = if problems.is_empty() {
        format!(
            "odd p tight with chi2={{p:1}}; h2(Q8,F2) snf={} fp-linear={} vs claimed {}, DISCREPANCY={flagged}, {elapsed:?}",
            engines[0].1[2], engines[1].1[2], claim.claimed
        )
    } else {
        problems.join("; ")
    };
    verdict("example 2 (Q(sqrt -120), Q8)", problems.is_empty(), &detail);
}

/// [h0, h1, h2] of C_n on Z/p^k, from H^0 = M^G, H^odd = ker N/(g-1)M,
/// H^even = M^G/NM, written out for the two actions.
fn cyclic_closed_form(n: u64, p: u64, k: u32, inversion: bool) -> [i64; 3] {
    if !inversion {
        let v = (0..).take_while(|&i| n % p.pow(i + 1) == 0).count() as i64;
        let t = v.min(k as i64);
        [k as i64, t, t]
    } else {
        // n even: N = 0, M^G = M[2], (g-1)M = 2M
        let two = if p == 2 { 1 } else { 0 };
        [two, two, two]
    }
}

#[test]
fn cyclic_closed_forms() {
    let mut checked = 0;
    let mut problems = Vec::new();
    for n in 1..=12u64 {
        let g = Arc::new(FiniteGroup::cyclic(n as usize));
        for p in [2u64, 3, 5] {
            for k in 1..=3u32 {
                for inversion in [false, true] {
                    if inversion && n % 2 == 1 {
                        continue;
                    }
                    let a = if inversion { -1 } else { 1 };
                    let images = if n == 1 { vec![] } else { vec![(1, vec![vec![a]])] };
                    let m = GaloisModule::from_generator_images(
                        g.clone(),
                        FiniteAbelianPGroup::new(p, vec![k]).unwrap(),
                        &images,
                        None,
                        vec![],
                    )
                    .unwrap();
                    let want = cyclic_closed_form(n, p, k, inversion);
                    let got = cohom::cohomology(&m).unwrap().orders.map(|c| c.exponent(p));
                    let q = cohom::herbrand_quotient(&m).unwrap();
                    checked += 1;
                    if got != want || !q.is_one() {
                        problems.push(format!("C{n} Z/{p}^{k} inv={inversion}: {got:?} vs {want:?}, q={q}"));
                    }
                }
            }
        }
    }
    let detail = if problems.is_empty() { format!("{checked} modules, Herbrand quotient 1 throughout") } else { problems.join("; ") };
    verdict("cyclic closed forms (n <= 12, p in {2,3,5}, k <= 3)", problems.is_empty(), &detail);
}

#[test]
fn engine_equivalence() {
    let corpus = selftest::engine_corpus();
    let mut problems = Vec::new();
    for (name, m) in &corpus {
        let a = cohom::cohomology(m).unwrap();
        let b = oracle::cocycle_oracle(m).unwrap();
        if a.dims != b.dims {
            problems.push(format!("{name}: {:?} vs {:?}", a.dims, b.dims));
        }
    }
    let groups: Vec<String> = selftest::small_groups().into_iter().map(|(n, _)| n).collect();
    let detail = if problems.is_empty() {
        format!("{} modules over {}", corpus.len(), groups.join(", "))
    } else {
        problems.join("; ")
    };
    verdict("engine equivalence (|G| <= 16)", problems.is_empty(), &detail);
}

#[test]
fn product_formula_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(PRODUCT_FORMULA_SEED);
    let mut failures = Vec::new();
    let mut pairs = 0;
    while pairs < PRODUCT_FORMULA_PAIRS {
        let d = rng.gen_range(-99i64..=99);
        let Ok(k) = NumberField::quadratic(d) else { continue };
        let num = rng.gen_range(1i64..=100_000) * if rng.gen_bool(0.5) { -1 } else { 1 };
        let den = rng.gen_range(1u64..=100_000);
        pairs += 1;
        if !product_formula_check(&k, num, den).unwrap() {
            failures.push(format!("{num}/{den} over Q(sqrt {d})"));
        }
    }
    let detail = if failures.is_empty() { format!("{pairs} pairs, seed {PRODUCT_FORMULA_SEED}") } else { failures.join("; ") };
    verdict("product formula", failures.is_empty(), &detail);
}

fn rational(c: &FormalCardinality) -> BigRational {
    let (n, d) = c.to_ratio();
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn contexts() -> Vec<(String, EulerContext)> {
    selftest::bundled_scenarios()
        .into_iter()
        .filter_map(|sc| {
            let b = sc.build().unwrap();
            b.module.map(|m| {
                (sc.id.clone(), EulerContext::new(b.places, m, sc.flags.quotient_is_full, sc.flags.faithful_quotient).unwrap())
            })
        })
        .collect()
}

#[test]
fn bound_dominance() {
    let mut n = 0;
    let mut problems = Vec::new();
    for (id, ctx) in contexts().into_iter().filter(|(_, c)| c.quotient_is_full) {
        let chi2 = cohom::chi2_finite(&ctx.module).unwrap();
        let bound = formulas::chi2_upper_bound(&ctx).unwrap();
        n += 1;
        if rational(&chi2) > rational(&bound) {
            problems.push(format!("{id}: {chi2} > {bound}"));
        }
    }
    let ok = problems.is_empty() && n > 0;
    verdict("bound dominance", ok, &if ok { format!("{n} full-quotient scenarios") } else { problems.join("; ") });
}

#[test]
fn reduction_identities() {
    let (mut a, mut b) = (0, 0);
    let mut problems = Vec::new();
    for (id, ctx) in contexts() {
        let p = ctx.module.p();
        if !ctx.places.contains_all_above(p).unwrap() {
            continue;
        }
        let tate = formulas::tate_rhs(&ctx).unwrap();
        if ctx.places.has_finite_places() {
            a += 1;
            let bound = formulas::chi2_upper_bound(&ctx).unwrap();
            if bound.exponents() != tate.exponents() {
                problems.push(format!("{id}: bound {bound} vs {tate}"));
            }
        }
        if ctx.field().is_totally_imaginary() {
            b += 1;
            let chi = formulas::etale_chi(&ctx).unwrap();
            if chi.exponents() != tate.exponents() {
                problems.push(format!("{id}: etale {chi} vs {tate}"));
            }
        }
    }
    let ok = problems.is_empty() && a > 0 && b > 0;
    let detail = if ok { format!("(a) {a} scenarios, (b) {b} scenarios") } else { format!("{problems:?} a={a} b={b}") };
    verdict("formula reduction identities", ok, &detail);
}

#[test]
fn dimension_defect() {
    let want = [("imaginary_quadratic_S3", -3), ("real_quadratic_S3", -3), ("rationals_n1", 0)];
    let reports: Vec<Report> = bundled("dimension_defect.json").iter().map(|s| report::evaluate(s).unwrap()).collect();
    let got: Vec<(String, i64)> =
        reports.iter().map(|r| (r.scenario_id.clone(), r.results.defect.as_ref().unwrap().defect)).collect();
    let ok = got.iter().map(|(i, d)| (i.as_str(), *d)).eq(want.iter().copied());
    verdict("dimension defect", ok, &format!("{got:?}"));
}

#[test]
fn attainment_not_reproducible() {
    // the enlarged set S ∪ S0 is existential; only the evaluator is checked
    let sc = selftest::bundled_scenarios().into_iter().find(|s| s.id == "sqrt-5_S3S5_Z3").unwrap();
    let r = report::evaluate(&sc).unwrap();
    let w = r.results.whatif.as_ref().expect("whatif output");
    let ok = w.added == vec![(7, 0), (7, 1)] && w.exact.is_none();
    println!(
        "NOTE attainment over an enlarged S is not reproducible; whatif evaluator ran, bound {} after adding {:?}",
        w.chi2_bound, w.added
    );
    assert!(ok, "{w:?}");
}
