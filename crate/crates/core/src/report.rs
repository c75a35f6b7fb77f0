//! Scenario evaluation into JSON reports, and their text rendering.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::cardinality::FormalCardinality;
use crate::cohom::{self, oracle, CohomologyReport};
use crate::error::{Error, Result};
use crate::formulas::{self, DefectReport, EtaleCards, EulerContext, ExactChi2, PresentationLedger, RowInput, RowSource, WhatIf};
use crate::galmod::ArchPlace;
use crate::scenario::{self, Built, Claims, LedgerSpec, Output, Scenario, WhatIfSpec};

/// Groups at most this large also get the prime-field oracle.
pub const ORACLE_GROUP_LIMIT: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct FieldSummary {
    pub poly: Vec<i128>,
    pub signature: (usize, usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct PlaceSummary {
    pub p: u64,
    pub factor: usize,
    pub e: u32,
    pub f: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuleSummary {
    pub p: u64,
    pub exponents: Vec<u32>,
    pub group_order: usize,
    pub trivial_action: bool,
    pub archimedean: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Results {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tate_rhs: Option<FormalCardinality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi2_bound: Option<FormalCardinality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi2_exact: Option<FormalCardinality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tight: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub etale_chi: Option<FormalCardinality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub etale_cards: Option<EtaleCards>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ledger: Option<PresentationLedger>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<DefectReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub whatif: Option<WhatIf>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cohomology: Vec<CohomologyReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimCheck {
    pub name: String,
    pub claimed: Value,
    pub computed: Value,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario_id: String,
    pub field: FieldSummary,
    #[serde(rename = "S")]
    pub s: Vec<PlaceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub module_summary: Option<ModuleSummary>,
    pub results: Results,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub claims_check: Vec<ClaimCheck>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn has_discrepancy(&self) -> bool {
        self.warnings.iter().any(|w| w.starts_with("DISCREPANCY"))
    }
}

fn place_label(group: Option<&crate::fingroup::FiniteGroup>, pl: ArchPlace) -> String {
    match (pl, group) {
        (ArchPlace::Complex, _) => "complex".into(),
        (ArchPlace::Real(c), Some(g)) => format!("real:{}", g.label(c)),
        (ArchPlace::Real(c), None) => format!("real:{c}"),
    }
}

/// Both engines on the same module; they must agree when both run.
fn cohomology_both(built: &Built) -> Result<Vec<CohomologyReport>> {
    let m = built.module.as_ref().expect("checked by build");
    let snf = cohom::cohomology(m)?;
    let mut out = vec![snf.clone()];
    if m.module().is_elementary() && m.group().order() <= ORACLE_GROUP_LIMIT {
        let fp = oracle::cocycle_oracle(m)?;
        if fp.dims != snf.dims {
            return Err(Error::Consistency(format!("engines disagree: snf {:?}, fp-linear {:?}", snf.dims, fp.dims)));
        }
        out.push(fp);
    }
    Ok(out)
}

fn ledger(sc: &Scenario, built: &Built, spec: &LedgerSpec) -> Result<PresentationLedger> {
    let group = built.group.as_ref().expect("checked by build");
    let d = match spec.d {
        Some(d) => d,
        None => group.minimal_generators()? as u64,
    };
    let rows = spec
        .rows
        .iter()
        .map(|r| {
            let source = match (&r.module, r.dim, r.h1, r.h2, r.trivial) {
                (Some(m), None, None, None, None) => {
                    RowSource::Module(Box::new(scenario::build_module(group, m, built.archimedean.clone())?))
                }
                (None, Some(dim), Some(h1), Some(h2), Some(trivial)) => RowSource::Dims { dim, h1, h2, trivial },
                _ => return Err(Error::Schema(format!("ledger row {} needs either a module or dim/h1/h2/trivial", r.id))),
            };
            let p = match (&source, r.p) {
                (RowSource::Module(m), _) => m.p(),
                (_, Some(p)) => p,
                _ => return Err(Error::Schema(format!("ledger row {} needs p", r.id))),
            };
            Ok(RowInput { id: r.id.clone(), p, source, is_mu_p: r.is_mu_p, mu_p_dim: r.mu_p_dim })
        })
        .collect::<Result<Vec<_>>>()?;
    formulas::presentation_bounds(&built.places, d, &rows, sc.flags.quotient_is_full)
}

fn whatif(ctx: &EulerContext, built: &Built, spec: &WhatIfSpec) -> Result<WhatIf> {
    let module = match (&spec.group, &spec.module) {
        (None, None) => None,
        (group_spec, Some(mspec)) => {
            let group = match group_spec {
                Some(g) => std::sync::Arc::new(scenario::build_group(g)?),
                None => built.group.clone().expect("checked by build"),
            };
            let arch = match &spec.archimedean {
                Some(a) => scenario::build_archimedean(&group, a)?,
                None if group_spec.is_none() => built.archimedean.clone(),
                None => return Err(Error::Schema("whatif with a new group needs archimedean data".into())),
            };
            Some(scenario::build_module(&group, mspec, arch)?)
        }
        (Some(_), None) => return Err(Error::Schema("whatif with a new group needs a module".into())),
    };
    formulas::whatif_enlarge(ctx, &scenario::selectors(&spec.add), module, spec.quotient_is_full)
}

fn check(out: &mut Vec<ClaimCheck>, name: &str, claimed: Value, computed: Option<Value>) {
    let computed = computed.unwrap_or(Value::Null);
    out.push(ClaimCheck { name: name.into(), agrees: claimed == computed, claimed, computed });
}

fn card_value(c: &FormalCardinality) -> Value {
    serde_json::to_value(c).expect("serializable")
}

fn claims_check(claims: &Claims, results: &Results) -> Vec<ClaimCheck> {
    let mut out = Vec::new();
    let claim_card = |m: &std::collections::BTreeMap<u64, i64>| card_value(&FormalCardinality::from_exponents(m.iter().map(|(&p, &e)| (p, e))));
    if let Some(c) = &claims.chi2 {
        check(&mut out, "chi2", claim_card(c), results.chi2_exact.as_ref().map(card_value));
    }
    if let Some(c) = &claims.chi2_bound {
        check(&mut out, "chi2_bound", claim_card(c), results.chi2_bound.as_ref().map(card_value));
    }
    if let Some(t) = claims.tight {
        check(&mut out, "tight", Value::from(t), results.tight.map(Value::from));
    }
    if let Some(h) = claims.h2_dim {
        let computed = results.cohomology.first().and_then(|r| r.dims).map(|d| Value::from(d[2]));
        check(&mut out, "h2_dim", Value::from(h), computed);
    }
    if let Some(r) = claims.r_hat_minus_d {
        check(&mut out, "r_hat_minus_d", Value::from(r), results.ledger.as_ref().map(|l| Value::from(l.sup_minus_d)));
    }
    if let Some(r) = claims.rhs_bound {
        check(&mut out, "rhs_bound", Value::from(r), results.ledger.as_ref().map(|l| Value::from(l.rhs_bound)));
    }
    if let Some(d) = claims.defect {
        check(&mut out, "defect", Value::from(d), results.defect.as_ref().map(|r| Value::from(r.defect)));
    }
    out
}

/// Evaluates one scenario. Errors from validating the input are schema errors.
pub fn evaluate(sc: &Scenario) -> Result<Report> {
    let built = sc.build()?;
    let mut warnings = Vec::new();
    for sp in built.places.cached_splittings() {
        if sp.index_warning {
            warnings.push(format!(
                "index_warning: splitting above {} computed in Z[x]/(f), which is not maximal at {}",
                sp.rational_prime, sp.rational_prime
            ));
        }
    }
    let mut s = Vec::new();
    for fp in built.places.finite_places() {
        let lf = built.places.local_data(fp.p)?.factors[fp.factor];
        s.push(PlaceSummary { p: fp.p, factor: fp.factor, e: lf.e, f: lf.f });
    }
    let group = built.group.as_deref();
    let module_summary = built.module.as_ref().map(|m| ModuleSummary {
        p: m.p(),
        exponents: m.module().exponents().to_vec(),
        group_order: m.group().order(),
        trivial_action: m.is_trivial_action(),
        archimedean: m.places().iter().map(|&pl| place_label(group, pl)).collect(),
    });

    let mut results = Results::default();
    let ctx = match &built.module {
        Some(m) => Some(EulerContext::new(
            built.places.clone(),
            m.clone(),
            sc.flags.quotient_is_full,
            sc.flags.faithful_quotient,
        )?),
        None => None,
    };
    let want = |o: Output| sc.outputs.contains(&o);
    if let Some(ctx) = &ctx {
        if want(Output::Tate) {
            results.tate_rhs = Some(formulas::tate_rhs(ctx)?);
        }
        if want(Output::Bound) || want(Output::Exact) {
            results.chi2_bound = Some(formulas::chi2_upper_bound(ctx)?);
            if !ctx.places.has_finite_places() && !ctx.faithful_quotient {
                warnings.push("epsilon uses fixed points under the supplied quotient; faithful_quotient is not asserted".into());
            }
        }
        if want(Output::Exact) {
            let ExactChi2 { lhs, rhs_bound, tight, .. } = formulas::chi2_exact_finite(ctx)?;
            results.chi2_exact = Some(lhs);
            results.chi2_bound = Some(rhs_bound);
            results.tight = Some(tight);
            results.cohomology = cohomology_both(&built)?;
        }
        if want(Output::Etale) {
            results.etale_chi = Some(formulas::etale_chi(ctx)?);
            if ctx.quotient_is_full {
                results.etale_cards = Some(formulas::etale_cards(ctx)?);
            }
        }
        if want(Output::Whatif) {
            results.whatif = Some(whatif(ctx, &built, sc.whatif.as_ref().expect("checked by build"))?);
            warnings.push("whatif: enlarged-S values are evaluations, not a certificate of attainment".into());
        }
    }
    if want(Output::Ledger) {
        let l = ledger(sc, &built, sc.ledger.as_ref().expect("checked by build"))?;
        if l.violation {
            warnings.push(format!("ledger: sup r - d = {} exceeds a bound (rhs {})", l.sup_minus_d, l.rhs_bound));
        }
        results.ledger = Some(l);
    }
    if want(Output::Defect) {
        let spec = sc.adjoint.as_ref().expect("checked by build");
        let d = formulas::dimension_defect(&built.field, built.adjoint.as_ref(), &built.archimedean, spec.absolutely_irreducible)?;
        if d.irreducibility_mismatch {
            warnings.push(format!("defect: absolute irreducibility asserted but h0(ad) = {}", d.h0_computed));
        }
        results.defect = Some(d);
    }

    let claims_check = sc.claims.as_ref().map(|c| claims_check(c, &results)).unwrap_or_default();
    for c in claims_check.iter().filter(|c| !c.agrees) {
        warnings.push(format!("DISCREPANCY: {} claimed {} computed {}", c.name, c.claimed, c.computed));
    }
    Ok(Report {
        scenario_id: sc.id.clone(),
        field: FieldSummary { poly: built.field.min_poly().to_vec(), signature: built.field.signature() },
        s,
        module_summary,
        results,
        claims_check,
        warnings,
    })
}

/// Scenario outcome as emitted by the CLI.
#[derive(Debug, Clone)]
pub enum Outcome {
    Ok(Box<Report>),
    Failed { scenario_id: String, error: Error },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Ok(r) if r.has_discrepancy() => 4,
            Outcome::Ok(_) => 0,
            Outcome::Failed { error, .. } if error.is_schema() => 2,
            Outcome::Failed { .. } => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Outcome::Ok(r) => serde_json::to_value(r).expect("serializable"),
            Outcome::Failed { scenario_id, error } => serde_json::json!({
                "scenario_id": scenario_id,
                "error": {
                    "kind": if error.is_schema() { "schema" } else { "engine" },
                    "message": error.to_string(),
                },
            }),
        }
    }
}

/// Evaluates scenarios concurrently; output order equals input order.
pub fn run_batch(scenarios: &[Scenario]) -> Vec<Outcome> {
    scenarios
        .par_iter()
        .map(|sc| match evaluate(sc) {
            Ok(r) => Outcome::Ok(Box::new(r)),
            Err(error) => Outcome::Failed { scenario_id: sc.id.clone(), error },
        })
        .collect()
}

/// Worst exit code: schema 2 beats engine 3 beats discrepancy 4 beats 0.
pub fn batch_exit_code(outcomes: &[Outcome]) -> i32 {
    let codes: Vec<i32> = outcomes.iter().map(Outcome::exit_code).collect();
    [2, 3, 4].into_iter().find(|c| codes.contains(c)).unwrap_or(0)
}

fn is_cardinality(map: &serde_json::Map<String, Value>) -> bool {
    map.iter().all(|(k, v)| k.parse::<u64>().is_ok() && v.is_i64())
}

fn render_cardinality(map: &serde_json::Map<String, Value>) -> String {
    if map.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> = map.iter().map(|(p, e)| if e == 1 { p.clone() } else { format!("{p}^{e}") }).collect();
    parts.join(" * ")
}

fn render_inline(v: &Value) -> Option<String> {
    match v {
        Value::Object(m) if is_cardinality(m) => Some(render_cardinality(m)),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", a.iter().map(|x| render_inline(x).expect("scalar")).collect::<Vec<_>>().join(", ")))
        }
        Value::Object(_) | Value::Array(_) => None,
        Value::String(s) => Some(s.clone()),
        other => Some(other.to_string()),
    }
}

fn render_into(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = render_inline(v) {
        out.push_str(&format!("{pad}{key}: {s}\n"));
        return;
    }
    out.push_str(&format!("{pad}{key}:\n"));
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                render_into(out, k, x, depth + 1);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                render_into(out, &format!("[{i}]"), x, depth + 1);
            }
        }
        _ => unreachable!(),
    }
}

/// Text form of a JSON report; cardinalities are printed as prime powers.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                render_into(&mut out, k, x, 0);
            }
        }
        other => render_into(&mut out, "value", other, 0),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinalities_render_as_prime_powers() {
        let v = serde_json::json!({"chi2": {"2": 2, "3": -1}, "one": {}, "tight": false});
        let text = render_text(&v);
        assert!(text.contains("chi2: 2^2 * 3^-1"));
        assert!(text.contains("one: 1"));
        assert!(text.contains("tight: false"));
    }

    #[test]
    fn exit_code_priority() {
        let failed = |e: Error| Outcome::Failed { scenario_id: "x".into(), error: e };
        let outs = vec![failed(Error::Consistency("x".into())), failed(Error::Schema("y".into()))];
        assert_eq!(batch_exit_code(&outs), 2);
        assert_eq!(batch_exit_code(&outs[..1]), 3);
        assert_eq!(batch_exit_code(&[]), 0);
    }
}
