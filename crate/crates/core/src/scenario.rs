//! Scenario files: JSON descriptions of (K, S, Γ, M) plus requested outputs,
//! and their conversion into validated engine inputs.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingroup::{parse_permutation, FiniteGroup};
use crate::galmod::{AdjointModule, ArchPlace, FiniteAbelianPGroup, GaloisModule};
use crate::numfield::{LocalFactor, NumberField, PlaceSelector, PlaceSet, PrimeSplitting};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub field: FieldSpec,
    #[serde(default, rename = "S")]
    pub s: Vec<SelectorSpec>,
    #[serde(default)]
    pub splitting_overrides: Vec<SplittingSpec>,
    #[serde(default)]
    pub group: Option<GroupSpec>,
    /// One entry per archimedean place: "complex" or the label of the
    /// element of Γ designated as complex conjugation.
    #[serde(default)]
    pub archimedean: Vec<String>,
    #[serde(default)]
    pub module: Option<ModuleSpec>,
    #[serde(default)]
    pub flags: Flags,
    pub outputs: Vec<Output>,
    #[serde(default)]
    pub ledger: Option<LedgerSpec>,
    #[serde(default)]
    pub adjoint: Option<AdjointSpec>,
    #[serde(default)]
    pub whatif: Option<WhatIfSpec>,
    #[serde(default)]
    pub claims: Option<Claims>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Builtin { builtin: String },
    Poly {
        /// Integer coefficients, constant term first.
        poly: Vec<serde_json::Number>,
        #[serde(default)]
        signature: Option<(usize, usize)>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectorSpec {
    pub prime: u64,
    #[serde(default)]
    pub factors: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingSpec {
    pub prime: u64,
    pub factors: Vec<LocalFactor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Builtin { builtin: String },
    Permutations { permutations: Vec<String> },
    Table {
        table: Vec<Vec<usize>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CycloSpec {
    /// "trivial"
    Preset(String),
    Images(BTreeMap<String, i64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub p: u64,
    pub exponents: Vec<u32>,
    /// Images of generating elements; unlisted elements are determined by them.
    #[serde(default)]
    pub action: BTreeMap<String, Vec<Vec<i64>>>,
    #[serde(default)]
    pub cyclo_char: Option<CycloSpec>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default)]
    pub quotient_is_full: bool,
    #[serde(default)]
    pub faithful_quotient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Tate,
    Bound,
    Exact,
    Etale,
    Ledger,
    Defect,
    Whatif,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerSpec {
    /// d(G); defaults to the minimal generator count of Γ.
    #[serde(default)]
    pub d: Option<u64>,
    pub rows: Vec<LedgerRowSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerRowSpec {
    pub id: String,
    #[serde(default)]
    pub module: Option<ModuleSpec>,
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub dim: Option<u64>,
    #[serde(default)]
    pub h1: Option<u64>,
    #[serde(default)]
    pub h2: Option<u64>,
    #[serde(default)]
    pub trivial: Option<bool>,
    #[serde(default)]
    pub is_mu_p: bool,
    #[serde(default)]
    pub mu_p_dim: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjointSpec {
    pub p: u64,
    pub n: usize,
    pub rep: BTreeMap<String, Vec<Vec<i64>>>,
    #[serde(default)]
    pub absolutely_irreducible: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfSpec {
    pub add: Vec<SelectorSpec>,
    #[serde(default)]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub archimedean: Option<Vec<String>>,
    #[serde(default)]
    pub module: Option<ModuleSpec>,
    #[serde(default)]
    pub quotient_is_full: bool,
}

/// Values asserted by an external source, compared against computed ones.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claims {
    #[serde(default)]
    pub chi2: Option<BTreeMap<u64, i64>>,
    #[serde(default)]
    pub chi2_bound: Option<BTreeMap<u64, i64>>,
    #[serde(default)]
    pub tight: Option<bool>,
    #[serde(default)]
    pub h2_dim: Option<u64>,
    #[serde(default)]
    pub r_hat_minus_d: Option<i64>,
    #[serde(default)]
    pub rhs_bound: Option<i64>,
    #[serde(default)]
    pub defect: Option<i64>,
}

pub fn parse_file(text: &str) -> Result<ScenarioFile> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if file.scenarios.is_empty() {
        return Err(Error::Schema("scenario list is empty".into()));
    }
    Ok(file)
}

pub fn build_field(spec: &FieldSpec) -> Result<NumberField> {
    match spec {
        FieldSpec::Builtin { builtin } => {
            if builtin == "Q" {
                return Ok(NumberField::rationals());
            }
            let d = builtin
                .strip_prefix("Q(sqrt,")
                .and_then(|s| s.strip_suffix(')'))
                .and_then(|s| s.trim().parse::<i64>().ok())
                .ok_or_else(|| Error::Schema(format!("unknown builtin field {builtin:?}")))?;
            NumberField::quadratic(d)
        }
        FieldSpec::Poly { poly, signature } => {
            let poly: Vec<i128> = poly
                .iter()
                .map(|c| {
                    c.as_i64()
                        .map(i128::from)
                        .or_else(|| c.as_u64().map(i128::from))
                        .ok_or_else(|| Error::PolynomialTooLarge(format!("coefficient {c} is not an integer in range")))
                })
                .collect::<Result<_>>()?;
            match signature {
                None => NumberField::new(poly),
                Some((r1, r2)) => NumberField::with_signature(poly, *r1, *r2),
            }
        }
    }
}

pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup> {
    match spec {
        GroupSpec::Builtin { builtin } => FiniteGroup::builtin(builtin),
        GroupSpec::Permutations { permutations } => {
            let gens: Vec<Vec<u32>> = permutations.iter().map(|s| parse_permutation(s)).collect::<Result<_>>()?;
            FiniteGroup::from_permutations(&gens)
        }
        GroupSpec::Table { table, labels } => FiniteGroup::from_table(table.clone(), labels.clone()),
    }
}

pub fn build_archimedean(group: &FiniteGroup, specs: &[String]) -> Result<Vec<ArchPlace>> {
    specs
        .iter()
        .map(|s| if s == "complex" { Ok(ArchPlace::Complex) } else { group.element(s).map(ArchPlace::Real) })
        .collect()
}

fn images(group: &FiniteGroup, map: &BTreeMap<String, Vec<Vec<i64>>>) -> Result<Vec<(usize, Vec<Vec<i64>>)>> {
    map.iter().map(|(k, v)| Ok((group.element(k)?, v.clone()))).collect()
}

pub fn build_module(group: &Arc<FiniteGroup>, spec: &ModuleSpec, places: Vec<ArchPlace>) -> Result<GaloisModule> {
    let module = FiniteAbelianPGroup::new(spec.p, spec.exponents.clone())?;
    let k = module.rank();
    // an empty action map means Γ acts trivially
    let action = if spec.action.is_empty() {
        let id: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
        (0..group.order()).map(|g| (g, id.clone())).collect()
    } else {
        images(group, &spec.action)?
    };
    let cyclo: Option<Vec<(usize, i64)>> = match &spec.cyclo_char {
        None => None,
        Some(CycloSpec::Preset(s)) if s == "trivial" => Some((0..group.order()).map(|g| (g, 1)).collect()),
        Some(CycloSpec::Preset(s)) => return Err(Error::Schema(format!("unknown cyclotomic character preset {s:?}"))),
        Some(CycloSpec::Images(m)) => Some(m.iter().map(|(k, &v)| Ok((group.element(k)?, v))).collect::<Result<_>>()?),
    };
    GaloisModule::from_generator_images(group.clone(), module, &action, cyclo.as_deref(), places)
}

pub fn selectors(specs: &[SelectorSpec]) -> Vec<PlaceSelector> {
    specs.iter().map(|s| PlaceSelector { prime: s.prime, factors: s.factors.clone() }).collect()
}

pub fn build_adjoint(group: &Arc<FiniteGroup>, spec: &AdjointSpec) -> Result<AdjointModule> {
    AdjointModule::from_generator_images(group.clone(), spec.p, spec.n, &images(group, &spec.rep)?)
}

/// Validated engine inputs for one scenario.
#[derive(Debug, Clone)]
pub struct Built {
    pub field: NumberField,
    pub places: PlaceSet,
    pub group: Option<Arc<FiniteGroup>>,
    pub archimedean: Vec<ArchPlace>,
    pub module: Option<GaloisModule>,
    pub adjoint: Option<AdjointModule>,
}

impl Scenario {
    pub fn build(&self) -> Result<Built> {
        let field = build_field(&self.field)?;
        let mut overrides = BTreeMap::new();
        for o in &self.splitting_overrides {
            overrides.insert(o.prime, PrimeSplitting::explicit(&field, o.prime, o.factors.clone())?);
        }
        let places = PlaceSet::new(&field, &selectors(&self.s), &overrides)?;
        let group = self.group.as_ref().map(build_group).transpose()?.map(Arc::new);
        let archimedean = match &group {
            Some(g) => build_archimedean(g, &self.archimedean)?,
            None if self.archimedean.iter().all(|s| s == "complex") => vec![ArchPlace::Complex; self.archimedean.len()],
            None => return Err(Error::Schema("real places need a group".into())),
        };
        crate::formulas::check_places(&field, &archimedean)?;
        let need_group = |what: &str| Error::Schema(format!("{what} needs a group"));
        let module = match &self.module {
            Some(spec) => Some(build_module(group.as_ref().ok_or_else(|| need_group("module"))?, spec, archimedean.clone())?),
            None => None,
        };
        let adjoint = match &self.adjoint {
            Some(spec) => Some(build_adjoint(group.as_ref().ok_or_else(|| need_group("adjoint"))?, spec)?),
            None => None,
        };
        for out in &self.outputs {
            let missing = match out {
                Output::Tate | Output::Bound | Output::Exact | Output::Etale | Output::Whatif => module.is_none(),
                Output::Ledger => self.ledger.is_none() || group.is_none(),
                Output::Defect => adjoint.is_none(),
            };
            if missing {
                return Err(Error::Schema(format!("output {out:?} requested without the data it needs")));
            }
        }
        if self.outputs.contains(&Output::Whatif) && self.whatif.is_none() {
            return Err(Error::Schema("output Whatif requested without a whatif block".into()));
        }
        Ok(Built { field, places, group, archimedean, module, adjoint })
    }
}
