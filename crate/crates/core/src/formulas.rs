//! Closed-form characteristics, bounds and presentation ledgers built from the
//! number field data and the cohomology of the supplied finite quotient.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cardinality::{FormalCardinality, ValueOrBound};
use crate::cohom::{self, CohomologyReport};
use crate::error::{Error, Result};
use crate::galmod::{adjoint_of, AdjointModule, ArchPlace, GaloisModule};
use crate::numfield::arith::ceil_div;
use crate::numfield::{bound_exponent_s_p, NumberField, PlaceSelector, PlaceSet};

/// Field, S, and a module for the quotient Γ of G_{K,S}.
#[derive(Debug, Clone)]
pub struct EulerContext {
    pub places: PlaceSet,
    pub module: GaloisModule,
    /// Γ = G_{K,S} is asserted, so finite-group cohomology is Galois cohomology.
    pub quotient_is_full: bool,
    /// Γ is asserted large enough that (M′)^Γ = (M′)^{G_K}.
    pub faithful_quotient: bool,
}

impl EulerContext {
    pub fn new(places: PlaceSet, module: GaloisModule, quotient_is_full: bool, faithful_quotient: bool) -> Result<Self> {
        check_places(places.field(), module.places())?;
        Ok(Self { places, module, quotient_is_full, faithful_quotient })
    }

    pub fn field(&self) -> &NumberField {
        self.places.field()
    }

    fn log_m(&self) -> u32 {
        self.module.module().log_order() as u32
    }
}

/// One entry per archimedean place, complex markers exactly r2 times.
pub fn check_places(field: &NumberField, places: &[ArchPlace]) -> Result<()> {
    let (r1, r2) = field.signature();
    let complex = places.iter().filter(|p| matches!(p, ArchPlace::Complex)).count();
    if places.len() != r1 + r2 || complex != r2 {
        return Err(Error::InvalidPlaces(format!(
            "expected {r1} real and {r2} complex places, got {} real and {complex} complex",
            places.len() - complex
        )));
    }
    Ok(())
}

/// |H⁰(G_v, M)| at an archimedean place.
fn arch_h0(ctx: &EulerContext, place: ArchPlace) -> Result<FormalCardinality> {
    match place {
        ArchPlace::Real(c) => ctx.module.fixed_points(&[c]),
        ArchPlace::Complex => Ok(ctx.module.order()),
    }
}

/// |Ĥ⁰(K_v, M)|: G_v ≅ C_2 at a real place, trivial at a complex one.
fn arch_tate_h0(ctx: &EulerContext, place: ArchPlace) -> Result<FormalCardinality> {
    match place {
        ArchPlace::Real(c) => ctx.module.tate_h0_involution(c),
        ArchPlace::Complex => Ok(FormalCardinality::one()),
    }
}

fn prod_tate_h0(ctx: &EulerContext) -> Result<FormalCardinality> {
    ctx.module.places().iter().map(|&pl| arch_tate_h0(ctx, pl)).product()
}

/// [M]^{-[K:Q]} · ∏_{v∈S_∞} |H⁰(G_v, M)|
pub fn tate_rhs(ctx: &EulerContext) -> Result<FormalCardinality> {
    let mut out = ctx.module.order().pow(-(ctx.field().degree() as i64));
    for &pl in ctx.module.places() {
        out = &out * &arch_h0(ctx, pl)?;
    }
    Ok(out)
}

/// 1 if S has a finite place, else |(M′)^Γ|.
pub fn epsilon_of(ctx: &EulerContext) -> Result<FormalCardinality> {
    if ctx.places.has_finite_places() {
        return Ok(FormalCardinality::one());
    }
    ctx.module.cartier_dual()?.invariants()
}

/// tate_rhs · ∏_{v∉S, v|p} 1/|[M]|_v · ε
pub fn chi2_upper_bound(ctx: &EulerContext) -> Result<FormalCardinality> {
    let s_p = bound_exponent_s_p(&ctx.places, ctx.module.p(), ctx.log_m())?;
    Ok(&(&tate_rhs(ctx)? * &s_p) * &epsilon_of(ctx)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactChi2 {
    pub lhs: FormalCardinality,
    pub rhs_bound: FormalCardinality,
    pub tight: bool,
    pub cohomology: CohomologyReport,
}

/// χ₂ of the quotient against the bound; needs Γ = G_{K,S}.
pub fn chi2_exact_finite(ctx: &EulerContext) -> Result<ExactChi2> {
    if !ctx.quotient_is_full {
        return Err(Error::QuotientNotFull("chi2_exact_finite"));
    }
    let cohomology = cohom::cohomology(&ctx.module)?;
    let lhs = cohomology.chi2();
    let rhs_bound = chi2_upper_bound(ctx)?;
    Ok(ExactChi2 { tight: lhs == rhs_bound, lhs, rhs_bound, cohomology })
}

/// Étale Euler characteristic of Spec O_{K,S}:
/// ∏_{v∉S finite} 1/|[M]|_v · ∏_{v∈S_∞} |H⁰(K_v,M)| / (|Ĥ⁰(K_v,M)|·|[M]|_v).
pub fn etale_chi(ctx: &EulerContext) -> Result<FormalCardinality> {
    // only places above p have |[M]|_v != 1
    let mut out = bound_exponent_s_p(&ctx.places, ctx.module.p(), ctx.log_m())?;
    let m = ctx.module.order();
    for &pl in ctx.module.places() {
        let abs_m = match pl {
            ArchPlace::Real(_) => m.clone(),
            ArchPlace::Complex => m.pow(2),
        };
        out = &out * &(&arch_h0(ctx, pl)? / &(&arch_tate_h0(ctx, pl)? * &abs_m));
    }
    Ok(out)
}

/// Cardinalities of H^i_et(Spec O_{K,S}, M) for i = 0..3; all others vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaleCards {
    pub h0: ValueOrBound,
    pub h1: ValueOrBound,
    pub h2: ValueOrBound,
    pub h3: ValueOrBound,
}

impl EtaleCards {
    pub fn degree(&self, i: usize) -> ValueOrBound {
        match i {
            0 => self.h0.clone(),
            1 => self.h1.clone(),
            2 => self.h2.clone(),
            3 => self.h3.clone(),
            _ => ValueOrBound::Exact { value: FormalCardinality::one() },
        }
    }
}

pub fn etale_cards(ctx: &EulerContext) -> Result<EtaleCards> {
    if !ctx.quotient_is_full {
        return Err(Error::QuotientNotFull("etale_cards"));
    }
    let coh = cohom::cohomology(&ctx.module)?;
    let [h0, h1, _] = coh.orders.clone();
    let tate_prod = prod_tate_h0(ctx)?;
    let theta = if ctx.places.has_finite_places() {
        ValueOrBound::Exact { value: tate_prod.clone() }
    } else {
        let dual_inv = ctx.module.cartier_dual()?.invariants()?;
        if ctx.module.p() != 2 || ctx.field().is_totally_imaginary() {
            ValueOrBound::UpperBound { value: dual_inv }
        } else {
            ValueOrBound::interval(FormalCardinality::one(), &dual_inv * &tate_prod)
        }
    };
    let s_p = bound_exponent_s_p(&ctx.places, ctx.module.p(), ctx.log_m())?;
    let factor = &(&(&tate_rhs(ctx)? * &s_p) * &(&h1 / &h0)) / &tate_prod;
    Ok(EtaleCards {
        h0: ValueOrBound::Exact { value: h0 },
        h1: ValueOrBound::Exact { value: h1 },
        h2: theta.scale(&factor),
        h3: theta,
    })
}

/// ⌈(h2 - h1)/dim M⌉ + d - ξ_M, with ξ_M = 0 exactly for the trivial module.
pub fn lubotzky_r(d: u64, h1: u64, h2: u64, dim_m: u64, trivial: bool) -> i64 {
    assert!(dim_m >= 1, "simple modules are nonzero");
    let xi = if trivial { 0 } else { 1 };
    ceil_div(h2 as i64 - h1 as i64, dim_m as i64) + d as i64 - xi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    MuPNontrivial,
    NontrivialNotMuP,
    TrivialSFiniteEmpty,
    TrivialSFiniteNonempty,
}

impl FromStr for Classification {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu_p_nontrivial" => Ok(Self::MuPNontrivial),
            "nontrivial_not_mu_p" => Ok(Self::NontrivialNotMuP),
            "trivial_S_finite_empty" | "trivial_s_finite_empty" => Ok(Self::TrivialSFiniteEmpty),
            "trivial_S_finite_nonempty" | "trivial_s_finite_nonempty" => Ok(Self::TrivialSFiniteNonempty),
            _ => Err(Error::UnknownClassification(s.to_string())),
        }
    }
}

/// Upper bound on r(G_{K,S}, p, M) - d for a module of the given kind.
pub fn case_bound(field: &NumberField, class: Classification, mu_p_dim: u32) -> i64 {
    let r = field.archimedean_count() as i64;
    let r2 = field.complex_count() as i64;
    match class {
        Classification::MuPNontrivial => -r2 - 1,
        Classification::NontrivialNotMuP => r - 1,
        Classification::TrivialSFiniteEmpty => r + mu_p_dim as i64 - 1,
        Classification::TrivialSFiniteNonempty => r - 1,
    }
}

/// Where a ledger row's cohomology dimensions come from.
#[derive(Debug, Clone)]
pub enum RowSource {
    /// Computed by the cohomology engine; the module must be elementary abelian
    /// and Γ must be the full group.
    Module(Box<GaloisModule>),
    Dims { dim: u64, h1: u64, h2: u64, trivial: bool },
}

#[derive(Debug, Clone)]
pub struct RowInput {
    pub id: String,
    pub p: u64,
    pub source: RowSource,
    /// M = μ_p as a Galois module.
    pub is_mu_p: bool,
    pub mu_p_dim: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub id: String,
    pub p: u64,
    pub dim: u64,
    pub h1: u64,
    pub h2: u64,
    pub trivial: bool,
    pub xi: u8,
    pub r: i64,
    pub exact: bool,
    pub classification: Classification,
    pub case_bound: i64,
    pub within_case_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationLedger {
    pub rows: Vec<LedgerRow>,
    pub d: u64,
    pub sup_r: i64,
    pub sup_minus_d: i64,
    pub gamma: u8,
    pub rhs_bound: i64,
    /// (generators, relations) of the presentation
    pub presentation: (u64, i64),
    pub violation: bool,
}

fn default_mu_p_dim(p: u64, module: Option<&GaloisModule>) -> u32 {
    if p == 2 {
        return 1;
    }
    // a cyclotomic character that is nontrivial mod p certifies μ_p ⊄ K
    match module.and_then(|m| m.cyclo_char()) {
        Some(chi) if chi.iter().any(|&x| x % p != 1) => 0,
        _ => 1,
    }
}

pub fn presentation_bounds(places: &PlaceSet, d: u64, rows: &[RowInput], quotient_is_full: bool) -> Result<PresentationLedger> {
    if rows.is_empty() {
        return Err(Error::EmptyLedger);
    }
    let field = places.field();
    let s_finite = places.has_finite_places();
    let mut out_rows = Vec::with_capacity(rows.len());
    for row in rows {
        let (dim, h1, h2, trivial, exact, module) = match &row.source {
            RowSource::Module(m) => {
                if !quotient_is_full {
                    return Err(Error::QuotientNotFull("ledger rows computed from modules"));
                }
                if m.p() != row.p {
                    return Err(Error::InvalidModule(format!("row {} has a module over a different prime", row.id)));
                }
                let coh = cohom::cohomology(m)?;
                let dims = coh.dims.ok_or(Error::NotElementaryAbelian)?;
                (m.module().rank() as u64, dims[1], dims[2], m.is_trivial_action(), true, Some(m.as_ref()))
            }
            RowSource::Dims { dim, h1, h2, trivial } => {
                if *dim == 0 {
                    return Err(Error::InvalidModule(format!("row {} has dimension 0", row.id)));
                }
                (*dim, *h1, *h2, *trivial, false, None)
            }
        };
        let classification = match (trivial, row.is_mu_p, s_finite) {
            (true, _, false) => Classification::TrivialSFiniteEmpty,
            (true, _, true) => Classification::TrivialSFiniteNonempty,
            (false, true, _) => Classification::MuPNontrivial,
            (false, false, _) => Classification::NontrivialNotMuP,
        };
        let mu_p_dim = row.mu_p_dim.unwrap_or_else(|| default_mu_p_dim(row.p, module));
        let bound = case_bound(field, classification, mu_p_dim);
        let r = lubotzky_r(d, h1, h2, dim, trivial);
        out_rows.push(LedgerRow {
            id: row.id.clone(),
            p: row.p,
            dim,
            h1,
            h2,
            trivial,
            xi: u8::from(!trivial),
            r,
            exact,
            classification,
            case_bound: bound,
            within_case_bound: r - d as i64 <= bound,
        });
    }
    let sup_r = out_rows.iter().map(|r| r.r).max().expect("nonempty");
    let gamma = u8::from(s_finite);
    let rhs_bound = field.archimedean_count() as i64 - gamma as i64;
    let sup_minus_d = sup_r - d as i64;
    let violation = sup_minus_d > rhs_bound || out_rows.iter().any(|r| r.exact && !r.within_case_bound);
    Ok(PresentationLedger {
        rows: out_rows,
        d,
        sup_r,
        sup_minus_d,
        gamma,
        rhs_bound,
        presentation: (d, field.archimedean_count() as i64 + d as i64 - gamma as i64),
        violation,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectReport {
    pub n: usize,
    /// dim H⁰(Γ, ad) from the representation
    pub h0_computed: u64,
    /// value used in the formula (1 when absolute irreducibility is asserted)
    pub h0_used: u64,
    /// dim H⁰(G_v, ad) per archimedean place
    pub archimedean: Vec<u64>,
    pub defect: i64,
    pub irreducibility_mismatch: bool,
}

/// h⁰(ad) - Σ_{v∈S_∞} dim H⁰(G_v, ad).
pub fn dimension_defect(
    field: &NumberField,
    rep: Option<&AdjointModule>,
    places: &[ArchPlace],
    absolutely_irreducible: bool,
) -> Result<DefectReport> {
    let rep = rep.ok_or(Error::MissingRepresentation)?;
    check_places(field, places)?;
    let n = rep.n();
    let ad = adjoint_of(rep, places.to_vec())?;
    let h0_computed = ad.invariants()?.exponent(rep.p()) as u64;
    let h0_used = if absolutely_irreducible { 1 } else { h0_computed };
    let archimedean: Vec<u64> = places
        .iter()
        .map(|pl| match *pl {
            ArchPlace::Complex => (n * n) as u64,
            ArchPlace::Real(c) => rep.centralizer_dim(c) as u64,
        })
        .collect();
    let defect = h0_used as i64 - archimedean.iter().sum::<u64>() as i64;
    Ok(DefectReport {
        n,
        h0_computed,
        h0_used,
        archimedean,
        defect,
        irreducibility_mismatch: absolutely_irreducible && h0_computed != 1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatIf {
    pub added: Vec<(u64, usize)>,
    pub chi2_bound: FormalCardinality,
    pub exact: Option<ExactChi2>,
}

/// Re-evaluates the bound (and, if Γ is asserted to be the full group for the
/// enlarged set, the exact value) after adjoining places to S. A replacement
/// module stands for a user-supplied larger quotient.
pub fn whatif_enlarge(
    ctx: &EulerContext,
    extra: &[PlaceSelector],
    module: Option<GaloisModule>,
    quotient_is_full: bool,
) -> Result<WhatIf> {
    let places = ctx.places.enlarged(extra)?;
    let added = places
        .finite_places()
        .iter()
        .filter(|fp| !ctx.places.contains(**fp))
        .map(|fp| (fp.p, fp.factor))
        .collect();
    let module = module.unwrap_or_else(|| ctx.module.clone());
    let new_ctx = EulerContext::new(places, module, quotient_is_full, ctx.faithful_quotient)?;
    let chi2_bound = chi2_upper_bound(&new_ctx)?;
    let exact = if quotient_is_full { Some(chi2_exact_finite(&new_ctx)?) } else { None };
    Ok(WhatIf { added, chi2_bound, exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceiling_semantics() {
        assert_eq!(lubotzky_r(2, 2, 3, 1, true), 3);
        assert_eq!(lubotzky_r(1, 1, 1, 1, true), 1);
        assert_eq!(lubotzky_r(2, 0, 0, 2, false), 1);
        // ⌈-3/2⌉ = -1
        assert_eq!(lubotzky_r(0, 3, 0, 2, true), -1);
    }

    #[test]
    fn case_bounds_for_small_fields() {
        let k = NumberField::new(vec![5, 0, 1]).unwrap();
        assert_eq!(case_bound(&k, Classification::MuPNontrivial, 0), -2);
        assert_eq!(case_bound(&k, Classification::TrivialSFiniteEmpty, 1), 1);
        assert_eq!(case_bound(&NumberField::rationals(), Classification::TrivialSFiniteNonempty, 1), 0);
        assert!(matches!("bogus".parse::<Classification>(), Err(Error::UnknownClassification(_))));
    }
}
