//! Number fields given by a monic defining polynomial, with the local data the
//! characteristic formulas consume: signature, splitting of rational primes,
//! normalized absolute values.

pub mod arith;
pub mod modp;
pub mod poly;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cardinality::FormalCardinality;
use crate::error::{Error, Result};
use modp::{factor, FpPoly};

pub const MAX_DEGREE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberField {
    /// Integer coefficients, constant term first.
    min_poly: Vec<i128>,
    r1: usize,
    r2: usize,
    #[serde(skip)]
    disc: BigInt,
}

/// Real and complex place counts of `min_poly`.
pub fn signature(min_poly: &[i128]) -> Result<(usize, usize)> {
    if min_poly.len() < 2 || *min_poly.last().unwrap() != 1 {
        return Err(Error::NonMonic);
    }
    if !poly::is_squarefree(min_poly) {
        return Err(Error::NotSquarefree);
    }
    let r1 = poly::count_real_roots(min_poly);
    let n = min_poly.len() - 1;
    Ok((r1, (n - r1) / 2))
}

impl NumberField {
    pub fn new(min_poly: Vec<i128>) -> Result<Self> {
        let n = min_poly.len().saturating_sub(1);
        if n > MAX_DEGREE {
            return Err(Error::PolynomialTooLarge(format!("degree {n} > {MAX_DEGREE}")));
        }
        if let Some(c) = min_poly.iter().find(|c| c.unsigned_abs() > 1u128 << 64) {
            return Err(Error::PolynomialTooLarge(format!("coefficient {c} exceeds 2^64")));
        }
        let (r1, r2) = signature(&min_poly)?;
        let disc = poly::discriminant(&min_poly);
        Ok(Self { min_poly, r1, r2, disc })
    }

    /// Like [`NumberField::new`] but also checks a claimed signature.
    pub fn with_signature(min_poly: Vec<i128>, r1: usize, r2: usize) -> Result<Self> {
        let k = Self::new(min_poly)?;
        if (k.r1, k.r2) != (r1, r2) {
            return Err(Error::Consistency(format!(
                "claimed signature ({r1}, {r2}) but Sturm count gives ({}, {})",
                k.r1, k.r2
            )));
        }
        Ok(k)
    }

    pub fn rationals() -> Self {
        Self::new(vec![-1, 1]).expect("x - 1 is a valid defining polynomial")
    }

    /// Q(sqrt(d)) defined by the minimal polynomial of a generator of its ring of
    /// integers, so that no rational prime is an index divisor.
    pub fn quadratic(d: i64) -> Result<Self> {
        let d = squarefree_part(d);
        if d == 1 {
            return Err(Error::Schema("Q(sqrt(1)) is not a quadratic field".into()));
        }
        let d = d as i128;
        if d.rem_euclid(4) == 1 {
            Self::new(vec![(1 - d) / 4, -1, 1])
        } else {
            Self::new(vec![-d, 0, 1])
        }
    }

    pub fn min_poly(&self) -> &[i128] {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.r1, self.r2)
    }

    /// Number of archimedean places.
    pub fn archimedean_count(&self) -> usize {
        self.r1 + self.r2
    }

    pub fn complex_count(&self) -> usize {
        self.r2
    }

    pub fn is_totally_imaginary(&self) -> bool {
        self.r1 == 0
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }
}

fn squarefree_part(d: i64) -> i64 {
    if d == 0 {
        return 0;
    }
    let sign = d.signum();
    let mut out = 1i64;
    for (q, k) in arith::factorize(d.unsigned_abs()) {
        if k % 2 == 1 {
            out *= q as i64;
        }
    }
    sign * out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFactor {
    /// ramification index
    pub e: u32,
    /// residue degree
    pub f: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSplitting {
    pub rational_prime: u64,
    pub factors: Vec<LocalFactor>,
    /// Set when p divides the index of Z[x]/(min_poly) in the maximal order,
    /// so the factor data need not describe the field.
    pub index_warning: bool,
}

impl PrimeSplitting {
    /// Explicit splitting data, e.g. a scenario override.
    pub fn explicit(field: &NumberField, p: u64, factors: Vec<LocalFactor>) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if factors.iter().any(|lf| lf.e == 0 || lf.f == 0) {
            return Err(Error::InvalidSplitting(format!("zero e or f above {p}")));
        }
        let sum: usize = factors.iter().map(|lf| (lf.e * lf.f) as usize).sum();
        if sum != field.degree() {
            return Err(Error::InvalidSplitting(format!(
                "sum of e*f above {p} is {sum}, field degree is {}",
                field.degree()
            )));
        }
        Ok(Self { rational_prime: p, factors, index_warning: false })
    }

    pub fn local_degree_sum(&self) -> u64 {
        self.factors.iter().map(|lf| (lf.e * lf.f) as u64).sum()
    }
}

/// Factors the defining polynomial modulo `p` and reads off (e, f) for each prime
/// above `p`. When `p` divides the discriminant, Dedekind's criterion decides whether
/// the order Z[x]/(min_poly) is p-maximal; if not, `index_warning` is set.
pub fn split_prime(field: &NumberField, p: u64) -> Result<PrimeSplitting> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let fbar = FpPoly::from_integers(p, &field.min_poly);
    let facs = factor(&fbar);
    let factors: Vec<LocalFactor> = facs
        .iter()
        .map(|fc| LocalFactor { e: fc.multiplicity, f: fc.poly.degree() as u32 })
        .collect();
    let index_warning = if (&field.disc % BigInt::from(p)) == BigInt::from(0) {
        !dedekind_p_maximal(field, p, &facs)
    } else {
        false
    };
    let out = PrimeSplitting { rational_prime: p, factors, index_warning };
    if out.local_degree_sum() != field.degree() as u64 {
        return Err(Error::Consistency(format!("sum of e*f above {p} differs from the degree")));
    }
    Ok(out)
}

/// Dedekind's criterion: with f = prod g_i^{e_i} mod p, g = prod g_i and h = f/g
/// (all lifted to Z[x]), Z[x]/(f) is p-maximal iff gcd(F, g, h) = 1 mod p where
/// F = (g*h - f)/p.
fn dedekind_p_maximal(field: &NumberField, p: u64, facs: &[modp::Factor]) -> bool {
    let g = facs.iter().fold(FpPoly::one(p), |acc, fc| acc.mul(&fc.poly));
    let h = facs.iter().fold(FpPoly::one(p), |acc, fc| {
        (1..fc.multiplicity).fold(acc, |a, _| a.mul(&fc.poly))
    });
    // lift with coefficients in [0, p) and form g*h - f over Z
    let gh = int_mul(&g.coeffs, &h.coeffs);
    let n = gh.len().max(field.min_poly.len());
    let pz = BigInt::from(p);
    let big_f: Vec<u64> = (0..n)
        .map(|i| {
            let a = gh.get(i).cloned().unwrap_or_default();
            let b = BigInt::from(field.min_poly.get(i).copied().unwrap_or(0));
            let diff = a - b;
            debug_assert!((&diff % &pz) == BigInt::from(0));
            let q = diff / &pz;
            let r = q.mod_floor(&pz);
            u64::try_from(r).expect("residue below p")
        })
        .collect();
    let big_f = FpPoly::new(p, big_f);
    big_f.gcd(&g).gcd(&h).is_one()
}

fn int_mul(a: &[u64], b: &[u64]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::from(0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += BigInt::from(x) * BigInt::from(y);
        }
    }
    out
}

/// `|m|_v = q^(-ord_v(m))` for `m = p^a` at a place with data (e, f) above p.
pub fn normalized_abs_value(local: LocalFactor, p: u64, m: u64) -> Result<FormalCardinality> {
    let a = arith::log_exact(m, p).ok_or(Error::NotAPowerOfP { m, p })?;
    Ok(FormalCardinality::prime_power(p, -((local.f * local.e * a) as i64)))
}

/// Checks the product formula for a nonzero rational `num/den`: the exponent vectors
/// of all finite and archimedean normalized absolute values sum to zero.
pub fn product_formula_check(field: &NumberField, num: i64, den: u64) -> Result<bool> {
    if num == 0 || den == 0 {
        return Err(Error::Schema("product formula needs a nonzero rational".into()));
    }
    let mut total = FormalCardinality::one();
    let mut primes: BTreeMap<u64, i64> = BTreeMap::new();
    for (q, k) in arith::factorize(num.unsigned_abs()) {
        *primes.entry(q).or_default() += k as i64;
    }
    for (q, k) in arith::factorize(den) {
        *primes.entry(q).or_default() -= k as i64;
    }
    for (&q, &k) in &primes {
        let sp = split_prime(field, q)?;
        for lf in &sp.factors {
            // |q^k|_v = q^(-e f k)
            total.add_exponent(q, -((lf.e * lf.f) as i64) * k);
        }
    }
    // |x|_v = |x| at real places, |x|^2 at complex places
    let (r1, r2) = field.signature();
    let arch_weight = (r1 + 2 * r2) as i64;
    for (&q, &k) in &primes {
        total.add_exponent(q, arch_weight * k);
    }
    Ok(total.is_one())
}

/// A finite place: a rational prime and an index into its splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FinitePlace {
    pub p: u64,
    pub factor: usize,
}

/// Which places above a rational prime belong to S.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceSelector {
    pub prime: u64,
    /// `None` selects every place above `prime`.
    pub factors: Option<Vec<usize>>,
}

/// S: all archimedean places plus a finite list of finite places. Splitting data for
/// every prime that S touches is cached here together with any overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceSet {
    field: NumberField,
    finite_places: Vec<FinitePlace>,
    splittings: BTreeMap<u64, PrimeSplitting>,
}

impl PlaceSet {
    /// S = S_infinity.
    pub fn archimedean(field: &NumberField) -> Self {
        Self { field: field.clone(), finite_places: vec![], splittings: BTreeMap::new() }
    }

    pub fn new(
        field: &NumberField,
        selectors: &[PlaceSelector],
        overrides: &BTreeMap<u64, PrimeSplitting>,
    ) -> Result<Self> {
        let mut out = Self::archimedean(field);
        out.splittings = overrides.clone();
        for sel in selectors {
            let sp = out.local_data(sel.prime)?;
            out.splittings.insert(sel.prime, sp.clone());
            let idxs: Vec<usize> = match &sel.factors {
                None => (0..sp.factors.len()).collect(),
                Some(v) => v.clone(),
            };
            for i in idxs {
                if i >= sp.factors.len() {
                    return Err(Error::InvalidPlaces(format!(
                        "factor index {i} out of range above {} ({} places)",
                        sel.prime,
                        sp.factors.len()
                    )));
                }
                let place = FinitePlace { p: sel.prime, factor: i };
                if out.finite_places.contains(&place) {
                    return Err(Error::InvalidPlaces(format!("duplicate place {}#{}", place.p, i)));
                }
                out.finite_places.push(place);
            }
        }
        out.finite_places.sort();
        Ok(out)
    }

    /// S with extra finite places adjoined.
    pub fn enlarged(&self, extra: &[PlaceSelector]) -> Result<Self> {
        let mut selectors: Vec<PlaceSelector> = Vec::new();
        for fp in &self.finite_places {
            match selectors.iter_mut().find(|s| s.prime == fp.p) {
                Some(s) => s.factors.get_or_insert_with(Vec::new).push(fp.factor),
                None => selectors.push(PlaceSelector { prime: fp.p, factors: Some(vec![fp.factor]) }),
            }
        }
        for e in extra {
            let sp = self.local_data(e.prime)?;
            let wanted: Vec<usize> = e.factors.clone().unwrap_or_else(|| (0..sp.factors.len()).collect());
            match selectors.iter_mut().find(|s| s.prime == e.prime) {
                Some(s) => {
                    let have = s.factors.get_or_insert_with(Vec::new);
                    for w in wanted {
                        if !have.contains(&w) {
                            have.push(w);
                        }
                    }
                }
                None => selectors.push(PlaceSelector { prime: e.prime, factors: Some(wanted) }),
            }
        }
        Self::new(&self.field, &selectors, &self.splittings)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn finite_places(&self) -> &[FinitePlace] {
        &self.finite_places
    }

    pub fn has_finite_places(&self) -> bool {
        !self.finite_places.is_empty()
    }

    pub fn contains(&self, place: FinitePlace) -> bool {
        self.finite_places.contains(&place)
    }

    /// Splitting of `p`, from the cache/overrides or computed.
    pub fn local_data(&self, p: u64) -> Result<PrimeSplitting> {
        match self.splittings.get(&p) {
            Some(sp) => Ok(sp.clone()),
            None => split_prime(&self.field, p),
        }
    }

    /// True if every place above `p` lies in S.
    pub fn contains_all_above(&self, p: u64) -> Result<bool> {
        let sp = self.local_data(p)?;
        Ok((0..sp.factors.len()).all(|i| self.contains(FinitePlace { p, factor: i })))
    }

    pub fn cached_splittings(&self) -> impl Iterator<Item = &PrimeSplitting> {
        self.splittings.values()
    }
}

/// `prod_{v not in S, v | p} 1/|[M]|_v` for `[M] = p^a`.
pub fn bound_exponent_s_p(places: &PlaceSet, p: u64, a: u32) -> Result<FormalCardinality> {
    let sp = places.local_data(p)?;
    let mut out = FormalCardinality::one();
    for (i, lf) in sp.factors.iter().enumerate() {
        if !places.contains(FinitePlace { p, factor: i }) {
            out.add_exponent(p, (lf.e * lf.f * a) as i64);
        }
    }
    Ok(out)
}
