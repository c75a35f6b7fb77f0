//! Homomorphisms between finite abelian p-groups given in coordinates, with exact
//! kernel and image orders.
//!
//! Images are measured by a Howell-style echelon basis over Z/p^N: one pivot per
//! coordinate, closed under multiplication by p, so the subgroup order is the
//! product over pivots of p^(b_i - v_i). Kernels are measured independently as
//! the cokernel of the Pontryagin dual map, and the two are checked against
//! |ker| * |im| = |domain|.

use crate::cardinality::FormalCardinality;
use crate::error::{Error, Result};
use crate::galmod::FiniteAbelianPGroup;
use crate::numfield::arith::inv_mod;

/// Sparse vector: (coordinate, value) pairs, ascending coordinates, nonzero values.
pub type SparseVec = Vec<(usize, u64)>;

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `v - c * w`, coordinatewise modulo `moduli`.
fn sub_scaled(v: &SparseVec, c: u64, w: &SparseVec, moduli: &[u64]) -> SparseVec {
    axpy(v, c, w, moduli, true)
}

/// `v + c * w` (or `v - c * w` when `negate`), coordinatewise modulo `moduli`.
fn axpy(v: &SparseVec, c: u64, w: &SparseVec, moduli: &[u64], negate: bool) -> SparseVec {
    let term = |k: usize, x: u64| {
        let m = moduli[k];
        let t = mulmod(c % m, x, m);
        if negate {
            (m - t) % m
        } else {
            t
        }
    };
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        if j == w.len() || (i < v.len() && v[i].0 < w[j].0) {
            out.push(v[i]);
            i += 1;
        } else if i == v.len() || w[j].0 < v[i].0 {
            let (k, x) = w[j];
            let y = term(k, x);
            if y != 0 {
                out.push((k, y));
            }
            j += 1;
        } else {
            let (k, x) = v[i];
            let y = (x + term(k, w[j].1)) % moduli[k];
            if y != 0 {
                out.push((k, y));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn scaled(v: &SparseVec, c: u64, moduli: &[u64]) -> SparseVec {
    v.iter()
        .filter_map(|&(k, x)| {
            let m = moduli[k];
            let y = mulmod(c % m, x, m);
            (y != 0).then_some((k, y))
        })
        .collect()
}

/// Subgroup of a finite abelian p-group built incrementally from generators.
pub struct Span<'a> {
    p: u64,
    exps: &'a [u32],
    moduli: Vec<u64>,
    /// modulus of the largest coordinate, used for unit inverses
    top: u64,
    pivots: Vec<Option<(u32, SparseVec)>>,
}

impl<'a> Span<'a> {
    pub fn new(p: u64, exps: &'a [u32]) -> Self {
        let moduli: Vec<u64> = exps.iter().map(|&e| p.pow(e)).collect();
        let top = moduli.iter().copied().max().unwrap_or(1);
        Self { p, exps, moduli, top, pivots: vec![None; exps.len()] }
    }

    fn valuation(&self, mut x: u64) -> u32 {
        let mut v = 0;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    pub fn insert(&mut self, v: SparseVec) {
        let mut work = vec![v];
        while let Some(mut v) = work.pop() {
            while let Some(&(i, x)) = v.first() {
                let val = self.valuation(x);
                let unit = x / self.p.pow(val);
                let uinv = inv_mod(unit, self.top).expect("unit modulo p^N");
                v = scaled(&v, uinv, &self.moduli);
                let b = self.exps[i];
                match self.pivots[i].take() {
                    None => {
                        // p^(b - val) * v vanishes at i and must also lie in the span
                        let sat = scaled(&v, self.p.pow(b - val), &self.moduli);
                        if !sat.is_empty() {
                            work.push(sat);
                        }
                        self.pivots[i] = Some((val, v));
                        break;
                    }
                    Some((pv, piv)) if val >= pv => {
                        v = sub_scaled(&v, self.p.pow(val - pv), &piv, &self.moduli);
                        self.pivots[i] = Some((pv, piv));
                    }
                    Some((pv, piv)) => {
                        let sat = scaled(&v, self.p.pow(b - val), &self.moduli);
                        if !sat.is_empty() {
                            work.push(sat);
                        }
                        let old = sub_scaled(&piv, self.p.pow(pv - val), &v, &self.moduli);
                        self.pivots[i] = Some((val, v));
                        v = old;
                    }
                }
            }
        }
    }

    /// log_p of the subgroup order.
    pub fn log_order(&self) -> u64 {
        self.pivots
            .iter()
            .enumerate()
            .filter_map(|(i, piv)| piv.as_ref().map(|(v, _)| (self.exps[i] - v) as u64))
            .sum()
    }
}

/// Homomorphism ⊕_j Z/p^{a_j} → ⊕_i Z/p^{b_i}, stored by sparse columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinAbHom {
    domain: FiniteAbelianPGroup,
    codomain: FiniteAbelianPGroup,
    cols: Vec<SparseVec>,
}

impl FinAbHom {
    /// Columns are images of the domain generators. Entries are reduced and the
    /// well-definedness congruences checked.
    pub fn new(domain: FiniteAbelianPGroup, codomain: FiniteAbelianPGroup, cols: Vec<SparseVec>) -> Result<Self> {
        if domain.p() != codomain.p() {
            return Err(Error::InvalidModule("domain and codomain primes differ".into()));
        }
        if cols.len() != domain.rank() {
            return Err(Error::InvalidModule(format!(
                "{} columns for a domain of rank {}",
                cols.len(),
                domain.rank()
            )));
        }
        let p = domain.p();
        let mut out = Vec::with_capacity(cols.len());
        for (j, col) in cols.into_iter().enumerate() {
            let a = domain.exponents()[j];
            let mut reduced = Vec::with_capacity(col.len());
            for (i, x) in col {
                let b = *codomain
                    .exponents()
                    .get(i)
                    .ok_or_else(|| Error::InvalidModule(format!("row {i} out of range")))?;
                let x = x % p.pow(b);
                if b > a && x % p.pow(b - a) != 0 {
                    return Err(Error::InvalidModule(format!(
                        "entry ({i},{j}) = {x} not divisible by {p}^{}",
                        b - a
                    )));
                }
                if x != 0 {
                    reduced.push((i, x));
                }
            }
            reduced.sort_unstable();
            if reduced.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidModule(format!("duplicate row in column {j}")));
            }
            out.push(reduced);
        }
        Ok(Self { domain, codomain, cols: out })
    }

    /// From a dense integer matrix (codomain rows × domain columns).
    pub fn from_dense(domain: FiniteAbelianPGroup, codomain: FiniteAbelianPGroup, rows: &[Vec<i64>]) -> Result<Self> {
        let p = domain.p();
        if rows.len() != codomain.rank() || rows.iter().any(|r| r.len() != domain.rank()) {
            return Err(Error::InvalidModule("matrix shape does not match groups".into()));
        }
        let cols = (0..domain.rank())
            .map(|j| {
                (0..codomain.rank())
                    .map(|i| (i, rows[i][j].rem_euclid(p.pow(codomain.exponents()[i]) as i64) as u64))
                    .filter(|&(_, x)| x != 0)
                    .collect()
            })
            .collect();
        Self::new(domain, codomain, cols)
    }

    pub fn domain(&self) -> &FiniteAbelianPGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteAbelianPGroup {
        &self.codomain
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0; self.domain.rank()]; self.codomain.rank()];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, x) in col {
                m[i][j] = x;
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let moduli = self.codomain.moduli();
        let mut acc: SparseVec = Vec::new();
        for &(j, x) in v {
            acc = axpy(&acc, x, &self.cols[j], &moduli, false);
        }
        acc
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FinAbHom) -> Result<FinAbHom> {
        if other.codomain != self.domain {
            return Err(Error::InvalidModule("composition of mismatched maps".into()));
        }
        let cols = other.cols.iter().map(|c| self.apply(c)).collect();
        FinAbHom::new(other.domain.clone(), self.codomain.clone(), cols)
    }

    /// log_p |im|.
    pub fn image_log(&self) -> u64 {
        let exps = self.codomain.exponents().to_vec();
        let mut span = Span::new(self.domain.p(), &exps);
        for c in &self.cols {
            span.insert(c.clone());
        }
        span.log_order()
    }

    /// log_p |ker| = log_p |coker of the dual map|.
    pub fn kernel_log_via_dual(&self) -> u64 {
        let p = self.domain.p();
        let a = self.domain.exponents();
        let b = self.codomain.exponents();
        // dual column i (a functional on the codomain) pulled back to the domain:
        // entry j is A_ij * p^(a_j - b_i) modulo p^(a_j)
        let mut dual: Vec<SparseVec> = vec![Vec::new(); b.len()];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, x) in col {
                let m = p.pow(a[j]);
                let y = if a[j] >= b[i] {
                    mulmod(x, p.pow(a[j] - b[i]), m)
                } else {
                    (x / p.pow(b[i] - a[j])) % m
                };
                if y != 0 {
                    dual[i].push((j, y));
                }
            }
        }
        let mut span = Span::new(p, a);
        for v in dual {
            span.insert(v);
        }
        self.domain.log_order() - span.log_order()
    }

    /// (log_p |ker|, log_p |im|), checked against |ker| * |im| = |domain|.
    pub fn kernel_image_logs(&self) -> Result<(u64, u64)> {
        let im = self.image_log();
        let ker = self.kernel_log_via_dual();
        if ker + im != self.domain.log_order() {
            return Err(Error::Consistency(format!(
                "|ker| * |im| = p^{} but |domain| = p^{}",
                ker + im,
                self.domain.log_order()
            )));
        }
        Ok((ker, im))
    }

    pub fn kernel_order(&self) -> Result<FormalCardinality> {
        let (ker, _) = self.kernel_image_logs()?;
        Ok(FormalCardinality::prime_power(self.domain.p(), ker as i64))
    }

    pub fn image_order(&self) -> Result<FormalCardinality> {
        let (_, im) = self.kernel_image_logs()?;
        Ok(FormalCardinality::prime_power(self.domain.p(), im as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snf;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn group(p: u64, exps: &[u32]) -> FiniteAbelianPGroup {
        FiniteAbelianPGroup::from_coordinates(p, exps.to_vec()).unwrap()
    }

    /// log_p |coker| of [A | diag(p^b)] via integer Smith form.
    fn image_log_oracle(p: u64, a: &[u32], b: &[u32], rows: &[Vec<i64>]) -> u64 {
        let mut cols: Vec<Vec<BigInt>> = (0..a.len())
            .map(|j| (0..b.len()).map(|i| BigInt::from(rows[i][j])).collect())
            .collect();
        for (i, &e) in b.iter().enumerate() {
            let mut c = vec![BigInt::from(0); b.len()];
            c[i] = BigInt::from(p.pow(e));
            cols.push(c);
        }
        let inv = snf::finite_cokernel(b.len(), &cols).unwrap();
        let coker_log: u64 = inv
            .iter()
            .map(|d| {
                let mut d = d.clone();
                let mut k = 0;
                while &d % p == BigInt::from(0) {
                    d /= p;
                    k += 1;
                }
                k
            })
            .sum();
        b.iter().map(|&e| e as u64).sum::<u64>() - coker_log
    }

    #[test]
    fn multiplication_by_p() {
        // x -> 2x on Z/4: kernel {0,2}, image {0,2}
        let g = group(2, &[2]);
        let h = FinAbHom::from_dense(g.clone(), g, &[vec![2]]).unwrap();
        assert_eq!(h.kernel_image_logs().unwrap(), (1, 1));
    }

    #[test]
    fn mixed_exponents() {
        // Z/2 -> Z/4, 1 -> 2 is injective
        let h = FinAbHom::from_dense(group(2, &[1]), group(2, &[2]), &[vec![2]]).unwrap();
        assert_eq!(h.kernel_image_logs().unwrap(), (0, 1));
        // Z/4 -> Z/2 reduction is surjective with kernel of order 2
        let h = FinAbHom::from_dense(group(2, &[2]), group(2, &[1]), &[vec![1]]).unwrap();
        assert_eq!(h.kernel_image_logs().unwrap(), (1, 1));
        // Z/2 -> Z/4 with 1 -> 1 is not well defined
        assert!(FinAbHom::from_dense(group(2, &[1]), group(2, &[2]), &[vec![1]]).is_err());
    }

    #[test]
    fn zero_and_identity() {
        let g = group(3, &[2, 1]);
        let zero = FinAbHom::from_dense(g.clone(), g.clone(), &[vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(zero.kernel_image_logs().unwrap(), (3, 0));
        let id = FinAbHom::from_dense(g.clone(), g, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(id.kernel_image_logs().unwrap(), (0, 3));
    }

    fn hom_strategy() -> impl Strategy<Value = (u64, Vec<u32>, Vec<u32>, Vec<Vec<i64>>)> {
        (prop::sample::select(vec![2u64, 3, 5]), prop::collection::vec(1u32..4, 1..5), prop::collection::vec(1u32..4, 1..5))
            .prop_flat_map(|(p, a, b)| {
                let (na, nb) = (a.len(), b.len());
                let raw = prop::collection::vec(prop::collection::vec(0i64..200, na), nb);
                (Just(p), Just(a), Just(b), raw)
            })
            .prop_map(|(p, a, b, raw)| {
                // force well-definedness: entry (i,j) divisible by p^(b_i - a_j)
                let rows = raw
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        r.iter()
                            .enumerate()
                            .map(|(j, &x)| x * (p.pow(b[i].saturating_sub(a[j])) as i64))
                            .collect()
                    })
                    .collect();
                (p, a, b, rows)
            })
    }

    proptest! {
        #[test]
        fn image_matches_smith_form_oracle((p, a, b, rows) in hom_strategy()) {
            let h = FinAbHom::from_dense(group(p, &a), group(p, &b), &rows).unwrap();
            let (ker, im) = h.kernel_image_logs().unwrap();
            prop_assert_eq!(im, image_log_oracle(p, &a, &b, &rows));
            prop_assert_eq!(ker + im, a.iter().map(|&e| e as u64).sum::<u64>());
        }
    }
}
