//! Polynomials over a prime field and their factorization into irreducibles.
//!
//! Squarefree decomposition, then distinct-degree factorization, then equal-degree
//! splitting (Cantor-Zassenhaus, with the trace map in characteristic 2). Random
//! choices come from a fixed-seed generator so results are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::arith::{inv_mod, mul_mod};

/// Dense polynomial over F_p, constant term first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FpPoly {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { p, coeffs }
    }

    pub fn from_integers(p: u64, coeffs: &[i128]) -> Self {
        let m = p as i128;
        Self::new(p, coeffs.iter().map(|c| c.rem_euclid(m) as u64).collect())
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lead(&self) -> u64 {
        *self.coeffs.last().expect("zero polynomial has no leading coefficient")
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p).expect("nonzero element of a field");
        self.scale(inv)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|&c| mul_mod(c, k, self.p)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + b) % self.p
            })
            .collect();
        Self::new(self.p, c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(self.p - 1))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(self.p, vec![]);
        }
        let mut c = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::new(self.p, c)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        let inv = inv_mod(d.lead(), p).unwrap();
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        if r.len() < d.coeffs.len() {
            return (Self::new(p, vec![]), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = mul_mod(r[k + dd], inv, p);
            q[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in d.coeffs.iter().enumerate() {
                let t = mul_mod(c, b, p);
                r[k + j] = (r[k + j] + p - t) % p;
            }
        }
        r.truncate(dd);
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.divrem(d);
        debug_assert!(r.is_zero());
        q
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
                .collect(),
        )
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut acc = Self::one(self.p).rem(m);
        let mut base = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// `self^p mod m`, iterated `times` times.
    fn frobenius_mod(&self, times: usize, m: &Self) -> Self {
        let mut out = self.rem(m);
        for _ in 0..times {
            out = out.pow_mod(self.p as u128, m);
        }
        out
    }
}

/// Irreducible factor with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub poly: FpPoly,
    pub multiplicity: u32,
}

/// Yun-style squarefree decomposition over F_p, including p-th roots.
fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    let f = f.monic();
    if f.degree() == 0 {
        return out;
    }
    let df = f.derivative();
    let mut c = f.gcd(&df);
    let mut w = f.div_exact(&c);
    let mut i = 1u32;
    while w.degree() > 0 {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if z.degree() > 0 {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w);
    }
    if c.degree() > 0 {
        // c is a p-th power; in a prime field a^(1/p) = a.
        let root = FpPoly::new(p, c.coeffs.iter().step_by(p as usize).copied().collect());
        for (g, m) in squarefree_decomposition(&root) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(p);
    let mut h = x.clone();
    let mut d = 0;
    while rest.degree() >= 2 * (d + 1) {
        d += 1;
        h = h.frobenius_mod(1, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.degree() > 0 {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.degree() > 0 {
        let deg = rest.degree();
        out.push((rest, deg));
    }
    out
}

fn random_poly(p: u64, below: usize, rng: &mut ChaCha8Rng) -> FpPoly {
    FpPoly::new(p, (0..below).map(|_| rng.gen_range(0..p)).collect())
}

/// Splits a monic squarefree product of irreducibles of degree `d`.
fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.degree();
    if n == d {
        return vec![f.clone()];
    }
    let p = f.p;
    loop {
        let a = random_poly(p, n, rng);
        if a.degree() == 0 {
            continue;
        }
        let candidate = if p == 2 {
            // absolute trace a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            // a^((p^d-1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p-1)/2)
            let mut t = a.rem(f);
            let mut norm = t.clone();
            for _ in 1..d {
                t = t.frobenius_mod(1, f);
                norm = norm.mul(&t).rem(f);
            }
            norm.pow_mod(((p - 1) / 2) as u128, f).sub(&FpPoly::one(p))
        };
        let g = candidate.gcd(f);
        if g.degree() > 0 && g.degree() < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.div_exact(&g), d, rng));
            return out;
        }
    }
}

/// Factors `f` into monic irreducibles with multiplicities, sorted.
pub fn factor(f: &FpPoly) -> Vec<Factor> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ f.p);
    let mut out = Vec::new();
    for (sqf, mult) in squarefree_decomposition(f) {
        for (block, d) in distinct_degree(&sqf) {
            for g in equal_degree(&block, d, &mut rng) {
                out.push(Factor { poly: g, multiplicity: mult });
            }
        }
    }
    out.sort_by(|a, b| {
        (a.poly.degree(), &a.poly.coeffs, a.multiplicity).cmp(&(b.poly.degree(), &b.poly.coeffs, b.multiplicity))
    });
    out
}

/// Multiplies a factorization back out, for verification.
pub fn expand(p: u64, factors: &[Factor]) -> FpPoly {
    factors.iter().fold(FpPoly::one(p), |acc, f| {
        (0..f.multiplicity).fold(acc, |a, _| a.mul(&f.poly))
    })
}

/// Crude irreducibility test: no factor of degree <= n/2 (used only to check output).
pub fn is_irreducible(f: &FpPoly) -> bool {
    let n = f.degree();
    if n == 0 {
        return false;
    }
    let x = FpPoly::x(f.p);
    let mut h = x.clone();
    for _ in 1..=n / 2 {
        h = h.frobenius_mod(1, f);
        if h.sub(&x).gcd(f).degree() > 0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn degrees(f: &[Factor]) -> Vec<(usize, u32)> {
        f.iter().map(|x| (x.poly.degree(), x.multiplicity)).collect()
    }

    #[test]
    fn x2_plus_5() {
        // mod 2: (x+1)^2
        let f = FpPoly::from_integers(2, &[5, 0, 1]);
        let fs = factor(&f);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].poly.coeffs, vec![1, 1]);
        assert_eq!(fs[0].multiplicity, 2);
        // mod 3: (x-1)(x+1)
        let fs = factor(&FpPoly::from_integers(3, &[5, 0, 1]));
        assert_eq!(degrees(&fs), vec![(1, 1), (1, 1)]);
        // -5 = 2 = 3^2 mod 7 splits; -5 = 6 mod 11 is a nonresidue
        assert_eq!(degrees(&factor(&FpPoly::from_integers(7, &[5, 0, 1]))), vec![(1, 1), (1, 1)]);
        assert_eq!(degrees(&factor(&FpPoly::from_integers(11, &[5, 0, 1]))), vec![(2, 1)]);
    }

    #[test]
    fn splits_cyclotomic_and_pth_powers() {
        // x^4 + 1 mod 5: splits into two quadratics (5 = 1 mod 4, not 1 mod 8)
        assert_eq!(degrees(&factor(&FpPoly::from_integers(5, &[1, 0, 0, 0, 1]))), vec![(2, 1), (2, 1)]);
        // x^4 + 1 mod 17 splits completely
        assert_eq!(degrees(&factor(&FpPoly::from_integers(17, &[1, 0, 0, 0, 1]))).len(), 4);
        // x^6 + 1 = (x^2+1)^3 over F_3? (x^2+1)^3 = x^6+1 in char 3
        assert_eq!(degrees(&factor(&FpPoly::from_integers(3, &[1, 0, 0, 0, 0, 0, 1]))), vec![(2, 3)]);
        // x^4 over F_2
        assert_eq!(degrees(&factor(&FpPoly::from_integers(2, &[0, 0, 0, 0, 1]))), vec![(1, 4)]);
        // degree-3 irreducible over F_2 times degree-3 irreducible
        let f = FpPoly::from_integers(2, &[1, 1, 0, 1]).mul(&FpPoly::from_integers(2, &[1, 0, 1, 1]));
        assert_eq!(degrees(&factor(&f)), vec![(3, 1), (3, 1)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn factorization_multiplies_back(
            p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101]),
            mut coeffs in prop::collection::vec(-30i128..30, 1..9),
        ) {
            coeffs.push(1);
            let f = FpPoly::from_integers(p, &coeffs);
            let fs = factor(&f);
            prop_assert_eq!(expand(p, &fs), f.clone());
            for x in &fs {
                prop_assert!(is_irreducible(&x.poly), "{:?}", x);
                prop_assert_eq!(x.poly.monic(), x.poly.clone());
            }
            let total: usize = fs.iter().map(|x| x.poly.degree() * x.multiplicity as usize).sum();
            prop_assert_eq!(total, f.degree());
        }
    }
}
