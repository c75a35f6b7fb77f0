//! Integer and rational polynomials: squarefreeness, Sturm chains, discriminants.
//!
//! Coefficients are stored constant term first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QPoly = Vec<BigRational>;

pub fn to_qpoly(coeffs: &[i128]) -> QPoly {
    let mut p: QPoly = coeffs
        .iter()
        .map(|&c| BigRational::from_integer(BigInt::from(c)))
        .collect();
    trim(&mut p);
    p
}

fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn degree(p: &QPoly) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn derivative(p: &QPoly) -> QPoly {
    let mut d: QPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim(&mut d);
    d
}

/// Remainder of `a` modulo a nonzero `b`.
pub fn rem(a: &QPoly, b: &QPoly) -> QPoly {
    let db = degree(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut r = a.clone();
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let q = &r[dr] / &lead;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &q * c;
        }
        trim(&mut r);
    }
    r
}

pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        for c in a.iter_mut() {
            *c /= &lead;
        }
    }
    a
}

pub fn is_squarefree(coeffs: &[i128]) -> bool {
    let f = to_qpoly(coeffs);
    match degree(&f) {
        None => false,
        Some(0) => true,
        Some(_) => degree(&gcd(&f, &derivative(&f))) == Some(0),
    }
}

/// Sturm chain f, f', -rem(f, f'), ...
pub fn sturm_chain(f: &QPoly) -> Vec<QPoly> {
    let mut chain = vec![f.clone(), derivative(f)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r = rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut changes = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

fn sign_at_infinity(p: &QPoly, positive: bool) -> i32 {
    let d = degree(p).expect("zero polynomial in Sturm chain");
    let s = if p[d].is_positive() { 1 } else { -1 };
    if positive || d % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Number of distinct real roots of a squarefree polynomial.
pub fn count_real_roots(coeffs: &[i128]) -> usize {
    let f = to_qpoly(coeffs);
    let chain = sturm_chain(&f);
    let at_neg = sign_changes(chain.iter().map(|p| sign_at_infinity(p, false)));
    let at_pos = sign_changes(chain.iter().map(|p| sign_at_infinity(p, true)));
    at_neg - at_pos
}

/// Determinant by fraction-free (Bareiss) elimination.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Resultant via the Sylvester matrix.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut syl = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            syl[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            syl[n + i][i + j] = c.clone();
        }
    }
    bareiss_det(syl)
}

/// Discriminant of a monic integer polynomial of degree >= 1.
pub fn discriminant(coeffs: &[i128]) -> BigInt {
    let n = coeffs.len() - 1;
    if n == 1 {
        return BigInt::one();
    }
    let f: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
    let df: Vec<BigInt> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    let res = resultant(&f, &df);
    if (n * (n - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sign changes of f along a fine rational grid; every crossing is a real root.
    fn grid_root_count(coeffs: &[i128], lo: i64, hi: i64, steps_per_unit: i64) -> usize {
        let eval = |num: i64, den: i64| -> BigRational {
            let x = BigRational::new(BigInt::from(num), BigInt::from(den));
            coeffs
                .iter()
                .rev()
                .fold(BigRational::zero(), |acc, &c| acc * &x + BigRational::from_integer(BigInt::from(c)))
        };
        let signs = (lo * steps_per_unit..=hi * steps_per_unit).map(|k| {
            let v = eval(k, steps_per_unit);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        });
        sign_changes(signs)
    }

    #[test]
    fn sturm_matches_grid_oracle() {
        // x^3 - 2: one real root near 1.26
        assert_eq!(grid_root_count(&[-2, 0, 0, 1], -4, 4, 8), 1);
        assert_eq!(count_real_roots(&[-2, 0, 0, 1]), 1);
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        assert_eq!(grid_root_count(&[6, -7, 0, 1], -5, 5, 7), 3);
        assert_eq!(count_real_roots(&[6, -7, 0, 1]), 3);
        assert_eq!(count_real_roots(&[5, 0, 1]), 0);
        assert_eq!(count_real_roots(&[-1, 1]), 1);
        // x^4 - 10x^2 + 1, roots +-sqrt(2)+-sqrt(3)
        assert_eq!(grid_root_count(&[1, 0, -10, 0, 1], -4, 4, 16), 4);
        assert_eq!(count_real_roots(&[1, 0, -10, 0, 1]), 4);
    }

    #[test]
    fn squarefree_detection() {
        assert!(is_squarefree(&[5, 0, 1]));
        assert!(!is_squarefree(&[1, 2, 1]));
        assert!(!is_squarefree(&[0, 0, 1]));
        assert!(is_squarefree(&[-1, 1]));
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(&[5, 0, 1]), BigInt::from(-20));
        assert_eq!(discriminant(&[-2, 0, 0, 1]), BigInt::from(-108));
        // x^2 - x - 1 -> 5
        assert_eq!(discriminant(&[-1, -1, 1]), BigInt::from(5));
        assert_eq!(discriminant(&[-1, 1]), BigInt::from(1));
        // x^3 + x + 1 -> -31
        assert_eq!(discriminant(&[1, 1, 0, 1]), BigInt::from(-31));
    }
}
