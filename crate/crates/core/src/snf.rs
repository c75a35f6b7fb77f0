//! Smith normal form over the integers (dense, arbitrary precision).
//!
//! Matrices here are small (relation matrices of abelian quotients and test
//! oracles), so the textbook pivot-and-reduce algorithm on `BigInt` is enough.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Nonzero diagonal entries d_1 | d_2 | ... of the Smith form, all positive.
pub fn smith_diagonal(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_entry(&a, t) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let v = &q * &a[i][t];
                    a[i][j] -= v;
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // the pivot must divide the whole remaining block
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
                match bad {
                    Some((i, _)) => {
                        for j in t..cols {
                            let v = a[i][j].clone();
                            a[t][j] += v;
                        }
                    }
                    None => break,
                }
            }
            // restart with the smallest entry of row/column t as pivot
            if let Some((pi, pj)) = min_in_cross(&a, t) {
                a.swap(t, pi);
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

fn min_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn min_in_cross(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let cells = (t..a.len()).map(|i| (i, t)).chain((t..a[0].len()).map(|j| (t, j)));
    for (i, j) in cells {
        let x = &a[i][j];
        if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
            best = Some((i, j));
        }
    }
    best
}

/// Invariant factors (> 1) of Z^n / span(columns), or `None` if the quotient is infinite.
pub fn finite_cokernel(n: usize, columns: &[Vec<BigInt>]) -> Option<Vec<BigInt>> {
    let m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let diag = if columns.is_empty() { vec![] } else { smith_diagonal(&m) };
    if diag.len() < n {
        return None;
    }
    Some(diag.into_iter().filter(|d| !d.is_one()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn known_forms() {
        let d = smith_diagonal(&big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let d = smith_diagonal(&big(&[&[2, 0], &[0, 3]]));
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(6)]);
        assert!(smith_diagonal(&big(&[&[0, 0], &[0, 0]])).is_empty());
    }

    #[test]
    fn cokernels() {
        // Z^2 / <(2,0),(0,3)> = Z/6
        let cols = big(&[&[2, 0], &[0, 3]]);
        assert_eq!(finite_cokernel(2, &cols), Some(vec![BigInt::from(6)]));
        assert_eq!(finite_cokernel(2, &big(&[&[1, 0]])), None);
    }

    #[test]
    fn determinant_is_preserved() {
        // |det| equals the product of the diagonal
        let m = big(&[&[3, 1, 4], &[1, 5, 9], &[2, 6, 5]]);
        let d = smith_diagonal(&m);
        let prod: BigInt = d.iter().product();
        assert_eq!(prod, BigInt::from(90));
    }
}
