//! Dense linear algebra over prime fields.

use crate::numfield::arith::{inv_mod, mul_mod};

/// Row-major matrix over Z/p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        Self { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(p, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x.rem_euclid(p as i64) as u64);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: u64) {
        let k = i * self.cols + j;
        self.data[k] = (self.data[k] + v % self.p) % self.p;
    }

    /// Rank by Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let p = self.p;
        let mut a = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else { continue };
            if piv != rank {
                for j in 0..cols {
                    a.swap(piv * cols + j, rank * cols + j);
                }
            }
            let inv = inv_mod(a[rank * cols + c], p).expect("nonzero element of a field");
            for j in c..cols {
                a[rank * cols + j] = mul_mod(a[rank * cols + j], inv, p);
            }
            for r in 0..rows {
                let f = a[r * cols + c];
                if r == rank || f == 0 {
                    continue;
                }
                for j in c..cols {
                    let sub = mul_mod(f, a[rank * cols + j], p);
                    a[r * cols + j] = (a[r * cols + j] + p - sub) % p;
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        let m = FpMatrix::from_rows(2, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let m = FpMatrix::from_rows(3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        assert_eq!(m.rank(), 3);
        assert_eq!(FpMatrix::zeros(5, 3, 4).nullity(), 4);
        let m = FpMatrix::from_rows(5, &[vec![2, 4], vec![1, 2]]);
        assert_eq!(m.rank(), 1);
    }
}
