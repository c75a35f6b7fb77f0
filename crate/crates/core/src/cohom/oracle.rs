//! Independent cohomology computation over Z/p: coboundaries are evaluated
//! pointwise on basis cochains and ranks come from dense Gaussian elimination.

use super::{check_size, decode, encode, CohomologyReport, Engine};
use crate::cardinality::FormalCardinality;
use crate::error::{Error, Result};
use crate::galmod::GaloisModule;
use crate::linalg::FpMatrix;

/// Matrix of d^i over Z/p, built column by column from the cochain formula.
fn coboundary_matrix(m: &GaloisModule, i: usize) -> FpMatrix {
    let g = m.group();
    let p = m.p();
    let n = g.order();
    let k = m.module().rank();
    let src = n.pow(i as u32);
    let dst = n.pow(i as u32 + 1);
    let mut out = FpMatrix::zeros(p, dst * k, src * k);
    for t in 0..src {
        for c in 0..k {
            let col = t * k + c;
            // basis cochain: f(x) = e_c if x = t, else 0
            let f = |x: &[usize]| -> bool { encode(x, n) == t };
            for s_idx in 0..dst {
                let s = decode(s_idx, n, i + 1);
                let mut value = vec![0i64; k];
                if f(&s[1..]) {
                    let a = m.action(s[0]);
                    for r in 0..k {
                        value[r] += a[r][c] as i64;
                    }
                }
                for j in 1..=i {
                    let mut merged = s[..j - 1].to_vec();
                    merged.push(g.mul(s[j - 1], s[j]));
                    merged.extend_from_slice(&s[j + 1..]);
                    if f(&merged) {
                        value[c] += if j % 2 == 1 { -1 } else { 1 };
                    }
                }
                if f(&s[..i]) {
                    value[c] += if (i + 1) % 2 == 1 { -1 } else { 1 };
                }
                for (r, v) in value.into_iter().enumerate() {
                    if v != 0 {
                        out.set(s_idx * k + r, col, v.rem_euclid(p as i64) as u64);
                    }
                }
            }
        }
    }
    out
}

/// Cohomology dimensions of an elementary abelian module by prime-field ranks.
pub fn cocycle_oracle(m: &GaloisModule) -> Result<CohomologyReport> {
    if !m.module().is_elementary() {
        return Err(Error::NotElementaryAbelian);
    }
    for i in 0..3 {
        check_size(m, i)?;
    }
    let p = m.p();
    let k = m.module().rank();
    let n = m.group().order();
    let ranks: Vec<usize> = (0..3).map(|i| coboundary_matrix(m, i).rank()).collect();
    let nullity = |i: usize| n.pow(i as u32) * k - ranks[i];
    let dims = [nullity(0) as u64, (nullity(1) - ranks[0]) as u64, (nullity(2) - ranks[1]) as u64];
    // norm map Σ_g ρ(g) over Z/p
    let mut norm = FpMatrix::zeros(p, k, k);
    for g in 0..n {
        let a = m.action(g);
        for r in 0..k {
            for c in 0..k {
                norm.add_to(r, c, a[r][c]);
            }
        }
    }
    let tate = nullity(0) - norm.rank();
    Ok(CohomologyReport {
        orders: dims.map(|e| FormalCardinality::prime_power(p, e as i64)),
        dims: Some(dims),
        tate_h0: FormalCardinality::prime_power(p, tate as i64),
        engine: Engine::FpLinear,
    })
}
