//! Cohomology of finite groups with coefficients in finite abelian p-modules,
//! through the inhomogeneous bar complex in degrees 0 to 3.

pub mod hom;
pub mod oracle;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cardinality::FormalCardinality;
use crate::error::{Error, Result};
use crate::galmod::GaloisModule;
use hom::{FinAbHom, SparseVec};

/// Largest allowed |Γ|^{i+1}·k for a materialized differential.
pub const SIZE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    #[serde(rename = "snf")]
    Snf,
    #[serde(rename = "fp-linear")]
    FpLinear,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    /// [h⁰, h¹, h²]
    pub orders: [FormalCardinality; 3],
    /// Dimensions over Z/p, when the module is elementary abelian.
    pub dims: Option<[u64; 3]>,
    pub tate_h0: FormalCardinality,
    pub engine: Engine,
}

impl CohomologyReport {
    /// h⁰·h²/h¹
    pub fn chi2(&self) -> FormalCardinality {
        &(&self.orders[0] * &self.orders[2]) / &self.orders[1]
    }
}

pub(crate) fn check_size(m: &GaloisModule, degree: usize) -> Result<()> {
    let n = m.group().order();
    let k = m.module().rank();
    let entries = n
        .checked_pow(degree as u32 + 1)
        .and_then(|x| x.checked_mul(k.max(1)))
        .unwrap_or(usize::MAX);
    if entries > SIZE_CAP {
        return Err(Error::SizeCapExceeded { entries, cap: SIZE_CAP });
    }
    Ok(())
}

/// Digits of a tuple index in base n, most significant first.
pub(crate) fn decode(mut idx: usize, n: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    out
}

pub(crate) fn encode(digits: &[usize], n: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * n + d)
}

/// d^i : C^i → C^{i+1}, with C^i = M^{Γ^i} and
/// (d f)(g_1..g_{i+1}) = g_1·f(g_2..) + Σ_j (-1)^j f(.., g_j g_{j+1}, ..) + (-1)^{i+1} f(g_1..g_i).
pub fn bar_differential(m: &GaloisModule, i: usize) -> Result<FinAbHom> {
    if i > 2 {
        return Err(Error::Schema(format!("bar differential of degree {i} is not materialized")));
    }
    check_size(m, i)?;
    let g = m.group();
    let n = g.order();
    let k = m.module().rank();
    let moduli = m.module().moduli();
    let domain = m.module().power(n.pow(i as u32));
    let codomain = m.module().power(n.pow(i as u32 + 1));
    let mut cols: Vec<SparseVec> = Vec::with_capacity(n.pow(i as u32) * k);
    for t in 0..n.pow(i as u32) {
        let digits = decode(t, n, i);
        for c in 0..k {
            let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
            let mut add = |tuple: usize, coord: usize, x: u64, negate: bool| {
                let md = moduli[coord];
                let x = x % md;
                let x = if negate { (md - x) % md } else { x };
                let e = acc.entry(tuple * k + coord).or_insert(0);
                *e = (*e + x) % md;
            };
            // g · f(t)
            for h in 0..n {
                let row = h * n.pow(i as u32) + t;
                let a = m.action(h);
                for r in 0..k {
                    if a[r][c] != 0 {
                        add(row, r, a[r][c], false);
                    }
                }
            }
            // f(.., g_j g_{j+1}, ..) = f(t) exactly when g_j g_{j+1} = t_j
            for j in 1..=i {
                let negate = j % 2 == 1;
                for a in 0..n {
                    let mut s = Vec::with_capacity(i + 1);
                    s.extend_from_slice(&digits[..j - 1]);
                    s.push(a);
                    s.push(g.mul(g.inverse(a), digits[j - 1]));
                    s.extend_from_slice(&digits[j..]);
                    add(encode(&s, n), c, 1, negate);
                }
            }
            // f(g_1..g_i) with trailing g_{i+1} free
            for h in 0..n {
                add(t * n + h, c, 1, (i + 1) % 2 == 1);
            }
            cols.push(acc.into_iter().filter(|&(_, x)| x != 0).collect());
        }
    }
    FinAbHom::new(domain, codomain, cols)
}

/// H⁰, H¹, H² through the p-local normal form engine.
pub fn cohomology(m: &GaloisModule) -> Result<CohomologyReport> {
    let d: Vec<FinAbHom> = (0..3).map(|i| bar_differential(m, i)).collect::<Result<_>>()?;
    for i in 0..2 {
        if !d[i + 1].compose(&d[i])?.is_zero() {
            return Err(Error::Consistency(format!("d^{} ∘ d^{} is not zero", i + 1, i)));
        }
    }
    let logs: Vec<(u64, u64)> = d.iter().map(|x| x.kernel_image_logs()).collect::<Result<_>>()?;
    let h = [logs[0].0, logs[1].0 - logs[0].1, logs[2].0 - logs[1].1];
    let p = m.p();
    let all: Vec<usize> = (0..m.group().order()).collect();
    let norm_im = m.norm_hom(&all).image_log();
    let tate = logs[0].0 - norm_im;
    Ok(CohomologyReport {
        orders: h.map(|e| FormalCardinality::prime_power(p, e as i64)),
        dims: m.module().is_elementary().then_some(h),
        tate_h0: FormalCardinality::prime_power(p, tate as i64),
        engine: Engine::Snf,
    })
}

/// |Ĥ⁰| / |Ĥ¹| for a cyclic group, Ĥ⁰ = M^Γ/NM and Ĥ¹ = ker N / (g-1)M.
pub fn herbrand_quotient(m: &GaloisModule) -> Result<FormalCardinality> {
    let gen = m.group().cyclic_generator().ok_or(Error::NotCyclic)?;
    let all: Vec<usize> = (0..m.group().order()).collect();
    let (ker_aug, im_aug) = m.augmentation_hom(gen).kernel_image_logs()?;
    let (ker_n, im_n) = m.norm_hom(&all).kernel_image_logs()?;
    let h0 = ker_aug as i64 - im_n as i64;
    let h1 = ker_n as i64 - im_aug as i64;
    Ok(FormalCardinality::prime_power(m.p(), h0 - h1))
}

/// χ₂ = h⁰·h²/h¹.
pub fn chi2_finite(m: &GaloisModule) -> Result<FormalCardinality> {
    Ok(cohomology(m)?.chi2())
}
