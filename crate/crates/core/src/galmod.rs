//! Finite abelian p-groups with an action of a finite group, Cartier duals and
//! adjoint modules.

use std::sync::Arc;

use crate::cardinality::FormalCardinality;
use crate::cohom::hom::{FinAbHom, SparseVec};
use crate::error::{Error, Result};
use crate::fingroup::FiniteGroup;
use crate::linalg::FpMatrix;
use crate::numfield::arith::{self, inv_mod};

/// ⊕ Z/p^{e_i}. Modules keep exponents nonincreasing; direct sums of modules built
/// internally (cochain groups) may list coordinates in any order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianPGroup {
    p: u64,
    exps: Vec<u32>,
}

/// Entries stay below 2^62 so products fit comfortably in u128.
const MAX_MODULUS: u128 = 1 << 62;

impl FiniteAbelianPGroup {
    pub fn new(p: u64, exps: Vec<u32>) -> Result<Self> {
        if exps.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidModule(format!("exponents {exps:?} are not nonincreasing")));
        }
        Self::from_coordinates(p, exps)
    }

    pub fn from_coordinates(p: u64, exps: Vec<u32>) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        for &e in &exps {
            if e == 0 {
                return Err(Error::InvalidModule("zero exponent".into()));
            }
            if (p as u128).checked_pow(e).is_none_or(|m| m > MAX_MODULUS) {
                return Err(Error::InvalidModule(format!("{p}^{e} is too large")));
            }
        }
        Ok(Self { p, exps })
    }

    /// (Z/p)^k
    pub fn elementary(p: u64, k: usize) -> Result<Self> {
        Self::new(p, vec![1; k])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.exps.iter().map(|&e| self.p.pow(e)).collect()
    }

    pub fn log_order(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    pub fn order(&self) -> FormalCardinality {
        FormalCardinality::prime_power(self.p, self.log_order() as i64)
    }

    pub fn is_elementary(&self) -> bool {
        self.exps.iter().all(|&e| e == 1)
    }

    /// Exponent of the group, p^{max e_i}.
    pub fn top_modulus(&self) -> u64 {
        self.p.pow(self.exps.iter().copied().max().unwrap_or(0))
    }

    /// n copies of the coordinates, block by block.
    pub fn power(&self, n: usize) -> Self {
        let exps = (0..n).flat_map(|_| self.exps.iter().copied()).collect();
        Self { p: self.p, exps }
    }

    pub fn identity_hom(&self) -> FinAbHom {
        let cols = (0..self.rank()).map(|i| vec![(i, 1)]).collect();
        FinAbHom::new(self.clone(), self.clone(), cols).expect("identity is well defined")
    }
}

/// Square matrix acting on column vectors, row i reduced modulo p^{e_i}.
pub type Matrix = Vec<Vec<u64>>;

/// Decomposition data at an archimedean place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchPlace {
    /// A real place with the designated image of complex conjugation.
    Real(usize),
    Complex,
}

#[derive(Debug, Clone)]
pub struct GaloisModule {
    group: Arc<FiniteGroup>,
    module: FiniteAbelianPGroup,
    /// One matrix per group element, indexed like the group.
    action: Vec<Matrix>,
    /// Values in (Z/p^{e_1})^×, one per group element.
    cyclo_char: Option<Vec<u64>>,
    places: Vec<ArchPlace>,
}

fn reduce_matrix(module: &FiniteAbelianPGroup, m: &[Vec<i64>]) -> Result<Matrix> {
    let k = module.rank();
    if m.len() != k || m.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidModule(format!("action matrix must be {k}x{k}")));
    }
    let moduli = module.moduli();
    Ok(m.iter()
        .enumerate()
        .map(|(i, r)| r.iter().map(|&x| x.rem_euclid(moduli[i] as i64) as u64).collect())
        .collect())
}

fn mat_mul(module: &FiniteAbelianPGroup, a: &Matrix, b: &Matrix) -> Matrix {
    let k = module.rank();
    let moduli = module.moduli();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let m = moduli[i] as u128;
                    (0..k).fold(0u128, |s, l| (s + a[i][l] as u128 * b[l][j] as u128) % m) as u64
                })
                .collect()
        })
        .collect()
}

fn identity_matrix(k: usize) -> Matrix {
    (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect()
}

impl GaloisModule {
    /// Builds a module from images of a generating set of elements, extended
    /// multiplicatively, then validated exhaustively.
    pub fn from_generator_images(
        group: Arc<FiniteGroup>,
        module: FiniteAbelianPGroup,
        images: &[(usize, Vec<Vec<i64>>)],
        cyclo_images: Option<&[(usize, i64)]>,
        places: Vec<ArchPlace>,
    ) -> Result<Self> {
        let k = module.rank();
        let mut reduced = Vec::with_capacity(images.len());
        for (g, m) in images {
            reduced.push((*g, reduce_matrix(&module, m)?));
        }
        let action = group.extend_from_generators(&reduced, identity_matrix(k), |a, b| mat_mul(&module, a, b))?;
        let cyclo_char = match cyclo_images {
            None => None,
            Some(imgs) => {
                let m = module.top_modulus();
                let vals: Vec<(usize, u64)> = imgs.iter().map(|&(g, x)| (g, x.rem_euclid(m as i64) as u64)).collect();
                Some(group.extend_from_generators(&vals, 1 % m, |a, b| ((*a as u128 * *b as u128) % m as u128) as u64)?)
            }
        };
        Self::from_full_action(group, module, action, cyclo_char, places)
    }

    /// Validates a complete action table.
    pub fn from_full_action(
        group: Arc<FiniteGroup>,
        module: FiniteAbelianPGroup,
        action: Vec<Matrix>,
        cyclo_char: Option<Vec<u64>>,
        places: Vec<ArchPlace>,
    ) -> Result<Self> {
        let n = group.order();
        let k = module.rank();
        if action.len() != n {
            return Err(Error::InvalidModule(format!("{} action matrices for a group of order {n}", action.len())));
        }
        let moduli = module.moduli();
        let exps = module.exponents();
        for (g, m) in action.iter().enumerate() {
            if m.len() != k || m.iter().any(|r| r.len() != k) {
                return Err(Error::InvalidModule(format!("action of {} is not {k}x{k}", group.label(g))));
            }
            for i in 0..k {
                for j in 0..k {
                    if m[i][j] >= moduli[i] {
                        return Err(Error::InvalidModule("unreduced action entry".into()));
                    }
                    if exps[i] > exps[j] && m[i][j] % module.p().pow(exps[i] - exps[j]) != 0 {
                        return Err(Error::InvalidModule(format!(
                            "action of {} is not a well-defined endomorphism at ({i},{j})",
                            group.label(g)
                        )));
                    }
                }
            }
        }
        if action[group.identity()] != identity_matrix(k) {
            return Err(Error::InvalidModule("identity does not act trivially".into()));
        }
        for a in 0..n {
            for b in 0..n {
                if action[group.mul(a, b)] != mat_mul(&module, &action[a], &action[b]) {
                    return Err(Error::InvalidModule(format!(
                        "action is not a homomorphism at ({}, {})",
                        group.label(a),
                        group.label(b)
                    )));
                }
            }
        }
        if let Some(chi) = &cyclo_char {
            let m = module.top_modulus();
            if chi.len() != n {
                return Err(Error::InvalidModule("cyclotomic character has wrong length".into()));
            }
            for a in 0..n {
                if inv_mod(chi[a], m).is_none() && m > 1 {
                    return Err(Error::InvalidModule(format!("cyclotomic character at {} is not a unit", group.label(a))));
                }
                for b in 0..n {
                    if chi[group.mul(a, b)] != ((chi[a] as u128 * chi[b] as u128) % m as u128) as u64 {
                        return Err(Error::InvalidModule("cyclotomic character is not a homomorphism".into()));
                    }
                }
            }
        }
        for pl in &places {
            if let ArchPlace::Real(c) = *pl {
                if c >= n || group.mul(c, c) != group.identity() {
                    return Err(Error::InvalidModule("real place element is not an involution".into()));
                }
            }
        }
        let out = Self { group, module, action, cyclo_char, places };
        // an action by automorphisms: every matrix injective
        for g in 0..n {
            let (ker, _) = out.matrix_hom(g).kernel_image_logs()?;
            if ker != 0 {
                return Err(Error::InvalidModule(format!("action of {} is not invertible", out.group.label(g))));
            }
        }
        Ok(out)
    }

    /// Trivial action.
    pub fn trivial(group: Arc<FiniteGroup>, module: FiniteAbelianPGroup, places: Vec<ArchPlace>) -> Result<Self> {
        let k = module.rank();
        let action = vec![identity_matrix(k); group.order()];
        let chi = Some(vec![1 % module.top_modulus(); group.order()]);
        Self::from_full_action(group, module, action, chi, places)
    }

    pub fn with_places(mut self, places: Vec<ArchPlace>) -> Result<Self> {
        self.places = places;
        Self::from_full_action(self.group, self.module, self.action, self.cyclo_char, self.places)
    }

    pub fn with_cyclo_char(mut self, chi: Option<Vec<u64>>) -> Result<Self> {
        self.cyclo_char = chi;
        Self::from_full_action(self.group, self.module, self.action, self.cyclo_char, self.places)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<FiniteGroup> {
        Arc::clone(&self.group)
    }

    pub fn module(&self) -> &FiniteAbelianPGroup {
        &self.module
    }

    pub fn p(&self) -> u64 {
        self.module.p()
    }

    pub fn action(&self, g: usize) -> &Matrix {
        &self.action[g]
    }

    pub fn cyclo_char(&self) -> Option<&[u64]> {
        self.cyclo_char.as_deref()
    }

    pub fn places(&self) -> &[ArchPlace] {
        &self.places
    }

    pub fn order(&self) -> FormalCardinality {
        self.module.order()
    }

    pub fn is_trivial_action(&self) -> bool {
        let id = identity_matrix(self.module.rank());
        self.action.iter().all(|m| *m == id)
    }

    /// Action of g as an endomorphism.
    pub fn matrix_hom(&self, g: usize) -> FinAbHom {
        self.endo(&self.action[g])
    }

    fn endo(&self, m: &Matrix) -> FinAbHom {
        let k = self.module.rank();
        let cols = (0..k).map(|j| (0..k).filter(|&i| m[i][j] != 0).map(|i| (i, m[i][j])).collect()).collect();
        FinAbHom::new(self.module.clone(), self.module.clone(), cols).expect("validated action")
    }

    /// Sum of matrices, reduced.
    fn matrix_sum<'a>(&self, ms: impl Iterator<Item = &'a Matrix>) -> Matrix {
        let k = self.module.rank();
        let moduli = self.module.moduli();
        let mut acc = vec![vec![0u64; k]; k];
        for m in ms {
            for i in 0..k {
                for j in 0..k {
                    acc[i][j] = (acc[i][j] + m[i][j]) % moduli[i];
                }
            }
        }
        acc
    }

    /// The map m ↦ Σ_{h∈H} h·m for a list of elements H.
    pub fn norm_hom(&self, elements: &[usize]) -> FinAbHom {
        self.endo(&self.matrix_sum(elements.iter().map(|&g| &self.action[g])))
    }

    /// g - 1
    pub fn augmentation_hom(&self, g: usize) -> FinAbHom {
        let moduli = self.module.moduli();
        let mut m = self.action[g].clone();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = (row[i] + moduli[i] - 1) % moduli[i];
        }
        self.endo(&m)
    }

    /// |{m : h·m = m for all h in ⟨H⟩}|, as the kernel of the stacked maps h - 1.
    pub fn fixed_points(&self, h: &[usize]) -> Result<FormalCardinality> {
        let k = self.module.rank();
        let gens: Vec<usize> = h.iter().copied().filter(|&g| g != self.group.identity()).collect();
        if gens.is_empty() {
            return Ok(self.order());
        }
        let target = self.module.power(gens.len());
        let mut cols: Vec<SparseVec> = vec![Vec::new(); k];
        for (b, &g) in gens.iter().enumerate() {
            let aug = self.augmentation_hom(g);
            for (j, col) in aug.columns().iter().enumerate() {
                cols[j].extend(col.iter().map(|&(i, x)| (b * k + i, x)));
            }
        }
        let stacked = FinAbHom::new(self.module.clone(), target, cols)?;
        stacked.kernel_order()
    }

    /// Fixed points under the whole group.
    pub fn invariants(&self) -> Result<FormalCardinality> {
        let all: Vec<usize> = (0..self.group.order()).collect();
        self.fixed_points(&all)
    }

    /// Ĥ⁰ of the subgroup ⟨c⟩ ≅ C_2 (or the trivial group) acting through `c`:
    /// |M^c| / |(1 + c)M|. For the identity this is |M| / |2M|.
    pub fn tate_h0_involution(&self, c: usize) -> Result<FormalCardinality> {
        let fixed = self.fixed_points(&[c])?;
        // for c = 1 the norm of the trivially acting C_2 is multiplication by 2
        let norm = self.norm_hom(&[self.group.identity(), c]);
        Ok(&fixed / &norm.image_order()?)
    }

    /// Cartier dual Hom(M, μ) with (g·φ)(x) = χ(g)·φ(g⁻¹x). In the dual basis
    /// the matrix of g is D_ij = χ(g)·A_ji·p^(e_i - e_j) mod p^(e_i), A = ρ(g⁻¹).
    pub fn cartier_dual(&self) -> Result<GaloisModule> {
        let chi = self.cyclo_char.as_ref().ok_or(Error::MissingCyclotomicCharacter)?;
        let k = self.module.rank();
        let p = self.module.p();
        let exps = self.module.exponents();
        let moduli = self.module.moduli();
        let action = (0..self.group.order())
            .map(|g| {
                let a = &self.action[self.group.inverse(g)];
                (0..k)
                    .map(|i| {
                        (0..k)
                            .map(|j| {
                                let x = a[j][i] as u128;
                                let shifted = if exps[i] >= exps[j] {
                                    x * p.pow(exps[i] - exps[j]) as u128
                                } else {
                                    x / p.pow(exps[j] - exps[i]) as u128
                                };
                                ((chi[g] as u128 % moduli[i] as u128) * (shifted % moduli[i] as u128)
                                    % moduli[i] as u128) as u64
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::from_full_action(
            Arc::clone(&self.group),
            self.module.clone(),
            action,
            Some(chi.clone()),
            self.places.clone(),
        )
    }

    pub fn action_matrices(&self) -> &[Matrix] {
        &self.action
    }
}

/// A representation Γ → GL_n(Z/p), one matrix per element.
#[derive(Debug, Clone)]
pub struct AdjointModule {
    group: Arc<FiniteGroup>,
    p: u64,
    n: usize,
    rep: Vec<Matrix>,
}

impl AdjointModule {
    pub fn from_generator_images(group: Arc<FiniteGroup>, p: u64, n: usize, images: &[(usize, Vec<Vec<i64>>)]) -> Result<Self> {
        let space = FiniteAbelianPGroup::elementary(p, n)?;
        let mut reduced = Vec::new();
        for (g, m) in images {
            reduced.push((*g, reduce_matrix(&space, m)?));
        }
        let rep = group.extend_from_generators(&reduced, identity_matrix(n), |a, b| mat_mul(&space, a, b))?;
        for a in 0..group.order() {
            for b in 0..group.order() {
                if rep[group.mul(a, b)] != mat_mul(&space, &rep[a], &rep[b]) {
                    return Err(Error::InvalidModule("representation is not a homomorphism".into()));
                }
            }
        }
        if rep[group.identity()] != identity_matrix(n) {
            return Err(Error::InvalidModule("identity does not map to the identity matrix".into()));
        }
        Ok(Self { group, p, n, rep })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn matrix(&self, g: usize) -> &Matrix {
        &self.rep[g]
    }

    /// dim {X : X ρ(g) = ρ(g) X} over Z/p.
    pub fn centralizer_dim(&self, g: usize) -> usize {
        let n = self.n;
        let r = &self.rep[g];
        let mut m = FpMatrix::zeros(self.p, n * n, n * n);
        // (Xr - rX)_{ab} = Σ_c X_ac r_cb - r_ac X_cb; variable X_ij at index i*n + j
        for a in 0..n {
            for b in 0..n {
                let row = a * n + b;
                for c in 0..n {
                    m.add_to(row, a * n + c, r[c][b]);
                    m.add_to(row, c * n + b, self.p - r[a][c] % self.p);
                }
            }
        }
        m.nullity()
    }
}

/// ad(ρ): matrices X under X ↦ ρ(g) X ρ(g)⁻¹, flattened row-major.
pub fn adjoint_of(rep: &AdjointModule, places: Vec<ArchPlace>) -> Result<GaloisModule> {
    let n = rep.n;
    let p = rep.p;
    let g_ord = rep.group.order();
    let action = (0..g_ord)
        .map(|g| {
            let r = &rep.rep[g];
            let rinv = &rep.rep[rep.group.inverse(g)];
            let mut m = vec![vec![0u64; n * n]; n * n];
            // image of E_cd is the matrix r[:,c] rinv[d,:]
            for c in 0..n {
                for d in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            m[a * n + b][c * n + d] = (r[a][c] * rinv[d][b]) % p;
                        }
                    }
                }
            }
            m
        })
        .collect();
    let module = FiniteAbelianPGroup::elementary(p, n * n)?;
    GaloisModule::from_full_action(Arc::clone(&rep.group), module, action, None, places)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2))
    }

    #[test]
    fn negation_on_z3_has_no_fixed_points() {
        let g = c2();
        let m = FiniteAbelianPGroup::new(3, vec![1]).unwrap();
        let gm = GaloisModule::from_generator_images(g, m, &[(1, vec![vec![-1]])], None, vec![]).unwrap();
        assert!(gm.fixed_points(&[1]).unwrap().is_one());
        assert_eq!(gm.fixed_points(&[0]).unwrap(), FormalCardinality::prime_power(3, 1));
    }

    #[test]
    fn rejects_non_homomorphisms() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let m = FiniteAbelianPGroup::new(5, vec![1]).unwrap();
        // a generator of order 3 cannot act by 2 (order 4 mod 5)
        assert!(GaloisModule::from_generator_images(g, m, &[(1, vec![vec![2]])], None, vec![]).is_err());
    }

    #[test]
    fn rejects_ill_defined_matrices() {
        let g = c2();
        let m = FiniteAbelianPGroup::new(2, vec![2, 1]).unwrap();
        // swapping coordinates of Z/4 + Z/2 is not an endomorphism
        let swap = vec![vec![0, 1], vec![1, 0]];
        assert!(GaloisModule::from_generator_images(g, m, &[(1, swap)], None, vec![]).is_err());
    }

    #[test]
    fn klein_swap_via_quaternions() {
        let q8 = Arc::new(FiniteGroup::quaternion());
        let m = FiniteAbelianPGroup::elementary(2, 2).unwrap();
        let i = q8.element("i").unwrap();
        let j = q8.element("j").unwrap();
        let swap = vec![vec![0, 1], vec![1, 0]];
        let gm = GaloisModule::from_generator_images(
            Arc::clone(&q8),
            m,
            &[(i, swap.clone()), (j, swap)],
            None,
            vec![],
        )
        .unwrap();
        assert_eq!(gm.invariants().unwrap(), FormalCardinality::prime_power(2, 1));
        // brute force over the four vectors
        let fixed = (0..4u64)
            .filter(|&v| {
                let x = [v & 1, v >> 1];
                (0..8).all(|g| {
                    let a = gm.action(g);
                    (0..2).all(|r| (a[r][0] * x[0] + a[r][1] * x[1]) % 2 == x[r])
                })
            })
            .count();
        assert_eq!(fixed, 2);
    }

    #[test]
    fn cartier_dual_twists_by_character() {
        let g = c2();
        let m = FiniteAbelianPGroup::new(3, vec![1]).unwrap();
        let triv = GaloisModule::trivial(Arc::clone(&g), m.clone(), vec![]).unwrap();
        let dual = triv.cartier_dual().unwrap();
        assert_eq!(dual.invariants().unwrap(), FormalCardinality::prime_power(3, 1));
        let twisted = triv.with_cyclo_char(Some(vec![1, 2])).unwrap();
        assert!(twisted.cartier_dual().unwrap().invariants().unwrap().is_one());
        let no_chi = GaloisModule::from_full_action(g, m, vec![vec![vec![1]]; 2], None, vec![]).unwrap();
        assert!(matches!(no_chi.cartier_dual(), Err(Error::MissingCyclotomicCharacter)));
    }

    #[test]
    fn double_dual_is_identity_for_mixed_exponents() {
        let g = c2();
        let m = FiniteAbelianPGroup::new(3, vec![2, 1]).unwrap();
        // generator acts by [[-1, 3], [0, 1]] on Z/9 + Z/3
        let gm = GaloisModule::from_generator_images(g, m, &[(1, vec![vec![-1, 3], vec![0, 1]])], Some(&[(1, -1)]), vec![]);
        let gm = gm.unwrap();
        let dd = gm.cartier_dual().unwrap().cartier_dual().unwrap();
        assert_eq!(dd.action_matrices(), gm.action_matrices());
    }

    #[test]
    fn centralizers() {
        let g = c2();
        let rep = AdjointModule::from_generator_images(Arc::clone(&g), 5, 2, &[(1, vec![vec![1, 0], vec![0, -1]])]).unwrap();
        assert_eq!(rep.centralizer_dim(0), 4);
        assert_eq!(rep.centralizer_dim(1), 2);
        let ad = adjoint_of(&rep, vec![]).unwrap();
        assert_eq!(ad.invariants().unwrap(), FormalCardinality::prime_power(5, 2));
        let scalar = AdjointModule::from_generator_images(g, 5, 3, &[(1, vec![vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]])]).unwrap();
        assert_eq!(scalar.centralizer_dim(1), 9);
    }
}
