//! Finite groups materialized as composition tables.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::snf;

pub const CLOSURE_CAP: usize = 5000;
pub const GENERATOR_CAP: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    n: usize,
    /// `table[a * n + b]` is the index of `a * b`.
    table: Vec<u16>,
    identity: usize,
    inverses: Vec<usize>,
    labels: Vec<String>,
    /// Present when the group was built from permutations.
    perms: Option<Vec<Vec<u32>>>,
}

impl FiniteGroup {
    /// Validates a composition table. Rows are left factors.
    pub fn from_table(table: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || n > CLOSURE_CAP {
            return Err(Error::InvalidTable("order".into()));
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidTable("closure".into()));
        }
        let flat: Vec<u16> = table.iter().flatten().map(|&x| x as u16).collect();
        let mul = |a: usize, b: usize| flat[a * n + b] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| Error::InvalidTable("identity".into()))?;
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            inverses[a] = (0..n)
                .find(|&b| mul(a, b) == identity && mul(b, a) == identity)
                .ok_or_else(|| Error::InvalidTable("inverses".into()))?;
        }
        let assoc = |a: usize, b: usize, c: usize| mul(mul(a, b), c) == mul(a, mul(b, c));
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(Error::InvalidTable("associativity".into()));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x7ab1e);
            for _ in 0..10_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !assoc(a, b, c) {
                    return Err(Error::InvalidTable("associativity".into()));
                }
            }
        }
        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(_) => return Err(Error::InvalidTable("labels".into())),
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        Ok(Self { n, table: flat, identity, inverses, labels, perms: None })
    }

    /// Closure of permutation generators; element 0 is the identity.
    pub fn from_permutations(generators: &[Vec<u32>]) -> Result<Self> {
        Self::from_permutations_capped(generators, CLOSURE_CAP)
    }

    pub fn from_permutations_capped(generators: &[Vec<u32>], cap: usize) -> Result<Self> {
        let degree = generators.iter().map(|g| g.len()).max().unwrap_or(0);
        let gens: Vec<Vec<u32>> = generators
            .iter()
            .map(|g| {
                let mut g = g.clone();
                g.extend(g.len() as u32..degree as u32);
                g
            })
            .collect();
        for g in &gens {
            let mut seen = vec![false; degree];
            for &x in g {
                if x as usize >= degree || seen[x as usize] {
                    return Err(Error::InvalidPermutation(format!("{g:?} is not a bijection")));
                }
                seen[x as usize] = true;
            }
        }
        let id: Vec<u32> = (0..degree as u32).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<u32>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let h = compose(g, &elems[i]);
                if !index.contains_key(&h) {
                    if elems.len() == cap {
                        return Err(Error::OrderCapExceeded(cap));
                    }
                    index.insert(h.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(h);
                }
            }
        }
        let n = elems.len();
        let mut table = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = index[&compose(&elems[a], &elems[b])] as u16;
            }
        }
        let inverses = (0..n).map(|a| index[&invert(&elems[a])]).collect();
        let labels = elems.iter().map(|e| cycle_notation(e)).collect();
        Ok(Self { n, table, identity: 0, inverses, labels, perms: Some(elems) })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// C_n with labels "1", "g", "g^2", ...
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = (0..n)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{k}"),
            })
            .collect();
        Self::from_table(table, Some(labels)).expect("cyclic table is a group")
    }

    /// Q8 on 1, -1, i, -i, j, -j, k, -k.
    pub fn quaternion() -> Self {
        // unit quaternions as (sign, axis) with axis 0=1, 1=i, 2=j, 3=k
        let elems: Vec<(i8, usize)> = vec![(1, 0), (-1, 0), (1, 1), (-1, 1), (1, 2), (-1, 2), (1, 3), (-1, 3)];
        let basis_mul = |a: usize, b: usize| -> (i8, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (1, x),
                (x, y) if x == y => (-1, 0),
                (1, 2) => (1, 3),
                (2, 1) => (-1, 3),
                (2, 3) => (1, 1),
                (3, 2) => (-1, 1),
                (3, 1) => (1, 2),
                (1, 3) => (-1, 2),
                _ => unreachable!(),
            }
        };
        let table = elems
            .iter()
            .map(|&(s1, a)| {
                elems
                    .iter()
                    .map(|&(s2, b)| {
                        let (s, c) = basis_mul(a, b);
                        let sign = s * s1 * s2;
                        elems.iter().position(|&e| e == (sign, c)).unwrap()
                    })
                    .collect()
            })
            .collect();
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].map(String::from).to_vec();
        Self::from_table(table, Some(labels)).expect("quaternion table is a group")
    }

    /// C2 x C2 on 1, a, b, ab.
    pub fn klein4() -> Self {
        let table = (0..4).map(|x: usize| (0..4).map(|y| x ^ y).collect()).collect();
        let labels = ["1", "a", "b", "ab"].map(String::from).to_vec();
        Self::from_table(table, Some(labels)).expect("Klein table is a group")
    }

    /// S3 generated by (1 2) and (1 2 3).
    pub fn symmetric3() -> Self {
        Self::from_permutations(&[parse_permutation("(1 2)").unwrap(), parse_permutation("(1 2 3)").unwrap()])
            .expect("S3 is small")
    }

    /// Builtin names: trivial, C_n (or Cn), Q8, Klein4, S3.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "trivial" => Ok(Self::trivial()),
            "Q8" => Ok(Self::quaternion()),
            "Klein4" => Ok(Self::klein4()),
            "S3" => Ok(Self::symmetric3()),
            _ => {
                let n = name
                    .strip_prefix("C_")
                    .or_else(|| name.strip_prefix('C'))
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&n| (1..=CLOSURE_CAP).contains(&n))
                    .ok_or_else(|| Error::Schema(format!("unknown builtin group {name:?}")))?;
                Ok(Self::cyclic(n))
            }
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|a| (0..self.n).map(|b| self.mul(a, b)).collect()).collect()
    }

    /// Finds an element by label; for permutation groups any cycle notation of the
    /// element is accepted.
    pub fn element(&self, label: &str) -> Result<usize> {
        if let Some(i) = self.labels.iter().position(|l| l == label) {
            return Ok(i);
        }
        if self.perms.is_some() {
            if let Ok(perm) = parse_permutation(label) {
                let canon = cycle_notation(&perm);
                if let Some(i) = self.labels.iter().position(|l| *l == canon) {
                    return Ok(i);
                }
            }
        }
        Err(Error::UnknownElement(label.to_string()))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic_generator().is_some()
    }

    pub fn cyclic_generator(&self) -> Option<usize> {
        (0..self.n).find(|&a| self.element_order(a) == self.n)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Elements with g^2 = 1, identity included.
    pub fn involutions(&self) -> Vec<usize> {
        (0..self.n).filter(|&a| self.mul(a, a) == self.identity).collect()
    }

    /// Elements of the subgroup generated by `gens`, sorted.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.n).filter(|&i| seen[i]).collect()
    }

    pub fn generates(&self, gens: &[usize]) -> bool {
        self.subgroup(gens).len() == self.n
    }

    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let mut comms: Vec<usize> = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                let c = self.mul(self.mul(self.inverse(a), self.inverse(b)), self.mul(a, b));
                comms.push(c);
            }
        }
        comms.sort_unstable();
        comms.dedup();
        self.subgroup(&comms)
    }

    /// Invariant factors d_1 | d_2 | ... (all > 1) of G/[G,G].
    pub fn abelianization(&self) -> Vec<u64> {
        let comm = self.commutator_subgroup();
        // coset index of every element
        let mut coset = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for a in 0..self.n {
            if coset[a] != usize::MAX {
                continue;
            }
            for &h in &comm {
                coset[self.mul(a, h)] = reps.len();
            }
            reps.push(a);
        }
        let q = reps.len();
        let qmul = |x: usize, y: usize| coset[self.mul(reps[x], reps[y])];
        let qid = coset[self.identity];
        // polycyclic presentation: x_i^{n_i} is a word in x_1..x_{i-1}
        let mut gens: Vec<usize> = Vec::new();
        let mut span: Vec<Option<Vec<i64>>> = vec![None; q];
        span[qid] = Some(vec![]);
        let mut relations: Vec<Vec<i64>> = Vec::new();
        let mut members = vec![qid];
        while members.len() < q {
            let x = (0..q).find(|&c| span[c].is_none()).expect("proper subgroup");
            let k = gens.len();
            gens.push(x);
            // powers of x until we land in the current span
            let mut power = x;
            let mut m = 1i64;
            while span[power].is_none() {
                power = qmul(power, x);
                m += 1;
            }
            let mut rel = span[power].clone().unwrap();
            rel.resize(k, 0);
            for c in rel.iter_mut() {
                *c = -*c;
            }
            rel.push(m);
            relations.push(rel);
            // extend span by x^j * old, 0 < j < m
            let old = members.clone();
            let mut xp = x;
            for j in 1..m {
                for &y in &old {
                    let z = qmul(xp, y);
                    let mut w = span[y].clone().unwrap();
                    w.resize(k, 0);
                    w.push(j);
                    if span[z].is_none() {
                        span[z] = Some(w);
                        members.push(z);
                    }
                }
                xp = qmul(xp, x);
            }
        }
        let r = gens.len();
        let columns: Vec<Vec<BigInt>> = relations
            .iter()
            .map(|rel| (0..r).map(|i| BigInt::from(rel.get(i).copied().unwrap_or(0))).collect())
            .collect();
        let inv = snf::finite_cokernel(r, &columns).expect("relation lattice has full rank");
        inv.iter().map(|d| d.to_u64().expect("invariant factor fits")).collect()
    }

    /// Smallest number of generators, by brute force over subsets of increasing size.
    pub fn minimal_generators(&self) -> Result<usize> {
        if self.n > GENERATOR_CAP {
            return Err(Error::OrderCapExceeded(GENERATOR_CAP));
        }
        if self.n == 1 {
            return Ok(0);
        }
        // d(G) >= d(G^ab), the number of invariant factors
        let start = self.abelianization().len().max(1);
        let candidates: Vec<usize> = (0..self.n).filter(|&a| a != self.identity).collect();
        for k in start..=self.n {
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                let gens: Vec<usize> = idx.iter().map(|&i| candidates[i]).collect();
                if self.generates(&gens) {
                    return Ok(k);
                }
                if !next_combination(&mut idx, candidates.len()) {
                    break;
                }
            }
        }
        unreachable!("the whole group generates itself")
    }

    /// Extends images of generating elements to a map on all elements by
    /// ρ(g·x) = ρ(g)·ρ(x), breadth first from the identity. Consistency of the
    /// extension is the caller's job.
    pub fn extend_from_generators<T: Clone>(
        &self,
        images: &[(usize, T)],
        identity: T,
        mul: impl Fn(&T, &T) -> T,
    ) -> Result<Vec<T>> {
        let mut out: Vec<Option<T>> = vec![None; self.n];
        out[self.identity] = Some(identity);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for (g, img) in images {
                let y = self.mul(*g, x);
                if out[y].is_none() {
                    out[y] = Some(mul(img, out[x].as_ref().unwrap()));
                    queue.push_back(y);
                }
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::InvalidModule(format!("given elements do not generate the group (missing {})", self.labels[i]))
                })
            })
            .collect()
    }
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// (g h)(x) = g(h(x))
fn compose(g: &[u32], h: &[u32]) -> Vec<u32> {
    h.iter().map(|&x| g[x as usize]).collect()
}

fn invert(g: &[u32]) -> Vec<u32> {
    let mut out = vec![0; g.len()];
    for (i, &x) in g.iter().enumerate() {
        out[x as usize] = i as u32;
    }
    out
}

/// Parses one-line cycle notation with 1-based points, e.g. "(1 2 3)(4 5)" or "()".
pub fn parse_permutation(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::InvalidPermutation(s.to_string());
    let mut cycles: Vec<Vec<u32>> = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let inner = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = inner.find(')').ok_or_else(bad)?;
        let body = &inner[..close];
        let pts: Vec<u32> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().ok().filter(|&x| x >= 1).ok_or_else(bad))
            .collect::<Result<_>>()?;
        cycles.push(pts);
        rest = inner[close + 1..].trim_start();
    }
    let degree = cycles.iter().flatten().copied().max().unwrap_or(0) as usize;
    let mut perm: Vec<u32> = (0..degree as u32).collect();
    let mut used = vec![false; degree];
    for c in &cycles {
        for (i, &x) in c.iter().enumerate() {
            let x = (x - 1) as usize;
            if used[x] {
                return Err(bad());
            }
            used[x] = true;
            perm[x] = c[(i + 1) % c.len()] - 1;
        }
    }
    Ok(perm)
}

/// Canonical cycle notation: cycles start at their least point, ascending; fixed
/// points omitted; identity is "()".
pub fn cycle_notation(perm: &[u32]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] as usize == start {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cyc.push((x + 1).to_string());
            x = perm[x] as usize;
        }
        out.push('(');
        out.push_str(&cyc.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        "()".to_string()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_round_trip() {
        let p = parse_permutation("(2 3 1)").unwrap();
        assert_eq!(cycle_notation(&p), "(1 2 3)");
        assert_eq!(cycle_notation(&parse_permutation("()").unwrap()), "()");
        assert!(parse_permutation("(1 1)").is_err());
        assert!(parse_permutation("1 2").is_err());
    }

    #[test]
    fn builtins_have_expected_orders() {
        assert_eq!(FiniteGroup::builtin("trivial").unwrap().order(), 1);
        assert_eq!(FiniteGroup::builtin("C_6").unwrap().order(), 6);
        assert_eq!(FiniteGroup::builtin("C4").unwrap().order(), 4);
        assert_eq!(FiniteGroup::builtin("Q8").unwrap().order(), 8);
        assert_eq!(FiniteGroup::builtin("S3").unwrap().order(), 6);
        assert!(FiniteGroup::builtin("D17x").is_err());
    }

    #[test]
    fn corrupted_table_names_the_invariant() {
        let mut t = FiniteGroup::klein4().table();
        t[1][2] = 1;
        match FiniteGroup::from_table(t, None) {
            Err(Error::InvalidTable(what)) => assert!(!what.is_empty()),
            other => panic!("expected failure, got {other:?}"),
        }
        // identity and inverses exist but (1*2)*2 != 1*(2*2)
        let t = vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]];
        assert_eq!(FiniteGroup::from_table(t, None), Err(Error::InvalidTable("associativity".into())));
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut idx = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut idx, 4) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
