use std::sync::Arc;

use eulerchar::cohom::{self, bar_differential, oracle};
use eulerchar::fingroup::FiniteGroup;
use eulerchar::formulas::{presentation_bounds, RowInput, RowSource};
use eulerchar::galmod::{FiniteAbelianPGroup, GaloisModule};
use eulerchar::numfield::{product_formula_check, split_prime, NumberField, PlaceSet};
use eulerchar::selftest;
use proptest::prelude::*;

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// A unit of Z/p^k whose order divides n.
fn unit_of_order_dividing(p: u64, k: u32, n: u64, seed: u64) -> u64 {
    let m = p.pow(k);
    let phi = m / p * (p - 1);
    let mut u = seed % m;
    while gcd(u, p) != 1 {
        u = (u + 1) % m;
    }
    pow_mod(u, phi / gcd(phi, n), m)
}

fn cyclic_module(n: usize, p: u64, k: u32, u: u64) -> GaloisModule {
    let images = if n == 1 { vec![] } else { vec![(1, vec![vec![u as i64]])] };
    GaloisModule::from_generator_images(
        Arc::new(FiniteGroup::cyclic(n)),
        FiniteAbelianPGroup::new(p, vec![k]).unwrap(),
        &images,
        None,
        vec![],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn herbrand_quotient_is_one(n in 1usize..=9, p in prop::sample::select(vec![2u64, 3, 5, 7]), k in 1u32..=3, seed in any::<u64>()) {
        let u = unit_of_order_dividing(p, k, n as u64, seed);
        let m = cyclic_module(n, p, k, u);
        prop_assert!(cohom::herbrand_quotient(&m).unwrap().is_one());
    }

    #[test]
    fn differentials_compose_to_zero(n in 1usize..=6, p in prop::sample::select(vec![2u64, 3, 5]), k in 1u32..=2, seed in any::<u64>()) {
        let u = unit_of_order_dividing(p, k, n as u64, seed);
        let m = cyclic_module(n, p, k, u);
        for i in 0..2 {
            let d0 = bar_differential(&m, i).unwrap();
            let d1 = bar_differential(&m, i + 1).unwrap();
            prop_assert!(d1.compose(&d0).unwrap().is_zero());
        }
    }

    #[test]
    fn engines_agree_on_diagonal_modules(
        n in 1usize..=8,
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        seeds in prop::collection::vec(any::<u64>(), 1..=3),
    ) {
        let k = seeds.len();
        let diag: Vec<u64> = seeds.iter().map(|&s| unit_of_order_dividing(p, 1, n as u64, s)).collect();
        let mat: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| if i == j { diag[i] as i64 } else { 0 }).collect()).collect();
        let images = if n == 1 { vec![] } else { vec![(1, mat)] };
        let m = GaloisModule::from_generator_images(
            Arc::new(FiniteGroup::cyclic(n)),
            FiniteAbelianPGroup::elementary(p, k).unwrap(),
            &images,
            None,
            vec![],
        ).unwrap();
        let a = cohom::cohomology(&m).unwrap();
        let b = oracle::cocycle_oracle(&m).unwrap();
        prop_assert_eq!(a.dims, b.dims);
        prop_assert_eq!(a.tate_h0, b.tate_h0);
    }

    #[test]
    fn product_formula_holds(d in -200i64..=200, num in 1i64..=1_000_000, den in 1u64..=1_000_000, neg in any::<bool>()) {
        if let Ok(k) = NumberField::quadratic(d) {
            let num = if neg { -num } else { num };
            prop_assert!(product_formula_check(&k, num, den).unwrap());
        }
    }

    #[test]
    fn local_degrees_sum_to_field_degree(d in -500i64..=500, p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101])) {
        if let Ok(k) = NumberField::quadratic(d) {
            prop_assert_eq!(split_prime(&k, p).unwrap().local_degree_sum(), 2);
        }
    }
}

#[test]
fn trivial_row_never_reports_negative_excess() {
    // with S meeting no place above p, the trivial module gives r - d >= 0
    let k = NumberField::quadratic(-5).unwrap();
    let s = PlaceSet::archimedean(&k);
    let mut groups = selftest::small_groups();
    groups.extend((5..=12).map(|n| (format!("C{n}"), FiniteGroup::cyclic(n))));
    for (name, g) in groups {
        let g = Arc::new(g);
        let d = g.minimal_generators().unwrap() as u64;
        for p in [2u64, 3, 5] {
            let m = GaloisModule::trivial(g.clone(), FiniteAbelianPGroup::elementary(p, 1).unwrap(), vec![]).unwrap();
            let row = RowInput { id: name.clone(), p, source: RowSource::Module(Box::new(m)), is_mu_p: false, mu_p_dim: None };
            let l = presentation_bounds(&s, d, &[row], true).unwrap();
            assert!(l.sup_minus_d >= 0, "{name} at {p}: {}", l.sup_minus_d);
        }
    }
}
