//! Exact positive rationals stored as prime-exponent maps.
//!
//! Every cardinality produced by the formulas is a [`FormalCardinality`]. Products,
//! quotients and comparisons never go through machine integers, so values such as
//! `p^([K:Q] * dim M)` cannot overflow.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigUint;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FormalCardinality {
    exps: BTreeMap<u64, i64>,
}

impl FormalCardinality {
    pub fn one() -> Self {
        Self::default()
    }

    /// `p^e`. Zero exponents are dropped.
    pub fn prime_power(p: u64, e: i64) -> Self {
        let mut exps = BTreeMap::new();
        if e != 0 {
            exps.insert(p, e);
        }
        Self { exps }
    }

    pub fn from_exponents<I: IntoIterator<Item = (u64, i64)>>(it: I) -> Self {
        let mut out = Self::one();
        for (p, e) in it {
            out.add_exponent(p, e);
        }
        out
    }

    pub fn exponent(&self, p: u64) -> i64 {
        self.exps.get(&p).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// True when the value is an integer (no negative exponent).
    pub fn is_integral(&self) -> bool {
        self.exps.values().all(|&e| e > 0)
    }

    /// True if every prime in the support equals `p`.
    pub fn is_power_of(&self, p: u64) -> bool {
        self.exps.keys().all(|&q| q == p)
    }

    pub fn add_exponent(&mut self, p: u64, e: i64) {
        if e == 0 {
            return;
        }
        let slot = self.exps.entry(p).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.exps.remove(&p);
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            exps: self.exps.iter().map(|(&p, &e)| (p, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        Self {
            exps: self.exps.iter().map(|(&p, &e)| (p, e * k)).collect(),
        }
    }

    /// Numerator and denominator as big integers.
    pub fn to_ratio(&self) -> (BigUint, BigUint) {
        let mut num = BigUint::from(1u32);
        let mut den = BigUint::from(1u32);
        for (&p, &e) in &self.exps {
            let pe = BigUint::from(p).pow(e.unsigned_abs() as u32);
            if e > 0 {
                num *= pe;
            } else {
                den *= pe;
            }
        }
        (num, den)
    }

    /// Exact rational comparison.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let (a, b) = self.to_ratio();
        let (c, d) = other.to_ratio();
        (a * d).cmp(&(c * b))
    }

    pub fn le_value(&self, other: &Self) -> bool {
        self.cmp_value(other) != Ordering::Greater
    }
}

impl Mul for &FormalCardinality {
    type Output = FormalCardinality;
    fn mul(self, rhs: &FormalCardinality) -> FormalCardinality {
        let mut out = self.clone();
        for (&p, &e) in &rhs.exps {
            out.add_exponent(p, e);
        }
        out
    }
}

impl Mul for FormalCardinality {
    type Output = FormalCardinality;
    fn mul(self, rhs: FormalCardinality) -> FormalCardinality {
        &self * &rhs
    }
}

impl Div for &FormalCardinality {
    type Output = FormalCardinality;
    fn div(self, rhs: &FormalCardinality) -> FormalCardinality {
        self * &rhs.inverse()
    }
}

impl Div for FormalCardinality {
    type Output = FormalCardinality;
    fn div(self, rhs: FormalCardinality) -> FormalCardinality {
        &self / &rhs
    }
}

impl std::iter::Product for FormalCardinality {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |acc, x| acc * x)
    }
}

impl fmt::Display for FormalCardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

// Serialized as {"p": exponent}, keys in ascending numeric order.
impl Serialize for FormalCardinality {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.exps.len()))?;
        for (p, e) in &self.exps {
            map.serialize_entry(&p.to_string(), e)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for FormalCardinality {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<String, i64> = BTreeMap::deserialize(d)?;
        let mut out = FormalCardinality::one();
        for (k, e) in raw {
            let p: u64 = k
                .parse()
                .map_err(|_| de::Error::custom(format!("bad prime key {k:?}")))?;
            out.add_exponent(p, e);
        }
        Ok(out)
    }
}

/// A cardinality that may only be known up to a bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ValueOrBound {
    Exact { value: FormalCardinality },
    UpperBound { value: FormalCardinality },
    Interval { lo: FormalCardinality, hi: FormalCardinality },
}

impl ValueOrBound {
    pub fn interval(lo: FormalCardinality, hi: FormalCardinality) -> Self {
        debug_assert!(lo.le_value(&hi));
        ValueOrBound::Interval { lo, hi }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ValueOrBound::Exact { .. })
    }

    pub fn exact_value(&self) -> Option<&FormalCardinality> {
        match self {
            ValueOrBound::Exact { value } => Some(value),
            _ => None,
        }
    }

    /// Largest value consistent with the bound.
    pub fn upper(&self) -> &FormalCardinality {
        match self {
            ValueOrBound::Exact { value } | ValueOrBound::UpperBound { value } => value,
            ValueOrBound::Interval { hi, .. } => hi,
        }
    }

    /// Multiply every endpoint by a known factor, keeping the kind.
    pub fn scale(&self, factor: &FormalCardinality) -> Self {
        match self {
            ValueOrBound::Exact { value } => ValueOrBound::Exact { value: value * factor },
            ValueOrBound::UpperBound { value } => ValueOrBound::UpperBound { value: value * factor },
            ValueOrBound::Interval { lo, hi } => ValueOrBound::Interval {
                lo: lo * factor,
                hi: hi * factor,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_exponents_vanish() {
        let a = FormalCardinality::prime_power(2, 3);
        let b = FormalCardinality::prime_power(2, -3);
        assert!((a * b).is_one());
        assert!(FormalCardinality::prime_power(5, 0).is_one());
    }

    #[test]
    fn serializes_as_prime_keyed_map() {
        let c = FormalCardinality::from_exponents([(3, -1), (2, 2)]);
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"2":2,"3":-1}"#);
        let back: FormalCardinality = serde_json::from_str(r#"{"2":2,"3":-1}"#).unwrap();
        assert_eq!(back, c);
        assert_eq!(serde_json::to_string(&FormalCardinality::one()).unwrap(), "{}");
    }

    #[test]
    fn compares_as_rationals() {
        // 2^2 * 3^-1 = 4/3 > 1 > 3/4
        let a = FormalCardinality::from_exponents([(2, 2), (3, -1)]);
        assert_eq!(a.cmp_value(&FormalCardinality::one()), Ordering::Greater);
        assert_eq!(a.inverse().cmp_value(&FormalCardinality::one()), Ordering::Less);
        assert!(FormalCardinality::prime_power(2, 1).le_value(&FormalCardinality::prime_power(2, 2)));
    }

    #[test]
    fn value_or_bound_scales_all_endpoints() {
        let two = FormalCardinality::prime_power(2, 1);
        let iv = ValueOrBound::interval(FormalCardinality::one(), two.clone());
        match iv.scale(&two) {
            ValueOrBound::Interval { lo, hi } => {
                assert_eq!(lo, two);
                assert_eq!(hi, FormalCardinality::prime_power(2, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    fn small_card() -> impl Strategy<Value = FormalCardinality> {
        prop::collection::vec((prop::sample::select(vec![2u64, 3, 5, 7]), -4i64..5), 0..4)
            .prop_map(FormalCardinality::from_exponents)
    }

    proptest! {
        #[test]
        fn group_laws(a in small_card(), b in small_card()) {
            prop_assert_eq!(&(&a * &b) / &b, a.clone());
            prop_assert!((&a * &a.inverse()).is_one());
            let (n, d) = (&a * &b).to_ratio();
            let (n1, d1) = a.to_ratio();
            let (n2, d2) = b.to_ratio();
            prop_assert_eq!(n * &d1 * &d2, n1 * n2 * d);
        }

        #[test]
        fn ordering_is_multiplicative(a in small_card(), b in small_card(), c in small_card()) {
            prop_assert_eq!(a.cmp_value(&b), (&a * &c).cmp_value(&(&b * &c)));
        }
    }
}
