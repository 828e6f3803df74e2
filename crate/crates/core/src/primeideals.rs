//! Prime ideals ordered by norm, and the counting function π_K.

use std::cmp::Ordering;

use serde::Serialize;

use crate::field::{split_kind, FieldDescriptor, SplitKind};
use crate::numeric::{iroot, norm_bound};
use crate::sieve::primes_up_to;

/// A prime ideal, identified by the rational prime below it and a conjugate index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeIdeal {
    pub p: u64,
    /// 0, or 1 for the second ideal above a split prime.
    pub conjugate_index: u8,
    pub norm: u64,
    /// Residue degree: 1, or 2 for inert primes.
    pub f: u8,
    pub ramified: bool,
}

impl PrimeIdeal {
    pub fn key(&self) -> (u64, u64, u8) {
        (self.norm, self.p, self.conjugate_index)
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Prime ideals above a single rational prime, regardless of any norm bound.
pub fn ideals_above(desc: &FieldDescriptor, p: u64) -> Vec<PrimeIdeal> {
    let unramified = |idx: u8, f: u8, norm: u64| PrimeIdeal {
        p,
        conjugate_index: idx,
        norm,
        f,
        ramified: false,
    };
    if desc.is_rational() {
        return vec![unramified(0, 1, p)];
    }
    match split_kind(desc, p) {
        SplitKind::Split => vec![unramified(0, 1, p), unramified(1, 1, p)],
        SplitKind::Inert => vec![unramified(0, 2, p * p)],
        SplitKind::Ramified => vec![PrimeIdeal {
            p,
            conjugate_index: 0,
            norm: p,
            f: 1,
            ramified: true,
        }],
    }
}

/// All prime ideals of norm at most `x`, sorted by (norm, p, conjugate index).
pub fn prime_ideals_up_to(desc: &FieldDescriptor, x: f64) -> Vec<PrimeIdeal> {
    prime_ideals_up_to_bound(desc, norm_bound(x))
}

pub fn prime_ideals_up_to_bound(desc: &FieldDescriptor, bound: u64) -> Vec<PrimeIdeal> {
    if bound < 2 {
        return Vec::new();
    }
    let primes = primes_up_to(bound);
    let inert_limit = iroot(bound, 2);
    let mut ideals = Vec::with_capacity(primes.len() * desc.degree as usize);
    for p in primes {
        if desc.is_rational() {
            ideals.extend(ideals_above(desc, p));
            continue;
        }
        let kind = split_kind(desc, p);
        if kind == SplitKind::Inert && p > inert_limit {
            continue;
        }
        ideals.extend(ideals_above(desc, p));
    }
    // Inert norms p² interleave with the split and ramified norms.
    if !desc.is_rational() {
        ideals.sort_unstable();
    }
    ideals
}

/// π_K(x) together with the comparison value `x / log x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrimeCount {
    pub x: f64,
    pub count: u64,
    pub model: f64,
}

#[allow(non_snake_case)]
pub fn pi_K(desc: &FieldDescriptor, x: f64) -> PrimeCount {
    let bound = norm_bound(x);
    let count = if bound < 2 {
        0
    } else if desc.is_rational() {
        primes_up_to(bound).len() as u64
    } else {
        let inert_limit = iroot(bound, 2);
        primes_up_to(bound)
            .into_iter()
            .map(|p| match split_kind(desc, p) {
                SplitKind::Split => 2,
                SplitKind::Ramified => 1,
                SplitKind::Inert => u64::from(p <= inert_limit),
            })
            .sum()
    };
    let model = if x > 1.0 { x / x.ln() } else { 0.0 };
    PrimeCount { x, count, model }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norms(ideals: &[PrimeIdeal]) -> Vec<u64> {
        ideals.iter().map(|i| i.norm).collect()
    }

    fn gaussian() -> FieldDescriptor {
        FieldDescriptor::quadratic("Qi", -1, 1, 1.0, 4).unwrap()
    }

    fn q5() -> FieldDescriptor {
        FieldDescriptor::quadratic("Qsqrt5", 5, 1, 0.481_211_825_059_603_4, 2).unwrap()
    }

    #[test]
    fn small_tables() {
        let q = FieldDescriptor::rationals();
        assert_eq!(norms(&prime_ideals_up_to(&q, 10.0)), vec![2, 3, 5, 7]);
        assert_eq!(
            norms(&prime_ideals_up_to(&gaussian(), 10.0)),
            vec![2, 5, 5, 9]
        );
        assert_eq!(
            norms(&prime_ideals_up_to(&q5(), 11.0)),
            vec![4, 5, 9, 11, 11]
        );
        assert!(prime_ideals_up_to(&q, 1.5).is_empty());
    }

    #[test]
    fn conjugates_are_ordered() {
        let table = prime_ideals_up_to(&gaussian(), 30.0);
        let fives: Vec<_> = table.iter().filter(|i| i.p == 5).collect();
        assert_eq!(fives.len(), 2);
        assert_eq!(fives[0].conjugate_index, 0);
        assert_eq!(fives[1].conjugate_index, 1);
        assert!(table.windows(2).all(|w| w[0] < w[1]));
        let two = table[0];
        assert!(two.ramified && two.norm == 2);
    }

    #[test]
    fn pi_k_examples() {
        assert_eq!(pi_K(&FieldDescriptor::rationals(), 100.0).count, 25);
        assert_eq!(pi_K(&gaussian(), 10.0).count, 4);
        assert_eq!(pi_K(&gaussian(), 1.5).count, 0);
        for x in [10.0, 100.0, 1000.0, 12345.0] {
            assert_eq!(
                pi_K(&q5(), x).count,
                prime_ideals_up_to(&q5(), x).len() as u64
            );
        }
    }

    #[test]
    fn prefix_property() {
        let k = gaussian();
        let big = prime_ideals_up_to(&k, 5000.0);
        for x in [2.0, 9.0, 50.0, 1000.0, 4999.0] {
            let small = prime_ideals_up_to(&k, x);
            assert_eq!(&big[..small.len()], &small[..]);
        }
    }
}
