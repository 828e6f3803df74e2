mod common;

use idealstat::catalog::Catalog;
use idealstat::constants::{lambda_hfree, lambda_hfree_f64, lambda_hfull, IntPolynomial};
use idealstat::counting::{
    count_T_h, count_hfree, count_hfree_coprime, count_hfull, divisor_density, Subset,
};
use idealstat::ekstat::{ks_distance, phi, NormalizedSample};
use idealstat::field::{kronecker, split_prime, SplitKind};
use idealstat::ideals::{h_full_decompose, is_h_free, is_h_full, mobius, omega};
use idealstat::mertens::{ideal_reciprocal_sum, prime_reciprocal_sum};
use idealstat::primeideals::prime_ideals_up_to;
use idealstat::probmodel::{distribution, normalized_moment, BernoulliSystem};
use idealstat::{FieldDescriptor, IdealEnumerator, IdealFactorization};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn field(i: usize) -> FieldDescriptor {
    let cat = Catalog::default_catalog();
    cat.fields()[i % cat.fields().len()].clone()
}

/// A random factorization over the prime ideals of norm at most 200.
fn factorization(k: &FieldDescriptor, picks: &[(usize, u32)]) -> Option<IdealFactorization> {
    let primes = prime_ideals_up_to(k, 200.0);
    let mut used = Vec::new();
    for &(i, e) in picks {
        let p = primes[i % primes.len()];
        if !used.iter().any(|&(q, _)| q == p) {
            used.push((p, e));
        }
    }
    IdealFactorization::new(used).ok()
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn split_norms_multiply_to_prime_power(fi in 0usize..5, pi in 0usize..300) {
        let k = field(fi);
        let p = common::primes_up_to(2000)[pi];
        let s = split_prime(&k, p).unwrap();
        let total: u64 = s.norms.iter().product();
        let expected = if k.is_rational() || s.kind == SplitKind::Ramified { p } else { p * p };
        prop_assert_eq!(total, expected);
    }

    #[test]
    fn kronecker_is_multiplicative_in_the_top(a in 1i64..500, b in 1i64..500, n in 0usize..100) {
        let n = common::primes_up_to(600)[n + 1];
        prop_assert_eq!(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
    }

    #[test]
    fn h_full_decomposition_round_trips(
        fi in 0usize..5,
        picks in prop::collection::vec((0usize..20, 0u32..8), 0..4),
        h in 2u32..6,
    ) {
        let k = field(fi);
        let picks: Vec<_> = picks.into_iter().map(|(i, e)| (i, e + h)).collect();
        let Some(f) = factorization(&k, &picks) else { return Ok(()) };
        prop_assert!(is_h_full(&f, h));
        let d = h_full_decompose(&f, h).unwrap();
        prop_assert_eq!(d.parts.len(), h as usize);
        prop_assert_eq!(d.reconstruct().unwrap(), f);
        for part in &d.parts[1..] {
            prop_assert!(part.factors.iter().all(|&(_, e)| e == 1));
        }
    }

    #[test]
    fn mobius_and_classifiers_agree(
        fi in 0usize..5,
        picks in prop::collection::vec((0usize..60, 1u32..5), 0..5),
        h in 2u32..5,
    ) {
        let Some(f) = factorization(&field(fi), &picks) else { return Ok(()) };
        let squarefree = f.factors.iter().all(|&(_, e)| e == 1);
        let expected = if squarefree { if omega(&f).is_multiple_of(2) { 1 } else { -1 } } else { 0 };
        prop_assert_eq!(mobius(&f), expected);
        prop_assert_eq!(is_h_free(&f, 2), squarefree);
        if f.is_unit() {
            prop_assert!(is_h_free(&f, h) && is_h_full(&f, h));
        }
    }

    #[test]
    fn traversals_agree_for_every_thread_count(fi in 0usize..5, x in 1u64..30_000) {
        let k = field(fi);
        let en = IdealEnumerator::new(&k, x as f64);
        let mut serial = Vec::new();
        en.for_each(|v| serial.push(v.norm));
        let streamed: Vec<u64> = en.clone().stream().map(|f| f.norm).collect();
        prop_assert_eq!(&serial, &streamed);
        for threads in [1, 3] {
            let folded = pool(threads).install(|| {
                en.par_fold(Vec::new, |acc: &mut Vec<u64>, v| acc.push(v.norm), |mut a, mut b| {
                    a.append(&mut b);
                    a
                })
            });
            prop_assert_eq!(&serial, &folded);
        }
    }

    #[test]
    fn coprime_partition(fi in 0usize..5, x in 10u64..20_000, h in 2u32..4, pi in 0usize..4) {
        let k = field(fi);
        let ell = prime_ideals_up_to(&k, 50.0)[pi];
        let all = count_hfree(&k, h, x as f64).unwrap().observed;
        let coprime = count_hfree_coprime(&k, h, x as f64, &ell).unwrap().observed;
        let d = divisor_density(&k, Subset::HFree, h, &ell, x as f64).unwrap();
        prop_assert_eq!(all - coprime, d.divisible);
        prop_assert!((0.0..=1.0).contains(&d.lambda_hat));
    }

    #[test]
    fn tuples_dominate_h_full(fi in 0usize..5, x in 1u64..1_000_000, h in 2u32..5) {
        let k = field(fi);
        let t = count_T_h(&k, h, x as f64).unwrap().observed;
        let n = count_hfull(&k, h, x as f64).unwrap().observed;
        prop_assert!(n <= t);
    }

    #[test]
    fn lambda_bounds(n in 2u64..100_000, h in 2u32..8) {
        let exact = lambda_hfree(n, h).unwrap() * BigRational::from_integer(BigInt::from(n));
        prop_assert!(exact < BigRational::from_integer(BigInt::from(1)));
        prop_assert!(exact > BigRational::new(BigInt::from(1), BigInt::from(2)));
        let l = lambda_hfree_f64(n, h).unwrap();
        prop_assert!(l * (n as f64) > 0.5 && l * (n as f64) <= 1.0);
        let l = lambda_hfull(n, h).unwrap();
        prop_assert!(l > 0.0 && l < 1.0);
    }

    #[test]
    fn division_by_one_minus_v_inverts_multiplication(coeffs in prop::collection::vec(-50i64..50, 1..12)) {
        let p = IntPolynomial::from_i64(&coeffs);
        let q = p.mul(&IntPolynomial::one_minus_power(1));
        prop_assert_eq!(q.div_one_minus_v().unwrap(), p);
        let one = IntPolynomial::new(vec![BigInt::from(1)]);
        prop_assert!(one.div_one_minus_v().is_err());
    }

    #[test]
    fn poisson_binomial_laws(lambdas in prop::collection::vec(0.01f64..0.99, 1..40)) {
        let sys = BernoulliSystem::from_lambdas(lambdas.clone()).unwrap();
        let law = distribution(&sys);
        prop_assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut reversed = lambdas;
        reversed.reverse();
        let law2 = distribution(&BernoulliSystem::from_lambdas(reversed).unwrap());
        for (a, b) in law.iter().zip(&law2) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!((normalized_moment(&sys, 2).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!(normalized_moment(&sys, 1).unwrap().abs() < 1e-10);
    }

    #[test]
    fn phi_is_monotone_and_symmetric(a in -8.0f64..8.0, b in -8.0f64..8.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(phi(lo) <= phi(hi));
        prop_assert!((phi(a) + phi(-a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_distance_is_pure(values in prop::collection::vec(-5.0f64..5.0, 1..60), extra in -5.0f64..5.0) {
        let s = NormalizedSample::from_values(values.clone());
        let d = ks_distance(&s).unwrap();
        let mut more = values.clone();
        more.push(extra);
        let _ = ks_distance(&NormalizedSample::from_values(more.clone())).unwrap();
        more.pop();
        prop_assert_eq!(ks_distance(&NormalizedSample::from_values(more)).unwrap(), d);
        prop_assert!(d >= 0.5 / values.len() as f64 - 1e-15 && d <= 1.0);
    }

    #[test]
    fn reciprocal_sums_are_monotone(fi in 0usize..5, x in 3u64..20_000, dx in 0u64..5_000, alpha in 0.0f64..2.5) {
        let k = field(fi);
        let (a, b) = (x as f64, (x + dx) as f64);
        prop_assert!(prime_reciprocal_sum(&k, a, alpha).unwrap() <= prime_reciprocal_sum(&k, b, alpha).unwrap());
        prop_assert!(ideal_reciprocal_sum(&k, a, alpha).unwrap() <= ideal_reciprocal_sum(&k, b, alpha).unwrap());
    }
}
