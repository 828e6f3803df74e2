//! Counts of ideals, h-free and h-full ideals and h-tuples, compared with
//! their asymptotic main terms; empirical divisibility densities.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::constants::{gamma_h, lambda_hfree_f64, lambda_hfull, zeta_K};
use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::ideals::{ExponentRule, IdealEnumerator};
use crate::numeric::{iroot, norm_bound};
use crate::primeideals::{ideals_above, prime_ideals_up_to_bound, PrimeIdeal};

/// Tolerance for the Euler-product constants inside main terms.
pub const MAIN_TERM_TOL: f64 = 1e-12;

/// Bound up to which h-full counts are cross-checked against a filtered full enumeration.
pub const HFULL_CROSSCHECK_LIMIT: u64 = 100_000;

/// Which ideals are being counted or sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    All,
    HFree,
    HFull,
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subset::All => "all",
            Subset::HFree => "hfree",
            Subset::HFull => "hfull",
        })
    }
}

impl FromStr for Subset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Subset::All),
            "hfree" => Ok(Subset::HFree),
            "hfull" => Ok(Subset::HFull),
            other => Err(Error::InvalidArgument(format!(
                "unknown subset `{other}` (expected all, hfree or hfull)"
            ))),
        }
    }
}

pub(crate) fn check_h(h: u32) -> Result<()> {
    if h < 2 {
        Err(Error::InvalidArgument(format!(
            "h must be at least 2, got {h}"
        )))
    } else {
        Ok(())
    }
}

/// Enumerator producing exactly the members of `subset` with norm at most `x`.
pub fn subset_enumerator(
    desc: &FieldDescriptor,
    subset: Subset,
    h: u32,
    x: f64,
) -> Result<IdealEnumerator> {
    Ok(match subset {
        Subset::All => IdealEnumerator::new(desc, x),
        Subset::HFree => {
            check_h(h)?;
            IdealEnumerator::new(desc, x).with_rule(ExponentRule::h_free(h))
        }
        Subset::HFull => {
            check_h(h)?;
            IdealEnumerator::h_full(desc, h, x)
        }
    })
}

/// Which side of its defining comparison an error term falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorCase {
    /// The error term has a single form (no case split).
    Single,
    Below,
    Equal,
    Above,
}

impl fmt::Display for ErrorCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorCase::Single => "single",
            ErrorCase::Below => "below",
            ErrorCase::Equal => "equal",
            ErrorCase::Above => "above",
        })
    }
}

/// A main term together with the shape `x^e (log x)^{0|1}` of its error term.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    pub main_term: f64,
    pub error_case: ErrorCase,
    pub error_exponent: f64,
    pub exponent_numerator: u64,
    pub exponent_denominator: u64,
    pub log_factor: bool,
}

impl AsymptoticPrediction {
    /// Error shape such as `x^(1/3) log x`.
    pub fn shape(&self) -> String {
        let power = if self.exponent_numerator == 0 {
            "1".to_string()
        } else if self.exponent_denominator == 1 {
            format!("x^{}", self.exponent_numerator)
        } else {
            format!(
                "x^({}/{})",
                self.exponent_numerator, self.exponent_denominator
            )
        };
        if self.log_factor {
            format!("{power} log x")
        } else {
            power
        }
    }

    /// Value of the error shape at `x`.
    pub fn error_scale(&self, x: f64) -> f64 {
        let base = x.powf(self.error_exponent);
        if self.log_factor {
            base * x.ln()
        } else {
            base
        }
    }
}

/// An exact non-negative rational exponent `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exponent {
    pub num: u64,
    pub den: u64,
}

impl Exponent {
    pub fn new(num: u64, den: u64) -> Self {
        let g = num.gcd(&den).max(1);
        Exponent {
            num: num / g,
            den: den / g,
        }
    }

    fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn cmp_to(self, other: Exponent) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }

    fn over(self, h: u64) -> Exponent {
        Exponent::new(self.num, self.den * h)
    }
}

/// `1 − 2/(n_K + 1)`, the exponent of the ideal-counting error term.
pub fn landau_exponent(degree: u32) -> Exponent {
    let n = u64::from(degree);
    Exponent::new(n - 1, n + 1)
}

fn case(ordering: std::cmp::Ordering) -> ErrorCase {
    match ordering {
        std::cmp::Ordering::Less => ErrorCase::Below,
        std::cmp::Ordering::Equal => ErrorCase::Equal,
        std::cmp::Ordering::Greater => ErrorCase::Above,
    }
}

/// Error shape of the h-free count: compares `1/h` with `1 − 2/(n_K+1)`.
pub fn hfree_error_shape(degree: u32, h: u32) -> (ErrorCase, Exponent, bool) {
    let upsilon = landau_exponent(degree);
    let inv_h = Exponent::new(1, u64::from(h));
    match case(inv_h.cmp_to(upsilon)) {
        ErrorCase::Below => (ErrorCase::Below, upsilon, false),
        ErrorCase::Equal => (ErrorCase::Equal, upsilon, true),
        c => (c, inv_h, false),
    }
}

/// Error shape of the h-full count: compares `h/(h+1)` with `1 − 2/(n_K+1)`.
pub fn hfull_error_shape(degree: u32, h: u32) -> (ErrorCase, Exponent, bool) {
    let upsilon = landau_exponent(degree);
    let h = u64::from(h);
    let ratio = Exponent::new(h, h + 1);
    let inv = Exponent::new(1, h + 1);
    match case(ratio.cmp_to(upsilon)) {
        ErrorCase::Below => (ErrorCase::Below, upsilon.over(h), false),
        ErrorCase::Equal => (ErrorCase::Equal, inv, true),
        c => (c, inv, false),
    }
}

/// Error shape of the h-tuple count: same comparison as the h-full count.
pub fn tuple_error_shape(degree: u32, h: u32) -> (ErrorCase, Exponent, bool) {
    let upsilon = landau_exponent(degree);
    let h = u64::from(h);
    let ratio = Exponent::new(h, h + 1);
    match case(ratio.cmp_to(upsilon)) {
        ErrorCase::Below => (ErrorCase::Below, upsilon.over(h), false),
        ErrorCase::Equal => (ErrorCase::Equal, upsilon.over(h), true),
        c => (c, Exponent::new(1, h + 1), false),
    }
}

fn prediction(main_term: f64, shape: (ErrorCase, Exponent, bool)) -> AsymptoticPrediction {
    let (error_case, e, log_factor) = shape;
    AsymptoticPrediction {
        main_term,
        error_case,
        error_exponent: e.value(),
        exponent_numerator: e.num,
        exponent_denominator: e.den,
        log_factor,
    }
}

/// Observed count against a prediction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub x: f64,
    pub observed: u64,
    pub prediction: AsymptoticPrediction,
    pub relative_error: f64,
}

impl CountReport {
    fn new(x: f64, observed: u64, prediction: AsymptoticPrediction) -> Self {
        let main = prediction.main_term;
        CountReport {
            x,
            observed,
            relative_error: (observed as f64 - main).abs() / main,
            prediction,
        }
    }
}

/// Index of `ell` in `primes`, after checking that `ell` is a prime ideal of the field.
fn resolve_prime(
    desc: &FieldDescriptor,
    primes: &[PrimeIdeal],
    ell: &PrimeIdeal,
) -> Result<Option<u32>> {
    if !ideals_above(desc, ell.p).contains(ell) || !crate::sieve::is_prime(ell.p) {
        return Err(Error::InvalidArgument(format!(
            "({}, {}) is not a prime ideal of {}",
            ell.p, ell.conjugate_index, desc.label
        )));
    }
    Ok(primes.binary_search(ell).ok().map(|i| i as u32))
}

/// I_K(x) against Landau's main term κx.
pub fn count_ideals(desc: &FieldDescriptor, x: f64) -> Result<CountReport> {
    let observed = IdealEnumerator::new(desc, x).count();
    let main = desc.kappa() * x;
    Ok(CountReport::new(
        x,
        observed,
        prediction(
            main,
            (ErrorCase::Single, landau_exponent(desc.degree), false),
        ),
    ))
}

/// As [`count_ideals`], enumerating over a caller-supplied prime-ideal table
/// (for example one loaded from the cache). The table must cover all norms up to `x`.
pub fn count_ideals_from_table(
    desc: &FieldDescriptor,
    primes: Vec<PrimeIdeal>,
    x: f64,
) -> Result<CountReport> {
    let observed = IdealEnumerator::from_primes(primes, x).count();
    let main = desc.kappa() * x;
    Ok(CountReport::new(
        x,
        observed,
        prediction(
            main,
            (ErrorCase::Single, landau_exponent(desc.degree), false),
        ),
    ))
}

/// h-free ideals of norm at most `x`, against `κ x / ζ_K(h)`.
pub fn count_hfree(desc: &FieldDescriptor, h: u32, x: f64) -> Result<CountReport> {
    check_h(h)?;
    let en = IdealEnumerator::new(desc, x).with_rule(ExponentRule::h_free(h));
    let observed = en.count();
    let main = desc.kappa() / zeta_K(desc, f64::from(h), MAIN_TERM_TOL)?.value * x;
    Ok(CountReport::new(
        x,
        observed,
        prediction(main, hfree_error_shape(desc.degree, h)),
    ))
}

/// `(N^h − N^{h−1})/(N^h − 1)`: share of h-free ideals coprime to a prime of norm `N`.
pub fn hfree_coprime_factor(norm: u64, h: u32) -> f64 {
    let n = norm as f64;
    let nh = n.powi(h as i32);
    (nh - nh / n) / (nh - 1.0)
}

/// h-free ideals coprime to `ell`.
pub fn count_hfree_coprime(
    desc: &FieldDescriptor,
    h: u32,
    x: f64,
    ell: &PrimeIdeal,
) -> Result<CountReport> {
    check_h(h)?;
    let en = IdealEnumerator::new(desc, x);
    let skip = resolve_prime(desc, en.primes(), ell)?;
    let observed = en.with_rule(ExponentRule::h_free(h).skipping(skip)).count();
    let main = hfree_coprime_factor(ell.norm, h) * desc.kappa()
        / zeta_K(desc, f64::from(h), MAIN_TERM_TOL)?.value
        * x;
    Ok(CountReport::new(
        x,
        observed,
        prediction(main, hfree_error_shape(desc.degree, h)),
    ))
}

/// Count tuples `(a_0, …, a_{h−1})` with `a_1, …, a_{h−1}` squarefree and pairwise
/// coprime and `N(a_0^h a_1^{h+1} ··· a_{h−1}^{2h−1}) <= bound`, skipping one prime.
///
/// Each prime independently chooses an exponent `t ≥ 0` in `a_0` and at most
/// one squarefree part `a_j` to belong to.
fn tuple_count(primes: &[PrimeIdeal], h: u32, bound: u64, skip: Option<u32>) -> u64 {
    fn walk(
        primes: &[PrimeIdeal],
        h: u32,
        bound: u64,
        skip: Option<u32>,
        norm: u64,
        start: usize,
    ) -> u64 {
        let limit = bound / norm;
        let mut total = 0u64;
        for (i, prime) in primes.iter().enumerate().skip(start) {
            if skip == Some(i as u32) {
                continue;
            }
            let q = prime.norm;
            // The smallest contribution of any prime is q^h.
            if q.checked_pow(h).is_none_or(|m| m > limit) {
                break;
            }
            for j in 0..h {
                // Squarefree part a_j (j ≥ 1) contributes q^{h+j}; j = 0 means none.
                let base_exp = if j == 0 { 0 } else { h + j };
                for t in 0u32.. {
                    let e = base_exp + h * t;
                    if e == 0 {
                        continue;
                    }
                    let Some(m) = q.checked_pow(e).filter(|&m| m <= limit) else {
                        break;
                    };
                    total += 1 + walk(primes, h, bound, skip, norm * m, i + 1);
                }
            }
        }
        total
    }
    if bound < 1 {
        return 0;
    }
    1 + walk(primes, h, bound, skip, 1, 0)
}

/// h-full ideals counted through their decomposition into tuples (the scalable method).
pub fn count_hfull_tuples(
    desc: &FieldDescriptor,
    h: u32,
    x: f64,
    ell: Option<&PrimeIdeal>,
) -> Result<u64> {
    check_h(h)?;
    let bound = norm_bound(x);
    let primes = prime_ideals_up_to_bound(desc, iroot(bound, h));
    let skip = match ell {
        Some(ell) => resolve_prime(desc, &primes, ell)?,
        None => None,
    };
    Ok(tuple_count(&primes, h, bound, skip))
}

/// h-full ideals counted by filtering the full ideal enumeration (small `x` only).
pub fn count_hfull_filter(
    desc: &FieldDescriptor,
    h: u32,
    x: f64,
    ell: Option<&PrimeIdeal>,
) -> Result<u64> {
    check_h(h)?;
    let en = IdealEnumerator::new(desc, x);
    let skip = match ell {
        Some(ell) => resolve_prime(desc, en.primes(), ell)?,
        None => None,
    };
    Ok(en.par_reduce(
        || 0u64,
        |acc, v| {
            if v.is_h_full(h) && skip.is_none_or(|s| !v.divisible_by(s)) {
                *acc += 1;
            }
        },
        |a, b| a + b,
    ))
}

fn hfull_observed(desc: &FieldDescriptor, h: u32, x: f64, ell: Option<&PrimeIdeal>) -> Result<u64> {
    let observed = count_hfull_tuples(desc, h, x, ell)?;
    if norm_bound(x) <= HFULL_CROSSCHECK_LIMIT {
        let filtered = count_hfull_filter(desc, h, x, ell)?;
        if filtered != observed {
            return Err(Error::Consistency(format!(
                "h-full count at x = {x}: tuple method {observed}, filter method {filtered}"
            )));
        }
    }
    Ok(observed)
}

/// h-full ideals of norm at most `x`, against `κ γ_h x^{1/h}`.
pub fn count_hfull(desc: &FieldDescriptor, h: u32, x: f64) -> Result<CountReport> {
    check_h(h)?;
    let observed = hfull_observed(desc, h, x, None)?;
    let main = desc.kappa() * gamma_h(desc, h, MAIN_TERM_TOL)?.value * x.powf(1.0 / f64::from(h));
    Ok(CountReport::new(
        x,
        observed,
        prediction(main, hfull_error_shape(desc.degree, h)),
    ))
}

/// `1 / (1 + N^{−1}/(1 − N^{−1/h}))`: share of h-full ideals coprime to a prime of norm `N`.
pub fn hfull_coprime_factor(norm: u64, h: u32) -> f64 {
    let n = norm as f64;
    1.0 / (1.0 + (1.0 / n) / (1.0 - n.powf(-1.0 / f64::from(h))))
}

/// h-full ideals coprime to `ell`.
pub fn count_hfull_coprime(
    desc: &FieldDescriptor,
    h: u32,
    x: f64,
    ell: &PrimeIdeal,
) -> Result<CountReport> {
    check_h(h)?;
    let observed = hfull_observed(desc, h, x, Some(ell))?;
    let main = hfull_coprime_factor(ell.norm, h)
        * desc.kappa()
        * gamma_h(desc, h, MAIN_TERM_TOL)?.value
        * x.powf(1.0 / f64::from(h));
    Ok(CountReport::new(
        x,
        observed,
        prediction(main, hfull_error_shape(desc.degree, h)),
    ))
}

/// Number of tuples of arbitrary ideals `(a_0, …, a_{h−1})` with
/// `N(a_0^h a_1^{h+1} ··· a_{h−1}^{2h−1}) <= x`, against
/// `κ Π_{i<h} ζ_K(1 + i/h) x^{1/h}`.
#[allow(non_snake_case)]
pub fn count_T_h(desc: &FieldDescriptor, h: u32, x: f64) -> Result<CountReport> {
    check_h(h)?;
    let bound = norm_bound(x);
    let observed = tuple_total(desc, h, bound);
    let mut constant = desc.kappa();
    for i in 1..h {
        constant *= zeta_K(desc, 1.0 + f64::from(i) / f64::from(h), MAIN_TERM_TOL)?.value;
    }
    let main = constant * x.powf(1.0 / f64::from(h));
    Ok(CountReport::new(
        x,
        observed,
        prediction(main, tuple_error_shape(desc.degree, h)),
    ))
}

fn tuple_total(desc: &FieldDescriptor, h: u32, bound: u64) -> u64 {
    if bound < 1 {
        return 0;
    }
    // Ideal counts by exact norm, and their prefix sums I_K(n), up to bound^{1/h}.
    let top = iroot(bound, h);
    let counts = IdealEnumerator::new(desc, top as f64).norm_counts();
    let mut prefix = vec![0u64; counts.len()];
    let mut acc = 0u64;
    for (n, &c) in counts.iter().enumerate() {
        acc += u64::from(c);
        prefix[n] = acc;
    }
    fn rec(counts: &[u32], prefix: &[u64], h: u32, j: u32, rem: u64) -> u64 {
        if j == h {
            return prefix[iroot(rem, h) as usize];
        }
        let power = h + j;
        let mut total = 0;
        for (m, &c) in counts.iter().enumerate().skip(1) {
            let Some(mp) = (m as u64).checked_pow(power).filter(|&mp| mp <= rem) else {
                break;
            };
            if c > 0 {
                total += u64::from(c) * rec(counts, prefix, h, j + 1, rem / mp);
            }
        }
        total
    }
    rec(&counts, &prefix, h, 1, bound)
}

/// The limiting share of subset members divisible by a prime of norm `norm`.
/// `None` for the full ideal set, which has no closed form here.
pub fn theoretical_lambda(subset: Subset, h: u32, norm: u64) -> Result<Option<f64>> {
    match subset {
        Subset::All => Ok(None),
        Subset::HFree => lambda_hfree_f64(norm, h).map(Some),
        Subset::HFull => lambda_hfull(norm, h).map(Some),
    }
}

/// Empirical share of subset members divisible by a prime ideal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub subset: Subset,
    pub h: u32,
    pub prime: PrimeIdeal,
    pub x: f64,
    pub members: u64,
    pub divisible: u64,
    pub lambda: Option<f64>,
    pub lambda_hat: f64,
    pub e_hat: Option<f64>,
}

/// Subset size and, for every prime in the enumerator's table, the number of members it divides.
pub fn subset_prime_counts(en: &IdealEnumerator) -> (u64, Vec<u64>) {
    let n = en.primes().len();
    let (total, per_prime) = en.par_reduce(
        || (0u64, vec![0u64; n]),
        |acc, v| {
            acc.0 += 1;
            for &(i, _) in v.factors {
                acc.1[i as usize] += 1;
            }
        },
        |mut a, b| {
            a.0 += b.0;
            for (x, y) in a.1.iter_mut().zip(b.1) {
                *x += y;
            }
            a
        },
    );
    (total, per_prime)
}

/// Subset size and, for each set of prime indices, the number of members divisible by all of them.
pub fn subset_joint_counts(en: &IdealEnumerator, sets: &[Vec<u32>]) -> (u64, Vec<u64>) {
    let n = sets.len();
    en.par_reduce(
        || (0u64, vec![0u64; n]),
        |acc, v| {
            acc.0 += 1;
            for (k, set) in sets.iter().enumerate() {
                if set
                    .iter()
                    .all(|i| v.factors.binary_search_by_key(i, |&(j, _)| j).is_ok())
                {
                    acc.1[k] += 1;
                }
            }
        },
        |mut a, b| {
            a.0 += b.0;
            for (x, y) in a.1.iter_mut().zip(b.1) {
                *x += y;
            }
            a
        },
    )
}

/// Empirical densities for several prime ideals in one pass.
pub fn divisor_densities(
    desc: &FieldDescriptor,
    subset: Subset,
    h: u32,
    primes: &[PrimeIdeal],
    x: f64,
) -> Result<Vec<DensityEstimate>> {
    let en = subset_enumerator(desc, subset, h, x)?;
    let mut sets = Vec::with_capacity(primes.len());
    for p in primes {
        // Primes outside the table divide no member.
        sets.push(match resolve_prime(desc, en.primes(), p)? {
            Some(i) => vec![i],
            None => vec![u32::MAX],
        });
    }
    let (members, divisible) = subset_joint_counts(&en, &sets);
    if members == 0 {
        return Err(Error::UndefinedDensity(format!(
            "no {subset} ideals of norm at most {x}"
        )));
    }
    primes
        .iter()
        .zip(divisible)
        .map(|(p, d)| {
            let lambda = theoretical_lambda(subset, h, p.norm)?;
            let lambda_hat = d as f64 / members as f64;
            Ok(DensityEstimate {
                subset,
                h,
                prime: *p,
                x,
                members,
                divisible: d,
                lambda,
                lambda_hat,
                e_hat: lambda.map(|l| lambda_hat - l),
            })
        })
        .collect()
}

/// Empirical share of subset members divisible by `p`, and its deviation from λ_℘.
pub fn divisor_density(
    desc: &FieldDescriptor,
    subset: Subset,
    h: u32,
    p: &PrimeIdeal,
    x: f64,
) -> Result<DensityEstimate> {
    Ok(divisor_densities(desc, subset, h, std::slice::from_ref(p), x)?.remove(0))
}

/// Joint divisibility by several distinct prime ideals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointDensity {
    pub primes: Vec<PrimeIdeal>,
    pub x: f64,
    pub members: u64,
    pub divisible: u64,
    pub lambda_product: Option<f64>,
    pub lambda_hat: f64,
    pub e_hat: Option<f64>,
}

pub fn joint_density(
    desc: &FieldDescriptor,
    subset: Subset,
    h: u32,
    primes: &[PrimeIdeal],
    x: f64,
) -> Result<JointDensity> {
    let en = subset_enumerator(desc, subset, h, x)?;
    let mut set = Vec::with_capacity(primes.len());
    for p in primes {
        set.push(resolve_prime(desc, en.primes(), p)?.unwrap_or(u32::MAX));
    }
    set.sort_unstable();
    if set.windows(2).any(|w| w[0] == w[1] && w[0] != u32::MAX) {
        return Err(Error::InvalidArgument(
            "prime ideals must be distinct".into(),
        ));
    }
    let (members, divisible) = subset_joint_counts(&en, &[set]);
    if members == 0 {
        return Err(Error::UndefinedDensity(format!(
            "no {subset} ideals of norm at most {x}"
        )));
    }
    let mut lambda_product = Some(1.0);
    for p in primes {
        lambda_product = match (lambda_product, theoretical_lambda(subset, h, p.norm)?) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
    }
    let lambda_hat = divisible[0] as f64 / members as f64;
    Ok(JointDensity {
        primes: primes.to_vec(),
        x,
        members,
        divisible: divisible[0],
        lambda_product,
        lambda_hat,
        e_hat: lambda_product.map(|l| lambda_hat - l),
    })
}
