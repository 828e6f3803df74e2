//! Exact polynomial identities and Euler-product constants.
//!
//! Euler products `Π_℘ F(N(℘)^{−σ})` are evaluated as an exact product over
//! the prime ideals of norm at most `P`, times a correction for the primes
//! above `P`. The correction expands `log F(w) = Σ_k b_k w^k` and evaluates
//! each prime-ideal tail `Σ_{N(℘)>P} N(℘)^{−kσ}` through
//! `Σ_m μ(m)/m · log ζ_K^{>P}(m·kσ)`, where `ζ_K^{>P}` is ζ_K with its
//! Euler factors up to `P` removed. Only the truncated part of the series is
//! left to the tail bound.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::numeric::{kahan_sum, mobius_int, KahanSum};
use crate::primeideals::{prime_ideals_up_to, PrimeIdeal};
use crate::zeta::dedekind_zeta;

/// Multiplier applied to every constant-free tail shape.
pub const TAIL_SAFETY_FACTOR: f64 = 4.0;

/// Truncation norms tried in turn until the tail bound meets the tolerance.
const TRUNCATION_LADDER: [f64; 4] = [1e4, 1e5, 1e6, 1e7];

/// Length of the log-factor power series.
const SERIES_LEN: usize = 400;

/// Exponents `s` with `P^{−s}` below `e^{−TAIL_CUTOFF}` contribute nothing at double precision.
const TAIL_CUTOFF: f64 = 46.0;

/// A polynomial with arbitrary-precision integer coefficients, index = degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntPolynomial {
    #[serde(serialize_with = "serialize_bigints")]
    pub coefficients: Vec<BigInt>,
}

fn serialize_bigints<S: serde::Serializer>(
    v: &[BigInt],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

impl IntPolynomial {
    pub fn new(coefficients: Vec<BigInt>) -> Self {
        let mut p = IntPolynomial { coefficients };
        p.trim();
        p
    }

    pub fn from_i64(coefficients: &[i64]) -> Self {
        Self::new(coefficients.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `1 − v^k`.
    pub fn one_minus_power(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[0] = BigInt::one();
        c[k] -= 1;
        Self::new(c)
    }

    fn trim(&mut self) {
        while self.coefficients.last().is_some_and(Zero::is_zero) {
            self.coefficients.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn coefficient(&self, degree: usize) -> BigInt {
        self.coefficients.get(degree).cloned().unwrap_or_default()
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::new(Vec::new());
        }
        let mut c = vec![BigInt::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPolynomial::new(c)
    }

    /// Exact quotient by `1 − v`; fails unless the polynomial vanishes at `v = 1`.
    pub fn div_one_minus_v(&self) -> Result<IntPolynomial> {
        // If A = (1 − v)Q then Q's coefficients are the prefix sums of A's.
        let mut q = Vec::with_capacity(self.coefficients.len());
        let mut acc = BigInt::zero();
        for c in &self.coefficients {
            acc += c;
            q.push(acc.clone());
        }
        if !acc.is_zero() {
            return Err(Error::Consistency(format!(
                "division by (1 − v) leaves remainder {acc}"
            )));
        }
        q.pop();
        Ok(IntPolynomial::new(q))
    }

    pub fn eval_f64(&self, v: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * v + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn to_f64_coefficients(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coefficient(&self) -> BigInt {
        self.coefficients
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }
}

/// `(1 − v + v^h)/(1 − v) · Π_{j=h}^{2h−1} (1 − v^j)` expanded exactly.
pub fn alpha_coefficients(h: u32) -> Result<IntPolynomial> {
    check_h(h)?;
    let h = h as usize;
    let mut numerator = vec![BigInt::zero(); h + 1];
    numerator[0] = BigInt::one();
    numerator[1] -= 1;
    numerator[h] += 1;
    let mut product = IntPolynomial::new(numerator);
    for j in h..2 * h {
        product = product.mul(&IntPolynomial::one_minus_power(j));
    }
    product.div_one_minus_v()
}

fn check_h(h: u32) -> Result<()> {
    if h < 2 {
        Err(Error::InvalidArgument(format!(
            "h must be at least 2, got {h}"
        )))
    } else {
        Ok(())
    }
}

/// A truncated Euler product with its truncation metadata.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EulerProductValue {
    pub value: f64,
    /// Prime ideals of norm at most this are multiplied in exactly.
    pub truncation_norm: f64,
    /// Bound on the relative error of `value` after the tail correction.
    pub tail_bound: f64,
    /// Bound on the relative error of the bare truncated product, without correction.
    pub raw_tail_bound: f64,
    /// Prime ideals in the exact part of the product.
    pub terms_used: usize,
    /// Power-series terms used in the tail correction.
    pub correction_terms: usize,
    pub safety_factor: f64,
}

/// `x^{1−s} / ((s − 1) log x)`: the shape of `Σ_{N(℘)>x} N(℘)^{−s}` for `s > 1`.
pub fn prime_tail_shape(x: f64, s: f64) -> f64 {
    x.powf(1.0 - s) / ((s - 1.0) * x.ln())
}

/// Power series `log F` for `F` with `F[0] = 1`, truncated to `F.len()` terms.
fn series_log(f: &[f64]) -> Vec<f64> {
    // F·(log F)' = F' gives k·L_k = k·F_k − Σ_{j<k} j·L_j·F_{k−j}.
    let n = f.len();
    let mut l = vec![0.0; n];
    for k in 1..n {
        let mut acc = k as f64 * f[k];
        for j in 1..k {
            acc -= j as f64 * l[j] * f[k - j];
        }
        l[k] = acc / k as f64;
    }
    l
}

fn series_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n];
    for (i, x) in a.iter().enumerate().take(n) {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            c[i + j] += x * y;
        }
    }
    c
}

/// Series of `F/(1 − w)`: prefix sums.
fn series_div_one_minus_w(a: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    a.iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

fn padded(coefficients: &[f64], n: usize) -> Vec<f64> {
    let mut v = coefficients.to_vec();
    v.resize(n, 0.0);
    v
}

/// One Euler product: the exact log-factor at a norm, and the log-factor series in `w = N^{−σ}`.
struct EulerFactor<'a> {
    log_factor: &'a dyn Fn(f64) -> f64,
    log_series: Vec<f64>,
    sigma: f64,
}

/// Caches `log ζ_K^{>P}(s)` and the prime-ideal tails built from it.
struct TailEvaluator<'a> {
    desc: &'a FieldDescriptor,
    norms: Vec<f64>,
    log_p: f64,
    reduced_log_zeta: HashMap<u64, f64>,
}

impl<'a> TailEvaluator<'a> {
    fn new(desc: &'a FieldDescriptor, primes: &[PrimeIdeal], p: f64) -> Self {
        TailEvaluator {
            desc,
            norms: primes.iter().map(|q| q.norm as f64).collect(),
            log_p: p.ln(),
            reduced_log_zeta: HashMap::new(),
        }
    }

    /// `log ζ_K(s) + Σ_{N(℘)≤P} log(1 − N(℘)^{−s})`.
    fn reduced_log_zeta(&mut self, s: f64) -> Result<f64> {
        if let Some(&v) = self.reduced_log_zeta.get(&s.to_bits()) {
            return Ok(v);
        }
        let full = dedekind_zeta(self.desc, s)?.ln();
        let mut acc = KahanSum::new();
        acc.add(full);
        for &n in self.norms.iter().rev() {
            acc.add((-n.powf(-s)).ln_1p());
        }
        let v = acc.value();
        self.reduced_log_zeta.insert(s.to_bits(), v);
        Ok(v)
    }

    /// `Σ_{N(℘)>P} N(℘)^{−t}` for `t > 1`.
    fn prime_tail(&mut self, t: f64) -> Result<f64> {
        let mut acc = KahanSum::new();
        for m in 1u64.. {
            let s = m as f64 * t;
            if s * self.log_p > TAIL_CUTOFF {
                break;
            }
            let mu = mobius_int(m);
            if mu != 0 {
                acc.add(f64::from(mu) / m as f64 * self.reduced_log_zeta(s)?);
            }
        }
        Ok(acc.value())
    }
}

fn euler_product(
    desc: &FieldDescriptor,
    factor: &EulerFactor,
    tol: f64,
) -> Result<EulerProductValue> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let multiplicity = desc.degree as f64;
    let mut best = f64::INFINITY;
    for &p in &TRUNCATION_LADDER {
        let primes = prime_ideals_up_to(desc, p);
        let head = kahan_sum(primes.iter().map(|q| (factor.log_factor)(q.norm as f64)));
        // Constant-free bound on each series term's prime-ideal tail.
        let term_bound = |k: usize| {
            TAIL_SAFETY_FACTOR
                * multiplicity
                * factor.log_series[k].abs()
                * prime_tail_shape(p, k as f64 * factor.sigma)
        };
        let active: Vec<usize> = (1..factor.log_series.len())
            .filter(|&k| factor.log_series[k] != 0.0)
            .collect();
        let raw_tail_bound: f64 = active.iter().map(|&k| term_bound(k)).sum();
        // Smallest cut whose remaining terms fit well inside the tolerance.
        let mut remaining: f64 = raw_tail_bound;
        let mut cut = 0;
        for (idx, &k) in active.iter().enumerate() {
            if remaining <= 0.1 * tol {
                break;
            }
            remaining -= term_bound(k);
            cut = idx + 1;
        }
        let remaining = remaining.max(0.0);
        let mut tails = TailEvaluator::new(desc, &primes, p);
        let mut correction = KahanSum::new();
        for &k in &active[..cut] {
            correction.add(factor.log_series[k] * tails.prime_tail(k as f64 * factor.sigma)?);
        }
        let log_value = head + correction.value();
        let rounding = 64.0 * f64::EPSILON * (1.0 + log_value.abs() + cut as f64);
        let tail_bound = remaining + rounding;
        if tail_bound <= tol {
            return Ok(EulerProductValue {
                value: log_value.exp(),
                truncation_norm: p,
                tail_bound,
                raw_tail_bound,
                terms_used: primes.len(),
                correction_terms: cut,
                safety_factor: TAIL_SAFETY_FACTOR,
            });
        }
        best = best.min(tail_bound);
    }
    Err(Error::ToleranceNotReached { tol, bound: best })
}

/// ζ_K(s) as an Euler product over prime ideals, `s > 1`.
#[allow(non_snake_case)]
pub fn zeta_K(desc: &FieldDescriptor, s: f64, tol: f64) -> Result<EulerProductValue> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::Domain(format!(
            "the Euler product for zeta_K diverges at s = {s} (need s > 1)"
        )));
    }
    let log_factor = move |n: f64| -(-n.powf(-s)).ln_1p();
    let log_series = (0..SERIES_LEN)
        .map(|k| if k == 0 { 0.0 } else { 1.0 / k as f64 })
        .collect();
    euler_product(
        desc,
        &EulerFactor {
            log_factor: &log_factor,
            log_series,
            sigma: s,
        },
        tol,
    )
}

/// The bare product `Π_{N(℘)≤P} (1 − N(℘)^{−s})^{−1}` with no tail correction.
#[allow(non_snake_case)]
pub fn zeta_K_truncated(desc: &FieldDescriptor, s: f64, p: f64) -> Result<f64> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::Domain(format!("need s > 1, got {s}")));
    }
    let log = kahan_sum(
        prime_ideals_up_to(desc, p)
            .iter()
            .map(|q| -(-(q.norm as f64).powf(-s)).ln_1p()),
    );
    Ok(log.exp())
}

/// Both Euler-product forms of γ_h.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaForms {
    /// `Π (1 + (N − N^{1/h}) / (N² (N^{1/h} − 1)))`.
    pub direct: EulerProductValue,
    /// `Π (1 + N^{−1}/(1 − N^{−1/h})) (1 − N^{−1})`.
    pub factored: EulerProductValue,
}

/// Evaluate both forms of γ_h and check that they agree within `2·tol`.
pub fn gamma_h_forms(desc: &FieldDescriptor, h: u32, tol: f64) -> Result<GammaForms> {
    check_h(h)?;
    let hf = h as f64;
    let hu = h as usize;

    let direct_log = move |n: f64| {
        let root = n.powf(1.0 / hf);
        ((n - root) / (n * n * (root - 1.0))).ln_1p()
    };
    // With w = N^{−1/h} the factor is 1 + w^{h+1} + … + w^{2h−1}.
    let mut direct_poly = vec![0.0; SERIES_LEN];
    direct_poly[0] = 1.0;
    for c in direct_poly.iter_mut().take(2 * hu).skip(hu + 1) {
        *c = 1.0;
    }
    let direct = euler_product(
        desc,
        &EulerFactor {
            log_factor: &direct_log,
            log_series: series_log(&direct_poly),
            sigma: 1.0 / hf,
        },
        tol,
    )?;

    let factored_log = move |n: f64| {
        let inv = 1.0 / n;
        (inv / (1.0 - n.powf(-1.0 / hf))).ln_1p() + (-inv).ln_1p()
    };
    // (1 − w + w^h)/(1 − w) · (1 − w^h)
    let mut first = vec![0.0; SERIES_LEN];
    first[0] = 1.0;
    first[1] = -1.0;
    first[hu] += 1.0;
    let first = series_div_one_minus_w(&first);
    let mut second = vec![0.0; SERIES_LEN];
    second[0] = 1.0;
    second[hu] = -1.0;
    let factored_poly = series_mul(&first, &second, SERIES_LEN);
    let factored = euler_product(
        desc,
        &EulerFactor {
            log_factor: &factored_log,
            log_series: series_log(&factored_poly),
            sigma: 1.0 / hf,
        },
        tol,
    )?;

    let gap = (direct.value - factored.value).abs();
    if gap > 2.0 * tol * direct.value.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "the two product forms of gamma_{h} differ by {gap:e}"
        )));
    }
    Ok(GammaForms { direct, factored })
}

/// γ_h, the leading constant of the h-full count.
pub fn gamma_h(desc: &FieldDescriptor, h: u32, tol: f64) -> Result<EulerProductValue> {
    Ok(gamma_h_forms(desc, h, tol)?.direct)
}

/// `G_h(s) = Π_℘ (1 − N^{−(2h+2)s} + Σ_r α_{r,h} N^{−rs})` for `s > 1/(2h+2)`.
#[allow(non_snake_case)]
pub fn G_h(desc: &FieldDescriptor, h: u32, s: f64, tol: f64) -> Result<EulerProductValue> {
    check_h(h)?;
    let threshold = 1.0 / (2.0 * h as f64 + 2.0);
    if s.is_nan() || s <= threshold {
        return Err(Error::Domain(format!(
            "G_{h}(s) converges only for s > 1/{}, got s = {s}",
            2 * h + 2
        )));
    }
    let poly = alpha_coefficients(h)?.to_f64_coefficients();
    let tail_poly: Vec<f64> = poly.clone();
    let log_factor = move |n: f64| {
        let w = n.powf(-s);
        // Σ_{r≥1} α_r w^r, so the factor is 1 + delta.
        let delta = tail_poly[1..].iter().rev().fold(0.0, |acc, &c| acc * w + c) * w;
        delta.ln_1p()
    };
    euler_product(
        desc,
        &EulerFactor {
            log_factor: &log_factor,
            log_series: series_log(&padded(&poly, SERIES_LEN)),
            sigma: s,
        },
        tol,
    )
}

/// Density of h-free ideals divisible by a prime of norm `N`: `(N^{h−1} − 1)/(N^h − 1)`.
pub fn lambda_hfree(norm: u64, h: u32) -> Result<BigRational> {
    check_h(h)?;
    check_norm(norm)?;
    let n = BigInt::from(norm);
    let num = num_traits::pow(n.clone(), h as usize - 1) - 1;
    let den = num_traits::pow(n, h as usize) - 1;
    Ok(BigRational::new(num, den))
}

pub fn lambda_hfree_f64(norm: u64, h: u32) -> Result<f64> {
    let r = lambda_hfree(norm, h)?;
    Ok(r.to_f64().unwrap_or(f64::NAN))
}

/// Density of h-full ideals divisible by a prime of norm `N`: `1/(N(1 − N^{−1/h} + N^{−1}))`.
pub fn lambda_hfull(norm: u64, h: u32) -> Result<f64> {
    check_h(h)?;
    check_norm(norm)?;
    let n = norm as f64;
    Ok(1.0 / (n * (1.0 - n.powf(-1.0 / h as f64) + 1.0 / n)))
}

fn check_norm(norm: u64) -> Result<()> {
    if norm < 2 {
        Err(Error::InvalidArgument(format!(
            "prime ideal norms are at least 2, got {norm}"
        )))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::riemann_zeta;

    fn gaussian() -> FieldDescriptor {
        FieldDescriptor::quadratic("Qi", -1, 1, 1.0, 4).unwrap()
    }

    #[test]
    fn alpha_h2_is_one_minus_v6() {
        assert_eq!(
            alpha_coefficients(2).unwrap(),
            IntPolynomial::one_minus_power(6)
        );
    }

    #[test]
    fn alpha_h3_shape() {
        let a = alpha_coefficients(3).unwrap();
        assert_eq!(a.coefficient(0), BigInt::one());
        for d in 1..=7 {
            assert!(a.coefficient(d).is_zero(), "degree {d}");
        }
        assert_eq!(a.coefficient(8), BigInt::from(-1));
        assert!(a.degree().unwrap() <= 14);
        assert_eq!(a.eval_f64(0.0), 1.0);
    }

    #[test]
    fn alpha_rejects_small_h() {
        assert!(matches!(
            alpha_coefficients(1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn division_detects_remainder() {
        let p = IntPolynomial::from_i64(&[1, 1]);
        assert!(matches!(p.div_one_minus_v(), Err(Error::Consistency(_))));
    }

    #[test]
    fn series_log_of_one_minus_w() {
        let mut f = vec![0.0; 8];
        f[0] = 1.0;
        f[1] = -1.0;
        let l = series_log(&f);
        for (k, v) in l.iter().enumerate().skip(1) {
            assert!((v + 1.0 / k as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn zeta_rationals() {
        let q = FieldDescriptor::rationals();
        let z = zeta_K(&q, 2.0, 1e-12).unwrap();
        assert!(
            (z.value - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12,
            "{z:?}"
        );
        assert!(z.tail_bound <= 1e-12);
        let z = zeta_K(&q, 1.5, 1e-10).unwrap();
        assert!((z.value - 2.612_375_348_685_488).abs() < 1e-9);
    }

    #[test]
    fn zeta_gaussian() {
        let z = zeta_K(&gaussian(), 2.0, 1e-12).unwrap();
        assert!(
            (z.value - 1.506_703_009_922_985).abs() < 1e-12,
            "{}",
            z.value
        );
    }

    #[test]
    fn zeta_at_large_s_and_domain() {
        let z = zeta_K(&gaussian(), 20.0, 1e-12).unwrap();
        assert!(z.value > 1.0 && z.value < 1.0001);
        assert!(matches!(
            zeta_K(&gaussian(), 1.0, 1e-6),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn truncated_product_approaches_value() {
        let q = FieldDescriptor::rationals();
        let t = zeta_K_truncated(&q, 2.0, 1e5).unwrap();
        assert!((t - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-5);
    }

    #[test]
    fn gamma_2_rationals() {
        let q = FieldDescriptor::rationals();
        let g = gamma_h(&q, 2, 1e-10).unwrap();
        let expected = riemann_zeta(1.5).unwrap() / riemann_zeta(3.0).unwrap();
        assert!(
            (g.value - expected).abs() < 1e-9,
            "{} vs {expected}",
            g.value
        );
        assert!((expected - 2.173_254_3).abs() < 1e-7);
    }

    #[test]
    fn gamma_first_factor() {
        let root = 2f64.sqrt();
        let f = 1.0 + (2.0 - root) / (4.0 * (root - 1.0));
        assert!((f - 1.353_553_4).abs() < 1e-7);
    }

    #[test]
    fn gamma_forms_agree() {
        let forms = gamma_h_forms(&gaussian(), 2, 1e-10).unwrap();
        assert!((forms.direct.value - forms.factored.value).abs() < 1e-8);
    }

    #[test]
    fn g2_is_reciprocal_zeta() {
        let q = FieldDescriptor::rationals();
        let g = G_h(&q, 2, 0.5, 1e-12).unwrap();
        assert!((g.value - 1.0 / riemann_zeta(3.0).unwrap()).abs() < 1e-11);
        assert!((g.value - 0.831_907_4).abs() < 1e-7);
        let k = gaussian();
        let g = G_h(&k, 2, 0.4, 1e-12).unwrap();
        let z = dedekind_zeta(&k, 2.4).unwrap();
        assert!((g.value - 1.0 / z).abs() < 1e-11);
    }

    #[test]
    fn g_domain() {
        let q = FieldDescriptor::rationals();
        assert!(matches!(G_h(&q, 2, 1.0 / 6.0, 1e-6), Err(Error::Domain(_))));
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(
            lambda_hfree(2, 2).unwrap(),
            BigRational::new(BigInt::from(1), BigInt::from(3))
        );
        assert_eq!(
            lambda_hfree(3, 3).unwrap(),
            BigRational::new(BigInt::from(4), BigInt::from(13))
        );
        assert!((lambda_hfull(4, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((lambda_hfull(2, 2).unwrap() - 0.6306).abs() < 1e-4);
        assert!(lambda_hfree(1, 2).is_err());
        assert!(lambda_hfull(5, 1).is_err());
    }
}
