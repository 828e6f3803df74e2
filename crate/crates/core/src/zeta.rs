//! Dedekind zeta values for real `s > 1` from Dirichlet series.
//!
//! For a quadratic field ζ_K(s) = ζ(s)·L(s, χ_D). Both factors are sums over
//! arithmetic progressions `Σ_{n≥0} (n·m + a)^{−s}`, evaluated by a direct
//! head plus an Euler–Maclaurin tail.

use crate::error::{Error, Result};
use crate::field::{kronecker, FieldDescriptor};

/// B_2, B_4, …, B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// `Σ_{n≥0} (n·m + a)^{−s}` for `s > 1`, `m ≥ 1`, `a ≥ 1`.
fn progression_sum(s: f64, m: u64, a: u64) -> f64 {
    let n0 = 20 + s.ceil() as u64;
    let m_f = m as f64;
    // Direct head, smallest terms first.
    let mut head = 0.0;
    for n in (0..n0).rev() {
        head += ((n * m + a) as f64).powf(-s);
    }
    // Tail Σ_{n≥n0} f(n) with f(t) = (t·m + a)^{−s}.
    let u = (n0 * m + a) as f64;
    let mut tail = u.powf(1.0 - s) / (m_f * (s - 1.0)) + 0.5 * u.powf(-s);
    // f^{(2k−1)}(n0) = −(s)_{2k−1} m^{2k−1} u^{−s−2k+1}
    let mut rising = s; // (s)_{2k−1}
    let mut factorial = 2.0; // (2k)!
    let mut mpow = m_f;
    let mut upow = u.powf(-s - 1.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = k as f64 + 1.0;
        tail += b / factorial * rising * mpow * upow;
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        factorial *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        mpow *= m_f * m_f;
        upow /= u * u;
    }
    head + tail
}

/// The Riemann zeta function for real `s > 1`.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    check_domain(s)?;
    Ok(progression_sum(s, 1, 1))
}

/// L(s, χ_D) for the Kronecker character of discriminant `discriminant`, `s > 1`.
pub fn dirichlet_l(discriminant: i64, s: f64) -> Result<f64> {
    check_domain(s)?;
    let m = discriminant.unsigned_abs();
    let mut total = 0.0;
    for a in 1..=m {
        match kronecker(discriminant, a) {
            1 => total += progression_sum(s, m, a),
            -1 => total -= progression_sum(s, m, a),
            _ => {}
        }
    }
    Ok(total)
}

/// ζ_K(s) for real `s > 1`, from the Dirichlet series (no Euler product).
pub fn dedekind_zeta(desc: &FieldDescriptor, s: f64) -> Result<f64> {
    let zeta = riemann_zeta(s)?;
    if desc.is_rational() {
        Ok(zeta)
    } else {
        Ok(zeta * dirichlet_l(desc.discriminant, s)?)
    }
}

fn check_domain(s: f64) -> Result<()> {
    if s.is_nan() || s <= 1.0 {
        Err(Error::Domain(format!("zeta values need s > 1, got {s}")))
    } else {
        Ok(())
    }
}
