//! Reciprocal sums over prime ideals and ideals, their limiting shapes, and
//! the constants in `Σ 1/N(℘) = log log x + A` and `Σ 1/N(𝔪) = κ log x + B`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::ideals::IdealEnumerator;
use crate::numeric::{mobius_int, norm_bound, KahanSum};
use crate::primeideals::prime_ideals_up_to_bound;
use crate::zeta::dedekind_zeta;

/// Fewest grid points accepted by [`fit_constant`].
pub const MIN_FIT_POINTS: usize = 4;

/// Evaluated sums and models over a grid of `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MertensFit {
    pub part: u8,
    pub alpha: f64,
    pub x_grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub model: Vec<f64>,
    /// A for part 4, B for part 5.
    pub fitted_constant: Option<f64>,
    pub residuals: Vec<f64>,
}

fn check_grid(x_grid: &[f64], min: f64) -> Result<()> {
    if x_grid.is_empty() {
        return Err(Error::InvalidArgument("empty x grid".into()));
    }
    if let Some(&x) = x_grid.iter().find(|&&x| x.is_nan() || x < min) {
        return Err(Error::InvalidArgument(format!(
            "x must be at least {min}, got {x}"
        )));
    }
    if x_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "x grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `Σ_{N(℘) <= x} N(℘)^{−α}` for each `x` of an increasing grid, from one pass
/// over the prime ideals in norm order. With `strict`, the bound is `N(℘) < x`.
fn prime_sums(desc: &FieldDescriptor, x_grid: &[f64], alpha: f64, strict: bool) -> Vec<f64> {
    let top = x_grid.last().map_or(0, |&x| norm_bound(x));
    let primes = prime_ideals_up_to_bound(desc, top);
    let mut out = Vec::with_capacity(x_grid.len());
    let mut sum = KahanSum::new();
    let mut it = primes.iter().peekable();
    for &x in x_grid {
        while let Some(p) = it.peek() {
            let n = p.norm as f64;
            if (strict && n >= x) || (!strict && n > x) {
                break;
            }
            sum.add(n.powf(-alpha));
            it.next();
        }
        out.push(sum.value());
    }
    out
}

/// `Σ_{N(𝔪) <= x} N(𝔪)^{−α}` (unit ideal included) for an increasing grid.
fn ideal_sums(desc: &FieldDescriptor, x_grid: &[f64], alpha: f64, strict: bool) -> Vec<f64> {
    let top = x_grid.last().map_or(0, |&x| norm_bound(x));
    let counts = IdealEnumerator::new(desc, top as f64).norm_counts();
    let mut out = Vec::with_capacity(x_grid.len());
    let mut sum = KahanSum::new();
    let mut n = 1usize;
    for &x in x_grid {
        while n < counts.len() {
            let nf = n as f64;
            if (strict && nf >= x) || (!strict && nf > x) {
                break;
            }
            if counts[n] > 0 {
                sum.add(f64::from(counts[n]) * nf.powf(-alpha));
            }
            n += 1;
        }
        out.push(sum.value());
    }
    out
}

/// `Σ_{N(℘) <= x} N(℘)^{−α}`.
pub fn prime_reciprocal_sum(desc: &FieldDescriptor, x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, 0.0, true)?;
    Ok(prime_sums(desc, &[x], alpha, false)[0])
}

/// `Σ_{N(𝔪) <= x} N(𝔪)^{−α}`, the unit ideal contributing 1.
pub fn ideal_reciprocal_sum(desc: &FieldDescriptor, x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, 0.0, true)?;
    Ok(ideal_sums(desc, &[x], alpha, false)[0])
}

/// The prime zeta function `Σ_℘ N(℘)^{−s} = Σ_m μ(m)/m · log ζ_K(ms)` for `s > 1`.
pub fn prime_zeta(desc: &FieldDescriptor, s: f64) -> Result<f64> {
    check_alpha(s, 1.0, false)?;
    let mut sum = KahanSum::new();
    for m in 1u64.. {
        let ms = m as f64 * s;
        // log ζ_K(ms) is about degree·2^{−ms}.
        if ms * std::f64::consts::LN_2 > 40.0 {
            break;
        }
        let mu = mobius_int(m);
        if mu != 0 {
            sum.add(f64::from(mu) / m as f64 * dedekind_zeta(desc, ms)?.ln());
        }
    }
    Ok(sum.value())
}

/// `Σ_{N(℘) >= x} N(℘)^{−α}` for `α > 1`, by subtraction from the prime zeta value.
pub fn prime_tail_sum(desc: &FieldDescriptor, x: f64, alpha: f64) -> Result<f64> {
    Ok(prime_zeta(desc, alpha)? - prime_sums(desc, &[x], alpha, true)[0])
}

/// `Σ_{N(𝔪) >= x} N(𝔪)^{−α}` for `α > 1`, by subtraction from ζ_K(α).
pub fn ideal_tail_sum(desc: &FieldDescriptor, x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, 1.0, false)?;
    Ok(dedekind_zeta(desc, alpha)? - ideal_sums(desc, &[x], alpha, true)[0])
}

fn check_alpha(alpha: f64, bound: f64, inclusive: bool) -> Result<()> {
    let ok = if inclusive {
        alpha >= bound
    } else {
        alpha > bound
    };
    if ok && alpha.is_finite() {
        Ok(())
    } else {
        let rel = if inclusive { ">=" } else { ">" };
        Err(Error::InvalidArgument(format!(
            "alpha must be {rel} {bound}, got {alpha}"
        )))
    }
}

/// Exponent used by each part when none is given.
pub fn default_alpha(part: u8) -> f64 {
    match part {
        1 | 2 => 0.5,
        4 | 5 => 1.0,
        _ => 2.0,
    }
}

/// Evaluate one of the seven sum estimates on an increasing grid.
///
/// 1. primes, `0 <= α < 1`, against `x^{1−α}/log x`
/// 2. ideals, `0 <= α < 1`, against `κ x^{1−α}/(1−α)`
/// 3. ideals, `α > 1`, against `ζ_K(α)`
/// 4. primes, `α = 1`, against `log log x + A`
/// 5. ideals, `α = 1`, against `κ log x + B`
/// 6. prime tail `N >= x`, `α > 1`, against `1/((α−1) x^{α−1} log x)`
/// 7. ideal tail `N >= x`, `α > 1`, against `κ/((α−1) x^{α−1})`
///
/// Parts 4 and 5 fit their constant when the grid has at least four points;
/// otherwise the model omits it.
pub fn evaluate_part(
    part: u8,
    desc: &FieldDescriptor,
    x_grid: &[f64],
    alpha: Option<f64>,
) -> Result<MertensFit> {
    let alpha = alpha.unwrap_or_else(|| default_alpha(part));
    let kappa = desc.kappa();
    let (empirical, model): (Vec<f64>, Vec<f64>) = match part {
        1 => {
            check_alpha(alpha, 0.0, true)?;
            if alpha >= 1.0 {
                return Err(Error::InvalidArgument("part 1 needs alpha < 1".into()));
            }
            check_grid(x_grid, 3.0)?;
            let model = x_grid
                .iter()
                .map(|&x| x.powf(1.0 - alpha) / x.ln())
                .collect();
            (prime_sums(desc, x_grid, alpha, false), model)
        }
        2 => {
            check_alpha(alpha, 0.0, true)?;
            if alpha >= 1.0 {
                return Err(Error::InvalidArgument("part 2 needs alpha < 1".into()));
            }
            check_grid(x_grid, 1.0)?;
            let model = x_grid
                .iter()
                .map(|&x| kappa * x.powf(1.0 - alpha) / (1.0 - alpha))
                .collect();
            (ideal_sums(desc, x_grid, alpha, false), model)
        }
        3 => {
            check_alpha(alpha, 1.0, false)?;
            check_grid(x_grid, 1.0)?;
            let limit = dedekind_zeta(desc, alpha)?;
            (
                ideal_sums(desc, x_grid, alpha, false),
                vec![limit; x_grid.len()],
            )
        }
        4 | 5 => {
            if alpha != 1.0 {
                return Err(Error::InvalidArgument(format!("part {part} has alpha = 1")));
            }
            check_grid(x_grid, 3.0)?;
            if x_grid.len() >= MIN_FIT_POINTS {
                return fit_constant(part, desc, x_grid);
            }
            let (empirical, model) = main_terms(part, desc, x_grid);
            (empirical, model)
        }
        6 | 7 => {
            check_alpha(alpha, 1.0, false)?;
            check_grid(x_grid, 2.0)?;
            let (head, limit) = if part == 6 {
                (
                    prime_sums(desc, x_grid, alpha, true),
                    prime_zeta(desc, alpha)?,
                )
            } else {
                (
                    ideal_sums(desc, x_grid, alpha, true),
                    dedekind_zeta(desc, alpha)?,
                )
            };
            let empirical = head.iter().map(|h| limit - h).collect();
            let model = x_grid
                .iter()
                .map(|&x| {
                    let scale = 1.0 / ((alpha - 1.0) * x.powf(alpha - 1.0));
                    if part == 6 {
                        scale / x.ln()
                    } else {
                        kappa * scale
                    }
                })
                .collect();
            (empirical, model)
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "part must be 1..7, got {other}"
            )));
        }
    };
    let residuals = empirical.iter().zip(&model).map(|(e, m)| e - m).collect();
    Ok(MertensFit {
        part,
        alpha,
        x_grid: x_grid.to_vec(),
        empirical,
        model,
        fitted_constant: None,
        residuals,
    })
}

/// Sums and constant-free main terms for parts 4 and 5.
fn main_terms(part: u8, desc: &FieldDescriptor, x_grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
    if part == 4 {
        let model = x_grid.iter().map(|&x| x.ln().ln()).collect();
        (prime_sums(desc, x_grid, 1.0, false), model)
    } else {
        let model = x_grid.iter().map(|&x| desc.kappa() * x.ln()).collect();
        (ideal_sums(desc, x_grid, 1.0, false), model)
    }
}

/// Fit A (part 4) or B (part 5) as the mean offset over the upper half of the grid.
pub fn fit_constant(part: u8, desc: &FieldDescriptor, x_grid: &[f64]) -> Result<MertensFit> {
    if part != 4 && part != 5 {
        return Err(Error::InvalidArgument(format!(
            "only parts 4 and 5 have a fitted constant, got {part}"
        )));
    }
    if x_grid.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidArgument(format!(
            "fitting needs at least {MIN_FIT_POINTS} grid points, got {}",
            x_grid.len()
        )));
    }
    check_grid(x_grid, 3.0)?;
    let (empirical, main) = main_terms(part, desc, x_grid);
    let offsets: Vec<f64> = empirical.iter().zip(&main).map(|(e, m)| e - m).collect();
    let upper = &offsets[offsets.len() / 2..];
    let constant = upper.iter().sum::<f64>() / upper.len() as f64;
    let model: Vec<f64> = main.iter().map(|m| m + constant).collect();
    let residuals = empirical.iter().zip(&model).map(|(e, m)| e - m).collect();
    Ok(MertensFit {
        part,
        alpha: 1.0,
        x_grid: x_grid.to_vec(),
        empirical,
        model,
        fitted_constant: Some(constant),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> FieldDescriptor {
        FieldDescriptor::quadratic("Qi", -1, 1, 1.0, 4).unwrap()
    }

    #[test]
    fn small_sums() {
        let q = FieldDescriptor::rationals();
        let s = prime_reciprocal_sum(&q, 10.0, 1.0).unwrap();
        assert!((s - (1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 5.0 + 1.0 / 7.0)).abs() < 1e-15);
        let s = prime_reciprocal_sum(&gaussian(), 10.0, 1.0).unwrap();
        assert!((s - (0.5 + 0.2 + 0.2 + 1.0 / 9.0)).abs() < 1e-15);
        let h10: f64 = (1..=10).map(|n| 1.0 / n as f64).sum();
        assert!((ideal_reciprocal_sum(&q, 10.0, 1.0).unwrap() - h10).abs() < 1e-14);
    }

    #[test]
    fn prime_zeta_two() {
        let q = FieldDescriptor::rationals();
        assert!((prime_zeta(&q, 2.0).unwrap() - 0.452_247_420_041_065_5).abs() < 1e-13);
        let head = prime_reciprocal_sum(&q, 1e6, 2.0).unwrap();
        assert!((head - 0.452_247_420_041_065_5).abs() < 1e-6);
    }

    #[test]
    fn ideal_sum_tends_to_zeta() {
        let s = ideal_reciprocal_sum(&gaussian(), 1e4, 2.0).unwrap();
        assert!((s - 1.506_703_009_922_985).abs() < 1e-3);
    }

    #[test]
    fn grid_matches_pointwise() {
        let k = gaussian();
        let grid = [10.0, 100.0, 1000.0];
        let fit = evaluate_part(4, &k, &grid, None).unwrap();
        for (x, e) in grid.iter().zip(&fit.empirical) {
            assert_eq!(*e, prime_reciprocal_sum(&k, *x, 1.0).unwrap());
        }
        assert!(fit.fitted_constant.is_none());
    }

    #[test]
    fn fit_needs_four_points() {
        let q = FieldDescriptor::rationals();
        assert!(fit_constant(4, &q, &[1e2, 1e3, 1e4]).is_err());
        assert!(fit_constant(3, &q, &[1e2, 1e3, 1e4, 1e5]).is_err());
        let fit = fit_constant(5, &q, &[1e2, 1e3, 1e4, 1e5]).unwrap();
        assert!((fit.fitted_constant.unwrap() - 0.577_215_664_9).abs() < 1e-3);
        for i in 0..4 {
            assert!((fit.empirical[i] - fit.model[i] - fit.residuals[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let q = FieldDescriptor::rationals();
        assert!(evaluate_part(8, &q, &[10.0], None).is_err());
        assert!(evaluate_part(1, &q, &[10.0], Some(1.5)).is_err());
        assert!(evaluate_part(6, &q, &[10.0], Some(1.0)).is_err());
        assert!(evaluate_part(3, &q, &[100.0, 10.0], None).is_err());
    }
}
