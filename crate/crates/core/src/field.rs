//! Number field descriptors: ℚ and quadratic fields ℚ(√d).
//!
//! Class number, regulator and the number of roots of unity are catalog
//! inputs; the residue constant κ is derived from them at construction and
//! never stored independently.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sieve::is_prime;

/// A number field of degree 1 or 2 with the invariants needed for κ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldDescriptor {
    pub label: String,
    pub degree: u32,
    /// Squarefree radicand; `None` for ℚ.
    pub d: Option<i64>,
    pub discriminant: i64,
    pub r1: u32,
    pub r2: u32,
    pub class_number: u64,
    pub regulator: f64,
    pub nu: u32,
    kappa: f64,
}

impl FieldDescriptor {
    /// The rational field, labelled `Q`.
    pub fn rationals() -> Self {
        Self::rationals_labelled("Q")
    }

    pub fn rationals_labelled(label: &str) -> Self {
        FieldDescriptor {
            label: label.to_string(),
            degree: 1,
            d: None,
            discriminant: 1,
            r1: 1,
            r2: 0,
            class_number: 1,
            regulator: 1.0,
            nu: 2,
            kappa: 1.0,
        }
    }

    /// ℚ(√d) with catalog-supplied class number, regulator and root-of-unity count.
    pub fn quadratic(
        label: &str,
        d: i64,
        class_number: u64,
        regulator: f64,
        nu: u32,
    ) -> Result<Self> {
        let discriminant = discriminant(d)?;
        let invalid = |message: String| Error::Validation {
            field: label.to_string(),
            message,
        };
        if class_number == 0 {
            return Err(invalid("class number must be positive".into()));
        }
        let (r1, r2) = if d < 0 { (0, 1) } else { (2, 0) };
        if d < 0 {
            let expected_nu = match d {
                -1 => 4,
                -3 => 6,
                _ => 2,
            };
            if nu != expected_nu {
                return Err(invalid(format!(
                    "imaginary quadratic d={d} has {expected_nu} roots of unity, got {nu}"
                )));
            }
            if regulator != 1.0 {
                return Err(invalid(format!(
                    "imaginary quadratic fields have regulator 1, got {regulator}"
                )));
            }
        } else {
            if nu != 2 {
                return Err(invalid(format!(
                    "real quadratic fields have nu = 2, got {nu}"
                )));
            }
            if !(regulator.is_finite() && regulator > 0.0) {
                return Err(invalid(format!(
                    "regulator must be positive, got {regulator}"
                )));
            }
        }
        let mut desc = FieldDescriptor {
            label: label.to_string(),
            degree: 2,
            d: Some(d),
            discriminant,
            r1,
            r2,
            class_number,
            regulator,
            nu,
            kappa: f64::NAN,
        };
        desc.kappa = kappa(&desc)?;
        Ok(desc)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }
}

/// How a rational prime decomposes in a quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitType {
    pub kind: SplitKind,
    /// Norms of the prime ideals above `p`.
    pub norms: Vec<u64>,
}

pub fn is_squarefree(d: i64) -> bool {
    let mut n = d.unsigned_abs();
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

/// Field discriminant of ℚ(√d).
pub fn discriminant(d: i64) -> Result<i64> {
    if d == 0 || d == 1 || !is_squarefree(d) {
        return Err(Error::InvalidField(format!(
            "d = {d} must be squarefree and different from 0 and 1"
        )));
    }
    if d.rem_euclid(4) == 1 {
        Ok(d)
    } else {
        d.checked_mul(4)
            .ok_or_else(|| Error::InvalidField(format!("discriminant of d = {d} overflows")))
    }
}

/// Residue of ζ_K at s = 1: `2^{r1} (2π)^{r2} h R / (ν √|D|)`.
pub fn kappa(desc: &FieldDescriptor) -> Result<f64> {
    if desc.degree == 1 {
        return Ok(1.0);
    }
    if desc.class_number == 0 || desc.nu == 0 {
        return Err(Error::Config(format!(
            "field `{}` is missing its class number or root-of-unity count",
            desc.label
        )));
    }
    if !(desc.regulator.is_finite() && desc.regulator > 0.0) {
        return Err(Error::Config(format!(
            "field `{}` has no usable regulator",
            desc.label
        )));
    }
    let numerator = 2f64.powi(desc.r1 as i32)
        * (2.0 * PI).powi(desc.r2 as i32)
        * desc.class_number as f64
        * desc.regulator;
    Ok(numerator / (desc.nu as f64 * (desc.discriminant.unsigned_abs() as f64).sqrt()))
}

/// Kronecker symbol `(a | n)` for `n >= 1`, via quadratic reciprocity.
pub fn kronecker(a: i64, n: u64) -> i8 {
    if n == 0 {
        return if a.unsigned_abs() == 1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1i8;
    // Factor out powers of two from n using (a|2).
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        n >>= twos;
    }
    // Now n is odd: the Jacobi symbol (a mod n | n).
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        let tz = a.trailing_zeros();
        if tz % 2 == 1 {
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        a >>= tz;
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Decomposition of the rational prime `p` in the field.
pub fn split_prime(desc: &FieldDescriptor, p: u64) -> Result<SplitType> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    Ok(split_known_prime(desc, p))
}

/// [`split_prime`] without the primality check; callers guarantee `p` is prime.
pub(crate) fn split_known_prime(desc: &FieldDescriptor, p: u64) -> SplitType {
    if desc.degree == 1 {
        return SplitType {
            kind: SplitKind::Ramified,
            norms: vec![p],
        };
    }
    match kronecker(desc.discriminant, p) {
        0 => SplitType {
            kind: SplitKind::Ramified,
            norms: vec![p],
        },
        1 => SplitType {
            kind: SplitKind::Split,
            norms: vec![p, p],
        },
        _ => SplitType {
            kind: SplitKind::Inert,
            norms: vec![p * p],
        },
    }
}

/// Splitting kind without allocating the norm list; ℚ reports `Ramified`
/// (one prime of norm `p`).
pub(crate) fn split_kind(desc: &FieldDescriptor, p: u64) -> SplitKind {
    if desc.degree == 1 {
        return SplitKind::Ramified;
    }
    match kronecker(desc.discriminant, p) {
        0 => SplitKind::Ramified,
        1 => SplitKind::Split,
        _ => SplitKind::Inert,
    }
}
