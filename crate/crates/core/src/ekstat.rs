//! The normalized statistic `(ω(𝔪) − log log N(𝔪)) / √(log log N(𝔪))`, its
//! distance to the standard normal law, and its moments.

use serde::Serialize;

use crate::counting::{subset_enumerator, Subset};
use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::numeric::kahan_sum;

/// Default histogram layout.
pub const DEFAULT_BINS: usize = 40;
pub const HISTOGRAM_RANGE: (f64, f64) = (-4.0, 4.0);

/// Standard normal distribution function.
pub fn phi(gamma: f64) -> f64 {
    0.5 * libm::erfc(-gamma / std::f64::consts::SQRT_2)
}

/// Normalized values over the members of a subset with `3 <= N(𝔪) <= x`, sorted ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizedSample {
    pub field: String,
    pub subset: Subset,
    pub h: Option<u32>,
    pub x: f64,
    pub values: Vec<f64>,
}

impl NormalizedSample {
    /// Wrap arbitrary values, e.g. for testing the statistics.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_unstable_by(f64::total_cmp);
        NormalizedSample {
            field: String::new(),
            subset: Subset::All,
            h: None,
            x: f64::NAN,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `(ω − log log N)/√(log log N)` for `N >= 3`.
pub fn normalized_omega(omega: usize, norm: u64) -> f64 {
    let ll = (norm as f64).ln().ln();
    (omega as f64 - ll) / ll.sqrt()
}

pub fn ek_sample(
    desc: &FieldDescriptor,
    subset: Subset,
    h: u32,
    x: f64,
) -> Result<NormalizedSample> {
    let en = subset_enumerator(desc, subset, h, x)?;
    let mut values = en.par_reduce(
        Vec::new,
        |acc: &mut Vec<f64>, v| {
            if v.norm >= 3 {
                acc.push(normalized_omega(v.omega(), v.norm));
            }
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    if values.is_empty() {
        return Err(Error::EmptySample(format!(
            "no {subset} ideals with 3 <= N <= {x} in {}",
            desc.label
        )));
    }
    values.sort_unstable_by(f64::total_cmp);
    Ok(NormalizedSample {
        field: desc.label.clone(),
        subset,
        h: (subset != Subset::All).then_some(h),
        x,
        values,
    })
}

/// Supremum distance between the empirical distribution function and Φ,
/// checked on both sides of every jump.
pub fn ks_distance(sample: &NormalizedSample) -> Result<f64> {
    let mut values = sample.values.clone();
    if values.is_empty() {
        return Err(Error::EmptySample("KS distance of an empty sample".into()));
    }
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < values.len() {
        let v = values[i];
        let mut j = i;
        while j < values.len() && values[j] == v {
            j += 1;
        }
        let f = phi(v);
        d = d
            .max((i as f64 / n - f).abs())
            .max((j as f64 / n - f).abs());
        i = j;
    }
    Ok(d)
}

/// `E[Z^r]` for a standard normal `Z`.
pub fn gaussian_moment(r: u32) -> f64 {
    if r % 2 == 1 {
        0.0
    } else {
        (1..r).step_by(2).map(f64::from).product()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub r: u32,
    pub empirical: f64,
    pub gaussian: f64,
}

/// Raw moments `(1/n) Σ z^r` for `r = 1..=r_max`.
pub fn empirical_moments(sample: &NormalizedSample, r_max: u32) -> Result<Vec<MomentRow>> {
    if sample.is_empty() {
        return Err(Error::EmptySample("moments of an empty sample".into()));
    }
    let n = sample.len() as f64;
    Ok((1..=r_max)
        .map(|r| {
            let sum = kahan_sum(sample.values.iter().map(|z| z.powi(r as i32)));
            MomentRow {
                r,
                empirical: sum / n,
                gaussian: gaussian_moment(r),
            }
        })
        .collect())
}

/// Population variance of the sample.
pub fn sample_variance(sample: &NormalizedSample) -> Result<f64> {
    let m = empirical_moments(sample, 2)?;
    Ok(m[1].empirical - m[0].empirical * m[0].empirical)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: u64,
    /// Share of the whole sample at or below `right`.
    pub empirical_cdf: f64,
    pub phi: f64,
}

/// Equal-width bins over `[lo, hi]`; values outside the range are counted
/// only in the cumulative column.
pub fn histogram(
    sample: &NormalizedSample,
    bins: usize,
    lo: f64,
    hi: f64,
) -> Result<Vec<HistogramBin>> {
    if bins == 0 || lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "histogram needs bins > 0 and lo < hi, got {bins} over [{lo}, {hi}]"
        )));
    }
    let mut values = sample.values.clone();
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len().max(1) as f64;
    let width = (hi - lo) / bins as f64;
    let mut out = Vec::with_capacity(bins);
    let mut below = values.partition_point(|&v| v < lo);
    for k in 0..bins {
        let left = lo + k as f64 * width;
        let right = if k + 1 == bins {
            hi
        } else {
            lo + (k + 1) as f64 * width
        };
        let upto = values.partition_point(|&v| v <= right);
        let count = if k + 1 == bins {
            upto - below
        } else {
            values.partition_point(|&v| v < right) - below
        };
        out.push(HistogramBin {
            left,
            right,
            count: count as u64,
            empirical_cdf: upto as f64 / n,
            phi: phi(right),
        });
        below += count;
    }
    Ok(out)
}

/// Everything reported about one sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KSReport {
    pub field: String,
    pub subset: Subset,
    pub h: Option<u32>,
    pub x: f64,
    pub n: usize,
    pub ks_distance: f64,
    pub variance: f64,
    pub moments: Vec<MomentRow>,
    pub histogram: Vec<HistogramBin>,
}

pub fn ks_report(sample: &NormalizedSample, r_max: u32, bins: usize) -> Result<KSReport> {
    let (lo, hi) = HISTOGRAM_RANGE;
    Ok(KSReport {
        field: sample.field.clone(),
        subset: sample.subset,
        h: sample.h,
        x: sample.x,
        n: sample.len(),
        ks_distance: ks_distance(sample)?,
        variance: sample_variance(sample)?,
        moments: empirical_moments(sample, r_max)?,
        histogram: histogram(sample, bins, lo, hi)?,
    })
}
