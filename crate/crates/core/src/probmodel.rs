//! The independent Bernoulli model `S_y = Σ_{N(℘) <= y} X_℘` with
//! `P(X_℘ = 1) = λ_℘`, its exact law and moments, and a numerical audit of
//! the hypotheses under which ω is asymptotically normal on a subset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{
    subset_enumerator, subset_joint_counts, subset_prime_counts, theoretical_lambda, Subset,
};
use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::numeric::{kahan_sum, norm_bound, KahanSum};
use crate::primeideals::{prime_ideals_up_to_bound, PrimeIdeal};

/// Default seed for every randomized step.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Monte Carlo work is split into this many independent substreams,
/// whatever the number of threads.
pub const MC_SHARDS: u64 = 64;

/// Number of randomly drawn prime tuples added to the audit of condition (f).
pub const AUDIT_SAMPLED_TUPLES: usize = 32;

/// Largest tuple length used by the audit of condition (f).
pub const AUDIT_MAX_TUPLE: u32 = 3;

/// `(β, y)` used for a subset at `x`: `β = 1, y = x^{1/log log x}` for h-free
/// ideals and `β = 1/h, y = x^{1/(h log log x)}` for h-full ideals.
pub fn model_parameters(subset: Subset, h: u32, x: f64) -> Result<(f64, f64)> {
    if x.is_nan() || x <= std::f64::consts::E {
        return Err(Error::InvalidArgument(format!("x must exceed e, got {x}")));
    }
    let ll = x.ln().ln();
    match subset {
        Subset::HFree => Ok((1.0, x.powf(1.0 / ll))),
        Subset::HFull => {
            let h = f64::from(h);
            Ok((1.0 / h, x.powf(1.0 / (h * ll))))
        }
        Subset::All => Err(Error::UndefinedDensity(
            "the full ideal set has no model densities".into(),
        )),
    }
}

/// Independent indicators, one per prime ideal of norm at most `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernoulliSystem {
    pub field: String,
    pub subset: Subset,
    pub h: u32,
    pub x: f64,
    pub y: f64,
    /// Empty for systems built directly from probabilities.
    pub primes: Vec<PrimeIdeal>,
    pub lambdas: Vec<f64>,
}

impl BernoulliSystem {
    pub fn new(desc: &FieldDescriptor, subset: Subset, h: u32, x: f64, y: f64) -> Result<Self> {
        crate::counting::check_h(h)?;
        let primes = if y >= 2.0 {
            prime_ideals_up_to_bound(desc, norm_bound(y))
        } else {
            Vec::new()
        };
        let mut lambdas = Vec::with_capacity(primes.len());
        for p in &primes {
            lambdas.push(theoretical_lambda(subset, h, p.norm)?.ok_or_else(|| {
                Error::UndefinedDensity("the full ideal set has no model densities".into())
            })?);
        }
        Ok(BernoulliSystem {
            field: desc.label.clone(),
            subset,
            h,
            x,
            y,
            primes,
            lambdas,
        })
    }

    /// The system at `x` with the subset's standard choice of `y`.
    pub fn standard(desc: &FieldDescriptor, subset: Subset, h: u32, x: f64) -> Result<Self> {
        let (_, y) = model_parameters(subset, h, x)?;
        Self::new(desc, subset, h, x, y)
    }

    /// A system given only by its success probabilities.
    pub fn from_lambdas(lambdas: Vec<f64>) -> Result<Self> {
        if let Some(l) = lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::InvalidArgument(format!(
                "probability {l} outside [0, 1]"
            )));
        }
        Ok(BernoulliSystem {
            field: String::new(),
            subset: Subset::All,
            h: 0,
            x: f64::NAN,
            y: f64::NAN,
            primes: Vec::new(),
            lambdas,
        })
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

/// `(E S_y, Var S_y) = (Σ λ, Σ λ(1 − λ))`.
pub fn mean_variance(system: &BernoulliSystem) -> (f64, f64) {
    let mean = kahan_sum(system.lambdas.iter().copied());
    let var = kahan_sum(system.lambdas.iter().map(|l| l * (1.0 - l)));
    (mean, var)
}

/// The law of `S_y` on `{0, …, n}` by successive convolution.
pub fn distribution(system: &BernoulliSystem) -> Vec<f64> {
    let mut p = Vec::with_capacity(system.len() + 1);
    p.push(1.0);
    for &l in &system.lambdas {
        p.push(0.0);
        for k in (1..p.len()).rev() {
            p[k] = p[k] * (1.0 - l) + p[k - 1] * l;
        }
        p[0] *= 1.0 - l;
    }
    p
}

fn standardization(system: &BernoulliSystem) -> Result<(f64, f64)> {
    let (mean, var) = mean_variance(system);
    if var <= 0.0 {
        return Err(Error::Degenerate(format!(
            "the model has zero variance ({} indicators)",
            system.len()
        )));
    }
    Ok((mean, var.sqrt()))
}

/// `E[((S_y − E S_y)/√Var S_y)^r]`, exactly from the law of `S_y`.
pub fn normalized_moment(system: &BernoulliSystem, r: u32) -> Result<f64> {
    let (mean, sd) = standardization(system)?;
    let law = distribution(system);
    Ok(kahan_sum(
        law.iter()
            .enumerate()
            .map(|(k, p)| p * ((k as f64 - mean) / sd).powi(r as i32)),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub r: u32,
    pub draws: u64,
    pub seed: u64,
    pub mean: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of the normalized moment from independent draws.
///
/// Draws are split into [`MC_SHARDS`] ChaCha substreams of one seed, so the
/// result depends only on `(seed, draws)`.
pub fn monte_carlo_moment(
    system: &BernoulliSystem,
    r: u32,
    draws: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if draws < 2 {
        return Err(Error::InvalidArgument(
            "Monte Carlo needs at least 2 draws".into(),
        ));
    }
    let (mean, sd) = standardization(system)?;
    let shards: Vec<(KahanSum, KahanSum)> = (0..MC_SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let n = draws / MC_SHARDS + u64::from(shard < draws % MC_SHARDS);
            let mut s1 = KahanSum::new();
            let mut s2 = KahanSum::new();
            for _ in 0..n {
                let hits = system
                    .lambdas
                    .iter()
                    .filter(|&&l| rng.random::<f64>() < l)
                    .count();
                let t = ((hits as f64 - mean) / sd).powi(r as i32);
                s1.add(t);
                s2.add(t * t);
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = shards
        .into_iter()
        .fold((KahanSum::new(), KahanSum::new()), |(a1, a2), (b1, b2)| {
            (a1.merge(b1), a2.merge(b2))
        });
    let n = draws as f64;
    let m = s1.value() / n;
    let var = (s2.value() / n - m * m).max(0.0) * n / (n - 1.0);
    Ok(MonteCarloEstimate {
        r,
        draws,
        seed,
        mean: m,
        std_error: (var / n).sqrt(),
    })
}

/// Exact histogram of `ω_y` over the subset members of norm at most `x`.
pub fn omega_y_histogram(
    desc: &FieldDescriptor,
    subset: Subset,
    h: u32,
    x: f64,
    y: f64,
) -> Result<Vec<u64>> {
    let en = subset_enumerator(desc, subset, h, x)?;
    let y_bound = if y >= 1.0 { norm_bound(y) } else { 0 };
    Ok(en.par_reduce(
        Vec::new,
        |acc: &mut Vec<u64>, v| {
            let k = v.omega_up_to(y_bound);
            if acc.len() <= k {
                acc.resize(k + 1, 0);
            }
            acc[k] += 1;
        },
        |mut a, b| {
            if a.len() < b.len() {
                a.resize(b.len(), 0);
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    ))
}

/// Empirical and model moments of the normalized truncated prime-divisor count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentGap {
    pub r: u32,
    pub x: f64,
    pub y: f64,
    pub members: u64,
    pub empirical: f64,
    pub exact: f64,
    pub gap: f64,
}

/// `|E_{S,x}[((ω_y − E S_y)/√Var S_y)^r] − E[((S_y − E S_y)/√Var S_y)^r]|`.
pub fn moment_gap(
    desc: &FieldDescriptor,
    subset: Subset,
    h: u32,
    x: f64,
    y: f64,
    r: u32,
) -> Result<MomentGap> {
    Ok(moment_gaps(desc, subset, h, x, y, &[r])?.remove(0))
}

/// [`moment_gap`] for several `r` from one enumeration.
pub fn moment_gaps(
    desc: &FieldDescriptor,
    subset: Subset,
    h: u32,
    x: f64,
    y: f64,
    rs: &[u32],
) -> Result<Vec<MomentGap>> {
    let system = BernoulliSystem::new(desc, subset, h, x, y)?;
    let (mean, sd) = standardization(&system)?;
    let hist = omega_y_histogram(desc, subset, h, x, y)?;
    let members: u64 = hist.iter().sum();
    if members == 0 {
        return Err(Error::EmptySample(format!(
            "no {subset} ideals of norm at most {x}"
        )));
    }
    rs.iter()
        .map(|&r| {
            let empirical = kahan_sum(
                hist.iter()
                    .enumerate()
                    .map(|(k, &c)| c as f64 * ((k as f64 - mean) / sd).powi(r as i32)),
            ) / members as f64;
            let exact = normalized_moment(&system, r)?;
            Ok(MomentGap {
                r,
                x,
                y,
                members,
                empirical,
                exact,
                gap: (empirical - exact).abs(),
            })
        })
        .collect()
}

/// Numerical values of the six hypotheses at one `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub field: String,
    pub subset: Subset,
    pub h: u32,
    pub x: f64,
    pub beta: f64,
    pub y: f64,
    pub loglog_x: f64,
    pub members: u64,
    /// (a) largest number of prime factors of norm above `x^β` in one member.
    pub a_max_large_factors: u64,
    /// (b) `Σ_{y < N ≤ x^β} λ_℘`.
    pub b_sum: f64,
    pub b_normalized: f64,
    /// (c) `Σ_{y < N ≤ x^β} |e_℘|`.
    pub c_sum: f64,
    pub c_normalized: f64,
    /// (d) `Σ_{N ≤ y} λ_℘` and its distance to `log log x`.
    pub d_sum: f64,
    pub d_gap: f64,
    pub d_normalized: f64,
    /// (e) `Σ_{N ≤ y} λ_℘²`.
    pub e_sum: f64,
    pub e_normalized: f64,
    /// (f) `Σ |e_{℘_1⋯℘_u}|` over ordered tuples of distinct primes of norm at most `y`
    /// with `u <= min(r, 3)`, restricted to the audited tuple family.
    pub r: u32,
    pub f_sum: f64,
    pub f_normalized: f64,
    /// Sets in the audited family: all sets from the `r + 3` smallest primes,
    /// then sampled sets.
    pub f_exhaustive_sets: usize,
    pub f_sampled_sets: usize,
    pub seed: u64,
}

fn subsets_up_to(n: usize, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, max_len: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        for i in start..n {
            cur.push(i as u32);
            out.push(cur.clone());
            if cur.len() < max_len {
                rec(i + 1, n, max_len, cur, out);
            }
            cur.pop();
        }
    }
    rec(0, n, max_len, &mut cur, &mut out);
    out
}

pub fn conditions_audit(
    desc: &FieldDescriptor,
    subset: Subset,
    h: u32,
    x: f64,
    r: u32,
    seed: u64,
) -> Result<AuditReport> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let (beta, y) = model_parameters(subset, h, x)?;
    let ll = x.ln().ln();
    let en = subset_enumerator(desc, subset, h, x)?;
    let x_beta = norm_bound(x.powf(beta) * (1.0 + 1e-12));
    let y_bound = norm_bound(y);
    let primes = en.primes();

    let (members, per_prime) = subset_prime_counts(&en);
    if members == 0 {
        return Err(Error::EmptySample(format!(
            "no {subset} ideals of norm at most {x}"
        )));
    }
    let a_max = en.par_reduce(
        || 0u64,
        |acc, v| {
            let large = v
                .factors
                .iter()
                .filter(|&&(i, _)| primes[i as usize].norm > x_beta)
                .count() as u64;
            *acc = (*acc).max(large);
        },
        |a, b| a.max(b),
    );

    let total = members as f64;
    let mut lambdas = Vec::with_capacity(primes.len());
    for p in primes {
        lambdas.push(theoretical_lambda(subset, h, p.norm)?.unwrap_or(f64::NAN));
    }
    let (mut b, mut c, mut d, mut e) = (
        KahanSum::new(),
        KahanSum::new(),
        KahanSum::new(),
        KahanSum::new(),
    );
    for (i, p) in primes.iter().enumerate() {
        let l = lambdas[i];
        if p.norm <= y_bound {
            d.add(l);
            e.add(l * l);
        } else if p.norm <= x_beta {
            b.add(l);
            c.add((per_prime[i] as f64 / total - l).abs());
        }
    }

    // Tuple family for condition (f).
    let small = primes.partition_point(|p| p.norm <= y_bound);
    let max_len = r.min(AUDIT_MAX_TUPLE) as usize;
    let head = small.min(r as usize + 3);
    let mut sets = subsets_up_to(head, max_len);
    let exhaustive = sets.len();
    if small > head && max_len > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut attempts = 0;
        while sets.len() < exhaustive + AUDIT_SAMPLED_TUPLES && attempts < 64 * AUDIT_SAMPLED_TUPLES
        {
            attempts += 1;
            let len = rng.random_range(1..=max_len.min(small));
            let mut set: Vec<u32> = (0..len)
                .map(|_| rng.random_range(0..small) as u32)
                .collect();
            set.sort_unstable();
            set.dedup();
            if set.len() == len
                && set.iter().any(|&i| i as usize >= head)
                && !sets[exhaustive..].contains(&set)
            {
                sets.push(set);
            }
        }
    }
    let sampled = sets.len() - exhaustive;
    let (_, joint) = subset_joint_counts(&en, &sets);
    let mut f = KahanSum::new();
    for (set, count) in sets.iter().zip(joint) {
        let product: f64 = set.iter().map(|&i| lambdas[i as usize]).product();
        let orderings: f64 = (1..=set.len()).map(|k| k as f64).product();
        f.add(orderings * (count as f64 / total - product).abs());
    }

    let root = ll.sqrt();
    let d_gap = (d.value() - ll).abs();
    Ok(AuditReport {
        field: desc.label.clone(),
        subset,
        h,
        x,
        beta,
        y,
        loglog_x: ll,
        members,
        a_max_large_factors: a_max,
        b_sum: b.value(),
        b_normalized: b.value() / root,
        c_sum: c.value(),
        c_normalized: c.value() / root,
        d_sum: d.value(),
        d_gap,
        d_normalized: d_gap / root,
        e_sum: e.value(),
        e_normalized: e.value() / root,
        r,
        f_sum: f.value(),
        f_normalized: f.value() * ll.powf(f64::from(r) / 2.0),
        f_exhaustive_sets: exhaustive,
        f_sampled_sets: sampled,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mean_variance_small() {
        let s = BernoulliSystem::from_lambdas(vec![0.5]).unwrap();
        assert_eq!(mean_variance(&s), (0.5, 0.25));
        let s = BernoulliSystem::from_lambdas(vec![1.0 / 3.0, 1.0 / 3.0]).unwrap();
        let (m, v) = mean_variance(&s);
        assert!(close(m, 2.0 / 3.0, 1e-15) && close(v, 4.0 / 9.0, 1e-15));
        assert_eq!(
            mean_variance(&BernoulliSystem::from_lambdas(vec![]).unwrap()),
            (0.0, 0.0)
        );
    }

    #[test]
    fn distribution_small() {
        let s = BernoulliSystem::from_lambdas(vec![0.5, 0.5]).unwrap();
        assert_eq!(distribution(&s), vec![0.25, 0.5, 0.25]);
        let s = BernoulliSystem::from_lambdas(vec![0.3]).unwrap();
        assert_eq!(distribution(&s), vec![0.7, 0.3]);
    }

    #[test]
    fn moments_of_binomial() {
        let s = BernoulliSystem::from_lambdas(vec![0.5; 30]).unwrap();
        assert!(close(normalized_moment(&s, 1).unwrap(), 0.0, 1e-12));
        assert!(close(normalized_moment(&s, 2).unwrap(), 1.0, 1e-12));
        // Binomial kurtosis: 3 − 2/n for p = 1/2.
        let m4 = normalized_moment(&s, 4).unwrap();
        assert!(close(m4, 3.0 - 2.0 / 30.0, 1e-10));
        let degenerate = BernoulliSystem::from_lambdas(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            normalized_moment(&degenerate, 2),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn gaussian_field_system() {
        let k = FieldDescriptor::quadratic("Qi", -1, 1, 1.0, 4).unwrap();
        let mut s = BernoulliSystem::new(&k, Subset::HFree, 2, 1e6, 100.0).unwrap();
        s.primes.truncate(20);
        s.lambdas.truncate(20);
        let law = distribution(&s);
        let mean = kahan_sum(law.iter().enumerate().map(|(k, p)| k as f64 * p));
        assert!(close(mean, mean_variance(&s).0, 1e-12));
        assert!(close(kahan_sum(law.iter().copied()), 1.0, 1e-12));
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let s = BernoulliSystem::from_lambdas(vec![0.2, 0.5, 0.7, 0.1]).unwrap();
        let a = monte_carlo_moment(&s, 3, 10_000, 7).unwrap();
        let b = monte_carlo_moment(&s, 3, 10_000, 7).unwrap();
        assert_eq!(a, b);
        let exact = normalized_moment(&s, 3).unwrap();
        assert!((a.mean - exact).abs() <= 4.0 * a.std_error);
    }

    #[test]
    fn parameters() {
        let (beta, y) = model_parameters(Subset::HFree, 2, 1e6).unwrap();
        assert_eq!(beta, 1.0);
        assert!(close(y, 192.763_558_733, 1e-6));
        let (beta, y2) = model_parameters(Subset::HFull, 2, 1e6).unwrap();
        assert_eq!(beta, 0.5);
        assert!(close(y2, y.sqrt(), 1e-9));
        assert!(model_parameters(Subset::All, 2, 1e6).is_err());
    }

    #[test]
    fn moment_gap_first_moment() {
        let q = FieldDescriptor::rationals();
        let g = moment_gap(&q, Subset::HFree, 2, 1e4, 50.0, 1).unwrap();
        assert!(g.gap >= 0.0 && g.exact.abs() < 1e-12);
        assert!(matches!(
            moment_gap(&q, Subset::HFree, 2, 1e4, 1.5, 1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn tuple_family() {
        let sets = subsets_up_to(4, 2);
        assert_eq!(sets.len(), 4 + 6);
    }

    #[test]
    fn audit_small() {
        let q = FieldDescriptor::rationals();
        let a = conditions_audit(&q, Subset::HFree, 2, 1e4, 3, DEFAULT_SEED).unwrap();
        assert_eq!(a.a_max_large_factors, 0);
        assert!(a.e_sum < 0.6);
        assert!(a.f_sampled_sets > 0);
        let b = conditions_audit(&q, Subset::HFree, 2, 1e4, 3, DEFAULT_SEED).unwrap();
        assert_eq!(a, b);
    }
}
