//! Brute-force reference implementations that share no code with the library.
//!
//! Prime splitting comes from Euler's criterion, ideals are produced
//! norm-major (factor each integer n and distribute its prime powers over the
//! ideals above each prime), and ideal counts come from the divisor sum of
//! the quadratic character.

#![allow(dead_code)]

use idealstat::FieldDescriptor;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Quadratic character of discriminant `disc` at a prime `p`.
pub fn chi_prime(disc: i64, p: u64) -> i8 {
    if p == 2 {
        if disc % 2 == 0 {
            return 0;
        }
        return if disc.rem_euclid(8) == 1 { 1 } else { -1 };
    }
    let a = disc.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn disc_of(desc: &FieldDescriptor) -> Option<i64> {
    desc.d.map(|d| if d.rem_euclid(4) == 1 { d } else { 4 * d })
}

/// Norms of the prime ideals above `p`, with their count.
pub fn norms_above(desc: &FieldDescriptor, p: u64) -> Vec<u64> {
    match disc_of(desc) {
        None => vec![p],
        Some(disc) => match chi_prime(disc, p) {
            1 => vec![p, p],
            -1 => vec![p * p],
            _ => vec![p],
        },
    }
}

/// Sorted norms of all prime ideals of norm at most `x`.
pub fn prime_ideal_norms(desc: &FieldDescriptor, x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for p in primes_up_to(x) {
        for n in norms_above(desc, p) {
            if n <= x {
                out.push(n);
            }
        }
    }
    out.sort_unstable();
    out
}

/// A rational prime, which ideal above it (0 or 1), and the exponent.
pub type Factor = (u64, u8, u32);

fn factor_int(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Every ideal of norm exactly `n`, as lists of prime-ideal factors.
pub fn ideals_of_norm(desc: &FieldDescriptor, n: u64) -> Vec<Vec<Factor>> {
    let mut ideals: Vec<Vec<Factor>> = vec![Vec::new()];
    for (p, e) in factor_int(n) {
        let options: Vec<Vec<Factor>> = match disc_of(desc).map(|d| chi_prime(d, p)) {
            None | Some(0) => vec![vec![(p, 0, e)]],
            Some(-1) => {
                if e % 2 == 0 {
                    vec![vec![(p, 0, e / 2)]]
                } else {
                    vec![]
                }
            }
            _ => (0..=e)
                .map(|a| {
                    let mut v = Vec::new();
                    if a > 0 {
                        v.push((p, 0, a));
                    }
                    if e - a > 0 {
                        v.push((p, 1, e - a));
                    }
                    v
                })
                .collect(),
        };
        let mut next = Vec::new();
        for base in &ideals {
            for opt in &options {
                let mut v = base.clone();
                v.extend(opt.iter().copied());
                next.push(v);
            }
        }
        ideals = next;
    }
    ideals
}

/// All ideals of norm at most `x`, norm-major.
pub fn all_ideals(desc: &FieldDescriptor, x: u64) -> Vec<(u64, Vec<Factor>)> {
    let mut out = Vec::new();
    for n in 1..=x {
        for f in ideals_of_norm(desc, n) {
            out.push((n, f));
        }
    }
    out
}

/// `a(n)`, the number of ideals of norm `n`, from `Σ_{d | n} χ(d)`.
pub fn norm_count_table(desc: &FieldDescriptor, x: u64) -> Vec<u64> {
    let x = x as usize;
    let Some(disc) = disc_of(desc) else {
        let mut t = vec![1u64; x + 1];
        t[0] = 0;
        return t;
    };
    // χ is completely multiplicative: build it from smallest prime factors.
    let mut spf = vec![0usize; x + 1];
    for i in 2..=x {
        if spf[i] == 0 {
            let mut j = i;
            while j <= x {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let mut chi = vec![0i64; x + 1];
    if x >= 1 {
        chi[1] = 1;
    }
    for n in 2..=x {
        let p = spf[n];
        chi[n] = i64::from(chi_prime(disc, p as u64)) * chi[n / p];
    }
    let mut a = vec![0i64; x + 1];
    for d in 1..=x {
        if chi[d] != 0 {
            let mut m = d;
            while m <= x {
                a[m] += chi[d];
                m += d;
            }
        }
    }
    a.into_iter().map(|v| v as u64).collect()
}

/// `Σ_{n <= t} a(n)` for every `t`.
pub fn ideal_count_prefix(desc: &FieldDescriptor, x: u64) -> Vec<u64> {
    let mut table = norm_count_table(desc, x);
    for i in 1..table.len() {
        table[i] += table[i - 1];
    }
    table
}

pub fn mobius(f: &[Factor]) -> i64 {
    if f.iter().any(|&(_, _, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// h-free ideals of norm at most `x` from `Σ_{N(d)^h <= x} μ(d) I(x / N(d)^h)`.
pub fn hfree_count_mobius(desc: &FieldDescriptor, h: u32, x: u64) -> u64 {
    let prefix = ideal_count_prefix(desc, x);
    let mut total: i64 = 0;
    let mut n = 1u64;
    while n.pow(h) <= x {
        for d in ideals_of_norm(desc, n) {
            total += mobius(&d) * prefix[(x / n.pow(h)) as usize] as i64;
        }
        n += 1;
    }
    total as u64
}

pub fn is_h_free(f: &[Factor], h: u32) -> bool {
    f.iter().all(|&(_, _, e)| e < h)
}

pub fn is_h_full(f: &[Factor], h: u32) -> bool {
    f.iter().all(|&(_, _, e)| e >= h)
}

/// ζ(s) by direct summation with an integral tail estimate.
pub fn zeta_direct(s: f64) -> f64 {
    let n = 1_000_000u64;
    let head: f64 = (1..n).rev().map(|k| (k as f64).powf(-s)).sum();
    let nf = n as f64;
    head + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0)
}

/// `Σ_{p <= x} 1/p` over rational primes.
pub fn rational_prime_reciprocals(x: u64) -> f64 {
    primes_up_to(x).iter().rev().map(|&p| 1.0 / p as f64).sum()
}
