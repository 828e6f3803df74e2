//! Segmented sieve of Eratosthenes over odd integers.
//!
//! Base primes up to `√limit` are sieved once; the range is then processed in
//! fixed-size segments of odd numbers. Segments are independent, so they are
//! produced in parallel and concatenated in order. Segment boundaries depend
//! only on `limit`, never on the thread count.

use rayon::prelude::*;

/// Odd numbers per segment (one byte each), sized to stay in L2.
const SEGMENT_ODDS: u64 = 1 << 17;

/// Simple sieve for the base primes.
fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Sieve the odd numbers in `[lo, hi]` (both odd, `lo >= 3`) with the odd base primes.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let len = ((hi - lo) / 2 + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base.iter().skip(1) {
        let pp = p * p;
        if pp > hi {
            break;
        }
        // First odd multiple of p that is >= max(lo, p^2).
        let mut start = if pp >= lo { pp } else { lo.div_ceil(p) * p };
        if start % 2 == 0 {
            start += p;
        }
        let mut idx = ((start - lo) / 2) as usize;
        let step = p as usize;
        while idx < len {
            composite[idx] = true;
            idx += step;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| lo + 2 * i as u64)
        .collect()
}

/// All primes `p <= limit`, in increasing order.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    if limit < 3 {
        return vec![2];
    }
    let base = small_primes(crate::numeric::iroot(limit, 2));
    let last_odd = if limit.is_multiple_of(2) {
        limit - 1
    } else {
        limit
    };
    let total_odds = (last_odd - 3) / 2 + 1;
    let segments = total_odds.div_ceil(SEGMENT_ODDS);
    let chunks: Vec<Vec<u64>> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let lo = 3 + 2 * s * SEGMENT_ODDS;
            let hi = (lo + 2 * (SEGMENT_ODDS - 1)).min(last_odd);
            sieve_segment(lo, hi, &base)
        })
        .collect();
    let mut primes = Vec::with_capacity(chunks.iter().map(Vec::len).sum::<usize>() + 1);
    primes.push(2);
    for c in chunks {
        primes.extend(c);
    }
    primes
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
