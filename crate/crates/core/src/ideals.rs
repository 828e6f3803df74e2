//! Ideals as prime factorizations, and their enumeration by norm.
//!
//! Enumeration is a depth-first walk over the prime ideals in increasing
//! norm: each node extends its factor list with a strictly later prime and
//! an exponent, so every ideal appears exactly once (prime-major,
//! exponent-minor). Hot loops see an [`IdealView`] borrowing the walk's
//! factor stack; [`IdealStream`] yields owned [`IdealFactorization`]s.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::numeric::{iroot, norm_bound};
use crate::primeideals::{prime_ideals_up_to_bound, PrimeIdeal};

/// An ideal as a sorted list of distinct prime ideals with exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IdealFactorization {
    pub factors: Vec<(PrimeIdeal, u32)>,
    pub norm: u64,
}

impl IdealFactorization {
    pub fn unit() -> Self {
        IdealFactorization {
            factors: Vec::new(),
            norm: 1,
        }
    }

    /// Build from factors, sorting them and checking that the norm fits in 64 bits.
    pub fn new(factors: Vec<(PrimeIdeal, u32)>) -> Result<Self> {
        Self::with_bound(factors, u64::MAX)
    }

    /// As [`IdealFactorization::new`], additionally requiring `norm <= bound`.
    pub fn with_bound(mut factors: Vec<(PrimeIdeal, u32)>, bound: u64) -> Result<Self> {
        factors.sort_by_key(|a| a.0);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(
                "repeated prime ideal in factor list".into(),
            ));
        }
        if factors.iter().any(|&(_, e)| e == 0) {
            return Err(Error::InvalidArgument("exponents must be positive".into()));
        }
        let mut norm = 1u64;
        for &(p, e) in &factors {
            norm = p
                .norm
                .checked_pow(e)
                .and_then(|q| norm.checked_mul(q))
                .ok_or_else(|| Error::InvalidArgument("ideal norm overflows 64 bits".into()))?;
        }
        if norm > bound {
            return Err(Error::InvalidArgument(format!(
                "ideal norm {norm} exceeds the bound {bound}"
            )));
        }
        Ok(IdealFactorization { factors, norm })
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Number of distinct prime ideal divisors.
pub fn omega(f: &IdealFactorization) -> usize {
    f.factors.len()
}

/// Number of distinct prime divisors of norm at most `y`.
pub fn omega_y(f: &IdealFactorization, y: f64) -> usize {
    f.factors.iter().filter(|(p, _)| p.norm as f64 <= y).count()
}

/// The Möbius function of an ideal.
pub fn mobius(f: &IdealFactorization) -> i8 {
    mobius_of(f.factors.iter().map(|&(_, e)| e))
}

pub fn is_h_free(f: &IdealFactorization, h: u32) -> bool {
    f.factors.iter().all(|&(_, e)| e < h)
}

pub fn is_h_full(f: &IdealFactorization, h: u32) -> bool {
    f.factors.iter().all(|&(_, e)| e >= h)
}

fn mobius_of(exponents: impl Iterator<Item = u32>) -> i8 {
    let mut sign = 1i8;
    for e in exponents {
        if e > 1 {
            return 0;
        }
        sign = -sign;
    }
    sign
}

/// An h-full ideal written as `a_0^h · a_1^{h+1} ··· a_{h−1}^{2h−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HFullDecomposition {
    pub h: u32,
    /// `parts[j]` is `a_j`; `a_1, …, a_{h−1}` are squarefree and pairwise coprime.
    pub parts: Vec<IdealFactorization>,
}

impl HFullDecomposition {
    /// Multiply the parts back together.
    pub fn reconstruct(&self) -> Result<IdealFactorization> {
        let mut exps: Vec<(PrimeIdeal, u32)> = Vec::new();
        for (j, part) in self.parts.iter().enumerate() {
            let power = self.h + j as u32;
            for &(p, e) in &part.factors {
                match exps.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, total)) => *total += e * power,
                    None => exps.push((p, e * power)),
                }
            }
        }
        IdealFactorization::new(exps)
    }
}

/// Split each exponent `e = h·t + j` of an h-full ideal into the parts `a_0, …, a_{h−1}`.
pub fn h_full_decompose(f: &IdealFactorization, h: u32) -> Result<HFullDecomposition> {
    if h < 2 {
        return Err(Error::InvalidArgument(format!(
            "h must be at least 2, got {h}"
        )));
    }
    let mut parts: Vec<Vec<(PrimeIdeal, u32)>> = vec![Vec::new(); h as usize];
    for &(p, e) in &f.factors {
        if e < h {
            return Err(Error::Precondition(format!(
                "ideal is not {h}-full: prime above {} (index {}) has exponent {e}",
                p.p, p.conjugate_index
            )));
        }
        let (t, j) = (e / h, e % h);
        if j == 0 {
            parts[0].push((p, t));
        } else {
            parts[j as usize].push((p, 1));
            if t > 1 {
                parts[0].push((p, t - 1));
            }
        }
    }
    let parts = parts
        .into_iter()
        .map(IdealFactorization::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(HFullDecomposition { h, parts })
}

/// A borrowed view of the ideal currently visited by an enumeration.
///
/// Factors are `(index into the prime table, exponent)`, in increasing index order.
#[derive(Clone, Copy, Debug)]
pub struct IdealView<'a> {
    pub norm: u64,
    pub factors: &'a [(u32, u32)],
    primes: &'a [PrimeIdeal],
}

impl<'a> IdealView<'a> {
    pub fn new(norm: u64, factors: &'a [(u32, u32)], primes: &'a [PrimeIdeal]) -> Self {
        IdealView {
            norm,
            factors,
            primes,
        }
    }

    pub fn prime(&self, index: u32) -> &'a PrimeIdeal {
        &self.primes[index as usize]
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Distinct prime divisors of norm at most `bound`.
    pub fn omega_up_to(&self, bound: u64) -> usize {
        self.factors
            .iter()
            .take_while(|&&(i, _)| self.primes[i as usize].norm <= bound)
            .count()
    }

    pub fn mobius(&self) -> i8 {
        mobius_of(self.factors.iter().map(|&(_, e)| e))
    }

    pub fn is_h_free(&self, h: u32) -> bool {
        self.factors.iter().all(|&(_, e)| e < h)
    }

    pub fn is_h_full(&self, h: u32) -> bool {
        self.factors.iter().all(|&(_, e)| e >= h)
    }

    pub fn divisible_by(&self, index: u32) -> bool {
        self.factors.iter().any(|&(i, _)| i == index)
    }

    pub fn to_factorization(&self) -> IdealFactorization {
        IdealFactorization {
            factors: self
                .factors
                .iter()
                .map(|&(i, e)| (self.primes[i as usize], e))
                .collect(),
            norm: self.norm,
        }
    }
}

/// Constraints applied structurally during enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentRule {
    /// Smallest exponent allowed on any prime factor.
    pub min: u32,
    /// Largest exponent allowed on any prime factor.
    pub max: u32,
    /// Index of a prime ideal that must not divide any emitted ideal.
    pub skip: Option<u32>,
}

impl ExponentRule {
    pub const ALL: ExponentRule = ExponentRule {
        min: 1,
        max: u32::MAX,
        skip: None,
    };

    /// Ideals with every exponent at most `h − 1`.
    pub fn h_free(h: u32) -> Self {
        ExponentRule {
            max: h.saturating_sub(1),
            ..Self::ALL
        }
    }

    /// Ideals with every exponent at least `h`.
    pub fn h_full(h: u32) -> Self {
        ExponentRule {
            min: h,
            ..Self::ALL
        }
    }

    pub fn skipping(self, index: Option<u32>) -> Self {
        ExponentRule {
            skip: index,
            ..self
        }
    }
}

/// Subtrees whose remaining norm budget `bound / norm` is below this run as one task.
const SPLIT_BUDGET: u64 = 1 << 12;

enum Task {
    /// Visit a single node.
    Visit { norm: u64, stack: Vec<(u32, u32)> },
    /// Visit a node and all its descendants.
    Subtree {
        norm: u64,
        stack: Vec<(u32, u32)>,
        start: usize,
    },
    /// Descendants of a node using primes from `start` on, without the node itself.
    Children {
        norm: u64,
        stack: Vec<(u32, u32)>,
        start: usize,
    },
}

/// Enumerates the ideals of norm at most a bound over a fixed prime table,
/// restricted by an [`ExponentRule`].
#[derive(Clone, Debug)]
pub struct IdealEnumerator {
    primes: Vec<PrimeIdeal>,
    bound: u64,
    rule: ExponentRule,
}

impl IdealEnumerator {
    /// All ideals of norm at most `x`.
    pub fn new(desc: &FieldDescriptor, x: f64) -> Self {
        let bound = norm_bound(x);
        IdealEnumerator {
            primes: prime_ideals_up_to_bound(desc, bound),
            bound,
            rule: ExponentRule::ALL,
        }
    }

    /// h-full ideals of norm at most `x`; only primes of norm up to `x^{1/h}` are loaded.
    pub fn h_full(desc: &FieldDescriptor, h: u32, x: f64) -> Self {
        let bound = norm_bound(x);
        IdealEnumerator {
            primes: prime_ideals_up_to_bound(desc, iroot(bound, h.max(1))),
            bound,
            rule: ExponentRule::h_full(h),
        }
    }

    /// Use an existing sorted prime table; entries of norm above `x` are dropped.
    pub fn from_primes(mut primes: Vec<PrimeIdeal>, x: f64) -> Self {
        let bound = norm_bound(x);
        let keep = primes.partition_point(|p| p.norm <= bound);
        primes.truncate(keep);
        IdealEnumerator {
            primes,
            bound,
            rule: ExponentRule::ALL,
        }
    }

    pub fn with_rule(mut self, rule: ExponentRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn rule(&self) -> ExponentRule {
        self.rule
    }

    pub fn primes(&self) -> &[PrimeIdeal] {
        &self.primes
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Index of a prime ideal in this enumerator's table.
    pub fn index_of(&self, prime: &PrimeIdeal) -> Option<u32> {
        self.primes.binary_search(prime).ok().map(|i| i as u32)
    }

    fn walker(&self) -> Walker<'_> {
        Walker {
            primes: &self.primes,
            bound: self.bound,
            rule: self.rule,
        }
    }

    /// Visit every ideal in DFS order, unit ideal first.
    pub fn for_each<F: FnMut(&IdealView)>(&self, mut f: F) {
        if self.bound < 1 {
            return;
        }
        let mut stack = Vec::with_capacity(32);
        f(&IdealView::new(1, &stack, &self.primes));
        self.walker().dfs(1, 0, &mut stack, &mut f);
    }

    /// Parallel fold over all ideals.
    ///
    /// The walk is cut into tasks by a rule that depends only on the bound,
    /// each task folds into a fresh accumulator, and the per-task results are
    /// merged left to right in DFS order. The result is therefore identical
    /// for every thread count, even for non-associative merges.
    pub fn par_fold<T, I, V, M>(&self, init: I, visit: V, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync,
        V: Fn(&mut T, &IdealView) + Sync,
        M: Fn(T, T) -> T,
    {
        let tasks = self.tasks();
        let partials: Vec<T> = tasks
            .par_iter()
            .map(|task| {
                let mut acc = init();
                self.run_task(task, &mut |view| visit(&mut acc, view));
                acc
            })
            .collect();
        partials.into_iter().reduce(merge).unwrap_or_else(init)
    }

    /// Parallel reduction for exact, associative and commutative merges such
    /// as integer counts. Memory stays proportional to the thread count.
    pub fn par_reduce<T, I, V, M>(&self, init: I, visit: V, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        V: Fn(&mut T, &IdealView) + Sync,
        M: Fn(T, T) -> T + Sync + Send,
    {
        let tasks = self.tasks();
        tasks
            .par_iter()
            .fold(&init, |mut acc, task| {
                self.run_task(task, &mut |view| visit(&mut acc, view));
                acc
            })
            .reduce(&init, &merge)
    }

    fn tasks(&self) -> Vec<Task> {
        if self.bound < 1 {
            return Vec::new();
        }
        let mut tasks = vec![Task::Visit {
            norm: 1,
            stack: Vec::new(),
        }];
        self.plan(1, 0, &mut Vec::new(), &mut tasks);
        tasks
    }

    fn run_task(&self, task: &Task, f: &mut dyn FnMut(&IdealView)) {
        let walker = self.walker();
        match task {
            Task::Visit { norm, stack } => f(&IdealView::new(*norm, stack, &self.primes)),
            Task::Subtree { norm, stack, start } => {
                let mut stack = stack.clone();
                f(&IdealView::new(*norm, &stack, &self.primes));
                walker.dfs(*norm, *start, &mut stack, f);
            }
            Task::Children { norm, stack, start } => {
                let mut stack = stack.clone();
                walker.dfs(*norm, *start, &mut stack, f);
            }
        }
    }

    fn plan(&self, norm: u64, start: usize, stack: &mut Vec<(u32, u32)>, tasks: &mut Vec<Task>) {
        let walker = self.walker();
        let limit = self.bound / norm;
        for i in start..self.primes.len() {
            if self.rule.skip == Some(i as u32) {
                continue;
            }
            let q = self.primes[i].norm;
            let Some(first) = walker.first_power(q, limit) else {
                break;
            };
            if limit / first < SPLIT_BUDGET {
                // Every later sibling is at least as small.
                tasks.push(Task::Children {
                    norm,
                    stack: stack.clone(),
                    start: i,
                });
                return;
            }
            let mut n = norm * first;
            let mut e = self.rule.min;
            loop {
                stack.push((i as u32, e));
                if self.bound / n >= SPLIT_BUDGET {
                    tasks.push(Task::Visit {
                        norm: n,
                        stack: stack.clone(),
                    });
                    self.plan(n, i + 1, stack, tasks);
                } else {
                    tasks.push(Task::Subtree {
                        norm: n,
                        stack: stack.clone(),
                        start: i + 1,
                    });
                }
                stack.pop();
                if e >= self.rule.max || q > self.bound / n {
                    break;
                }
                n *= q;
                e += 1;
            }
        }
    }

    /// Owned stream of factorizations in DFS order.
    pub fn stream(self) -> IdealStream {
        IdealStream {
            enumerator: self,
            stack: Vec::new(),
            norms: Vec::new(),
            started: false,
        }
    }

    /// Number of ideals, counted in parallel.
    pub fn count(&self) -> u64 {
        self.par_reduce(|| 0u64, |acc, _| *acc += 1, |a, b| a + b)
    }

    /// `counts[n]` is the number of ideals of norm exactly `n`, for `n <= bound`.
    pub fn norm_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.bound as usize + 1];
        self.for_each(|v| counts[v.norm as usize] += 1);
        counts
    }
}

#[derive(Clone, Copy)]
struct Walker<'a> {
    primes: &'a [PrimeIdeal],
    bound: u64,
    rule: ExponentRule,
}

impl Walker<'_> {
    /// `q^min` if it is at most `limit`.
    fn first_power(&self, q: u64, limit: u64) -> Option<u64> {
        if q > limit || self.rule.max < self.rule.min {
            return None;
        }
        let mut n = q;
        for _ in 1..self.rule.min {
            if n > limit / q {
                return None;
            }
            n *= q;
        }
        Some(n)
    }

    fn dfs(
        &self,
        norm: u64,
        start: usize,
        stack: &mut Vec<(u32, u32)>,
        f: &mut dyn FnMut(&IdealView),
    ) {
        let limit = self.bound / norm;
        for (i, prime) in self.primes.iter().enumerate().skip(start) {
            if self.rule.skip == Some(i as u32) {
                continue;
            }
            let q = prime.norm;
            let Some(first) = self.first_power(q, limit) else {
                break;
            };
            let mut n = norm * first;
            let mut e = self.rule.min;
            loop {
                stack.push((i as u32, e));
                f(&IdealView::new(n, stack, self.primes));
                self.dfs(n, i + 1, stack, f);
                stack.pop();
                if e >= self.rule.max || q > self.bound / n {
                    break;
                }
                n *= q;
                e += 1;
            }
        }
    }
}

/// Iterator over the same ideals, in the same order, as [`IdealEnumerator::for_each`].
#[derive(Clone, Debug)]
pub struct IdealStream {
    enumerator: IdealEnumerator,
    stack: Vec<(u32, u32)>,
    /// `norms[k]` is the norm of the node at depth `k + 1`.
    norms: Vec<u64>,
    started: bool,
}

impl IdealStream {
    fn current(&self) -> IdealFactorization {
        let primes = &self.enumerator.primes;
        IdealFactorization {
            factors: self
                .stack
                .iter()
                .map(|&(i, e)| (primes[i as usize], e))
                .collect(),
            norm: self.norms.last().copied().unwrap_or(1),
        }
    }

    /// First admissible child of a node with norm `norm`, using primes from `start` on.
    fn first_child(&self, norm: u64, start: usize) -> Option<(u32, u32, u64)> {
        let en = &self.enumerator;
        let walker = en.walker();
        let limit = en.bound / norm;
        for i in start..en.primes.len() {
            if en.rule.skip == Some(i as u32) {
                continue;
            }
            let first = walker.first_power(en.primes[i].norm, limit)?;
            return Some((i as u32, en.rule.min, norm * first));
        }
        None
    }

    fn advance(&mut self) -> bool {
        let norm = self.norms.last().copied().unwrap_or(1);
        let start = self.stack.last().map_or(0, |&(i, _)| i as usize + 1);
        if let Some((i, e, n)) = self.first_child(norm, start) {
            self.stack.push((i, e));
            self.norms.push(n);
            return true;
        }
        // Otherwise raise the exponent, move to the next sibling, or backtrack.
        while let Some((i, e)) = self.stack.pop() {
            let n = self.norms.pop().expect("norm stack tracks factor stack");
            let parent = self.norms.last().copied().unwrap_or(1);
            let q = self.enumerator.primes[i as usize].norm;
            if e < self.enumerator.rule.max && q <= self.enumerator.bound / n {
                self.stack.push((i, e + 1));
                self.norms.push(n * q);
                return true;
            }
            if let Some((j, e, n)) = self.first_child(parent, i as usize + 1) {
                self.stack.push((j, e));
                self.norms.push(n);
                return true;
            }
        }
        false
    }
}

impl Iterator for IdealStream {
    type Item = IdealFactorization;

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            return (self.enumerator.bound >= 1).then(IdealFactorization::unit);
        }
        self.advance().then(|| self.current())
    }
}

/// Stream every ideal of norm at most `x`, unit ideal included.
pub fn enumerate_ideals(desc: &FieldDescriptor, x: f64) -> IdealStream {
    IdealEnumerator::new(desc, x).stream()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primeideals::prime_ideals_up_to;

    fn gaussian() -> FieldDescriptor {
        FieldDescriptor::quadratic("Qi", -1, 1, 1.0, 4).unwrap()
    }

    fn rational(n: u64) -> IdealFactorization {
        let q = FieldDescriptor::rationals();
        enumerate_ideals(&q, n as f64)
            .find(|f| f.norm == n)
            .unwrap()
    }

    #[test]
    fn rational_enumeration_is_one_to_n() {
        let q = FieldDescriptor::rationals();
        let mut norms: Vec<u64> = enumerate_ideals(&q, 10.0).map(|f| f.norm).collect();
        norms.sort_unstable();
        assert_eq!(norms, (1..=10).collect::<Vec<_>>());
        assert_eq!(enumerate_ideals(&q, 0.5).count(), 0);
        assert_eq!(enumerate_ideals(&q, 1.0).count(), 1);
    }

    #[test]
    fn gaussian_count_at_ten() {
        assert_eq!(enumerate_ideals(&gaussian(), 10.0).count(), 9);
    }

    #[test]
    fn stream_matches_visitor_order() {
        let k = gaussian();
        let en = IdealEnumerator::new(&k, 3000.0);
        let mut visited = Vec::new();
        en.for_each(|v| visited.push(v.to_factorization()));
        let streamed: Vec<_> = en.clone().stream().collect();
        assert_eq!(visited, streamed);
    }

    #[test]
    fn par_fold_preserves_dfs_order() {
        let k = gaussian();
        let en = IdealEnumerator::new(&k, 100_000.0);
        let mut serial = Vec::new();
        en.for_each(|v| serial.push(v.norm));
        let parallel = en.par_fold(
            Vec::new,
            |acc: &mut Vec<u64>, v| acc.push(v.norm),
            |mut a, b| {
                a.extend(b);
                a
            },
        );
        assert_eq!(serial, parallel);
        assert_eq!(en.count(), serial.len() as u64);
    }

    #[test]
    fn rules_match_filters() {
        let k = gaussian();
        let x = 20_000.0;
        let all = IdealEnumerator::new(&k, x);
        let skip = all.index_of(&prime_ideals_up_to(&k, 5.0)[1]);
        let filtered = |pred: &dyn Fn(&IdealView) -> bool| {
            let mut v = Vec::new();
            all.for_each(|i| {
                if pred(i) {
                    v.push(i.to_factorization())
                }
            });
            v
        };
        let cases: Vec<(ExponentRule, Box<dyn Fn(&IdealView) -> bool>)> = vec![
            (
                ExponentRule::h_free(2),
                Box::new(|v: &IdealView| v.is_h_free(2)),
            ),
            (
                ExponentRule::h_free(3),
                Box::new(|v: &IdealView| v.is_h_free(3)),
            ),
            (
                ExponentRule::h_full(2),
                Box::new(|v: &IdealView| v.is_h_full(2)),
            ),
            (
                ExponentRule::h_full(3).skipping(skip),
                Box::new(move |v: &IdealView| v.is_h_full(3) && !v.divisible_by(skip.unwrap())),
            ),
        ];
        for (rule, pred) in cases {
            let en = all.clone().with_rule(rule);
            let mut walked = Vec::new();
            en.for_each(|v| walked.push(v.to_factorization()));
            assert_eq!(walked, filtered(&*pred), "{rule:?}");
            let streamed: Vec<_> = en.clone().stream().collect();
            assert_eq!(walked, streamed, "{rule:?}");
            let par = en.par_fold(
                Vec::new,
                |acc: &mut Vec<u64>, v| acc.push(v.norm),
                |mut a, b| {
                    a.extend(b);
                    a
                },
            );
            assert_eq!(par, walked.iter().map(|f| f.norm).collect::<Vec<_>>());
            assert_eq!(en.count(), walked.len() as u64);
        }
    }

    #[test]
    fn sparse_h_full_table() {
        let k = gaussian();
        let sparse = IdealEnumerator::h_full(&k, 2, 1e5);
        assert!(sparse.primes().last().unwrap().norm <= 316);
        let dense = IdealEnumerator::new(&k, 1e5).with_rule(ExponentRule::h_full(2));
        assert_eq!(sparse.count(), dense.count());
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(&IdealFactorization::unit()), 0);
        assert_eq!(omega(&rational(12)), 2);
        let k = gaussian();
        let five = enumerate_ideals(&k, 25.0)
            .find(|f| f.norm == 25 && f.factors.len() == 2)
            .unwrap();
        assert_eq!(omega(&five), 2);
    }

    #[test]
    fn omega_y_examples() {
        assert_eq!(omega_y(&rational(12), 2.0), 1);
        assert_eq!(omega_y(&rational(12), 1.0), 0);
        assert_eq!(omega_y(&rational(12), f64::INFINITY), 2);
        let k = gaussian();
        let primes = prime_ideals_up_to(&k, 5.0);
        let f = IdealFactorization::new(vec![(primes[0], 1), (primes[1], 2)]).unwrap();
        assert_eq!(f.norm, 50);
        assert_eq!(omega_y(&f, 3.0), 1);
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(&IdealFactorization::unit()), 1);
        assert_eq!(mobius(&rational(6)), 1);
        assert_eq!(mobius(&rational(2)), -1);
        assert_eq!(mobius(&rational(4)), 0);
    }

    #[test]
    fn h_free_and_h_full_examples() {
        assert!(!is_h_free(&rational(12), 2));
        assert!(is_h_free(&rational(12), 3));
        assert!(is_h_free(&IdealFactorization::unit(), 2));
        let k = gaussian();
        let two = prime_ideals_up_to(&k, 2.0)[0];
        let cube = IdealFactorization::new(vec![(two, 3)]).unwrap();
        assert_eq!(cube.norm, 8);
        assert!(!is_h_free(&cube, 3));
        assert!(is_h_full(&rational(72), 2));
        assert!(!is_h_full(&rational(12), 2));
        assert!(is_h_full(&IdealFactorization::unit(), 5));
    }

    #[test]
    fn decomposition_examples() {
        let d = h_full_decompose(&rational(72), 2).unwrap();
        assert_eq!(d.parts[0].norm, 3);
        assert_eq!(d.parts[1].norm, 2);
        assert_eq!(d.reconstruct().unwrap(), rational(72));

        let q = FieldDescriptor::rationals();
        let p = prime_ideals_up_to(&q, 2.0)[0];
        let pow = |e| IdealFactorization::new(vec![(p, e)]).unwrap();
        let d = h_full_decompose(&pow(3), 3).unwrap();
        assert_eq!(d.parts[0], pow(1));
        assert!(d.parts[1].is_unit() && d.parts[2].is_unit());

        let d = h_full_decompose(&pow(11), 3).unwrap();
        assert_eq!(d.parts[0], pow(2));
        assert!(d.parts[1].is_unit());
        assert_eq!(d.parts[2], pow(1));
        assert_eq!(d.reconstruct().unwrap(), pow(11));
    }

    #[test]
    fn decomposition_rejects_non_h_full() {
        let err = h_full_decompose(&rational(12), 2).unwrap_err();
        assert!(
            matches!(err, Error::Precondition(ref m) if m.contains("above 3")),
            "{err}"
        );
    }

    #[test]
    fn factorization_validation() {
        let q = FieldDescriptor::rationals();
        let p = prime_ideals_up_to(&q, 2.0)[0];
        assert!(IdealFactorization::new(vec![(p, 64)]).is_err());
        assert!(IdealFactorization::new(vec![(p, 1), (p, 2)]).is_err());
        assert!(IdealFactorization::with_bound(vec![(p, 4)], 10).is_err());
    }
}
