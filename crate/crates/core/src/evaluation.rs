//! Makespan evaluation and accelerated insertion-neighborhood scans.
//!
//! A scan removes one job and reports the makespan of every reinsertion
//! position in `O(N * M)` using head (prefix completion) and tail (reversed
//! suffix completion) matrices of the reduced sequence.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Objective value (time units).
pub type Makespan = u64;

/// A job ordering; each index in `[0, N)` appears exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &j in &order {
            if j >= n || seen[j] {
                return Err(Error::Contract(format!(
                    "{order:?} is not a permutation of 0..{n}"
                )));
            }
            seen[j] = true;
        }
        Ok(Self(order))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        Self(order)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub(crate) fn as_mut_vec(&mut self) -> &mut Vec<usize> {
        &mut self.0
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_dims(instance: &Instance, perm: &Permutation) -> Result<()> {
    if perm.len() != instance.n_jobs() {
        return Err(Error::Contract(format!(
            "permutation has {} jobs, instance has {}",
            perm.len(),
            instance.n_jobs()
        )));
    }
    Ok(())
}

/// `C_max` of `perm` by the permutation flowshop recurrence.
pub fn makespan(instance: &Instance, perm: &Permutation) -> Result<Makespan> {
    check_dims(instance, perm)?;
    Ok(makespan_of(instance, perm.as_slice()))
}

pub(crate) fn makespan_of(instance: &Instance, order: &[usize]) -> Makespan {
    let mut row = vec![0 as Makespan; instance.n_machines()];
    for &job in order {
        let mut c = 0;
        for (slot, &p) in row.iter_mut().zip(instance.job_times(job)) {
            c = c.max(*slot) + Makespan::from(p);
            *slot = c;
        }
    }
    row.last().copied().unwrap_or(0)
}

#[inline]
fn forward_row(prev: &[Makespan], times: &[u32], out: &mut [Makespan]) {
    let mut c = 0;
    for ((o, &e), &p) in out.iter_mut().zip(prev).zip(times) {
        c = c.max(e) + Makespan::from(p);
        *o = c;
    }
}

#[inline]
fn backward_row(next: &[Makespan], times: &[u32], out: &mut [Makespan]) {
    let mut c = 0;
    for j in (0..out.len()).rev() {
        c = c.max(next[j]) + Makespan::from(times[j]);
        out[j] = c;
    }
}

/// Head/tail completion matrices of one permutation.
///
/// `heads[k]` holds the machine completion times of the first `k` jobs;
/// `tails[k]` the completion times of the reversed problem over the suffix
/// starting at position `k`.  Row 0 of heads and row `N` of tails are zero.
#[derive(Debug, Clone)]
pub struct EvalState {
    n: usize,
    m: usize,
    heads: Vec<Makespan>,
    tails: Vec<Makespan>,
    fitness: Makespan,
}

impl EvalState {
    fn empty(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            heads: vec![0; (n + 1) * m],
            tails: vec![0; (n + 1) * m],
            fitness: 0,
        }
    }

    fn fill(&mut self, instance: &Instance, order: &[usize]) {
        let (n, m) = (order.len(), self.m);
        self.n = n;
        if self.heads.len() < (n + 1) * m {
            self.heads.resize((n + 1) * m, 0);
            self.tails.resize((n + 1) * m, 0);
        }
        self.tails[n * m..(n + 1) * m].fill(0);
        for k in 1..=n {
            let (done, rest) = self.heads.split_at_mut(k * m);
            forward_row(&done[(k - 1) * m..], instance.job_times(order[k - 1]), &mut rest[..m]);
        }
        for k in (0..n).rev() {
            let (head, after) = self.tails.split_at_mut((k + 1) * m);
            backward_row(&after[..m], instance.job_times(order[k]), &mut head[k * m..]);
        }
        self.fitness = if n == 0 { 0 } else { self.heads[n * m + m - 1] };
    }

    pub fn fitness(&self) -> Makespan {
        self.fitness
    }

    pub fn n_jobs(&self) -> usize {
        self.n
    }

    pub fn head(&self, k: usize) -> &[Makespan] {
        &self.heads[k * self.m..(k + 1) * self.m]
    }

    pub fn tail(&self, k: usize) -> &[Makespan] {
        &self.tails[k * self.m..(k + 1) * self.m]
    }
}

pub fn build_eval_state(instance: &Instance, perm: &Permutation) -> Result<EvalState> {
    check_dims(instance, perm)?;
    let mut state = EvalState::empty(instance.n_jobs(), instance.n_machines());
    state.fill(instance, perm.as_slice());
    Ok(state)
}

/// Reusable buffers for repeated insertion scans of one permutation.
#[derive(Debug, Clone)]
pub struct InsertionScanner {
    state: EvalState,
    order: Vec<usize>,
    reduced_heads: Vec<Makespan>,
    reduced_tails: Vec<Makespan>,
    values: Vec<Makespan>,
}

impl InsertionScanner {
    pub fn new(instance: &Instance) -> Self {
        let (n, m) = (instance.n_jobs(), instance.n_machines());
        Self {
            state: EvalState::empty(n, m),
            order: Vec::with_capacity(n),
            reduced_heads: vec![0; n * m],
            reduced_tails: vec![0; n * m],
            values: vec![0; n],
        }
    }

    /// Rebuilds heads and tails for `perm`; returns its makespan.
    pub fn load(&mut self, instance: &Instance, perm: &Permutation) -> Makespan {
        self.load_order(instance, perm.as_slice())
    }

    /// Like [`load`](Self::load) but accepts a partial sequence of distinct
    /// jobs, as built by constructive heuristics.
    pub fn load_order(&mut self, instance: &Instance, order: &[usize]) -> Makespan {
        self.order.clear();
        self.order.extend_from_slice(order);
        self.state.fill(instance, &self.order);
        let n = order.len();
        if self.reduced_heads.len() < n * self.state.m {
            self.reduced_heads.resize(n * self.state.m, 0);
            self.reduced_tails.resize(n * self.state.m, 0);
            self.values.resize(n, 0);
        }
        self.state.fitness
    }

    pub fn loaded_len(&self) -> usize {
        self.state.n
    }

    pub fn fitness(&self) -> Makespan {
        self.state.fitness
    }

    pub fn state(&self) -> &EvalState {
        &self.state
    }

    /// Makespans of reinserting the job at `remove_pos` at every target
    /// position of the loaded permutation.
    pub fn scan(&mut self, instance: &Instance, remove_pos: usize) -> &[Makespan] {
        let (n, m) = (self.state.n, self.state.m);
        let a = remove_pos;
        debug_assert!(a < n);
        let order = &self.order;
        let state = &self.state;
        let eh = &mut self.reduced_heads;
        let qt = &mut self.reduced_tails;

        // Reduced heads: rows 0..=a equal the original heads.
        eh[a * m..(a + 1) * m].copy_from_slice(state.head(a));
        for k in (a + 1)..n {
            let (done, rest) = eh.split_at_mut(k * m);
            forward_row(&done[(k - 1) * m..], instance.job_times(order[k]), &mut rest[..m]);
        }
        // Reduced tails: rows a.. equal the original tails shifted by one.
        qt[a * m..(a + 1) * m].copy_from_slice(state.tail(a + 1));
        for k in (0..a).rev() {
            let (head, after) = qt.split_at_mut((k + 1) * m);
            backward_row(&after[..m], instance.job_times(order[k]), &mut head[k * m..]);
        }

        let moved = instance.job_times(order[a]);
        for t in 0..n {
            let e = if t <= a { state.head(t) } else { &eh[t * m..(t + 1) * m] };
            let q = if t >= a { state.tail(t + 1) } else { &qt[t * m..(t + 1) * m] };
            let mut c = 0;
            let mut best = 0;
            for j in 0..m {
                c = c.max(e[j]) + Makespan::from(moved[j]);
                best = best.max(c + q[j]);
            }
            self.values[t] = best;
        }
        &self.values[..n]
    }
}

/// Fitness of every reinsertion of the job at `remove_pos`; entry `t` is the
/// makespan when the job ends up at position `t`.
pub fn scan_insertions(instance: &Instance, perm: &Permutation, remove_pos: usize) -> Result<Vec<Makespan>> {
    check_dims(instance, perm)?;
    if remove_pos >= perm.len() {
        return Err(Error::Contract(format!(
            "remove position {remove_pos} out of range for {} jobs",
            perm.len()
        )));
    }
    let mut scanner = InsertionScanner::new(instance);
    scanner.load(instance, perm);
    Ok(scanner.scan(instance, remove_pos).to_vec())
}

/// Budgeted evaluation front-end shared by the searches.
///
/// Every makespan computation costs one evaluation and every insertion scan
/// costs `N` (one per reported entry).
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    instance: &'a Instance,
    scanner: InsertionScanner,
    used: u64,
    limit: Option<u64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance, limit: Option<u64>) -> Self {
        Self {
            instance,
            scanner: InsertionScanner::new(instance),
            used: 0,
            limit,
        }
    }

    pub fn unbounded(instance: &'a Instance) -> Self {
        Self::new(instance, None)
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> Option<u64> {
        self.limit
    }

    pub fn exhausted(&self) -> bool {
        self.limit.is_some_and(|l| self.used >= l)
    }

    pub fn makespan(&mut self, perm: &Permutation) -> Makespan {
        self.used += 1;
        makespan_of(self.instance, perm.as_slice())
    }

    /// Loads `perm` for subsequent scans.
    pub fn load(&mut self, perm: &Permutation) -> Makespan {
        self.used += 1;
        self.scanner.load(self.instance, perm)
    }

    pub fn load_order(&mut self, order: &[usize]) -> Makespan {
        self.used += 1;
        self.scanner.load_order(self.instance, order)
    }

    pub fn loaded_fitness(&self) -> Makespan {
        self.scanner.fitness()
    }

    pub fn scan(&mut self, remove_pos: usize) -> &[Makespan] {
        self.used += self.scanner.loaded_len() as u64;
        self.scanner.scan(self.instance, remove_pos)
    }
}
