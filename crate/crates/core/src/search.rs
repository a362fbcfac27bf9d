//! Local search and metaheuristics on the insertion neighborhood.
//!
//! All searches charge their work to an [`Evaluator`], so budgets are
//! expressed in evaluations: one per makespan, `N` per insertion scan.

use std::collections::HashSet;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{Evaluator, InsertionScanner, Makespan, Permutation};
use crate::instance::Instance;
use crate::landscape::{summarize_with, NeighborhoodSummary};
use crate::neighborhood::{apply_move, apply_move_in_place, is_canonical_insertion, random_move, Move, MoveKind};
use crate::rng::{search_rng, SearchRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    Better,
    Metropolis,
    BetterOrEqual,
}

impl FromStr for Acceptance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "better" => Ok(Acceptance::Better),
            "metropolis" => Ok(Acceptance::Metropolis),
            "better_or_equal" | "better-or-equal" => Ok(Acceptance::BetterOrEqual),
            other => Err(Error::Config(format!("unknown acceptance `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub max_evaluations: u64,
    /// Number of random transpose/exchange moves per perturbation.
    pub perturbation_strength: usize,
    /// `None` selects [`default_temperature`].
    pub metropolis_temperature: Option<f64>,
    pub max_neutral_steps: usize,
    pub acceptance: Acceptance,
    /// Average `k` sampled neighbors instead of the full neighborhood when
    /// ranking neutral neighbors by evolvability.
    pub sampled_evolvability: Option<usize>,
    pub record_trajectory: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_evaluations: 1_000_000,
            perturbation_strength: 3,
            metropolis_temperature: None,
            max_neutral_steps: 30,
            acceptance: Acceptance::Metropolis,
            sampled_evolvability: None,
            record_trajectory: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_evaluations == 0 {
            return Err(Error::Config("max_evaluations must be at least 1".into()));
        }
        if self.perturbation_strength == 0 {
            return Err(Error::Config("perturbation_strength must be at least 1".into()));
        }
        if self.max_neutral_steps == 0 {
            return Err(Error::Config("max_neutral_steps must be at least 1".into()));
        }
        if self.metropolis_temperature.is_some_and(|t| t.is_nan() || t < 0.0) {
            return Err(Error::Config("temperature must be non-negative".into()));
        }
        if self.sampled_evolvability == Some(0) {
            return Err(Error::Config("sampled evolvability needs k >= 1".into()));
        }
        Ok(())
    }
}

/// Constant Metropolis temperature `sum(p) / (10 * N * M)`.
pub fn default_temperature(instance: &Instance) -> f64 {
    instance.total_processing_time() as f64 / (10 * instance.n_jobs() * instance.n_machines()) as f64
}

/// Probability of accepting a candidate `delta` time units worse.
pub fn metropolis_probability(delta: i64, temperature: f64) -> f64 {
    if delta <= 0 {
        1.0
    } else if temperature <= 0.0 {
        0.0
    } else {
        (-(delta as f64) / temperature).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchEvent {
    Init,
    Descent,
    Accept,
    Reject,
    NeutralStep,
    Portal,
    Perturb,
    Restart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryEntry {
    pub evaluations: u64,
    pub fitness: Makespan,
    pub best: Makespan,
    pub event: SearchEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_perm: Permutation,
    pub best_fitness: Makespan,
    pub evaluations_used: u64,
    pub descent_lengths: Vec<usize>,
    pub trajectory: Option<Vec<TrajectoryEntry>>,
    /// False when the budget ran out before the search finished its work.
    pub complete: bool,
    /// True when `best_perm` ended a completed descent.
    pub local_optimum: bool,
}

/// Outcome of one descent.
#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub perm: Permutation,
    pub fitness: Makespan,
    pub steps: usize,
    /// True when the descent stopped at a certified local optimum.
    pub complete: bool,
}

impl Descent {
    fn into_result(self, evaluations_used: u64) -> SearchResult {
        SearchResult {
            best_fitness: self.fitness,
            evaluations_used,
            descent_lengths: vec![self.steps],
            trajectory: None,
            complete: self.complete,
            local_optimum: self.complete,
            best_perm: self.perm,
        }
    }
}

fn check_start(instance: &Instance, start: &Permutation) -> Result<()> {
    if start.len() != instance.n_jobs() {
        return Err(Error::Contract(format!(
            "start has {} jobs, instance has {}",
            start.len(),
            instance.n_jobs()
        )));
    }
    Ok(())
}

/// Best-improvement descent; ties between equally good improving moves are
/// broken uniformly at random.
pub fn steepest_descent<R: Rng + ?Sized>(instance: &Instance, start: &Permutation, rng: &mut R) -> Result<SearchResult> {
    check_start(instance, start)?;
    let mut ev = Evaluator::unbounded(instance);
    let d = steepest_descent_with(&mut ev, start.clone(), rng);
    Ok(d.into_result(ev.used()))
}

pub fn steepest_descent_with<R: Rng + ?Sized>(ev: &mut Evaluator<'_>, start: Permutation, rng: &mut R) -> Descent {
    let n = start.len();
    let mut current = start;
    let mut fitness = ev.makespan(&current);
    let mut steps = 0;
    let mut best_moves: Vec<Move> = Vec::new();
    loop {
        if ev.exhausted() {
            return Descent { perm: current, fitness, steps, complete: false };
        }
        ev.load(&current);
        let mut best = fitness;
        best_moves.clear();
        for a in 0..n {
            let values = ev.scan(a);
            for (b, &v) in values.iter().enumerate() {
                if !is_canonical_insertion(a, b) || v > best || v == fitness {
                    continue;
                }
                if v < best {
                    best = v;
                    best_moves.clear();
                }
                best_moves.push(Move::insertion(a, b));
            }
        }
        if best_moves.is_empty() {
            return Descent { perm: current, fitness, steps, complete: true };
        }
        let mv = best_moves[rng.random_range(0..best_moves.len())];
        apply_move_in_place(&mut current, mv).expect("canonical move is valid");
        fitness = best;
        steps += 1;
    }
}

/// First-improvement descent: jobs are tried in a fresh random order each
/// pass, reinsertion targets in random order; the first strictly improving
/// reinsertion is applied.  Stops after a full pass without improvement.
pub fn first_improvement_descent<R: Rng + ?Sized>(
    instance: &Instance,
    start: &Permutation,
    rng: &mut R,
) -> Result<SearchResult> {
    check_start(instance, start)?;
    let mut ev = Evaluator::unbounded(instance);
    let d = first_improvement_descent_with(&mut ev, start.clone(), rng);
    Ok(d.into_result(ev.used()))
}

pub fn first_improvement_descent_with<R: Rng + ?Sized>(
    ev: &mut Evaluator<'_>,
    start: Permutation,
    rng: &mut R,
) -> Descent {
    let n = start.len();
    let mut current = start;
    let mut fitness = ev.load(&current);
    let mut steps = 0;
    let mut jobs: Vec<usize> = (0..n).collect();
    let mut targets: Vec<usize> = (0..n).collect();
    let mut position = vec![0usize; n];
    if n < 2 {
        return Descent { perm: current, fitness, steps, complete: true };
    }
    loop {
        jobs.shuffle(rng);
        let mut improved = false;
        for &job in &jobs {
            if ev.exhausted() {
                return Descent { perm: current, fitness, steps, complete: false };
            }
            for (p, &j) in current.as_slice().iter().enumerate() {
                position[j] = p;
            }
            let a = position[job];
            let values = ev.scan(a);
            targets.shuffle(rng);
            let hit = targets.iter().copied().find(|&t| t != a && values[t] < fitness);
            if let Some(t) = hit {
                fitness = values[t];
                apply_move_in_place(&mut current, Move::insertion(a, t)).expect("valid insertion");
                ev.load(&current);
                steps += 1;
                improved = true;
            }
        }
        if !improved {
            return Descent { perm: current, fitness, steps, complete: true };
        }
    }
}

/// NEH: jobs by decreasing total processing time (stable on ties), each
/// inserted at the position of least partial makespan, leftmost on ties.
pub fn neh_construct(instance: &Instance) -> Permutation {
    let mut scanner = InsertionScanner::new(instance);
    neh_order(instance, |order| {
        scanner.load_order(instance, order);
        scanner.scan(instance, order.len() - 1).to_vec()
    })
}

fn neh_with(ev: &mut Evaluator<'_>) -> Permutation {
    let instance = ev.instance();
    neh_order(instance, |order| {
        ev.load_order(order);
        ev.scan(order.len() - 1).to_vec()
    })
}

fn neh_order(instance: &Instance, mut scan_last: impl FnMut(&[usize]) -> Vec<Makespan>) -> Permutation {
    let n = instance.n_jobs();
    let mut jobs: Vec<usize> = (0..n).collect();
    jobs.sort_by_key(|&j| std::cmp::Reverse(instance.job_total(j)));
    let mut seq: Vec<usize> = Vec::with_capacity(n);
    for &job in &jobs {
        seq.push(job);
        if seq.len() == 1 {
            continue;
        }
        let values = scan_last(&seq);
        let (best_t, _) = values
            .iter()
            .enumerate()
            .min_by_key(|&(t, &v)| (v, t))
            .expect("non-empty scan");
        let last = seq.len() - 1;
        seq.remove(last);
        seq.insert(best_t, job);
    }
    Permutation::new(seq).expect("NEH builds a permutation")
}

fn perturb(perm: &Permutation, strength: usize, rng: &mut SearchRng) -> Permutation {
    let mut p = perm.clone();
    if p.len() < 2 {
        return p;
    }
    for _ in 0..strength {
        let kind = if rng.random_bool(0.5) { MoveKind::Transpose } else { MoveKind::Exchange };
        let mv = random_move(kind, p.len(), rng);
        apply_move_in_place(&mut p, mv).expect("random move is valid");
    }
    p
}

struct Tracker {
    best: Descent,
    best_is_local_opt: bool,
    descent_lengths: Vec<usize>,
    trajectory: Option<Vec<TrajectoryEntry>>,
}

impl Tracker {
    fn new(first: &Descent, record: bool) -> Self {
        Self {
            best: first.clone(),
            best_is_local_opt: first.complete,
            descent_lengths: vec![first.steps],
            trajectory: record.then(Vec::new),
        }
    }

    fn offer(&mut self, d: &Descent) {
        if d.fitness < self.best.fitness {
            self.best = d.clone();
            self.best_is_local_opt = d.complete;
        }
    }

    fn log(&mut self, ev: &Evaluator<'_>, fitness: Makespan, event: SearchEvent) {
        let best = self.best.fitness.min(fitness);
        if let Some(t) = self.trajectory.as_mut() {
            t.push(TrajectoryEntry { evaluations: ev.used(), fitness, best, event });
        }
    }

    fn finish(self, ev: &Evaluator<'_>, complete: bool) -> SearchResult {
        SearchResult {
            best_perm: self.best.perm,
            best_fitness: self.best.fitness,
            evaluations_used: ev.used(),
            descent_lengths: self.descent_lengths,
            trajectory: self.trajectory,
            complete,
            local_optimum: self.best_is_local_opt,
        }
    }
}

fn accepts(rule: Acceptance, candidate: Makespan, current: Makespan, temperature: f64, rng: &mut SearchRng) -> bool {
    match rule {
        Acceptance::Better => candidate < current,
        Acceptance::BetterOrEqual => candidate <= current,
        Acceptance::Metropolis => {
            let delta = candidate as i64 - current as i64;
            delta <= 0 || rng.random::<f64>() < metropolis_probability(delta, temperature)
        }
    }
}

/// Iterated local search in the style of ILS-S-PFSP: NEH start,
/// first-improvement insertion descent, transpose/exchange perturbation and
/// a configurable acceptance rule; returns the best solution seen.
pub fn ils_stutzle(instance: &Instance, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let mut ev = Evaluator::new(instance, Some(config.max_evaluations));
    let mut rng = search_rng(config.seed);
    let temperature = config.metropolis_temperature.unwrap_or_else(|| default_temperature(instance));

    let init = neh_with(&mut ev);
    let mut current = first_improvement_descent_with(&mut ev, init, &mut rng);
    let mut tracker = Tracker::new(&current, config.record_trajectory);
    tracker.log(&ev, current.fitness, SearchEvent::Init);
    if !current.complete {
        return Ok(tracker.finish(&ev, false));
    }

    while !ev.exhausted() {
        let start = perturb(&current.perm, config.perturbation_strength, &mut rng);
        let candidate = first_improvement_descent_with(&mut ev, start, &mut rng);
        tracker.descent_lengths.push(candidate.steps);
        tracker.offer(&candidate);
        if accepts(config.acceptance, candidate.fitness, current.fitness, temperature, &mut rng) {
            tracker.log(&ev, candidate.fitness, SearchEvent::Accept);
            current = candidate;
        } else {
            tracker.log(&ev, candidate.fitness, SearchEvent::Reject);
        }
    }
    Ok(tracker.finish(&ev, true))
}

/// Random-restart first-improvement descent under a budget.
pub fn restart_descent(instance: &Instance, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let mut ev = Evaluator::new(instance, Some(config.max_evaluations));
    let mut rng = search_rng(config.seed);
    let n = instance.n_jobs();
    let first = first_improvement_descent_with(&mut ev, Permutation::random(n, &mut rng), &mut rng);
    let mut tracker = Tracker::new(&first, config.record_trajectory);
    tracker.log(&ev, first.fitness, SearchEvent::Init);
    while !ev.exhausted() {
        let d = first_improvement_descent_with(&mut ev, Permutation::random(n, &mut rng), &mut rng);
        tracker.descent_lengths.push(d.steps);
        tracker.offer(&d);
        tracker.log(&ev, d.fitness, SearchEvent::Restart);
    }
    Ok(tracker.finish(&ev, true))
}

enum NeutralOutcome {
    /// A strictly better solution adjacent to the network.
    Portal(Permutation, Makespan),
    /// No portal within the step limit; the walk ended here.
    Stalled(Permutation),
    OutOfBudget,
}

/// Evolvability of `perm`, or an improving move if one shows up.
enum Probe {
    Evolvability(f64, Option<NeighborhoodSummary>),
    Improving(Permutation, Makespan),
}

fn probe(ev: &mut Evaluator<'_>, perm: &Permutation, fitness: Makespan, sample: Option<usize>, rng: &mut SearchRng) -> Probe {
    match sample {
        None => {
            let s = summarize_with(ev, perm);
            if let Some((mv, v)) = s.improving_move {
                return Probe::Improving(apply_move(perm, mv).expect("valid move"), v);
            }
            Probe::Evolvability(s.evolvability(), Some(s))
        }
        Some(k) => {
            let mut sum = 0u64;
            for _ in 0..k {
                let mv = random_move(MoveKind::Insertion, perm.len(), rng);
                let nb = apply_move(perm, mv).expect("valid move");
                let v = ev.makespan(&nb);
                if v < fitness {
                    return Probe::Improving(nb, v);
                }
                sum += v;
            }
            Probe::Evolvability(sum as f64 / k as f64, None)
        }
    }
}

/// Walks the neutral network of `start`, always moving to the neutral
/// neighbor of least evolvability, until a portal shows up.
fn guided_neutral_phase(
    ev: &mut Evaluator<'_>,
    start: &Permutation,
    config: &SearchConfig,
    rng: &mut SearchRng,
    tracker: &mut Tracker,
) -> NeutralOutcome {
    let mut current = start.clone();
    let mut visited: HashSet<Permutation> = HashSet::from([current.clone()]);
    let mut summary: Option<NeighborhoodSummary> = None;

    for _ in 0..config.max_neutral_steps {
        if ev.exhausted() {
            return NeutralOutcome::OutOfBudget;
        }
        let here = match summary.take() {
            Some(s) => s,
            None => summarize_with(ev, &current),
        };
        let fitness = here.fitness;
        if let Some((mv, v)) = here.improving_move {
            return NeutralOutcome::Portal(apply_move(&current, mv).expect("valid move"), v);
        }
        if here.neutral_moves.is_empty() {
            return NeutralOutcome::Stalled(current);
        }

        let mut candidates: Vec<Permutation> = here
            .neutral_moves
            .iter()
            .map(|&m| apply_move(&current, m).expect("valid move"))
            .collect();
        // Unvisited members first; fall back to the whole neutral set.
        if candidates.iter().any(|c| !visited.contains(c)) {
            candidates.retain(|c| !visited.contains(c));
        }
        candidates.shuffle(rng);

        let mut best_evo = f64::INFINITY;
        let mut best: Vec<(Permutation, Option<NeighborhoodSummary>)> = Vec::new();
        for cand in candidates {
            if ev.exhausted() {
                return NeutralOutcome::OutOfBudget;
            }
            match probe(ev, &cand, fitness, config.sampled_evolvability, rng) {
                Probe::Improving(p, v) => return NeutralOutcome::Portal(p, v),
                Probe::Evolvability(e, s) => {
                    if e < best_evo {
                        best_evo = e;
                        best.clear();
                    }
                    if e == best_evo {
                        best.push((cand, s));
                    }
                }
            }
        }
        let (next, next_summary) = best.swap_remove(rng.random_range(0..best.len()));
        current = next;
        summary = next_summary;
        visited.insert(current.clone());
        tracker.log(ev, fitness, SearchEvent::NeutralStep);
    }
    NeutralOutcome::Stalled(current)
}

/// Evolvability-guided neutral search: descend to a local optimum, then walk
/// its neutral network toward lower mean neighbor makespan until a portal
/// appears, take the improvement and descend again.  A portal-free network
/// triggers an ILS-style perturbation judged by `config.acceptance`.
pub fn neutral_guided_search(instance: &Instance, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let mut ev = Evaluator::new(instance, Some(config.max_evaluations));
    let mut rng = search_rng(config.seed);
    let temperature = config.metropolis_temperature.unwrap_or_else(|| default_temperature(instance));
    let n = instance.n_jobs();

    let mut current = first_improvement_descent_with(&mut ev, Permutation::random(n, &mut rng), &mut rng);
    let mut tracker = Tracker::new(&current, config.record_trajectory);
    tracker.log(&ev, current.fitness, SearchEvent::Init);
    if n < 2 {
        return Ok(tracker.finish(&ev, current.complete));
    }
    // Where to perturb from once the incumbent's network proved portal-free.
    let mut stalled_at: Option<Permutation> = None;

    while !ev.exhausted() {
        if stalled_at.is_none() {
            match guided_neutral_phase(&mut ev, &current.perm, config, &mut rng, &mut tracker) {
                NeutralOutcome::Portal(p, v) => {
                    tracker.log(&ev, v, SearchEvent::Portal);
                    let d = first_improvement_descent_with(&mut ev, p, &mut rng);
                    tracker.descent_lengths.push(d.steps + 1);
                    tracker.offer(&d);
                    tracker.log(&ev, d.fitness, SearchEvent::Descent);
                    current = d;
                    continue;
                }
                NeutralOutcome::Stalled(end) => stalled_at = Some(end),
                NeutralOutcome::OutOfBudget => break,
            }
        }
        let from = stalled_at.as_ref().expect("set above");
        let start = perturb(from, config.perturbation_strength, &mut rng);
        let d = first_improvement_descent_with(&mut ev, start, &mut rng);
        tracker.descent_lengths.push(d.steps);
        tracker.offer(&d);
        tracker.log(&ev, d.fitness, SearchEvent::Perturb);
        if d.complete && accepts(config.acceptance, d.fitness, current.fitness, temperature, &mut rng) {
            tracker.log(&ev, d.fitness, SearchEvent::Accept);
            current = d;
            stalled_at = None;
        }
    }
    Ok(tracker.finish(&ev, true))
}

/// Solver selection for the CLI and FFI front-ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ils,
    NeutralGuided,
    Descent,
    Neh,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ils" => Ok(Algorithm::Ils),
            "neutral_guided" | "neutral-guided" => Ok(Algorithm::NeutralGuided),
            "descent" => Ok(Algorithm::Descent),
            "neh" => Ok(Algorithm::Neh),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

pub fn run_algorithm(instance: &Instance, algorithm: Algorithm, config: &SearchConfig) -> Result<SearchResult> {
    match algorithm {
        Algorithm::Ils => ils_stutzle(instance, config),
        Algorithm::NeutralGuided => neutral_guided_search(instance, config),
        Algorithm::Descent => restart_descent(instance, config),
        Algorithm::Neh => {
            config.validate()?;
            let mut ev = Evaluator::unbounded(instance);
            let perm = neh_with(&mut ev);
            let fitness = ev.makespan(&perm);
            Ok(SearchResult {
                best_perm: perm,
                best_fitness: fitness,
                evaluations_used: ev.used(),
                descent_lengths: Vec::new(),
                trajectory: None,
                complete: true,
                local_optimum: false,
            })
        }
    }
}
