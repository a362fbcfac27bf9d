//! Neutral-network probes over the insertion landscape.
//!
//! A neutral walk starts from a local optimum and repeatedly moves to a
//! uniformly drawn neighbor of identical makespan.  Each visited solution is
//! summarized over its full canonical neighborhood: neutral degree,
//! improving degree (portal test) and evolvability, the mean neighbor
//! makespan.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{Evaluator, Makespan, Permutation};
use crate::instance::Instance;
use crate::neighborhood::{apply_move, apply_move_in_place, is_canonical_insertion, Move};

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodSummary {
    pub fitness: Makespan,
    pub neutral_degree: usize,
    pub improving_degree: usize,
    /// Exact sum of neighbor makespans; evolvability is `sum / count`.
    pub neighbor_fitness_sum: u64,
    pub neighbor_count: usize,
    pub neutral_moves: Vec<Move>,
    /// Best improving move (first in canonical order among ties).
    pub improving_move: Option<(Move, Makespan)>,
}

impl NeighborhoodSummary {
    pub fn evolvability(&self) -> f64 {
        if self.neighbor_count == 0 {
            return f64::NAN;
        }
        self.neighbor_fitness_sum as f64 / self.neighbor_count as f64
    }

    pub fn is_portal(&self) -> bool {
        self.improving_degree > 0
    }
}

pub fn summarize_neighborhood(instance: &Instance, perm: &Permutation) -> Result<NeighborhoodSummary> {
    if perm.len() != instance.n_jobs() {
        return Err(Error::Contract(format!(
            "permutation has {} jobs, instance has {}",
            perm.len(),
            instance.n_jobs()
        )));
    }
    Ok(summarize_with(&mut Evaluator::unbounded(instance), perm))
}

/// Full canonical-neighborhood summary, charged to `ev`.
pub fn summarize_with(ev: &mut Evaluator<'_>, perm: &Permutation) -> NeighborhoodSummary {
    let n = perm.len();
    let fitness = ev.load(perm);
    let mut s = NeighborhoodSummary {
        fitness,
        neutral_degree: 0,
        improving_degree: 0,
        neighbor_fitness_sum: 0,
        neighbor_count: 0,
        neutral_moves: Vec::new(),
        improving_move: None,
    };
    for a in 0..n {
        let values = ev.scan(a);
        for (b, &v) in values.iter().enumerate() {
            if !is_canonical_insertion(a, b) {
                continue;
            }
            s.neighbor_count += 1;
            s.neighbor_fitness_sum += v;
            if v == fitness {
                s.neutral_degree += 1;
                s.neutral_moves.push(Move::insertion(a, b));
            } else if v < fitness {
                s.improving_degree += 1;
                if s.improving_move.map_or(true, |(_, best)| v < best) {
                    s.improving_move = Some((Move::insertion(a, b), v));
                }
            }
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Typology {
    /// The local optimum has no neutral neighbor.
    T1,
    /// No portal seen along the walk.
    T2,
    /// At least one portal seen along the walk.
    T3,
}

impl fmt::Display for Typology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Typology::T1 => "T1",
            Typology::T2 => "T2",
            Typology::T3 => "T3",
        })
    }
}

impl FromStr for Typology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T1" => Ok(Typology::T1),
            "T2" => Ok(Typology::T2),
            "T3" => Ok(Typology::T3),
            other => Err(Error::Config(format!("unknown typology `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkStep {
    pub step: usize,
    pub fitness: Makespan,
    pub neutral_degree: usize,
    pub evolvability: f64,
    pub is_portal: bool,
    pub revisited: bool,
    /// Witness for `is_portal`; not persisted in CSV output.
    #[serde(skip)]
    pub portal_move: Option<Move>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkRecord {
    pub instance_id: String,
    pub walk_id: usize,
    pub n_jobs: usize,
    pub n_machines: usize,
    pub steps: Vec<WalkStep>,
    pub start_descent_length: usize,
    pub typology: Typology,
    pub first_portal_step: Option<usize>,
}

impl WalkRecord {
    /// Recomputes typology and first portal from the steps.
    pub fn finalize(&mut self) {
        self.typology = classify_typology(self);
        self.first_portal_step = steps_to_first_portal(self);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn neighborhood_size(&self) -> usize {
        self.n_jobs.saturating_sub(1).pow(2)
    }

    pub fn neutral_degrees(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.neutral_degree as f64).collect()
    }

    pub fn evolvabilities(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.evolvability).collect()
    }

    /// Fraction of steps landing on a solution already visited by this walk.
    pub fn revisit_rate(&self) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        self.steps.iter().filter(|s| s.revisited).count() as f64 / self.steps.len() as f64
    }
}

/// Uniform neutral walk of at most `max_steps` moves from a local optimum.
pub fn neutral_walk<R: Rng + ?Sized>(
    instance: &Instance,
    start: &Permutation,
    max_steps: usize,
    rng: &mut R,
) -> Result<WalkRecord> {
    if max_steps == 0 {
        return Err(Error::Contract("max_steps must be at least 1".into()));
    }
    if start.len() != instance.n_jobs() {
        return Err(Error::Contract("start permutation does not match the instance".into()));
    }
    let mut ev = Evaluator::unbounded(instance);
    let mut visited: HashSet<Permutation> = HashSet::new();
    let mut current = start.clone();
    let mut steps = Vec::with_capacity(max_steps + 1);

    for k in 0..=max_steps {
        let summary = summarize_with(&mut ev, &current);
        if k == 0 && summary.is_portal() {
            return Err(Error::Contract(format!(
                "walk start is not a local optimum ({} improving neighbors)",
                summary.improving_degree
            )));
        }
        let revisited = !visited.insert(current.clone());
        steps.push(WalkStep {
            step: k,
            fitness: summary.fitness,
            neutral_degree: summary.neutral_degree,
            evolvability: summary.evolvability(),
            is_portal: summary.is_portal(),
            revisited,
            portal_move: summary.improving_move.map(|(m, _)| m),
        });
        if summary.neutral_degree == 0 || k == max_steps {
            break;
        }
        let mv = summary.neutral_moves[rng.random_range(0..summary.neutral_moves.len())];
        apply_move_in_place(&mut current, mv)?;
    }

    let mut record = WalkRecord {
        instance_id: instance.id().to_string(),
        walk_id: 0,
        n_jobs: instance.n_jobs(),
        n_machines: instance.n_machines(),
        steps,
        start_descent_length: 0,
        typology: Typology::T2,
        first_portal_step: None,
    };
    record.finalize();
    Ok(record)
}

pub fn classify_typology(record: &WalkRecord) -> Typology {
    if record.steps.iter().any(|s| s.is_portal) {
        Typology::T3
    } else if record.steps.len() == 1 && record.steps[0].neutral_degree == 0 {
        Typology::T1
    } else {
        Typology::T2
    }
}

pub fn steps_to_first_portal(record: &WalkRecord) -> Option<usize> {
    record.steps.iter().position(|s| s.is_portal)
}

/// `(evolvability, forward distance to the nearest portal at or after the
/// step)` for every step up to the last portal.
pub fn portal_distance_series(record: &WalkRecord) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    let mut next_portal: Option<usize> = None;
    for (i, s) in record.steps.iter().enumerate().rev() {
        if s.is_portal {
            next_portal = Some(i);
        }
        if let Some(p) = next_portal {
            out.push((s.evolvability, p - i));
        }
    }
    out.reverse();
    out
}

/// True when applying `mv` to `solution` strictly lowers the makespan.
pub fn check_portal_witness(instance: &Instance, solution: &Permutation, mv: Move) -> Result<bool> {
    let here = crate::evaluation::makespan(instance, solution)?;
    let there = crate::evaluation::makespan(instance, &apply_move(solution, mv)?)?;
    Ok(there < here)
}

pub const STEP_CSV_HEADER: [&str; 8] = [
    "instance_id",
    "walk_id",
    "step",
    "fitness",
    "neutral_degree",
    "evolvability",
    "is_portal",
    "revisited",
];

pub const WALK_CSV_HEADER: [&str; 6] = [
    "instance_id",
    "walk_id",
    "typology",
    "walk_length",
    "first_portal_step",
    "start_descent_length",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

/// One row per walk step.
pub fn write_steps_csv<W: Write>(out: W, records: &[WalkRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STEP_CSV_HEADER).map_err(csv_err)?;
    for r in records {
        for s in &r.steps {
            w.write_record([
                r.instance_id.clone(),
                r.walk_id.to_string(),
                s.step.to_string(),
                s.fitness.to_string(),
                s.neutral_degree.to_string(),
                format!("{:.6}", s.evolvability),
                u8::from(s.is_portal).to_string(),
                u8::from(s.revisited).to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io("<steps csv>", e))
}

/// One summary row per walk.
pub fn write_walks_csv<W: Write>(out: W, records: &[WalkRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WALK_CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.instance_id.clone(),
            r.walk_id.to_string(),
            r.typology.to_string(),
            r.steps.len().to_string(),
            r.first_portal_step.map(|s| s.to_string()).unwrap_or_default(),
            r.start_descent_length.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<walks csv>", e))
}

fn field<T: FromStr>(rec: &csv::StringRecord, idx: usize, line: usize) -> Result<T> {
    rec.get(idx)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(line, format!("bad value in column {idx}")))
}

/// Rebuilds walk records from the step and walk CSVs.  `dims` maps an
/// instance id to `(n_jobs, n_machines)`.
pub fn read_walk_records<R1: Read, R2: Read>(
    steps_csv: R1,
    walks_csv: R2,
    dims: impl Fn(&str) -> Option<(usize, usize)>,
) -> Result<Vec<WalkRecord>> {
    let mut records: Vec<WalkRecord> = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut walks = csv::Reader::from_reader(walks_csv);
    for (i, row) in walks.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let line = i + 2;
        let id = row.get(0).unwrap_or_default().to_string();
        let (n_jobs, n_machines) =
            dims(&id).ok_or_else(|| Error::parse(line, format!("unknown instance `{id}`")))?;
        let walk_id: usize = field(&row, 1, line)?;
        let typology: Typology = field(&row, 2, line)?;
        let first_portal_step = match row.get(4) {
            Some("") | None => None,
            Some(s) => Some(s.parse().map_err(|_| Error::parse(line, "bad first_portal_step"))?),
        };
        index.insert((id.clone(), walk_id), records.len());
        records.push(WalkRecord {
            instance_id: id,
            walk_id,
            n_jobs,
            n_machines,
            steps: Vec::new(),
            start_descent_length: field(&row, 5, line)?,
            typology,
            first_portal_step,
        });
    }
    let mut steps = csv::Reader::from_reader(steps_csv);
    for (i, row) in steps.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let line = i + 2;
        let key = (row.get(0).unwrap_or_default().to_string(), field::<usize>(&row, 1, line)?);
        let &slot = index
            .get(&key)
            .ok_or_else(|| Error::parse(line, format!("step for unknown walk {key:?}")))?;
        records[slot].steps.push(WalkStep {
            step: field(&row, 2, line)?,
            fitness: field(&row, 3, line)?,
            neutral_degree: field(&row, 4, line)?,
            evolvability: field(&row, 5, line)?,
            is_portal: field::<u8>(&row, 6, line)? == 1,
            revisited: field::<u8>(&row, 7, line)? == 1,
            portal_move: None,
        });
    }
    Ok(records)
}
