//! Flowshop instances: generation, parsing and serialization.
//!
//! The native text layout is a `N M` header followed by `N` rows of `M`
//! processing times (row `i` is job `i` across machines `1..M`).  The
//! `taillard` layout found in circulating benchmark files stores the matrix
//! machine-major (`M` rows of `N` values) and is transposed on read.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{keyed_uniform, TaillardLcg};

/// Processing time in time units.
pub type ProcTime = u32;

/// Largest processing time produced by the generators.
pub const MAX_GENERATED_TIME: ProcTime = 99;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    id: String,
    n_jobs: usize,
    n_machines: usize,
    /// Job-major `n_jobs * n_machines` matrix.
    times: Vec<ProcTime>,
    seed: Option<u64>,
}

/// Which pseudo-random stream fills a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RngMode {
    /// Counter-based stream keyed by `(seed, cell)`, values in `[0, 99]`.
    #[default]
    Native,
    /// Taillard's portable generator, values in `[1, 99]`, machine-major fill.
    Taillard,
}

impl FromStr for RngMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "native" => Ok(RngMode::Native),
            "taillard" => Ok(RngMode::Taillard),
            other => Err(Error::Config(format!("unknown rng mode `{other}`"))),
        }
    }
}

/// On-disk layout accepted by [`parse_instance_as`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InstanceFormat {
    #[default]
    Native,
    Taillard,
}

impl FromStr for InstanceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "native" => Ok(InstanceFormat::Native),
            "taillard" => Ok(InstanceFormat::Taillard),
            other => Err(Error::Config(format!("unknown instance format `{other}`"))),
        }
    }
}

impl Instance {
    /// Builds an instance from a job-major matrix.
    pub fn from_rows(id: impl Into<String>, rows: Vec<Vec<ProcTime>>) -> Result<Self> {
        let n_jobs = rows.len();
        if n_jobs == 0 {
            return Err(Error::Contract("instance needs at least one job".into()));
        }
        let n_machines = rows[0].len();
        if n_machines == 0 {
            return Err(Error::Contract("instance needs at least one machine".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != n_machines) {
            return Err(Error::Contract(format!(
                "job {i} has {} processing times, expected {n_machines}",
                rows[i].len()
            )));
        }
        Ok(Self {
            id: id.into(),
            n_jobs,
            n_machines,
            times: rows.into_iter().flatten().collect(),
            seed: None,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn n_jobs(&self) -> usize {
        self.n_jobs
    }

    pub fn n_machines(&self) -> usize {
        self.n_machines
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Processing time of `job` on `machine` (both zero-based).
    #[inline]
    pub fn time(&self, job: usize, machine: usize) -> ProcTime {
        self.times[job * self.n_machines + machine]
    }

    /// Processing times of `job` across all machines.
    #[inline]
    pub fn job_times(&self, job: usize) -> &[ProcTime] {
        let m = self.n_machines;
        &self.times[job * m..(job + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[ProcTime]> {
        self.times.chunks_exact(self.n_machines)
    }

    pub fn total_processing_time(&self) -> u64 {
        self.times.iter().map(|&p| u64::from(p)).sum()
    }

    pub fn job_total(&self, job: usize) -> u64 {
        self.job_times(job).iter().map(|&p| u64::from(p)).sum()
    }

    /// Permutation-independent makespan floor: the largest machine load or
    /// job length.
    pub fn lower_bound(&self) -> u64 {
        let machine_load = (0..self.n_machines)
            .map(|j| (0..self.n_jobs).map(|i| u64::from(self.time(i, j))).sum::<u64>())
            .max()
            .unwrap_or(0);
        let job_length = (0..self.n_jobs).map(|i| self.job_total(i)).max().unwrap_or(0);
        machine_load.max(job_length)
    }
}

/// Generates a random instance with i.i.d. uniform processing times.
///
/// Identical `(n_jobs, n_machines, seed)` always give the same matrix.
pub fn generate_instance(n_jobs: usize, n_machines: usize, seed: u64) -> Instance {
    generate_instance_with(n_jobs, n_machines, seed, RngMode::Native)
}

pub fn generate_instance_with(n_jobs: usize, n_machines: usize, seed: u64, mode: RngMode) -> Instance {
    assert!(n_jobs >= 1 && n_machines >= 1, "instance dimensions must be positive");
    let mut times = vec![0; n_jobs * n_machines];
    match mode {
        RngMode::Native => {
            for (cell, t) in times.iter_mut().enumerate() {
                *t = keyed_uniform(seed, cell as u64, MAX_GENERATED_TIME + 1);
            }
        }
        RngMode::Taillard => {
            let mut lcg = TaillardLcg::new(seed);
            for j in 0..n_machines {
                for i in 0..n_jobs {
                    times[i * n_machines + j] = lcg.unif(1, i64::from(MAX_GENERATED_TIME)) as ProcTime;
                }
            }
        }
    }
    Instance {
        id: format!("{n_jobs}x{n_machines}"),
        n_jobs,
        n_machines,
        times,
        seed: Some(seed),
    }
}

/// Parses the native layout.
pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_instance_as(text, InstanceFormat::Native)
}

pub fn parse_instance_as(text: &str, format: InstanceFormat) -> Result<Instance> {
    match format {
        InstanceFormat::Native => parse_native(text),
        InstanceFormat::Taillard => parse_taillard(text),
    }
}

fn parse_line(line_no: usize, line: &str) -> Result<Vec<ProcTime>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<ProcTime>()
                .map_err(|_| Error::parse(line_no, format!("`{tok}` is not a non-negative integer")))
        })
        .collect()
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_header(line_no: usize, fields: &[ProcTime], allow_extra: bool) -> Result<(usize, usize)> {
    let ok = if allow_extra { fields.len() >= 2 } else { fields.len() == 2 };
    if !ok {
        return Err(Error::parse(line_no, "malformed header, expected `<N> <M>`"));
    }
    let (n, m) = (fields[0] as usize, fields[1] as usize);
    if n == 0 || m == 0 {
        return Err(Error::parse(line_no, "N and M must be positive"));
    }
    Ok((n, m))
}

fn parse_native(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let (n, m) = parse_header(hl, &parse_line(hl, header)?, false)?;

    let mut rows = Vec::with_capacity(n);
    for (line_no, line) in lines {
        if rows.len() == n {
            return Err(Error::parse(line_no, format!("expected {n} rows, found extra data")));
        }
        let row = parse_line(line_no, line)?;
        if row.len() != m {
            return Err(Error::parse(
                line_no,
                format!("expected {m} columns, found {}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != n {
        let last = text.lines().count().max(1);
        return Err(Error::parse(last, format!("expected {n} rows, found {}", rows.len())));
    }
    Instance::from_rows("", rows)
}

fn parse_taillard(text: &str) -> Result<Instance> {
    // Label lines ("number of jobs, ...", "processing times :") are skipped.
    let mut lines = content_lines(text).filter(|(_, l)| !l.chars().any(|c| c.is_alphabetic()));
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let header_fields = parse_line(hl, header)?;
    let (n, m) = parse_header(hl, &header_fields, true)?;

    let mut machine_rows = Vec::with_capacity(m);
    for (line_no, line) in lines {
        if machine_rows.len() == m {
            return Err(Error::parse(line_no, format!("expected {m} machine rows, found extra data")));
        }
        let row = parse_line(line_no, line)?;
        if row.len() != n {
            return Err(Error::parse(line_no, format!("expected {n} columns, found {}", row.len())));
        }
        machine_rows.push(row);
    }
    if machine_rows.len() != m {
        let last = text.lines().count().max(1);
        return Err(Error::parse(
            last,
            format!("expected {m} machine rows, found {}", machine_rows.len()),
        ));
    }
    let rows = (0..n)
        .map(|i| machine_rows.iter().map(|r| r[i]).collect())
        .collect();
    let mut inst = Instance::from_rows("", rows)?;
    if let Some(&seed) = header_fields.get(2) {
        inst.seed = Some(u64::from(seed));
    }
    Ok(inst)
}

/// Serializes to the native layout.
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::with_capacity(instance.times.len() * 3 + 16);
    let _ = writeln!(out, "{} {}", instance.n_jobs, instance.n_machines);
    for row in instance.rows() {
        let mut first = true;
        for p in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{p}");
        }
        out.push('\n');
    }
    out
}
