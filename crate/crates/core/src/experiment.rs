//! Reproducible landscape campaigns and instance generation to disk.
//!
//! A campaign generates instances, calibrates the walk length from steepest
//! descents, runs neutral walks from the resulting local optima and writes
//! per-step/per-walk CSVs, the aggregated report and a digest manifest.
//! Work fans out over a rayon pool but results are merged by task key, so
//! the output bytes do not depend on the worker count.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evaluation::{Makespan, Permutation};
use crate::instance::{generate_instance_with, write_instance, Instance, RngMode};
use crate::landscape::{neutral_walk, write_steps_csv, write_walks_csv, WalkRecord};
use crate::rng::{derive_seed, label_hash, search_rng, walk_seed};
use crate::instance::{parse_instance_as, InstanceFormat};
use crate::search::{run_algorithm, steepest_descent, Algorithm, SearchConfig, SearchResult};
use crate::stats::{aggregate_report, report_artifacts, LandscapeReport, ReportOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub sizes: Vec<(usize, usize)>,
    pub instances_per_size: usize,
    pub walks_per_instance: usize,
    pub descents_for_length_calibration: usize,
    pub walk_length_multiplier: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub rng_mode: RngMode,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
    /// Start every walk of an instance from the same local optimum.
    pub shared_start: bool,
    pub null_repeats: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            sizes: vec![(20, 5), (20, 10), (20, 20)],
            instances_per_size: 10,
            walks_per_instance: 30,
            descents_for_length_calibration: 30,
            walk_length_multiplier: 10,
            master_seed: 0,
            output_dir: PathBuf::from("campaign"),
            rng_mode: RngMode::Native,
            jobs: 0,
            shared_start: false,
            null_repeats: 100,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("at least one size is required".into()));
        }
        if let Some(&(n, m)) = self.sizes.iter().find(|&&(n, m)| n < 2 || m < 1) {
            return Err(Error::Config(format!("infeasible size {n}x{m}: need N >= 2 and M >= 1")));
        }
        for (name, v) in [
            ("instances_per_size", self.instances_per_size),
            ("walks_per_instance", self.walks_per_instance),
            ("descents_for_length_calibration", self.descents_for_length_calibration),
            ("walk_length_multiplier", self.walk_length_multiplier),
            ("null_repeats", self.null_repeats),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    pub fn report_options(&self) -> ReportOptions {
        ReportOptions { null_repeats: self.null_repeats, seed: self.master_seed, ..ReportOptions::default() }
    }
}

/// Parses `20x5,20x10` into size pairs.
pub fn parse_sizes(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (n, m) = s
                .split_once(['x', 'X'])
                .ok_or_else(|| Error::Config(format!("size `{s}` is not of the form NxM")))?;
            let parse = |v: &str| {
                v.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad size component in `{s}`")))
            };
            Ok((parse(n)?, parse(m)?))
        })
        .collect()
}

pub fn instance_id(n: usize, m: usize, k: usize) -> String {
    format!("{n}x{m}_{k}")
}

/// Seed of the `k`-th instance (1-based) of size `n x m`.
pub fn instance_seed(master: u64, n: usize, m: usize, k: usize, mode: RngMode) -> u64 {
    let s = derive_seed(master, &[n as u64, m as u64, k as u64]);
    match mode {
        RngMode::Native => s,
        // Taillard's generator takes seeds in [1, 2^31 - 2].
        RngMode::Taillard => 1 + s % 2_147_483_646,
    }
}

/// Writes `count` instance files `<N>x<M>_<k>.txt`.  In Taillard mode the
/// first instance uses `seed` verbatim so published time seeds reproduce the
/// benchmark matrices.
pub fn run_generate(
    n_jobs: usize,
    n_machines: usize,
    count: usize,
    seed: u64,
    rng_mode: RngMode,
    output_dir: &Path,
) -> Result<Vec<PathBuf>> {
    if n_jobs == 0 || n_machines == 0 || count == 0 {
        return Err(Error::Config("N, M and count must all be positive".into()));
    }
    fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;
    let mut paths = Vec::with_capacity(count);
    for k in 1..=count {
        let s = match rng_mode {
            RngMode::Taillard if k == 1 => seed,
            _ => instance_seed(seed, n_jobs, n_machines, k, rng_mode),
        };
        let inst = generate_instance_with(n_jobs, n_machines, s, rng_mode);
        let path = output_dir.join(format!("{}.txt", instance_id(n_jobs, n_machines, k)));
        fs::write(&path, write_instance(&inst)).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub complete: bool,
    /// The campaign config minus `output_dir` and `jobs`, which do not
    /// affect results.
    pub config: serde_json::Value,
    pub files: Vec<ManifestEntry>,
}

#[derive(Debug, Clone)]
pub struct CampaignOutput {
    pub report: LandscapeReport,
    pub records: Vec<WalkRecord>,
    pub instances: Vec<Instance>,
    pub calibration: Vec<CalibrationRow>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub instance_id: String,
    pub descent: usize,
    pub length: usize,
    pub fitness: Makespan,
}

struct Writer {
    root: PathBuf,
    files: Vec<PathBuf>,
    entries: Vec<ManifestEntry>,
}

impl Writer {
    fn put(&mut self, rel: &str, body: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        let digest = Sha256::digest(body);
        self.entries.push(ManifestEntry {
            path: rel.to_string(),
            bytes: body.len() as u64,
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
        self.files.push(path);
        Ok(())
    }

    fn manifest(&mut self, config: &CampaignConfig, complete: bool) -> Result<()> {
        let mut entries = self.entries.clone();
        entries.sort_by(|a, b| a.path.cmp(&b.path));
        let mut settings = serde_json::to_value(config)?;
        if let Some(map) = settings.as_object_mut() {
            map.remove("output_dir");
            map.remove("jobs");
        }
        let manifest = Manifest { complete, config: settings, files: entries };
        let mut body = serde_json::to_string_pretty(&manifest)?;
        body.push('\n');
        let path = self.root.join("manifest.json");
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }
}

struct Start {
    perm: Permutation,
    fitness: Makespan,
    length: usize,
}

fn descent_from_random(instance: &Instance, seed: u64) -> Start {
    let mut rng = search_rng(seed);
    let start = Permutation::random(instance.n_jobs(), &mut rng);
    let res = steepest_descent(instance, &start, &mut rng).expect("dimensions match");
    Start { perm: res.best_perm, fitness: res.best_fitness, length: res.descent_lengths[0] }
}

fn descent_seed(master: u64, id: &str, idx: usize) -> u64 {
    derive_seed(master, &[label_hash(id), 0xDE5C, idx as u64])
}

fn compute(config: &CampaignConfig) -> Result<(Vec<Instance>, Vec<CalibrationRow>, Vec<WalkRecord>)> {
    let instances: Vec<Instance> = config
        .sizes
        .iter()
        .flat_map(|&(n, m)| (1..=config.instances_per_size).map(move |k| (n, m, k)))
        .map(|(n, m, k)| {
            let seed = instance_seed(config.master_seed, n, m, k, config.rng_mode);
            generate_instance_with(n, m, seed, config.rng_mode).with_id(instance_id(n, m, k))
        })
        .collect();

    let d = config.descents_for_length_calibration;
    let w = config.walks_per_instance;
    // Calibration descents double as walk starts; extra walks get fresh ones.
    let per_instance = if config.shared_start { d } else { d.max(w) };
    let starts: Vec<Start> = (0..instances.len() * per_instance)
        .into_par_iter()
        .map(|t| {
            let inst = &instances[t / per_instance];
            descent_from_random(inst, descent_seed(config.master_seed, inst.id(), t % per_instance))
        })
        .collect();

    let mut calibration = Vec::new();
    let mut walk_budget = Vec::with_capacity(instances.len());
    for (i, inst) in instances.iter().enumerate() {
        let group = &starts[i * per_instance..(i * per_instance) + d];
        let max_len = group.iter().map(|s| s.length).max().unwrap_or(0);
        walk_budget.push((config.walk_length_multiplier * max_len).max(1));
        calibration.extend(group.iter().enumerate().map(|(k, s)| CalibrationRow {
            instance_id: inst.id().to_string(),
            descent: k,
            length: s.length,
            fitness: s.fitness,
        }));
    }

    let records: Vec<WalkRecord> = (0..instances.len() * w)
        .into_par_iter()
        .map(|t| {
            let (i, walk_id) = (t / w, t % w);
            let inst = &instances[i];
            let start = &starts[i * per_instance + if config.shared_start { 0 } else { walk_id }];
            let mut rng = search_rng(walk_seed(config.master_seed, inst.id(), walk_id as u64));
            let mut rec = neutral_walk(inst, &start.perm, walk_budget[i], &mut rng)?;
            rec.walk_id = walk_id;
            rec.start_descent_length = start.length;
            Ok(rec)
        })
        .collect::<Result<_>>()?;
    Ok((instances, calibration, records))
}

/// Runs a full analysis campaign and writes its artifacts under
/// `config.output_dir`.  On I/O failure a manifest flagged incomplete lists
/// what was written.
pub fn run_analysis_campaign(config: &CampaignConfig) -> Result<CampaignOutput> {
    config.validate()?;
    let root = config.output_dir.clone();
    fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let (instances, calibration, records) = pool.install(|| compute(config))?;
    let report = aggregate_report(&records, &config.report_options());

    let mut writer = Writer { root, files: Vec::new(), entries: Vec::new() };
    let result = write_outputs(&mut writer, &instances, &calibration, &records, &report);
    match result {
        Ok(()) => writer.manifest(config, true)?,
        Err(e) => {
            let _ = writer.manifest(config, false);
            return Err(e);
        }
    }
    Ok(CampaignOutput { report, records, instances, calibration, files: writer.files })
}

fn write_outputs(
    writer: &mut Writer,
    instances: &[Instance],
    calibration: &[CalibrationRow],
    records: &[WalkRecord],
    report: &LandscapeReport,
) -> Result<()> {
    let mut index = String::from("instance_id,n_jobs,n_machines,seed\n");
    for inst in instances {
        writer.put(&format!("instances/{}.txt", inst.id()), write_instance(inst).as_bytes())?;
        let seed = inst.seed().map(|s| s.to_string()).unwrap_or_default();
        index.push_str(&format!("{},{},{},{}\n", inst.id(), inst.n_jobs(), inst.n_machines(), seed));
    }
    writer.put("instances.csv", index.as_bytes())?;

    let mut calib = String::from("instance_id,descent,length,fitness\n");
    for c in calibration {
        calib.push_str(&format!("{},{},{},{}\n", c.instance_id, c.descent, c.length, c.fitness));
    }
    writer.put("descents.csv", calib.as_bytes())?;

    let mut steps = Vec::new();
    write_steps_csv(&mut steps, records)?;
    writer.put("steps.csv", &steps)?;
    let mut walks = Vec::new();
    write_walks_csv(&mut walks, records)?;
    writer.put("walks.csv", &walks)?;

    for (name, body) in report_artifacts(report)? {
        writer.put(name, body.as_bytes())?;
    }
    Ok(())
}

/// Re-aggregates a campaign directory from its CSV outputs.
pub fn load_campaign_records(dir: &Path) -> Result<Vec<WalkRecord>> {
    let read = |name: &str| {
        let p = dir.join(name);
        fs::read(&p).map_err(|e| Error::io(&p, e))
    };
    let index = read("instances.csv")?;
    let mut dims = std::collections::HashMap::new();
    for (i, line) in String::from_utf8_lossy(&index).lines().enumerate().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |s: Option<&&str>| s.and_then(|v| v.parse::<usize>().ok());
        match (cols.first(), parse(cols.get(1)), parse(cols.get(2))) {
            (Some(id), Some(n), Some(m)) => {
                dims.insert(id.to_string(), (n, m));
            }
            _ => return Err(Error::parse(i + 1, "malformed instances.csv row")),
        }
    }
    let steps = read("steps.csv")?;
    let walks = read("walks.csv")?;
    crate::landscape::read_walk_records(&steps[..], &walks[..], |id| dims.get(id).copied())
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub instance_id: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub best_fitness: Makespan,
    pub best_perm: Permutation,
    pub evaluations_used: u64,
    pub complete: bool,
    pub wall_seconds: f64,
}

/// Loads an instance file and runs `algorithm` on it.
pub fn run_solver(
    instance_path: &Path,
    format: InstanceFormat,
    algorithm: Algorithm,
    config: &SearchConfig,
) -> Result<(SearchResult, SolveSummary)> {
    let text = fs::read_to_string(instance_path).map_err(|e| Error::io(instance_path, e))?;
    let mut instance = parse_instance_as(&text, format)?;
    if instance.id().is_empty() {
        let stem = instance_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        instance = instance.with_id(stem);
    }
    let started = std::time::Instant::now();
    let result = run_algorithm(&instance, algorithm, config)?;
    let summary = SolveSummary {
        instance_id: instance.id().to_string(),
        algorithm,
        seed: config.seed,
        best_fitness: result.best_fitness,
        best_perm: result.best_perm.clone(),
        evaluations_used: result.evaluations_used,
        complete: result.complete,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    Ok((result, summary))
}
