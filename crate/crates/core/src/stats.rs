//! Autocorrelation, shuffle null model, Pearson correlation and the
//! two-level (walks -> instance mean -> size mean) landscape aggregation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Deref;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{portal_distance_series, Typology, WalkRecord};
use crate::rng::{derive_seed, label_hash, search_rng};

/// A labelled numeric sequence collected along a walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self { label: label.into(), values }
    }
}

impl Deref for Series {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    /// `rho[k - 1]` is the coefficient at lag `k`.
    pub rho: Vec<f64>,
    /// Set when the series has zero variance; every `rho` is then 0.
    pub degenerate: bool,
}

impl Autocorrelation {
    pub fn rho1(&self) -> f64 {
        self.rho[0]
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Global-mean sample autocorrelation at lags `1..=max_lag`.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Result<Autocorrelation> {
    if max_lag == 0 || series.len() <= max_lag + 1 {
        return Err(Error::Contract(format!(
            "series of length {} too short for lag {max_lag}",
            series.len()
        )));
    }
    let mu = mean(series);
    let dev: Vec<f64> = series.iter().map(|x| x - mu).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    if denom <= f64::EPSILON * series.len() as f64 * mu.abs().max(1.0) {
        return Ok(Autocorrelation { rho: vec![0.0; max_lag], degenerate: true });
    }
    let rho = (1..=max_lag)
        .map(|k| {
            let num: f64 = dev.iter().zip(&dev[k..]).map(|(a, b)| a * b).sum();
            (num / denom).clamp(-1.0, 1.0)
        })
        .collect();
    Ok(Autocorrelation { rho, degenerate: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullModel {
    pub mean_rho1: f64,
    pub max_abs_rho1: f64,
    pub degenerate: bool,
}

/// `rho(1)` of `repeats` uniform shuffles of the series.
pub fn shuffle_null_model<R: Rng + ?Sized>(series: &[f64], repeats: usize, rng: &mut R) -> Result<NullModel> {
    if series.len() < 3 {
        return Err(Error::Contract("null model needs at least 3 values".into()));
    }
    if repeats == 0 {
        return Err(Error::Contract("null model needs at least one repeat".into()));
    }
    let mut work = series.to_vec();
    let mut sum = 0.0;
    let mut max_abs: f64 = 0.0;
    for _ in 0..repeats {
        work.shuffle(rng);
        let ac = autocorrelation(&work, 1)?;
        if ac.degenerate {
            return Ok(NullModel { mean_rho1: 0.0, max_abs_rho1: 0.0, degenerate: true });
        }
        sum += ac.rho1();
        max_abs = max_abs.max(ac.rho1().abs());
    }
    Ok(NullModel { mean_rho1: sum / repeats as f64, max_abs_rho1: max_abs, degenerate: false })
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Contract(format!("length mismatch {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Contract("pearson needs at least 2 pairs".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::Degenerate("zero variance in pearson input".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Mean and sample standard deviation across instance means.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Stat {
    pub mean: Option<f64>,
    pub stddev: Option<f64>,
    /// Number of instance means contributing.
    pub count: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Stat::default();
        }
        let mu = mean(values);
        let sd = if values.len() > 1 {
            let ss: f64 = values.iter().map(|v| (v - mu).powi(2)).sum();
            (ss / (values.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stat { mean: Some(mu), stddev: Some(sd), count: values.len() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub null_repeats: usize,
    /// Walks with fewer recorded solutions are left out of autocorrelation
    /// aggregates.
    pub min_walk_len: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { null_repeats: 100, min_walk_len: 10, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub n_jobs: usize,
    pub n_machines: usize,
    pub instances: usize,
    pub walks: usize,
    pub short_walks: usize,
    pub descent_length: Stat,
    pub walk_length: Stat,
    pub neutral_degree: Stat,
    pub neutral_degree_ratio: Stat,
    pub rho1_neutral_degree: Stat,
    pub null_rho1_neutral_degree: Stat,
    pub rho1_evolvability: Stat,
    pub null_rho1_evolvability: Stat,
    pub t1_frequency: Stat,
    pub t2_frequency: Stat,
    pub t3_frequency: Stat,
    /// Over T2/T3 walks only.
    pub revisit_rate: Stat,
    pub steps_to_portal: Stat,
    pub portal_correlation: Stat,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LandscapeReport {
    pub options: Option<ReportOptions>,
    pub sizes: Vec<SizeReport>,
}

impl LandscapeReport {
    pub fn size(&self, n_jobs: usize, n_machines: usize) -> Option<&SizeReport> {
        self.sizes.iter().find(|s| s.n_jobs == n_jobs && s.n_machines == n_machines)
    }
}

#[derive(Debug, Clone, Default)]
struct WalkMetrics {
    neutral_degree: f64,
    ratio: f64,
    walk_length: f64,
    descent_length: f64,
    short: bool,
    rho1_nd: Option<f64>,
    null_nd: Option<f64>,
    rho1_evo: Option<f64>,
    null_evo: Option<f64>,
    revisit: Option<f64>,
    portal_steps: Option<f64>,
}

fn rho1_with_null(series: &[f64], repeats: usize, seed: u64) -> (Option<f64>, Option<f64>) {
    let Ok(ac) = autocorrelation(series, 1) else {
        return (None, None);
    };
    if ac.degenerate {
        return (None, None);
    }
    let null = shuffle_null_model(series, repeats, &mut search_rng(seed))
        .ok()
        .filter(|n| !n.degenerate)
        .map(|n| n.mean_rho1);
    (Some(ac.rho1()), null)
}

fn walk_metrics(r: &WalkRecord, opts: &ReportOptions) -> WalkMetrics {
    let nd = r.neutral_degrees();
    let size = r.neighborhood_size().max(1) as f64;
    let mean_nd = if nd.is_empty() { 0.0 } else { mean(&nd) };
    let mut m = WalkMetrics {
        neutral_degree: mean_nd,
        ratio: mean_nd / size,
        walk_length: r.len() as f64,
        descent_length: r.start_descent_length as f64,
        short: r.len() < opts.min_walk_len,
        ..Default::default()
    };
    if !m.short {
        let base = derive_seed(opts.seed, &[label_hash(&r.instance_id), r.walk_id as u64]);
        (m.rho1_nd, m.null_nd) = rho1_with_null(&nd, opts.null_repeats, derive_seed(base, &[1]));
        (m.rho1_evo, m.null_evo) =
            rho1_with_null(&r.evolvabilities(), opts.null_repeats, derive_seed(base, &[2]));
    }
    if r.typology != Typology::T1 {
        m.revisit = Some(r.revisit_rate());
    }
    m.portal_steps = r.first_portal_step.map(|s| s as f64);
    m
}

/// Evolvability against forward portal distance, pairs pooled over all
/// walks of one instance.
fn pooled_portal_correlation(walks: &[&WalkRecord]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = walks
        .iter()
        .flat_map(|r| portal_distance_series(r))
        .map(|(e, d)| (e, d as f64))
        .unzip();
    if x.len() < 3 {
        return None;
    }
    pearson(&x, &y).ok()
}

fn mean_of<F: Fn(&WalkMetrics) -> Option<f64>>(walks: &[WalkMetrics], f: F) -> Option<f64> {
    let vals: Vec<f64> = walks.iter().filter_map(f).collect();
    (!vals.is_empty()).then(|| mean(&vals))
}

/// Two-level aggregation keyed by `(n_jobs, n_machines)`.
pub fn aggregate_report(records: &[WalkRecord], opts: &ReportOptions) -> LandscapeReport {
    // size -> instance -> walks
    let mut groups: BTreeMap<(usize, usize), BTreeMap<&str, Vec<&WalkRecord>>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.n_jobs, r.n_machines))
            .or_default()
            .entry(r.instance_id.as_str())
            .or_default()
            .push(r);
    }

    let mut sizes = Vec::new();
    for ((n_jobs, n_machines), instances) in groups {
        let mut per_instance: Vec<(Vec<WalkMetrics>, [f64; 3])> = Vec::new();
        let mut portal_corr = Vec::new();
        let mut walks = 0;
        for walks_of in instances.values() {
            if walks_of.is_empty() {
                continue;
            }
            walks += walks_of.len();
            let metrics: Vec<WalkMetrics> = walks_of.iter().map(|r| walk_metrics(r, opts)).collect();
            let mut freq = [0.0; 3];
            for r in walks_of {
                freq[r.typology as usize] += 1.0 / walks_of.len() as f64;
            }
            portal_corr.extend(pooled_portal_correlation(walks_of));
            per_instance.push((metrics, freq));
        }
        if per_instance.is_empty() {
            log::warn!("no walks for size {n_jobs}x{n_machines}; omitted from report");
            continue;
        }
        let stat = |f: &dyn Fn(&[WalkMetrics]) -> Option<f64>| {
            let vals: Vec<f64> = per_instance.iter().filter_map(|(w, _)| f(w)).collect();
            Stat::of(&vals)
        };
        let freq_stat = |t: usize| Stat::of(&per_instance.iter().map(|(_, f)| f[t]).collect::<Vec<_>>());
        let short_walks = per_instance.iter().flat_map(|(w, _)| w).filter(|m| m.short).count();
        sizes.push(SizeReport {
            n_jobs,
            n_machines,
            instances: per_instance.len(),
            walks,
            short_walks,
            descent_length: stat(&|w| mean_of(w, |m| Some(m.descent_length))),
            walk_length: stat(&|w| mean_of(w, |m| Some(m.walk_length))),
            neutral_degree: stat(&|w| mean_of(w, |m| Some(m.neutral_degree))),
            neutral_degree_ratio: stat(&|w| mean_of(w, |m| Some(m.ratio))),
            rho1_neutral_degree: stat(&|w| mean_of(w, |m| m.rho1_nd)),
            null_rho1_neutral_degree: stat(&|w| mean_of(w, |m| m.null_nd)),
            rho1_evolvability: stat(&|w| mean_of(w, |m| m.rho1_evo)),
            null_rho1_evolvability: stat(&|w| mean_of(w, |m| m.null_evo)),
            t1_frequency: freq_stat(Typology::T1 as usize),
            t2_frequency: freq_stat(Typology::T2 as usize),
            t3_frequency: freq_stat(Typology::T3 as usize),
            revisit_rate: stat(&|w| mean_of(w, |m| m.revisit)),
            steps_to_portal: stat(&|w| mean_of(w, |m| m.portal_steps)),
            portal_correlation: Stat::of(&portal_corr),
        });
    }
    LandscapeReport { options: Some(*opts), sizes }
}

fn fmt_opt(v: Option<f64>, scale: f64, prec: usize) -> String {
    match v {
        Some(x) => format!("{:.*}", prec, x * scale),
        None => "-".into(),
    }
}

/// Aligned-column text rendering.
pub fn render_text(report: &LandscapeReport) -> String {
    type Col = (&'static str, fn(&SizeReport) -> Stat, f64, usize);
    let cols: [Col; 14] = [
        ("descent", |s| s.descent_length, 1.0, 1),
        ("walk_len", |s| s.walk_length, 1.0, 1),
        ("nd", |s| s.neutral_degree, 1.0, 1),
        ("nd_ratio%", |s| s.neutral_degree_ratio, 100.0, 2),
        ("rho1_nd", |s| s.rho1_neutral_degree, 1.0, 3),
        ("null_nd", |s| s.null_rho1_neutral_degree, 1.0, 4),
        ("rho1_evo", |s| s.rho1_evolvability, 1.0, 3),
        ("null_evo", |s| s.null_rho1_evolvability, 1.0, 4),
        ("T1%", |s| s.t1_frequency, 100.0, 1),
        ("T2%", |s| s.t2_frequency, 100.0, 1),
        ("T3%", |s| s.t3_frequency, 100.0, 1),
        ("revisit%", |s| s.revisit_rate, 100.0, 1),
        ("portal_steps", |s| s.steps_to_portal, 1.0, 2),
        ("corr_evo_portal", |s| s.portal_correlation, 1.0, 3),
    ];
    let mut header = vec!["size".to_string(), "inst".into(), "walks".into()];
    header.extend(cols.iter().map(|c| c.0.to_string()));
    let mut rows = vec![header];
    for s in &report.sizes {
        let mut row = vec![
            format!("{}x{}", s.n_jobs, s.n_machines),
            s.instances.to_string(),
            s.walks.to_string(),
        ];
        for (_, get, scale, prec) in &cols {
            let st = get(s);
            row.push(match (st.mean, st.stddev) {
                (Some(m), Some(sd)) => format!("{}±{}", fmt_opt(Some(m), *scale, *prec), fmt_opt(Some(sd), *scale, *prec)),
                _ => "-".into(),
            });
        }
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:>w$}", w = *w))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

fn fig_csv(report: &LandscapeReport, get: fn(&SizeReport) -> Stat) -> String {
    let mut out = String::from("n_jobs,n_machines,mean,stddev\n");
    for s in &report.sizes {
        let st = get(s);
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", s.n_jobs, s.n_machines, f(st.mean), f(st.stddev));
    }
    out
}

fn typology_csv(report: &LandscapeReport) -> String {
    let mut out = String::from("n_jobs,n_machines,typology,mean,stddev\n");
    for s in &report.sizes {
        for (name, st) in [("T1", s.t1_frequency), ("T2", s.t2_frequency), ("T3", s.t3_frequency)] {
            let f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
            let _ = writeln!(out, "{},{},{name},{},{}", s.n_jobs, s.n_machines, f(st.mean), f(st.stddev));
        }
    }
    out
}

/// Named artifacts for a report: JSON, text and per-figure CSVs.
pub fn report_artifacts(report: &LandscapeReport) -> Result<Vec<(&'static str, String)>> {
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    Ok(vec![
        ("report.json", json),
        ("report.txt", render_text(report)),
        ("fig2_ratio.csv", fig_csv(report, |s| s.neutral_degree_ratio)),
        ("fig_rho_degree.csv", fig_csv(report, |s| s.rho1_neutral_degree)),
        ("fig_typology.csv", typology_csv(report)),
        ("fig_revisit.csv", fig_csv(report, |s| s.revisit_rate)),
        ("fig_portal_steps.csv", fig_csv(report, |s| s.steps_to_portal)),
        ("fig_rho_evolvability.csv", fig_csv(report, |s| s.rho1_evolvability)),
        ("fig_portal_correlation.csv", fig_csv(report, |s| s.portal_correlation)),
    ])
}

pub fn write_report_files(report: &LandscapeReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (name, body) in report_artifacts(report)? {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::WalkStep;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};
    use rand::Rng;

    /// Textbook per-pair correlation of `x[i]` and `x[i + k]`, used only to
    /// sanity-check sign and magnitude of the global-mean estimator.
    fn lagged_pearson(x: &[f64], k: usize) -> f64 {
        pearson(&x[..x.len() - k], &x[k..]).unwrap()
    }

    #[test]
    fn constant_series_is_degenerate() {
        let ac = autocorrelation(&[3.0; 20], 2).unwrap();
        assert!(ac.degenerate);
        assert_eq!(ac.rho, vec![0.0, 0.0]);
        let null = shuffle_null_model(&[3.0; 20], 5, &mut search_rng(0)).unwrap();
        assert!(null.degenerate);
    }

    #[test]
    fn alternating_series() {
        let x: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { 2.0 }).collect();
        let ac = autocorrelation(&x, 2).unwrap();
        // closed form: -(n-1)/n and (n-2)/n
        assert!((ac.rho[0] + 0.99).abs() < 1e-12);
        assert!((ac.rho[1] - 0.98).abs() < 1e-12);
        assert!((lagged_pearson(&x, 1) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn short_series_rejected() {
        assert!(autocorrelation(&[1.0, 2.0], 1).is_err());
        assert!(autocorrelation(&[1.0, 2.0, 3.0], 0).is_err());
        assert!(shuffle_null_model(&[1.0, 2.0], 3, &mut search_rng(0)).is_err());
    }

    #[test]
    fn iid_null_model_is_near_zero() {
        let mut rng = search_rng(42);
        let x: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let null = shuffle_null_model(&x, 100, &mut rng).unwrap();
        assert!(null.mean_rho1.abs() < 0.05, "{null:?}");
    }

    #[test]
    fn null_model_breaks_smooth_series() {
        let x: Vec<f64> = (0..400).map(|i| (i as f64 / 40.0).sin()).collect();
        let rho1 = autocorrelation(&x, 1).unwrap().rho1();
        let null = shuffle_null_model(&x, 100, &mut search_rng(1)).unwrap();
        assert!(rho1 > 0.9);
        assert!(null.mean_rho1.abs() * 5.0 < rho1);
    }

    #[test]
    fn pearson_cases() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert!(pearson(&x, &x[..3]).is_err());
        assert!(pearson(&x, &[1.0; 4]).is_err());
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn stat_of_identical_values() {
        let s = Stat::of(&[2.5, 2.5, 2.5]);
        assert_eq!(s.mean, Some(2.5));
        assert_eq!(s.stddev, Some(0.0));
        assert_eq!(Stat::of(&[]).mean, None);
        let s = Stat::of(&[1.0, 3.0]);
        assert!((s.stddev.unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    fn walk(id: &str, walk_id: usize, nds: &[usize], portals: &[usize]) -> WalkRecord {
        let steps = nds
            .iter()
            .enumerate()
            .map(|(i, &nd)| WalkStep {
                step: i,
                fitness: 50,
                neutral_degree: nd,
                evolvability: 60.0 + nd as f64,
                is_portal: portals.contains(&i),
                revisited: false,
                portal_move: None,
            })
            .collect();
        let mut r = WalkRecord {
            instance_id: id.into(),
            walk_id,
            n_jobs: 5,
            n_machines: 2,
            steps,
            start_descent_length: 4,
            typology: Typology::T2,
            first_portal_step: None,
        };
        r.finalize();
        r
    }

    #[test]
    fn single_walk_report_equals_walk_values() {
        let nds = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];
        let r = walk("a", 0, &nds, &[5]);
        let rep = aggregate_report(std::slice::from_ref(&r), &ReportOptions::default());
        let s = rep.size(5, 2).unwrap();
        assert_eq!(s.instances, 1);
        assert_eq!(s.neutral_degree.mean, Some(6.5));
        assert_eq!(s.neutral_degree_ratio.mean, Some(6.5 / 16.0));
        assert_eq!(s.t3_frequency.mean, Some(1.0));
        assert_eq!(s.steps_to_portal.mean, Some(5.0));
        assert_eq!(s.descent_length.mean, Some(4.0));
        let nd: Vec<f64> = nds.iter().map(|&v| v as f64).collect();
        assert_eq!(s.rho1_neutral_degree.mean, Some(autocorrelation(&nd, 1).unwrap().rho1()));
        assert_eq!(s.neutral_degree.stddev, Some(0.0));
        // evolvability rises with the neutral degree here, distance falls
        assert!(s.portal_correlation.mean.unwrap() < 0.0);
    }

    #[test]
    fn portal_correlation_pools_pairs_within_instance() {
        let a = walk("a", 0, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], &[4, 11]);
        let b = walk("a", 1, &[9, 3, 7, 1, 8, 2, 6, 5, 4, 10, 11, 12], &[9]);
        let rep = aggregate_report(&[a.clone(), b.clone()], &ReportOptions::default());
        let (x, y): (Vec<f64>, Vec<f64>) = portal_distance_series(&a)
            .into_iter()
            .chain(portal_distance_series(&b))
            .map(|(e, d)| (e, d as f64))
            .unzip();
        let expected = pearson(&x, &y).unwrap();
        let got = rep.size(5, 2).unwrap().portal_correlation.mean.unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn mean_of_means_weights_instances_equally() {
        let recs = vec![
            walk("a", 0, &[2, 2], &[]),
            walk("a", 1, &[4, 4], &[]),
            walk("b", 0, &[10, 10], &[]),
        ];
        let rep = aggregate_report(&recs, &ReportOptions::default());
        let s = rep.size(5, 2).unwrap();
        // instance means 3 and 10
        assert_eq!(s.neutral_degree.mean, Some(6.5));
        assert_eq!(s.short_walks, 3);
        assert_eq!(s.rho1_neutral_degree.mean, None);
        let total = s.t1_frequency.mean.unwrap() + s.t2_frequency.mean.unwrap() + s.t3_frequency.mean.unwrap();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn artifacts_have_expected_columns() {
        let rep = aggregate_report(&[walk("a", 0, &[1, 2, 3], &[1])], &ReportOptions::default());
        let arts = report_artifacts(&rep).unwrap();
        let names: Vec<&str> = arts.iter().map(|a| a.0).collect();
        assert!(names.contains(&"fig_portal_correlation.csv"));
        let ratio = &arts.iter().find(|a| a.0 == "fig2_ratio.csv").unwrap().1;
        assert!(ratio.starts_with("n_jobs,n_machines,mean,stddev\n5,2,"));
        assert!(render_text(&rep).contains("5x2"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rho_is_bounded(xs in proptest::collection::vec(-1000.0f64..1000.0, 5..80), lag in 1usize..3) {
            let ac = autocorrelation(&xs, lag).unwrap();
            for r in ac.rho {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }

        #[test]
        fn pearson_is_bounded(pairs in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 2..40)) {
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            if let Ok(r) = pearson(&x, &y) {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }
    }
}
