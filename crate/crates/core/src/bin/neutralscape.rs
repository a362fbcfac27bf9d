use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use neutralscape::experiment::{
    load_campaign_records, parse_sizes, run_analysis_campaign, run_generate, run_solver, CampaignConfig,
};
use neutralscape::search::{Acceptance, Algorithm, SearchConfig};
use neutralscape::stats::{aggregate_report, render_text, write_report_files, ReportOptions};
use neutralscape::{InstanceFormat, RngMode};

#[derive(Parser)]
#[command(name = "neutralscape", version, about = "Neutrality analysis of flowshop fitness landscapes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random instance files named <N>x<M>_<k>.txt.
    Generate {
        #[arg(short = 'n', long)]
        jobs: usize,
        #[arg(short = 'm', long)]
        machines: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "native")]
        rng: RngMode,
        #[arg(long, env = "NEUTRALSCAPE_OUT", default_value = "instances")]
        out: PathBuf,
    },
    /// Run neutral walks over generated instances and aggregate the statistics.
    Analyze {
        /// Comma separated sizes, e.g. 20x5,20x10.
        #[arg(long, default_value = "20x5,20x10,20x20")]
        sizes: String,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long, default_value_t = 30)]
        walks: usize,
        #[arg(long, default_value_t = 30)]
        descents: usize,
        #[arg(long, default_value_t = 10)]
        multiplier: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (0 = all cores). Output does not depend on it.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value = "native")]
        rng: RngMode,
        #[arg(long, default_value_t = 100)]
        null_repeats: usize,
        /// Start all walks of an instance from the same local optimum.
        #[arg(long)]
        shared_start: bool,
        #[arg(long, env = "NEUTRALSCAPE_OUT", default_value = "campaign")]
        out: PathBuf,
    },
    /// Run a solver on one instance file.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "ils")]
        algorithm: Algorithm,
        #[arg(long, default_value = "native")]
        format: InstanceFormat,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_evaluations: u64,
        #[arg(long, default_value_t = 3)]
        strength: usize,
        #[arg(long)]
        temperature: Option<f64>,
        #[arg(long, default_value = "metropolis")]
        acceptance: Acceptance,
        #[arg(long, default_value_t = 30)]
        max_neutral_steps: usize,
        /// Estimate evolvability from k sampled neighbors.
        #[arg(long)]
        sampled_evolvability: Option<usize>,
        /// Print the summary as JSON.
        #[arg(long)]
        json: bool,
        /// Write the search trajectory as JSON to this file.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Re-aggregate the CSV outputs of an earlier campaign.
    Report {
        dir: PathBuf,
        #[arg(long, default_value_t = 100)]
        null_repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also rewrite the report files into the campaign directory.
        #[arg(long)]
        write: bool,
    },
}

fn run(cli: Cli, buf: &mut String) -> neutralscape::Result<()> {
    use std::fmt::Write;
    match cli.command {
        Command::Generate { jobs, machines, count, seed, rng, out } => {
            for path in run_generate(jobs, machines, count, seed, rng, &out)? {
                let _ = writeln!(buf, "{}", path.display());
            }
        }
        Command::Analyze {
            sizes,
            instances,
            walks,
            descents,
            multiplier,
            seed,
            jobs,
            rng,
            null_repeats,
            shared_start,
            out,
        } => {
            let config = CampaignConfig {
                sizes: parse_sizes(&sizes)?,
                instances_per_size: instances,
                walks_per_instance: walks,
                descents_for_length_calibration: descents,
                walk_length_multiplier: multiplier,
                master_seed: seed,
                output_dir: out,
                rng_mode: rng,
                jobs,
                shared_start,
                null_repeats,
            };
            let output = run_analysis_campaign(&config)?;
            buf.push_str(&render_text(&output.report));
            log::info!("wrote {} files to {}", output.files.len(), config.output_dir.display());
        }
        Command::Solve {
            instance,
            algorithm,
            format,
            seed,
            max_evaluations,
            strength,
            temperature,
            acceptance,
            max_neutral_steps,
            sampled_evolvability,
            json,
            trajectory,
        } => {
            let config = SearchConfig {
                seed,
                max_evaluations,
                perturbation_strength: strength,
                metropolis_temperature: temperature,
                max_neutral_steps,
                acceptance,
                sampled_evolvability,
                record_trajectory: trajectory.is_some(),
            };
            let (result, summary) = run_solver(&instance, format, algorithm, &config)?;
            if let Some(path) = trajectory {
                let body = serde_json::to_string_pretty(&result.trajectory.unwrap_or_default())?;
                std::fs::write(&path, body + "\n").map_err(|e| neutralscape::Error::Io { path, source: e })?;
            }
            if json {
                let _ = writeln!(buf, "{}", serde_json::to_string_pretty(&summary)?);
            } else {
                let _ = writeln!(buf, "best_fitness {}", summary.best_fitness);
                let _ = writeln!(buf, "evaluations {}", summary.evaluations_used);
                let _ = writeln!(buf, "wall_seconds {:.3}", summary.wall_seconds);
                let _ = writeln!(buf, "permutation {}", summary.best_perm);
            }
        }
        Command::Report { dir, null_repeats, seed, write } => {
            let records = load_campaign_records(&dir)?;
            let opts = ReportOptions { null_repeats, seed, ..ReportOptions::default() };
            let report = aggregate_report(&records, &opts);
            if write {
                write_report_files(&report, &dir)?;
            }
            buf.push_str(&render_text(&report));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = String::new();
    match run(cli, &mut out) {
        Ok(()) => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(out.as_bytes()).and_then(|()| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
