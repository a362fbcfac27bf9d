//! Permutation flowshop (`F/perm/C_max`) toolkit focused on landscape
//! neutrality: makespan evaluation with accelerated insertion scans,
//! neutral walks with portal and evolvability statistics, and solvers that
//! exploit neutral networks.

pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod instance;
pub mod landscape;
pub mod neighborhood;
pub mod rng;
pub mod search;
pub mod stats;

pub use error::{Error, Result};
pub use evaluation::{build_eval_state, makespan, scan_insertions, EvalState, Evaluator, Makespan, Permutation};
pub use instance::{generate_instance, parse_instance, write_instance, Instance, InstanceFormat, RngMode};
pub use landscape::{neutral_walk, summarize_neighborhood, NeighborhoodSummary, Typology, WalkRecord};
pub use neighborhood::{apply_move, enumerate_insertion_moves, random_move, Move, MoveKind};
pub use search::{Acceptance, Algorithm, SearchConfig, SearchResult};
pub use stats::{aggregate_report, LandscapeReport, ReportOptions};
