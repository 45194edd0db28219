//! Game-quality heuristics and throughput measurement.

pub mod bench;
pub mod gavel;

pub use bench::{benchmark_throughput, BenchConfig, ThroughputRow};
pub use gavel::{evaluate_compiled, evaluate_game, GavelConfig, GavelReport, HeuristicScores, MatchStats};
