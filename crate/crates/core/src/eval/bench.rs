//! Steps per second of batched random play.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::compiler::CompiledGame;
use crate::engine::BatchEnv;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub batch_sizes: Vec<usize>,
    pub warmup_episodes: u64,
    pub episodes: u64,
    pub max_turns: u32,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { batch_sizes: vec![1, 8, 64, 512, 1024], warmup_episodes: 100, episodes: 500, max_turns: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputRow {
    pub game: String,
    pub batch_size: usize,
    pub steps_per_sec_mean: f64,
    pub steps_per_sec_std: f64,
    pub episodes: u64,
    pub warmup_episodes: u64,
    pub wall_time_sec: f64,
}

impl ThroughputRow {
    pub const CSV_HEADER: &'static str = "game,batch_size,steps_per_sec_mean,steps_per_sec_std,episodes";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.1},{:.1},{}",
            self.game, self.batch_size, self.steps_per_sec_mean, self.steps_per_sec_std, self.episodes
        )
    }

    pub fn tsv_row(&self) -> String {
        format!("{}\t{:.1}\t{:.1}", self.batch_size, self.steps_per_sec_mean, self.steps_per_sec_std)
    }
}

/// Number of timing windows the measured run is split into.
const WINDOWS: usize = 10;

/// Warms up, then times random play until `episodes` episodes have
/// finished. The mean and spread are over equal slices of the timed run.
pub fn benchmark_throughput(game: &Arc<CompiledGame>, cfg: &BenchConfig) -> Vec<ThroughputRow> {
    cfg.batch_sizes
        .iter()
        .map(|&b| {
            let mut env = BatchEnv::new(game.clone(), b, cfg.seed, cfg.max_turns);
            while env.episodes() < cfg.warmup_episodes {
                env.step_random();
            }
            let base_episodes = env.episodes();
            let mut samples: Vec<(f64, u64)> = Vec::new();
            let start = Instant::now();
            while env.episodes() - base_episodes < cfg.episodes || samples.len() < WINDOWS {
                let t = Instant::now();
                let s0 = env.steps();
                env.step_random();
                samples.push((t.elapsed().as_secs_f64(), env.steps() - s0));
            }
            let wall = start.elapsed().as_secs_f64();
            let per = samples.len() / WINDOWS;
            let rates: Vec<f64> = samples
                .chunks(per)
                .take(WINDOWS)
                .map(|w| {
                    let (t, s) = w.iter().fold((0.0, 0u64), |a, x| (a.0 + x.0, a.1 + x.1));
                    s as f64 / t.max(1e-9)
                })
                .collect();
            let mean = rates.iter().sum::<f64>() / rates.len() as f64;
            let std = (rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / rates.len() as f64).sqrt();
            ThroughputRow {
                game: game.name.clone(),
                batch_size: b,
                steps_per_sec_mean: mean,
                steps_per_sec_std: std,
                episodes: env.episodes() - base_episodes,
                warmup_episodes: cfg.warmup_episodes,
                wall_time_sec: wall,
            }
        })
        .collect()
}
