//! Batch benchmark protocol: warm-up, then several batch sizes each run a
//! fixed number of times, averaged per size and then across sizes.

use std::time::Instant;

use montsim::designs::{resource_report, DesignConfig, Simulator};
use montsim::FieldElement;
use serde::Serialize;
use thiserror::Error;

use crate::vectors::operand_pairs;

pub const DEFAULT_BATCHES: [usize; 5] = [100_000, 200_000, 250_000, 500_000, 1_000_000];
pub const DEFAULT_ITERATIONS: usize = 10;
pub const DEFAULT_WARMUP: Warmup = Warmup {
    batches: 100,
    size: 10_000,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Warmup {
    pub batches: usize,
    pub size: usize,
}

impl std::str::FromStr for Warmup {
    type Err = String;

    /// `NxM`: `N` batches of `M` operations.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, m) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected NxM, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
        Ok(Warmup {
            batches: parse(n)?,
            size: parse(m)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub config: DesignConfig,
    pub batch_sizes: Vec<usize>,
    pub iterations: usize,
    pub warmup: Warmup,
    pub frequency_hz: f64,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(config: DesignConfig, frequency_hz: f64) -> Self {
        BenchConfig {
            config,
            batch_sizes: DEFAULT_BATCHES.to_vec(),
            iterations: DEFAULT_ITERATIONS,
            warmup: DEFAULT_WARMUP,
            frequency_hz,
            seed: 1,
        }
    }

    /// Operand pairs the protocol needs.
    pub fn vectors_needed(&self) -> usize {
        self.batch_sizes
            .iter()
            .copied()
            .chain(std::iter::once(if self.warmup.batches > 0 {
                self.warmup.size
            } else {
                0
            }))
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("need {needed} operand pairs, only {available} available")]
    InsufficientVectors { needed: usize, available: usize },
    #[error("batch sizes and iterations must be non-zero")]
    EmptyProtocol,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchStat {
    pub size: usize,
    pub mean_cycles: f64,
    pub mean_wall_s: f64,
    /// `size * f / mean_cycles`.
    pub sim_ops_per_s: f64,
    /// Host speed of the simulator itself; informational.
    pub wall_ops_per_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub config: String,
    pub frequency_mhz: f64,
    /// Cycles between results in steady state.
    pub interval: u64,
    /// `f / interval`.
    pub ideal_ops_per_s: f64,
    pub batches: Vec<BatchStat>,
    pub mean_sim_ops_per_s: f64,
    pub mean_wall_ops_per_s: f64,
}

pub fn pairs_from_seed(seed: u64, n: usize, config: DesignConfig) -> Vec<(FieldElement, FieldElement)> {
    operand_pairs(seed, n)
        .into_iter()
        .map(|(a, b)| {
            (
                FieldElement::from_biguint(&a, config.word).expect("below p"),
                FieldElement::from_biguint(&b, config.word).expect("below p"),
            )
        })
        .collect()
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn run(bench: &BenchConfig, pairs: &[(FieldElement, FieldElement)]) -> Result<BenchReport, BenchError> {
    if bench.batch_sizes.is_empty() || bench.batch_sizes.contains(&0) || bench.iterations == 0 {
        return Err(BenchError::EmptyProtocol);
    }
    let needed = bench.vectors_needed();
    if pairs.len() < needed {
        return Err(BenchError::InsufficientVectors {
            needed,
            available: pairs.len(),
        });
    }
    let f = bench.frequency_hz;

    for _ in 0..bench.warmup.batches {
        Simulator::new(bench.config).run_batch(&pairs[..bench.warmup.size]);
    }

    let mut batches = Vec::with_capacity(bench.batch_sizes.len());
    for &size in &bench.batch_sizes {
        let mut cycles = Vec::with_capacity(bench.iterations);
        let mut wall = Vec::with_capacity(bench.iterations);
        for _ in 0..bench.iterations {
            let mut sim = Simulator::new(bench.config);
            let start = Instant::now();
            let run = sim.run_batch(&pairs[..size]);
            wall.push(start.elapsed().as_secs_f64());
            cycles.push(run.cycles as f64);
        }
        let mean_cycles = mean(cycles.into_iter());
        let mean_wall_s = mean(wall.into_iter());
        batches.push(BatchStat {
            size,
            mean_cycles,
            mean_wall_s,
            sim_ops_per_s: size as f64 * f / mean_cycles,
            wall_ops_per_s: if mean_wall_s > 0.0 {
                size as f64 / mean_wall_s
            } else {
                0.0
            },
        });
    }

    let steady = resource_report(bench.config, f);
    Ok(BenchReport {
        config: bench.config.label(),
        frequency_mhz: f / 1e6,
        interval: steady.pipeline_interval,
        ideal_ops_per_s: steady.ideal_throughput,
        mean_sim_ops_per_s: mean(batches.iter().map(|b| b.sim_ops_per_s)),
        mean_wall_ops_per_s: mean(batches.iter().map(|b| b.wall_ops_per_s)),
        batches,
    })
}
