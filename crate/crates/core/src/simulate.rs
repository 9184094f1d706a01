//! Seeded Monte Carlo trajectories of a stochastic chain.
//!
//! Trajectory `k` draws from ChaCha8 seeded with `seed` on stream `k`, so a
//! report depends only on the configuration, not on thread scheduling.
//! Uniforms are `(next_u64 >> 11) · 2⁻⁵³`; each step inverts the cumulative
//! row over its nonzero entries in ascending column order.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::TransitionRows;
use crate::error::{Error, Result};

pub const ALGORITHM: &str = "chacha8-stream-per-trajectory/inverse-cdf-ascending-columns";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub seed: u64,
    pub n_trajectories: u64,
    pub horizon: usize,
    pub start: usize,
}

/// Empirical distribution of `X_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub n: usize,
    /// `(state, count)` for every visited state, ascending.
    pub counts: Vec<(usize, u64)>,
    pub total: u64,
}

impl Histogram {
    pub fn count(&self, state: usize) -> u64 {
        self.counts.iter().find(|(s, _)| *s == state).map_or(0, |(_, c)| *c)
    }

    pub fn frequency(&self, state: usize) -> f64 {
        self.count(state) as f64 / self.total as f64
    }

    pub fn frequencies(&self) -> Vec<(usize, f64)> {
        self.counts
            .iter()
            .map(|&(s, c)| (s, c as f64 / self.total as f64))
            .collect()
    }
}

/// First return to the start state within the horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReturnStats {
    pub returned: u64,
    /// Trajectories with no return by the horizon; excluded from the mean.
    pub censored: u64,
    /// `None` when no trajectory returned.
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub algorithm: &'static str,
    pub config: SimConfig,
    pub histograms: Vec<Histogram>,
    pub return_time: ReturnStats,
}

impl SimReport {
    pub fn histogram(&self, n: usize) -> Option<&Histogram> {
        self.histograms.iter().find(|h| h.n == n)
    }
}

/// `(empirical − expected) / √(p(1 − p)/n)`, with `expected` clamped to `[0, 1]`
/// so quadrature roundoff around impossible states does not produce NaN.
pub fn frequency_z_score(empirical: f64, expected: f64, n_trajectories: u64) -> f64 {
    let expected = expected.clamp(0.0, 1.0);
    let var = expected * (1.0 - expected) / n_trajectories as f64;
    if var == 0.0 {
        return if empirical == expected { 0.0 } else { f64::INFINITY };
    }
    (empirical - expected) / var.sqrt()
}

/// `(mean − expected) / std_error`, or `None` when no trajectory returned.
pub fn mean_z_score(stats: &ReturnStats, expected: f64) -> Option<f64> {
    let (mean, se) = (stats.mean?, stats.std_error?);
    if se == 0.0 {
        return Some(if mean == expected { 0.0 } else { f64::INFINITY });
    }
    Some((mean - expected) / se)
}

#[derive(Clone)]
struct Accumulator {
    counts: Vec<Vec<u64>>,
    returned: u64,
    sum: u64,
    sum_sq: u128,
}

impl Accumulator {
    fn new(checkpoints: usize, width: usize) -> Self {
        Self {
            counts: vec![vec![0; width]; checkpoints],
            returned: 0,
            sum: 0,
            sum_sq: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.returned += other.returned;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn run<C: TransitionRows + ?Sized>(chain: &C, config: SimConfig, checkpoints: &[usize]) -> Result<SimReport> {
    if !chain.is_stochastic() {
        return Err(Error::NotStochastic {
            reason: "simulation needs a stochastic chain".into(),
        });
    }
    if config.n_trajectories == 0 {
        return Err(Error::Parameter {
            name: "n_trajectories".into(),
            reason: "need at least one trajectory".into(),
        });
    }
    if let Some(&n) = checkpoints.iter().find(|&&n| n > config.horizon) {
        return Err(Error::Parameter {
            name: "checkpoints".into(),
            reason: format!("checkpoint {n} exceeds horizon {}", config.horizon),
        });
    }
    let reach = config.start + config.horizon * chain.bandwidth() + 1;
    let width = chain.scalar_size().map_or(reach, |m| reach.min(m));
    if config.start >= width {
        return Err(Error::OutOfRange {
            index: config.start,
            size: width,
        });
    }
    let rows: Vec<Vec<(usize, f64)>> = (0..width)
        .map(|s| {
            let mut acc = 0.0;
            chain.row_entries(s).map(|entries| {
                entries
                    .into_iter()
                    .map(|(c, v)| {
                        acc += v;
                        (c, acc)
                    })
                    .collect()
            })
        })
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = checkpoints.to_vec();
    order.sort_unstable();
    order.dedup();
    let last_checkpoint = order.last().copied().unwrap_or(0);

    let acc = (0..config.n_trajectories)
        .into_par_iter()
        .fold(
            || Accumulator::new(order.len(), width),
            |mut acc, k| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(k);
                let mut state = config.start;
                let mut next_cp = 0;
                let mut returned = false;
                for t in 0..=config.horizon {
                    if t > 0 {
                        let u = uniform(&mut rng);
                        let row = &rows[state];
                        state = row
                            .iter()
                            .find(|&&(_, cum)| u < cum)
                            .or(row.last())
                            .map(|&(c, _)| c)
                            .expect("stochastic rows are nonempty");
                        if !returned && state == config.start {
                            returned = true;
                            acc.returned += 1;
                            acc.sum += t as u64;
                            acc.sum_sq += (t as u128) * (t as u128);
                        }
                    }
                    while next_cp < order.len() && order[next_cp] == t {
                        acc.counts[next_cp][state] += 1;
                        next_cp += 1;
                    }
                    if returned && t >= last_checkpoint {
                        break;
                    }
                }
                acc
            },
        )
        .reduce(|| Accumulator::new(order.len(), width), Accumulator::merge);

    let histograms = order
        .iter()
        .zip(&acc.counts)
        .map(|(&n, counts)| Histogram {
            n,
            counts: counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(s, &c)| (s, c))
                .collect(),
            total: config.n_trajectories,
        })
        .collect();

    let (mean, std_error) = if acc.returned == 0 {
        (None, None)
    } else {
        let n = acc.returned as f64;
        let mean = acc.sum as f64 / n;
        let var = if acc.returned > 1 {
            (acc.sum_sq as f64 - n * mean * mean) / (n - 1.0)
        } else {
            0.0
        };
        (Some(mean), Some((var.max(0.0) / n).sqrt()))
    };

    Ok(SimReport {
        algorithm: ALGORITHM,
        config,
        histograms,
        return_time: ReturnStats {
            returned: acc.returned,
            censored: config.n_trajectories - acc.returned,
            mean,
            std_error,
        },
    })
}
