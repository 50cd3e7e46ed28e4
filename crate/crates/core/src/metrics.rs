//! Trajectory metrics (AUC, final infection size, extinction time) and batch
//! statistics with 95% confidence intervals.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::simulator::Trajectory;

/// Normal 97.5% quantile.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("batch is empty")]
    EmptyBatch,
    #[error("trajectories disagree on {0}")]
    Mismatch(&'static str),
    #[error("time grid needs at least 2 points, got {0}")]
    Grid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    /// `∫ N_I(t) dt` over `[0, t_max]`, in node·time units.
    pub auc: f64,
    /// Infected count at the end of the run.
    pub fis: usize,
    /// First time `N_I` reached zero; `None` when censored at `t_max`.
    pub eet: Option<f64>,
}

impl RunMetrics {
    pub fn of(traj: &Trajectory) -> Self {
        RunMetrics {
            auc: auc(traj),
            fis: final_infection(traj),
            eet: extinction_time(traj),
        }
    }
}

/// Exact area under the piecewise-constant infected count, up to `final_time`.
pub fn auc(traj: &Trajectory) -> f64 {
    auc_between(traj, 0.0, traj.final_time)
}

/// Area under `N_I` restricted to `[from, to]`.
pub fn auc_between(traj: &Trajectory, from: f64, to: f64) -> f64 {
    let end = to.min(traj.final_time);
    let mut total = 0.0;
    let mut counts = traj.infected_counts().peekable();
    while let Some((start, count)) = counts.next() {
        let stop = counts.peek().map_or(traj.final_time, |&(t, _)| t);
        let lo = start.max(from);
        let hi = stop.min(end);
        if hi > lo {
            total += count as f64 * (hi - lo);
        }
    }
    total
}

pub fn final_infection(traj: &Trajectory) -> usize {
    traj.final_count()
}

pub fn extinction_time(traj: &Trajectory) -> Option<f64> {
    traj.infected_counts()
        .find(|&(_, count)| count == 0)
        .map(|(t, _)| t)
}

/// Infected count at time `t` (right-continuous).
pub fn count_at(traj: &Trajectory, t: f64) -> usize {
    traj.infected_counts()
        .take_while(|&(time, _)| time <= t)
        .last()
        .map_or(0, |(_, c)| c)
}

/// `points` equally spaced times covering `[0, t_max]`.
pub fn time_grid(t_max: f64, points: usize) -> Result<Vec<f64>, MetricsError> {
    if points < 2 {
        return Err(MetricsError::Grid(points));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            if k + 1 == points {
                t_max
            } else {
                t_max * k as f64 / last
            }
        })
        .collect())
}

/// Infected count at each grid time.
pub fn sample_curve(traj: &Trajectory, grid: &[f64]) -> Vec<usize> {
    let mut out = Vec::with_capacity(grid.len());
    let mut counts = traj.infected_counts().peekable();
    let mut current = traj.initial_count();
    for &t in grid {
        while let Some(&(time, count)) = counts.peek() {
            if time <= t {
                current = count;
                counts.next();
            } else {
                break;
            }
        }
        out.push(current);
    }
    out
}

/// Per-run summary kept by batch runners instead of the full event log.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub metrics: RunMetrics,
    pub curve: Vec<usize>,
}

impl RunRecord {
    pub fn new(traj: &Trajectory, grid: &[f64]) -> Self {
        RunRecord {
            metrics: RunMetrics::of(traj),
            curve: sample_curve(traj, grid),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CiMethod {
    /// `1.96 · s / √M` with the sample standard deviation `s`.
    Gaussian,
    /// Half the width of the 2.5–97.5 percentile interval of resampled means.
    Bootstrap { resamples: usize, seed: u64 },
}

/// Mean, sample standard deviation and 95% CI half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std: f64,
    pub ci_half_width: f64,
}

impl Estimate {
    pub fn gaussian(values: &[f64]) -> Estimate {
        let m = values.len() as f64;
        // Shifted by the first value so a constant sample has exactly zero spread.
        let shift = values.first().copied().unwrap_or(0.0);
        let mean = shift + values.iter().map(|v| v - shift).sum::<f64>() / m;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
        } else {
            0.0
        };
        Estimate {
            mean,
            std,
            ci_half_width: Z_95 * std / m.sqrt(),
        }
    }

    pub fn with_method(values: &[f64], method: CiMethod) -> Estimate {
        let gaussian = Estimate::gaussian(values);
        match method {
            CiMethod::Gaussian => gaussian,
            CiMethod::Bootstrap { resamples, seed } => Estimate {
                ci_half_width: bootstrap_half_width(values, resamples, seed),
                ..gaussian
            },
        }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.ci_half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.ci_half_width
    }
}

fn bootstrap_half_width(values: &[f64], resamples: usize, seed: u64) -> f64 {
    if values.len() < 2 || resamples == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| {
            let s: f64 = (0..values.len())
                .map(|_| values[rng.random_range(0..values.len())])
                .sum();
            s / values.len() as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let at = |q: f64| means[((q * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    (at(0.975) - at(0.025)) / 2.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub node_count: usize,
    pub t_max: f64,
    pub times: Vec<f64>,
    /// Mean infected fraction at each grid time.
    pub mean_fraction: Vec<f64>,
    pub ci_half_width: Vec<f64>,
    pub runs: Vec<RunMetrics>,
    pub auc: Estimate,
    pub fis: Estimate,
    /// Mean extinction time over the runs that went extinct.
    pub eet_mean: Option<f64>,
    pub censored: usize,
}

impl BatchSummary {
    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    pub fn from_records(
        records: &[RunRecord],
        node_count: usize,
        t_max: f64,
        times: Vec<f64>,
        method: CiMethod,
    ) -> Result<BatchSummary, MetricsError> {
        if records.is_empty() {
            return Err(MetricsError::EmptyBatch);
        }
        if records.iter().any(|r| r.curve.len() != times.len()) {
            return Err(MetricsError::Mismatch("grid length"));
        }
        let n = node_count.max(1) as f64;
        let mut mean_fraction = Vec::with_capacity(times.len());
        let mut ci_half_width = Vec::with_capacity(times.len());
        let mut column = vec![0.0; records.len()];
        for k in 0..times.len() {
            for (slot, r) in column.iter_mut().zip(records) {
                *slot = r.curve[k] as f64 / n;
            }
            let e = Estimate::with_method(&column, method);
            mean_fraction.push(e.mean);
            ci_half_width.push(e.ci_half_width);
        }
        let runs: Vec<RunMetrics> = records.iter().map(|r| r.metrics).collect();
        let aucs: Vec<f64> = runs.iter().map(|m| m.auc).collect();
        let fis: Vec<f64> = runs.iter().map(|m| m.fis as f64).collect();
        let extinct: Vec<f64> = runs.iter().filter_map(|m| m.eet).collect();
        Ok(BatchSummary {
            node_count,
            t_max,
            times,
            mean_fraction,
            ci_half_width,
            auc: Estimate::with_method(&aucs, method),
            fis: Estimate::with_method(&fis, method),
            eet_mean: (!extinct.is_empty())
                .then(|| extinct.iter().sum::<f64>() / extinct.len() as f64),
            censored: runs.len() - extinct.len(),
            runs,
        })
    }
}

/// Gaussian summary of complete trajectories sharing `N` and `t_max`.
pub fn batch_summary(
    trajectories: &[Trajectory],
    grid_points: usize,
) -> Result<BatchSummary, MetricsError> {
    let first = trajectories.first().ok_or(MetricsError::EmptyBatch)?;
    if trajectories
        .iter()
        .any(|t| t.node_count != first.node_count)
    {
        return Err(MetricsError::Mismatch("node count"));
    }
    if trajectories.iter().any(|t| t.t_max != first.t_max) {
        return Err(MetricsError::Mismatch("t_max"));
    }
    let grid = time_grid(first.t_max, grid_points)?;
    let records: Vec<RunRecord> = trajectories
        .iter()
        .map(|t| RunRecord::new(t, &grid))
        .collect();
    BatchSummary::from_records(
        &records,
        first.node_count,
        first.t_max,
        grid,
        CiMethod::Gaussian,
    )
}

/// Ratio of mean AUCs, `AUC(a) / AUC(b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AucRatio {
    Finite(f64),
    /// The competitor's mean AUC is zero.
    ZeroDenominator {
        numerator: f64,
    },
}

impl AucRatio {
    pub fn new(numerator: f64, denominator: f64) -> AucRatio {
        if denominator == 0.0 {
            AucRatio::ZeroDenominator { numerator }
        } else {
            AucRatio::Finite(numerator / denominator)
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            AucRatio::Finite(v) => Some(*v),
            AucRatio::ZeroDenominator { .. } => None,
        }
    }
}

impl fmt::Display for AucRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AucRatio::Finite(v) => write!(f, "{v}"),
            AucRatio::ZeroDenominator { numerator } if *numerator == 0.0 => f.write_str("nan"),
            AucRatio::ZeroDenominator { .. } => f.write_str("inf"),
        }
    }
}

pub fn auc_ratio(a: &BatchSummary, b: &BatchSummary) -> AucRatio {
    AucRatio::new(a.auc.mean, b.auc.mean)
}
