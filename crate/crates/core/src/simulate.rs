//! Data generators, the Hill comparator, and the Monte Carlo experiment
//! harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::blocks::{self, TimeSeries};
use crate::error::{Error, Result};
use crate::frechet;

/// Innovation distribution of the generator, parameterized by tail index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Innovation {
    /// Unit-scale Fréchet with shape alpha.
    Frechet,
    /// Standard Pareto: survival x^{-alpha} on [1, inf).
    Pareto,
    /// Absolute value of a Student t with alpha degrees of freedom.
    AbsT,
}

impl std::fmt::Display for Innovation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Innovation::Frechet => "frechet",
            Innovation::Pareto => "pareto",
            Innovation::AbsT => "abs_t",
        })
    }
}

/// Serial-dependence structure of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Iid,
    /// Max-autoregression X_t = max(beta X_{t-1}, (1-beta) Z_t).
    Armax,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Iid => "iid",
            Family::Armax => "armax",
        })
    }
}

/// Full description of a synthetic data-generating process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub innovation: Innovation,
    /// Tail index of the innovations (and of the series).
    pub alpha: f64,
    /// ARMAX coefficient; ignored for the iid family.
    pub beta: f64,
    /// Pre-samples discarded before recording, for the ARMAX recursion.
    pub burn_in: usize,
}

impl GeneratorSpec {
    pub fn new(family: Family, innovation: Innovation, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::input(format!("alpha must be positive, got {alpha}")));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::input(format!("beta must lie in [0,1), got {beta}")));
        }
        Ok(GeneratorSpec {
            family,
            innovation,
            alpha,
            beta,
            burn_in: 200,
        })
    }

    pub fn iid(innovation: Innovation, alpha: f64) -> Result<Self> {
        Self::new(Family::Iid, innovation, alpha, 0.0)
    }

    pub fn armax(innovation: Innovation, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::Armax, innovation, alpha, beta)
    }
}

fn draw_innovation<R: Rng + ?Sized>(rng: &mut R, innovation: Innovation, alpha: f64) -> f64 {
    match innovation {
        Innovation::Frechet => {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            (-u.ln()).powf(-1.0 / alpha)
        }
        Innovation::Pareto => {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            u.powf(-1.0 / alpha)
        }
        Innovation::AbsT => {
            let z: f64 = rng.sample(StandardNormal);
            // chi^2_alpha as Gamma(alpha/2, scale 2); valid for non-integer alpha
            let chi2 = Gamma::new(alpha / 2.0, 2.0).unwrap().sample(rng);
            (z / (chi2 / alpha).sqrt()).abs()
        }
    }
}

/// Generate a series of length `n` from the given process. Deterministic for
/// a fixed generator state.
pub fn generate<R: Rng + ?Sized>(rng: &mut R, spec: &GeneratorSpec, n: usize) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::input("cannot generate an empty series".to_string()));
    }
    let values = match spec.family {
        Family::Iid => (0..n)
            .map(|_| draw_innovation(rng, spec.innovation, spec.alpha))
            .collect(),
        Family::Armax => {
            let scale = 1.0 - spec.beta;
            let mut x = scale * draw_innovation(rng, spec.innovation, spec.alpha);
            for _ in 0..spec.burn_in {
                x = (spec.beta * x).max(scale * draw_innovation(rng, spec.innovation, spec.alpha));
            }
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                x = (spec.beta * x).max(scale * draw_innovation(rng, spec.innovation, spec.alpha));
                out.push(x);
            }
            out
        }
    };
    TimeSeries::new(values)
}

/// Hill estimator of the tail index from the top `m` order statistics:
/// alpha_hat = m / sum_{i=1..m} log(X_(n-i+1) / X_(n-m)).
pub fn hill(sample: &[f64], m: usize) -> Result<f64> {
    let n = sample.len();
    if m < 2 || m >= n {
        return Err(Error::input(format!(
            "hill needs 2 <= m < n, got m={m}, n={n}"
        )));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let threshold = sorted[n - m - 1];
    if !(threshold > 0.0) {
        return Err(Error::Estimation(format!(
            "hill threshold must be positive, got {threshold}"
        )));
    }
    let log_sum: f64 = sorted[n - m..].iter().map(|x| (x / threshold).ln()).sum();
    if !(log_sum > 0.0) {
        return Err(Error::Estimation(format!(
            "degenerate hill log-sum {log_sum}"
        )));
    }
    Ok(m as f64 / log_sum)
}

/// Which estimator a Monte Carlo cell refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    Sliding,
    Disjoint,
    Hill,
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Estimator::Sliding => "sliding",
            Estimator::Disjoint => "disjoint",
            Estimator::Hill => "hill",
        })
    }
}

/// Monte Carlo experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub n: usize,
    pub estimators: Vec<Estimator>,
    /// Effective sizes m: blocks use r = n/m (integer division); Hill uses
    /// the top m order statistics.
    pub grid: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    /// Left-truncation constant applied to block maxima before fitting.
    pub truncation: f64,
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::input(format!("sample length too small: {}", self.n)));
        }
        if self.reps < 1 {
            return Err(Error::input("reps must be >= 1".to_string()));
        }
        if self.estimators.is_empty() || self.grid.is_empty() {
            return Err(Error::input(
                "estimator set and grid must be non-empty".to_string(),
            ));
        }
        for &m in &self.grid {
            if m < 2 || m > self.n {
                return Err(Error::input(format!(
                    "grid entry m={m} invalid for n={}",
                    self.n
                )));
            }
        }
        Ok(())
    }
}

/// One aggregated cell of a Monte Carlo experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McCell {
    pub estimator: Estimator,
    /// Effective size (number of blocks, or top order statistics for Hill).
    pub m: usize,
    /// Block length n/m; equals m's complement for blocks, and n/m for the
    /// Hill rows so that block and Hill rows align on the same axis.
    pub r: usize,
    pub mean: f64,
    pub bias2: f64,
    pub variance: f64,
    pub mse: f64,
    /// Replications whose fit failed; excluded from the moments.
    pub failures: usize,
    /// False when failures reached 1% of reps.
    pub valid: bool,
}

/// Aggregated results plus the metadata needed to reproduce them.
#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub cells: Vec<McCell>,
    pub reps: usize,
    pub seed: u64,
    /// RNG family used for the per-replication streams.
    pub rng_family: &'static str,
}

fn replication_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

fn fit_shape_for_cell(
    series: &TimeSeries,
    estimator: Estimator,
    m: usize,
    truncation: f64,
) -> Result<f64> {
    match estimator {
        Estimator::Hill => hill(series.values(), m),
        Estimator::Sliding | Estimator::Disjoint => {
            let r = series.len() / m;
            if r < 1 {
                return Err(Error::input(format!("block length 0 for m={m}")));
            }
            let sample = match estimator {
                Estimator::Sliding => blocks::sliding_maxima(series, r)?,
                _ => blocks::disjoint_maxima(series, r)?,
            };
            let sample = blocks::left_truncate(&sample, truncation)?;
            Ok(frechet::fit(&sample, truncation)?.params.alpha())
        }
    }
}

/// Run the Monte Carlo experiment. Replications are independent streams of
/// the counter-based RNG, so the result does not depend on thread count.
pub fn run_mc(config: &McConfig, spec: &GeneratorSpec) -> Result<McResult> {
    config.validate()?;
    let cells: Vec<(Estimator, usize)> = config
        .estimators
        .iter()
        .flat_map(|&e| config.grid.iter().map(move |&m| (e, m)))
        .collect();

    // per replication: one shape estimate (or failure) per cell, collected in
    // replication order
    let per_rep: Vec<Vec<Option<f64>>> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(config.seed, rep);
            match generate(&mut rng, spec, config.n) {
                Ok(series) => cells
                    .iter()
                    .map(|&(e, m)| fit_shape_for_cell(&series, e, m, config.truncation).ok())
                    .collect(),
                Err(_) => vec![None; cells.len()],
            }
        })
        .collect();

    let reps = config.reps as f64;
    let mut out = Vec::with_capacity(cells.len());
    for (idx, &(estimator, m)) in cells.iter().enumerate() {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for rep in &per_rep {
            if let Some(a) = rep[idx] {
                count += 1;
                sum += a;
                sum_sq += a * a;
            }
        }
        let failures = config.reps - count;
        let valid = (failures as f64) < 0.01 * reps && count > 0;
        let (mean, bias2, variance) = if count > 0 {
            let c = count as f64;
            let mean = sum / c;
            let b = mean - spec.alpha;
            (mean, b * b, (sum_sq / c - mean * mean).max(0.0))
        } else {
            (f64::NAN, f64::NAN, f64::NAN)
        };
        out.push(McCell {
            estimator,
            m,
            r: config.n / m,
            mean,
            bias2,
            variance,
            mse: bias2 + variance,
            failures,
            valid,
        });
    }
    Ok(McResult {
        cells: out,
        reps: config.reps,
        seed: config.seed,
        rng_family: "chacha8 (per-replication streams)",
    })
}

/// One row of an estimator-trajectory table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub r: usize,
    /// Hill effective size n/r paired with this block length.
    pub m_hill: usize,
    pub sliding: Option<f64>,
    pub disjoint: Option<f64>,
    pub hill: Option<f64>,
}

/// Shape-estimate trajectories over a grid of block lengths, for one series.
pub fn trajectory(series: &TimeSeries, r_grid: &[usize], truncation: f64) -> Result<Vec<TrajectoryRow>> {
    if r_grid.is_empty() {
        return Err(Error::input("empty block-length grid".to_string()));
    }
    let n = series.len();
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if r < 1 || r > n {
            return Err(Error::input(format!("block length {r} invalid for n={n}")));
        }
        let m_hill = n / r;
        let fit_with = |sample: crate::error::Result<crate::blocks::BlockMaximaSample>| {
            sample
                .and_then(|s| blocks::left_truncate(&s, truncation))
                .and_then(|s| frechet::fit(&s, truncation))
                .ok()
                .map(|f| f.params.alpha())
        };
        rows.push(TrajectoryRow {
            r,
            m_hill,
            sliding: fit_with(blocks::sliding_maxima(series, r)),
            disjoint: fit_with(blocks::disjoint_maxima(series, r)),
            hill: hill(series.values(), m_hill).ok(),
        });
    }
    Ok(rows)
}
