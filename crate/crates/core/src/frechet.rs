//! Fréchet distribution primitives and the maximum quasi-likelihood fit.
//!
//! The two-parameter score system is reduced to one dimension by profiling
//! out the scale: given the shape `a`, the scale score vanishes at
//! `sigma(a)^a = k / sum_i x_i^{-a}`. Substituting back leaves a strictly
//! decreasing profile score in `a`, which is root-solved with a bracketed
//! Newton iteration.

use rand::Rng;

use crate::blocks::{BlockMaximaSample, Scheme};
use crate::error::{Error, Result};

/// Fréchet shape/scale pair, both positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetParams {
    alpha: f64,
    sigma: f64,
}

impl FrechetParams {
    pub fn new(alpha: f64, sigma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::input(format!("shape must be positive, got {alpha}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::input(format!("scale must be positive, got {sigma}")));
        }
        Ok(FrechetParams { alpha, sigma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Root-solver diagnostics attached to a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverInfo {
    pub iterations: usize,
    /// Profile score at the returned shape.
    pub residual: f64,
    /// Final bracket used for the shape root.
    pub bracket: (f64, f64),
}

/// Result of the maximum quasi-likelihood fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FrechetFit {
    pub params: FrechetParams,
    /// Number of maxima the likelihood was summed over.
    pub k: usize,
    pub scheme: Scheme,
    pub r: usize,
    /// Source series length, needed for the effective sample size n/r.
    pub n: usize,
    /// Truncation constant applied to the maxima.
    pub truncation: f64,
    pub solver: SolverInfo,
}

impl FrechetFit {
    /// Effective number of blocks n/r used by the asymptotics.
    pub fn m_effective(&self) -> f64 {
        self.n as f64 / self.r as f64
    }
}

/// Fréchet cdf; zero for x <= 0 by convention.
pub fn cdf(params: FrechetParams, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (-(x / params.sigma).powf(-params.alpha)).exp()
}

/// Fréchet quantile, sigma * (-log p)^(-1/alpha), for p in (0, 1).
pub fn quantile(params: FrechetParams, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::input(format!("probability must be in (0,1), got {p}")));
    }
    Ok(params.sigma * (-p.ln()).powf(-1.0 / params.alpha))
}

/// Fréchet log-likelihood of a positive sample.
pub fn log_likelihood(sample: &[f64], params: FrechetParams) -> Result<f64> {
    let (alpha, sigma) = (params.alpha, params.sigma);
    let mut total = 0.0;
    for &x in sample {
        if !(x > 0.0) {
            return Err(Error::input(format!(
                "log-likelihood requires positive values, got {x}"
            )));
        }
        let z = x / sigma;
        total += alpha.ln() - sigma.ln() - (alpha + 1.0) * z.ln() - z.powf(-alpha);
    }
    Ok(total)
}

/// Draw `count` iid Fréchet variates by inverse-cdf sampling.
pub fn sample<R: Rng + ?Sized>(rng: &mut R, params: FrechetParams, count: usize) -> Vec<f64> {
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            params.sigma * (-u.ln()).powf(-1.0 / params.alpha)
        })
        .collect()
}

const REL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;

/// Shape and scale scores of the raw (unprofiled) likelihood, for
/// verifying stationarity of a fitted pair.
pub fn score(sample: &[f64], params: FrechetParams) -> (f64, f64) {
    let (alpha, sigma) = (params.alpha, params.sigma);
    let mut d_alpha = 0.0;
    let mut d_sigma = 0.0;
    for &x in sample {
        let z = x / sigma;
        let zl = z.ln();
        let zp = z.powf(-alpha);
        d_alpha += 1.0 / alpha - zl + zp * zl;
        d_sigma += alpha / sigma - alpha / sigma * zp;
    }
    (d_alpha, d_sigma)
}

/// Profile score and its derivative in the shape, on shifted logs.
///
/// Weights are computed relative to the smallest observation so that
/// `x^{-alpha}` never over- or underflows for extreme shapes.
fn profile_score(logs: &[f64], log_min: f64, alpha: f64) -> (f64, f64) {
    let k = logs.len() as f64;
    let mut w_sum = 0.0;
    let mut wl_sum = 0.0;
    let mut wll_sum = 0.0;
    let mut l_sum = 0.0;
    for &l in logs {
        let w = (-alpha * (l - log_min)).exp();
        w_sum += w;
        wl_sum += w * l;
        wll_sum += w * l * l;
        l_sum += l;
    }
    let mean_wl = wl_sum / w_sum;
    let var_wl = (wll_sum / w_sum - mean_wl * mean_wl).max(0.0);
    let phi = k / alpha - l_sum + k * mean_wl;
    let dphi = -k / (alpha * alpha) - k * var_wl;
    (phi, dphi)
}

fn profiled_sigma(logs: &[f64], log_min: f64, alpha: f64) -> f64 {
    let k = logs.len() as f64;
    let w_sum: f64 = logs.iter().map(|&l| (-alpha * (l - log_min)).exp()).sum();
    (log_min + (k.ln() - w_sum.ln()) / alpha).exp()
}

/// Method-of-moments seed: Var(log X) = pi^2 / (6 alpha^2) for the Fréchet.
fn moment_guess(logs: &[f64]) -> f64 {
    let k = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / k;
    let var = logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / k;
    if var > 0.0 {
        std::f64::consts::PI / (6.0 * var).sqrt()
    } else {
        1.0
    }
}

/// Maximum quasi-likelihood fit of a Fréchet distribution to block maxima.
///
/// `truncation` records the left-truncation constant already applied to the
/// sample (it is not re-applied here).
pub fn fit(sample: &BlockMaximaSample, truncation: f64) -> Result<FrechetFit> {
    let (alpha, sigma, solver) = fit_values(sample.maxima())?;
    Ok(FrechetFit {
        params: FrechetParams::new(alpha, sigma)?,
        k: sample.len(),
        scheme: sample.scheme,
        r: sample.r,
        n: sample.n,
        truncation,
        solver,
    })
}

/// The fit on a raw slice of positive maxima. Returns (alpha, sigma, diagnostics).
pub fn fit_values(values: &[f64]) -> Result<(f64, f64, SolverInfo)> {
    if values.len() < 2 {
        return Err(Error::input(format!(
            "fit requires at least 2 maxima, got {}",
            values.len()
        )));
    }
    for &x in values {
        if !(x > 0.0) {
            return Err(Error::input(format!(
                "fit requires positive maxima, got {x}"
            )));
        }
    }
    if values.iter().all(|&x| x == values[0]) {
        return Err(Error::DegenerateSample {
            value: values[0],
            count: values.len(),
        });
    }

    let logs: Vec<f64> = values.iter().map(|x| x.ln()).collect();
    let log_min = logs.iter().cloned().fold(f64::INFINITY, f64::min);

    // The profile score is strictly decreasing, so a sign change brackets
    // the unique root. Expand geometrically from [1e-3, 1e3] if needed.
    let mut lo = 1e-3;
    let mut hi = 1e3;
    while profile_score(&logs, log_min, lo).0 <= 0.0 && lo > 1e-6 {
        lo *= 1e-1;
    }
    while profile_score(&logs, log_min, hi).0 >= 0.0 && hi < 1e6 {
        hi *= 10.0;
    }
    let (phi_lo, _) = profile_score(&logs, log_min, lo);
    let (phi_hi, _) = profile_score(&logs, log_min, hi);
    if !(phi_lo > 0.0 && phi_hi < 0.0) {
        return Err(Error::NoConvergence {
            reason: "profile score has no sign change in the expanded bracket".into(),
            lo,
            hi,
        });
    }
    let bracket = (lo, hi);

    let mut alpha = moment_guess(&logs).clamp(lo, hi);
    let mut iterations = 0;
    let mut residual;
    loop {
        let (phi, dphi) = profile_score(&logs, log_min, alpha);
        residual = phi;
        iterations += 1;
        // shrink the bracket around the root
        if phi > 0.0 {
            lo = alpha;
        } else {
            hi = alpha;
        }
        if (hi - lo) <= REL_TOL * alpha || phi == 0.0 {
            break;
        }
        if iterations >= MAX_ITER {
            return Err(Error::NoConvergence {
                reason: format!("no convergence after {MAX_ITER} iterations"),
                lo,
                hi,
            });
        }
        // Newton step, safeguarded by bisection when it leaves the bracket
        let next = alpha - phi / dphi;
        alpha = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }

    let sigma = profiled_sigma(&logs, log_min, alpha);
    Ok((
        alpha,
        sigma,
        SolverInfo {
            iterations,
            residual,
            bracket,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{sliding_maxima, TimeSeries};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(a: f64, s: f64) -> FrechetParams {
        FrechetParams::new(a, s).unwrap()
    }

    #[test]
    fn cdf_examples() {
        let e1 = (-1.0f64).exp();
        assert!((cdf(params(1.0, 1.0), 1.0) - e1).abs() < 1e-15);
        assert!((cdf(params(3.7, 2.5), 2.5) - e1).abs() < 1e-15);
        // alpha=2, sigma=3, x=6 -> exp(-2^{-2}) = e^{-1/4}
        assert!((cdf(params(2.0, 3.0), 6.0) - (-0.25f64).exp()).abs() < 1e-15);
        assert_eq!(cdf(params(1.0, 1.0), 0.0), 0.0);
        assert_eq!(cdf(params(1.0, 1.0), -3.0), 0.0);
    }

    #[test]
    fn quantile_examples() {
        let p = params(1.0, 1.0);
        assert!((quantile(p, (-1.0f64).exp()).unwrap() - 1.0).abs() < 1e-14);
        assert!((quantile(p, 0.5).unwrap() - 1.0 / 2f64.ln()).abs() < 1e-14);
        assert!(quantile(p, 0.0).is_err());
        assert!(quantile(p, 1.0).is_err());
        // roundtrip on a grid
        let pp = params(2.5, 0.7);
        for i in 1..20 {
            let prob = i as f64 / 20.0;
            let q = quantile(pp, prob).unwrap();
            assert!((cdf(pp, q) - prob).abs() < 1e-12);
        }
    }

    #[test]
    fn log_likelihood_closed_forms() {
        // single point x = sigma, alpha = 1: log(1/sigma) - 1
        for s in [0.5, 1.0, 2.0] {
            let ll = log_likelihood(&[s], params(1.0, s)).unwrap();
            assert!((ll - ((1.0 / s).ln() - 1.0)).abs() < 1e-14);
        }
        // scale change of variables
        let xs = [0.7, 1.3, 2.9, 4.2];
        let c = 3.0;
        let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
        let base = log_likelihood(&xs, params(1.7, 0.9)).unwrap();
        let moved = log_likelihood(&scaled, params(1.7, c * 0.9)).unwrap();
        assert!((moved - (base - xs.len() as f64 * c.ln())).abs() < 1e-12);
        assert!(log_likelihood(&[1.0, -2.0], params(1.0, 1.0)).is_err());
    }

    #[test]
    fn fit_small_sample_scores_vanish() {
        let (a, s, info) = fit_values(&[1.0, 2.0, 4.0]).unwrap();
        // frozen values from an independent 2-D grid search refined to 1e-6
        assert!((a - 2.0124980).abs() < 1e-6, "alpha = {a}");
        assert!((s - 1.5098294).abs() < 1e-6, "sigma = {s}");
        let (da, ds) = score(&[1.0, 2.0, 4.0], params(a, s));
        assert!(da.abs() < 1e-8, "shape score {da}");
        assert!(ds.abs() < 1e-8, "scale score {ds}");
        assert!(info.residual.abs() < 1e-8);
        // perturbing alpha off the root decreases the profile likelihood
        let ll_hat = log_likelihood(&[1.0, 2.0, 4.0], params(a, s)).unwrap();
        for da in [-0.05, 0.05] {
            let ap = a + da;
            let logs: Vec<f64> = [1.0f64, 2.0, 4.0].iter().map(|x| x.ln()).collect();
            let sp = super::profiled_sigma(&logs, 0.0, ap);
            let ll = log_likelihood(&[1.0, 2.0, 4.0], params(ap, sp)).unwrap();
            assert!(ll < ll_hat);
        }
    }

    #[test]
    fn fit_degenerate_sample() {
        match fit_values(&[3.0, 3.0, 3.0]) {
            Err(Error::DegenerateSample { value, count }) => {
                assert_eq!(value, 3.0);
                assert_eq!(count, 3);
            }
            other => panic!("expected degenerate error, got {other:?}"),
        }
        assert!(fit_values(&[1.0]).is_err());
    }

    #[test]
    fn fit_scale_equivariance_exact() {
        let xs = [0.3, 1.1, 2.2, 5.5, 0.9];
        let (a, s, _) = fit_values(&xs).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| 5.0 * x).collect();
        let (a5, s5, _) = fit_values(&scaled).unwrap();
        assert!((a5 - a).abs() < 1e-10 * a);
        assert!((s5 - 5.0 * s).abs() < 1e-9 * s);
    }

    #[test]
    fn fit_power_equivariance() {
        let xs = [0.3, 1.1, 2.2, 5.5, 0.9];
        let beta = 2.5;
        let (a, s, _) = fit_values(&xs).unwrap();
        let powered: Vec<f64> = xs.iter().map(|x| x.powf(1.0 / beta)).collect();
        let (ab, sb, _) = fit_values(&powered).unwrap();
        assert!((ab - beta * a).abs() < 1e-8 * a, "{ab} vs {}", beta * a);
        assert!((sb - s.powf(1.0 / beta)).abs() < 1e-8, "{sb}");
    }

    #[test]
    fn sampling_and_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = params(1.0, 1.0);
        assert!(sample(&mut rng, p, 0).is_empty());

        let draws = sample(&mut rng, p, 100_000);
        let below = draws.iter().filter(|&&x| x <= 1.0).count() as f64 / 1e5;
        assert!((below - (-1.0f64).exp()).abs() < 4.0 / (1e5f64).sqrt());

        let (a, s, _) = fit_values(&draws).unwrap();
        assert!((0.97..1.03).contains(&a), "alpha = {a}");
        assert!((0.97..1.03).contains(&s), "sigma = {s}");

        // determinism under a fixed seed
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        assert_eq!(sample(&mut r1, p, 10), sample(&mut r2, p, 10));
    }

    #[test]
    fn fit_through_block_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let series = TimeSeries::new(sample(&mut rng, params(1.0, 1.0), 2000)).unwrap();
        let maxima = sliding_maxima(&series, 20).unwrap();
        let f = fit(&maxima, crate::blocks::default_truncation()).unwrap();
        assert_eq!(f.k, 1981);
        assert_eq!(f.r, 20);
        assert_eq!(f.n, 2000);
        assert!(f.params.alpha() > 0.5 && f.params.alpha() < 2.0);
    }
}
