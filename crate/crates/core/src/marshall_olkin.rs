//! The bivariate limit law of overlapping block maxima, its Marshall--Olkin
//! representation on the exponential scale, the six covariance functionals
//! needed by the asymptotic tables, and Monte Carlo oracles for them.

use rand::Rng;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{APERY, EULER_GAMMA, PI_SQ_OVER_6, PSI_2, PSI_PRIME_2};

/// Overlap parameter of the Marshall--Olkin pair, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoParam {
    xi: f64,
}

impl MoParam {
    pub fn new(xi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::input(format!("xi must lie in [0,1], got {xi}")));
        }
        Ok(MoParam { xi })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

/// Pickands dependence function of the Marshall--Olkin pair:
/// A_xi(w) = 1 - (1 - xi) min(w, 1-w).
pub fn pickands(xi: f64, w: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::input(format!("xi must lie in [0,1], got {xi}")));
    }
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::input(format!("w must lie in [0,1], got {w}")));
    }
    Ok(pickands_unchecked(xi, w))
}

#[inline]
fn pickands_unchecked(xi: f64, w: f64) -> f64 {
    1.0 - (1.0 - xi) * w.min(1.0 - w)
}

/// Joint limit cdf of a pair of sliding block maxima whose starting points
/// are separated by a fraction xi of the block length. Margins are unit
/// Fréchet with shape alpha0; xi >= 1 gives independence.
pub fn joint_cdf(alpha0: f64, xi: f64, x: f64, y: f64) -> Result<f64> {
    if !(alpha0 > 0.0) {
        return Err(Error::input(format!("alpha0 must be positive, got {alpha0}")));
    }
    if xi < 0.0 {
        return Err(Error::input(format!("xi must be >= 0, got {xi}")));
    }
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::input(format!(
            "joint cdf requires positive coordinates, got ({x}, {y})"
        )));
    }
    let xp = x.powf(-alpha0);
    let yp = y.powf(-alpha0);
    if xi >= 1.0 {
        return Ok((-xp - yp).exp());
    }
    // (x min y)^{-alpha0} = max of the two transforms
    Ok((-(xi * xp + (1.0 - xi) * xp.max(yp) + xi * yp)).exp())
}

/// Draw a Marshall--Olkin pair with unit exponential margins:
/// S = min(E1/xi, E0/(1-xi)), T = min(E2/xi, E0/(1-xi)).
///
/// Always consumes exactly three exponentials so that seeded streams stay
/// aligned across xi values.
pub fn sample_pair<R: Rng + ?Sized>(rng: &mut R, param: MoParam) -> (f64, f64) {
    let e0 = exp1(rng);
    let e1 = exp1(rng);
    let e2 = exp1(rng);
    let xi = param.xi;
    if xi <= 0.0 {
        return (e0, e0);
    }
    if xi >= 1.0 {
        return (e1, e2);
    }
    let shared = e0 / (1.0 - xi);
    ((e1 / xi).min(shared), (e2 / xi).min(shared))
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    -u.ln()
}

/// The six covariance functionals Cov(S^a (log S)^k, T^b (log T)^l) that
/// enter the sliding-blocks covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HCase {
    /// Cov(S, T)
    SxT,
    /// Cov(S, T log T)
    SxTLogT,
    /// Cov(S log S, T log T)
    SLogSxTLogT,
    /// Cov(S, log T)
    SxLogT,
    /// Cov(S log S, log T)
    SLogSxLogT,
    /// Cov(log S, log T)
    LogSxLogT,
}

impl HCase {
    pub const ALL: [HCase; 6] = [
        HCase::SxT,
        HCase::SxTLogT,
        HCase::SLogSxTLogT,
        HCase::SxLogT,
        HCase::SLogSxLogT,
        HCase::LogSxLogT,
    ];

    /// The (k, l, a, b) exponents of the pair of moments.
    pub fn indices(&self) -> (u8, u8, u8, u8) {
        match self {
            HCase::SxT => (0, 0, 1, 1),
            HCase::SxTLogT => (0, 1, 1, 1),
            HCase::SLogSxTLogT => (1, 1, 1, 1),
            HCase::SxLogT => (0, 1, 1, 0),
            HCase::SLogSxLogT => (1, 1, 1, 0),
            HCase::LogSxLogT => (1, 1, 0, 0),
        }
    }
}

impl std::fmt::Display for HCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (k, l, a, b) = self.indices();
        write!(f, "H{k}{l}({a},{b})")
    }
}

/// Integrand over w of the covariance functional, for a given xi.
fn h_integrand(case: HCase, xi: f64, w: f64) -> f64 {
    let a = pickands_unchecked(xi, w);
    let la = a.ln();
    match case {
        HCase::SxT => 1.0 / (a * a) - 1.0,
        HCase::SxTLogT => {
            (1.0 + (1.0 - w).ln() + PSI_2 - la) / (a * a) - PSI_2
        }
        HCase::SLogSxTLogT => {
            let lw = w.ln();
            let lmw = (1.0 - w).ln();
            ((PSI_2 * PSI_2 + 2.0 * PSI_2 + PSI_PRIME_2 + 1.0)
                + (1.0 + PSI_2) * (lw + lmw - 2.0 * la)
                + (lw - la) * (lmw - la))
                / (a * a)
                - PSI_2 * PSI_2
        }
        HCase::SxLogT => (1.0 - a) / ((1.0 - w) * a),
        HCase::SLogSxLogT => {
            ((1.0 - a) * (w.ln() + PSI_2) - la) / ((1.0 - w) * a)
        }
        HCase::LogSxLogT => -la / (w * (1.0 - w)),
    }
}

const COV_H_TOL: f64 = 1e-11;

/// Covariance functional H(case; xi) by adaptive quadrature over w,
/// split at the kink of the Pickands function.
pub fn cov_h(case: HCase, xi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::input(format!("xi must lie in [0,1], got {xi}")));
    }
    // The constant terms of the SxT, SxTLogT, SLogSxTLogT integrands are
    // folded into the integrand, so the quadrature result is the covariance.
    let left = quadrature::integrate(|w| h_integrand(case, xi, w), 0.0, 0.5, COV_H_TOL)?;
    let right = quadrature::integrate(|w| h_integrand(case, xi, w), 0.5, 1.0, COV_H_TOL)?;
    Ok(left.value + right.value)
}

/// The xi-integral of each covariance functional, in closed form.
pub fn cov_h_integral_closed(case: HCase) -> f64 {
    let l2 = std::f64::consts::LN_2;
    let p2 = PSI_2;
    let z6 = PI_SQ_OVER_6;
    match case {
        HCase::SxT => 2.0 * l2 - 1.0,
        HCase::SxTLogT => z6 / 2.0 - l2 * l2 + (1.0 - EULER_GAMMA) * (2.0 * l2 - 1.0),
        HCase::SLogSxTLogT => {
            2.0 * l2 * (p2 * p2 + z6 - p2 * l2 + l2 * l2 / 3.0) + p2 * z6
                - 1.75 * APERY
                - p2 * p2
        }
        HCase::SxLogT => z6 / 2.0 + 1.0 - 2.0 * l2,
        HCase::SLogSxLogT => {
            (1.0 + p2) * z6 / 2.0 + l2 * l2 - 2.0 * p2 * l2 + p2 - 0.875 * APERY
        }
        HCase::LogSxLogT => 4.0 * l2 - 2.0,
    }
}

/// The same xi-integral by nested quadrature; the verification path.
pub fn cov_h_integral_quadrature(case: HCase) -> Result<f64> {
    let inner_failure = std::cell::Cell::new(false);
    let outer = quadrature::integrate(
        |xi| match cov_h(case, xi) {
            Ok(v) => v,
            Err(_) => {
                inner_failure.set(true);
                f64::NAN
            }
        },
        0.0,
        1.0,
        2e-9,
    )?;
    if inner_failure.get() || !outer.value.is_finite() {
        return Err(Error::Quadrature {
            tolerance: 2e-9,
            achieved: f64::NAN,
            intervals: outer.intervals,
        });
    }
    Ok(outer.value)
}

/// Monte Carlo estimate of the 3x3 score covariance matrix, with
/// standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaYEstimate {
    pub estimate: [[f64; 3]; 3],
    pub std_err: [[f64; 3]; 3],
    pub draws: usize,
}

/// Monte Carlo oracle for the score covariance matrix: draw xi uniformly,
/// sample the Marshall--Olkin pair, transform to the Fréchet scale and
/// average products of the three score coordinates against their known
/// limit moments (the margins do not depend on xi).
pub fn mc_sigma_y_oracle<R: Rng + ?Sized>(
    rng: &mut R,
    alpha0: f64,
    draws: usize,
) -> Result<SigmaYEstimate> {
    if !(alpha0 > 0.0) {
        return Err(Error::input(format!("alpha0 must be positive, got {alpha0}")));
    }
    if draws < 10_000 {
        return Err(Error::input(format!(
            "oracle needs at least 10^4 draws, got {draws}"
        )));
    }

    let inv_a = 1.0 / alpha0;
    let mut sum = [[0.0f64; 3]; 3];
    let mut sum_sq = [[0.0f64; 3]; 3];
    for _ in 0..draws {
        let xi = rng.gen_range(0.0..1.0);
        let (s, t) = sample_pair(rng, MoParam::new(xi).unwrap());
        // f_j(Z) for Z = S^{-1/alpha0}: f1 = -S log(S)/alpha0, f2 = S,
        // f3 = -log(S)/alpha0
        let f_left = [-s * s.ln() * inv_a, s, -s.ln() * inv_a];
        let f_right = [-t * t.ln() * inv_a, t, -t.ln() * inv_a];
        for i in 0..3 {
            for j in 0..3 {
                let g = f_left[i] * f_right[j];
                sum[i][j] += g;
                sum_sq[i][j] += g * g;
            }
        }
    }

    let (p1, p2, p3) = crate::asymptotics::frechet_log_moments(alpha0)?;
    let moments = [p1, p2, p3];
    let n = draws as f64;
    let mut estimate = [[0.0; 3]; 3];
    let mut std_err = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mean = sum[i][j] / n;
            let var = (sum_sq[i][j] / n - mean * mean).max(0.0);
            estimate[i][j] = 2.0 * (mean - moments[i] * moments[j]);
            std_err[i][j] = 2.0 * (var / n).sqrt();
        }
    }
    // average the off-diagonal pairs: E[f_i(Z1) f_j(Z2)] and
    // E[f_j(Z1) f_i(Z2)] estimate the same integral
    for i in 0..3 {
        for j in (i + 1)..3 {
            let m = 0.5 * (estimate[i][j] + estimate[j][i]);
            estimate[i][j] = m;
            estimate[j][i] = m;
            let se = 0.5 * (std_err[i][j] + std_err[j][i]);
            std_err[i][j] = se;
            std_err[j][i] = se;
        }
    }
    Ok(SigmaYEstimate {
        estimate,
        std_err,
        draws,
    })
}
