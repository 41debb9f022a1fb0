//! Return-level point estimates and asymptotic confidence intervals.

use crate::asymptotics::{fisher_inverse_disjoint, sigma_sliding, Mat2};
use crate::blocks::Scheme;
use crate::error::{Error, Result};
use crate::frechet::FrechetFit;

/// Return-level estimate with its normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnLevelEstimate {
    /// Return period, in units of blocks.
    pub t: f64,
    pub point: f64,
    /// beta' Sigma beta: asymptotic variance of the relative error, per unit
    /// of 1/m.
    pub variance_factor: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Effective number of blocks n/r.
    pub m_effective: f64,
    pub scheme: Scheme,
}

/// b_T = -log(1 - 1/T), the standard exceedance transform of the period.
pub fn b_t(t: f64) -> Result<f64> {
    if !(t > 1.0) {
        return Err(Error::input(format!("return period must exceed 1, got {t}")));
    }
    // -ln(1 - 1/T) = -ln_1p(-1/T), accurate for large T
    Ok(-(-1.0 / t).ln_1p())
}

/// Point estimate sigma_hat * b_T^{-1/alpha_hat}.
pub fn estimate(fit: &FrechetFit, t: f64) -> Result<f64> {
    let b = b_t(t)?;
    Ok(fit.params.sigma() * b.powf(-1.0 / fit.params.alpha()))
}

/// The variance of the relative estimation error, per unit of 1/m:
/// beta(T, alpha0)' Sigma beta(T, alpha0) with beta = (alpha0^{-2} log b_T, 1).
pub fn variance_factor(alpha0: f64, t: f64, scheme: Scheme) -> Result<f64> {
    let b = b_t(t)?;
    let sigma: Mat2 = match scheme {
        Scheme::Sliding => sigma_sliding(alpha0)?,
        Scheme::Disjoint => fisher_inverse_disjoint(alpha0)?,
    };
    let beta = [b.ln() / (alpha0 * alpha0), 1.0];
    let mut q = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            q += beta[i] * sigma[i][j] * beta[j];
        }
    }
    Ok(q)
}

/// Confidence interval for the return level at period `t`.
///
/// The interval is normal on the relative scale RL_hat/RL - 1 and then mapped
/// to absolute bounds: point * (1 ± z * sqrt(variance_factor / m)). Bias
/// terms are ignored. The shape entering the variance defaults to the fitted
/// alpha_hat; `alpha0_for_variance` overrides it for oracle studies.
pub fn ci(
    fit: &FrechetFit,
    t: f64,
    alpha0_for_variance: Option<f64>,
    level: f64,
    scheme: Scheme,
) -> Result<ReturnLevelEstimate> {
    if !(0.0 < level && level < 1.0) {
        return Err(Error::input(format!(
            "confidence level must lie in (0,1), got {level}"
        )));
    }
    let m = fit.m_effective();
    if !(m > 0.0) {
        return Err(Error::Estimation(format!(
            "nonpositive effective sample size {m}"
        )));
    }
    let point = estimate(fit, t)?;
    let alpha0 = alpha0_for_variance.unwrap_or_else(|| fit.params.alpha());
    let vf = variance_factor(alpha0, t, scheme)?;
    let z = normal_quantile(0.5 + level / 2.0)?;
    let half_width = z * (vf / m).sqrt();
    Ok(ReturnLevelEstimate {
        t,
        point,
        variance_factor: vf,
        ci_low: point * (1.0 - half_width),
        ci_high: point * (1.0 + half_width),
        m_effective: m,
        scheme,
    })
}

/// Standard normal quantile (Acklam's rational approximation with one
/// Halley refinement; absolute error far below 1e-9).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::input(format!(
            "normal quantile needs p in (0,1), got {p}"
        )));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // one Halley step against the exact cdf via erfc
    let e = 0.5 * erfc(-x / std::f64::consts::SQRT_2) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    Ok(x - u / (1.0 + x * u / 2.0))
}

/// Complementary error function, rational approximations per region
/// (relative error below 1e-15 over the useful range).
fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        return 1.0 - erf_central(x);
    }
    let result = if y <= 4.0 {
        const C: [f64; 9] = [
            5.64188496988670089e-1,
            8.88314979438837594e0,
            6.61191906371416295e1,
            2.98635138197400131e2,
            8.81952221241769090e2,
            1.71204761263407058e3,
            2.05107837782607147e3,
            1.23033935479799725e3,
            2.15311535474403846e-8,
        ];
        const D: [f64; 8] = [
            1.57449261107098347e1,
            1.17693950891312499e2,
            5.37181101862009858e2,
            1.62138957456669019e3,
            3.29079923573345963e3,
            4.36261909014324716e3,
            3.43936767414372164e3,
            1.23033935480374942e3,
        ];
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        exp_neg_sq(y) * (num + C[7]) / (den + D[7])
    } else {
        const P: [f64; 6] = [
            3.05326634961232344e-1,
            3.60344899949804439e-1,
            1.25781726111229246e-1,
            1.60837851487422766e-2,
            6.58749161529837803e-4,
            1.63153871373020978e-2,
        ];
        const Q: [f64; 5] = [
            2.56852019228982242e0,
            1.87295284992346047e0,
            5.27905102951428412e-1,
            6.05183413124413191e-2,
            2.33520497626869185e-3,
        ];
        let z = 1.0 / (y * y);
        let mut num = P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        let tail = z * (num + P[4]) / (den + Q[4]);
        // 1/sqrt(pi)
        const SQRPI: f64 = 5.641895835477562869e-1;
        exp_neg_sq(y) * (SQRPI - tail) / y
    };
    if x >= 0.0 {
        result
    } else {
        2.0 - result
    }
}

/// exp(-y^2) split so the squared argument keeps full precision.
fn exp_neg_sq(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// erf on |x| <= 0.46875.
fn erf_central(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.16112374387056560e0,
        1.13864154151050156e2,
        3.77485237685302021e2,
        3.20937758913846947e3,
        1.85777706184603153e-1,
    ];
    const B: [f64; 4] = [
        2.36012909523441209e1,
        2.44024637934444173e2,
        1.28261652607737228e3,
        2.84423683343917062e3,
    ];
    let z = x * x;
    let mut num = A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + A[i]) * z;
        den = (den + B[i]) * z;
    }
    x * (num + A[3]) / (den + B[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{BlockMaximaSample, Scheme};
    use crate::frechet::{self, FrechetParams};

    fn synthetic_fit(alpha: f64, sigma: f64, n: usize, r: usize) -> FrechetFit {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        let draws = frechet::sample(
            &mut rng,
            FrechetParams::new(alpha, sigma).unwrap(),
            n / r,
        );
        let sample = BlockMaximaSample::from_parts(draws, r, Scheme::Disjoint, n).unwrap();
        let mut fit = frechet::fit(&sample, 1e-8).unwrap();
        // pin the parameters so tests exercise exact algebra
        fit.params = FrechetParams::new(alpha, sigma).unwrap();
        fit
    }

    #[test]
    fn b_t_examples() {
        assert!((b_t(2.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((b_t(50.0).unwrap() - 0.0202027).abs() < 1e-7);
        let t = 1e6;
        assert!((t * b_t(t).unwrap() - 1.0).abs() < 1e-5);
        assert!(b_t(1.0).is_err());
        assert!(b_t(0.5).is_err());
    }

    #[test]
    fn point_estimate_examples() {
        let fit = synthetic_fit(1.0, 1.0, 1000, 10);
        let e = estimate(&fit, 2.0).unwrap();
        assert!((e - 1.0 / std::f64::consts::LN_2).abs() < 1e-12);

        // b_T = 1 at T = e/(e-1): estimate collapses to sigma
        let t_unit = std::f64::consts::E / (std::f64::consts::E - 1.0);
        let fit2 = synthetic_fit(1.7, 3.25, 1000, 10);
        assert!((estimate(&fit2, t_unit).unwrap() - 3.25).abs() < 1e-12);

        // linear in sigma
        let fit3 = synthetic_fit(1.7, 6.5, 1000, 10);
        let ratio = estimate(&fit3, 80.0).unwrap() / estimate(&fit2, 80.0).unwrap();
        assert!((ratio - 2.0).abs() < 1e-12);

        // increasing in T
        let mut prev = 0.0;
        for t in [2.0, 5.0, 20.0, 100.0, 1000.0] {
            let e = estimate(&fit2, t).unwrap();
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn variance_factor_table() {
        let periods = [50.0, 100.0, 200.0, 500.0, 1000.0, 5000.0, 10000.0];
        let sliding = [11.01, 14.40, 18.26, 24.07, 29.02, 42.35, 48.87];
        let disjoint = [12.37, 16.34, 20.88, 27.77, 33.66, 49.59, 57.41];
        for (i, &t) in periods.iter().enumerate() {
            let vs = variance_factor(1.0, t, Scheme::Sliding).unwrap();
            let vd = variance_factor(1.0, t, Scheme::Disjoint).unwrap();
            assert!((vs - sliding[i]).abs() < 0.01, "T={t}: {vs} vs {}", sliding[i]);
            assert!((vd - disjoint[i]).abs() < 0.01, "T={t}: {vd} vs {}", disjoint[i]);
        }
        // ratio at T = 10000
        let ratio = variance_factor(1.0, 10000.0, Scheme::Sliding).unwrap()
            / variance_factor(1.0, 10000.0, Scheme::Disjoint).unwrap();
        assert!((ratio - 0.85).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn variance_factor_monotonicity_and_ratio_band() {
        let periods = [50.0, 100.0, 200.0, 500.0, 1000.0, 5000.0, 10000.0];
        let mut prev_s = 0.0;
        let mut prev_d = 0.0;
        let mut prev_ratio = f64::INFINITY;
        for &t in &periods {
            let vs = variance_factor(1.0, t, Scheme::Sliding).unwrap();
            let vd = variance_factor(1.0, t, Scheme::Disjoint).unwrap();
            assert!(vs > prev_s && vd > prev_d);
            let ratio = vs / vd;
            assert!(ratio < prev_ratio);
            assert!((0.6448..=0.9413).contains(&ratio), "ratio {ratio} at T={t}");
            prev_s = vs;
            prev_d = vd;
            prev_ratio = ratio;
        }
    }

    #[test]
    fn ci_shape_and_override() {
        let fit = synthetic_fit(1.0, 1.0, 5000, 50);
        let est = ci(&fit, 50.0, Some(1.0), 0.95, Scheme::Sliding).unwrap();
        assert!(est.ci_low <= est.point && est.point <= est.ci_high);
        assert!(est.variance_factor > 0.0);
        assert!((est.variance_factor - 11.01).abs() < 0.01);
        assert!((est.m_effective - 100.0).abs() < 1e-12);
        // symmetric relative half-widths
        let lo = est.point - est.ci_low;
        let hi = est.ci_high - est.point;
        assert!((lo - hi).abs() < 1e-12 * est.point);
        // expected half width z * sqrt(vf/m)
        let z = normal_quantile(0.975).unwrap();
        let expected = est.point * z * (est.variance_factor / 100.0).sqrt();
        assert!((hi - expected).abs() < 1e-9);

        assert!(ci(&fit, 50.0, None, 1.5, Scheme::Sliding).is_err());
        // widening level widens the interval
        let wide = ci(&fit, 50.0, Some(1.0), 0.99, Scheme::Sliding).unwrap();
        assert!(wide.ci_high > est.ci_high && wide.ci_low < est.ci_low);
    }

    #[test]
    fn normal_quantile_values() {
        assert!(normal_quantile(0.5).unwrap().abs() < 1e-12);
        assert!((normal_quantile(0.975).unwrap() - 1.959963984540054).abs() < 1e-9);
        assert!((normal_quantile(0.995).unwrap() - 2.5758293035489004).abs() < 1e-9);
        assert!((normal_quantile(0.841344746068543).unwrap() - 1.0).abs() < 1e-9);
        let q = normal_quantile(1e-10).unwrap();
        assert!((q + 6.361340902404056).abs() < 1e-6, "got {q}");
        assert!(
            (normal_quantile(0.3).unwrap() + normal_quantile(0.7).unwrap()).abs() < 1e-12
        );
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
    }
}
