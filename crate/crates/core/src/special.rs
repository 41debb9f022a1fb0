//! Gamma-family special functions and the handful of constants the
//! covariance formulas are built from.

/// Euler--Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577215664901532860606512090082;
/// Apéry's constant, zeta(3).
pub const APERY: f64 = 1.202056903159594285399738161511;
/// zeta(2) = pi^2 / 6.
pub const PI_SQ_OVER_6: f64 = 1.644934066848226436472415166646;
/// zeta(4) = pi^4 / 90.
pub const ZETA_4: f64 = 1.082323233711138191516003696541;
/// zeta(5).
pub const ZETA_5: f64 = 1.036927755143369926331365486457;
/// Digamma at 2: psi(2) = 1 - gamma.
pub const PSI_2: f64 = 1.0 - EULER_GAMMA;
/// Trigamma at 2: psi'(2) = pi^2/6 - 1.
pub const PSI_PRIME_2: f64 = PI_SQ_OVER_6 - 1.0;
/// Second derivative of the gamma function at 2. Since Gamma(2) = 1,
/// Gamma''(2) = psi'(2) + psi(2)^2.
pub const GAMMA_SECOND_DERIV_2: f64 = PSI_PRIME_2 + PSI_2 * PSI_2;

/// The special values used by the asymptotic tables, bundled for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialConstants {
    pub euler_gamma: f64,
    pub apery: f64,
    pub pi_sq_over_6: f64,
    pub digamma_2: f64,
    pub trigamma_2: f64,
    pub gamma_second_deriv_2: f64,
}

impl Default for SpecialConstants {
    fn default() -> Self {
        SpecialConstants {
            euler_gamma: EULER_GAMMA,
            apery: APERY,
            pi_sq_over_6: PI_SQ_OVER_6,
            digamma_2: PSI_2,
            trigamma_2: PSI_PRIME_2,
            gamma_second_deriv_2: GAMMA_SECOND_DERIV_2,
        }
    }
}

// Lanczos approximation, g = 7, 9 terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Gamma function for x > 0.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Digamma function psi(x) = Gamma'(x)/Gamma(x) for x > 0.
///
/// Recurrence up to x >= 6, then the asymptotic (Bernoulli) series.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma requires x > 0, got {x}");
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // psi(x) ~ ln x - 1/(2x) - sum B_{2k} / (2k x^{2k})
    acc + x.ln() - 0.5 * inv
        - inv2
            * (1.0 / 12.0
                - inv2
                    * (1.0 / 120.0
                        - inv2
                            * (1.0 / 252.0
                                - inv2
                                    * (1.0 / 240.0
                                        - inv2
                                            * (1.0 / 132.0
                                                - inv2 * (691.0 / 32760.0))))))
}

/// Trigamma function psi'(x) for x > 0.
pub fn trigamma(x: f64) -> f64 {
    assert!(x > 0.0, "trigamma requires x > 0, got {x}");
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // psi'(x) ~ 1/x + 1/(2x^2) + sum B_{2k} / x^{2k+1}
    acc + inv
        + 0.5 * inv2
        + inv2
            * inv
            * (1.0 / 6.0
                - inv2
                    * (1.0 / 30.0
                        - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0)))))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-13;

    #[test]
    fn gamma_at_integers_and_half() {
        assert!((gamma(1.0) - 1.0).abs() < TOL);
        assert!((gamma(2.0) - 1.0).abs() < TOL);
        assert!((gamma(5.0) - 24.0).abs() < 24.0 * TOL);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((gamma(0.5) - sqrt_pi).abs() < sqrt_pi * TOL);
        assert!((gamma(1.5) - 0.5 * sqrt_pi).abs() < TOL);
    }

    #[test]
    fn gamma_small_argument() {
        // Gamma(x) ~ 1/x - gamma near 0
        let x = 1e-8;
        assert!((gamma(x) - (1.0 / x - EULER_GAMMA)).abs() / gamma(x) < 1e-10);
    }

    #[test]
    fn digamma_special_values() {
        assert!((digamma(1.0) + EULER_GAMMA).abs() < TOL);
        assert!((digamma(2.0) - PSI_2).abs() < TOL);
        // psi(1/2) = -gamma - 2 ln 2
        assert!((digamma(0.5) + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < TOL);
        // recurrence psi(x+1) = psi(x) + 1/x at a non-special point
        let x = 3.7;
        assert!((digamma(x + 1.0) - digamma(x) - 1.0 / x).abs() < TOL);
    }

    #[test]
    fn trigamma_special_values() {
        assert!((trigamma(1.0) - PI_SQ_OVER_6).abs() < TOL);
        assert!((trigamma(2.0) - PSI_PRIME_2).abs() < TOL);
        // psi'(1/2) = pi^2 / 2
        let half = std::f64::consts::PI * std::f64::consts::PI / 2.0;
        assert!((trigamma(0.5) - half).abs() < half * TOL);
        let x = 2.3;
        assert!((trigamma(x) - trigamma(x + 1.0) - 1.0 / (x * x)).abs() < TOL);
    }

    #[test]
    fn constants_consistent() {
        let c = SpecialConstants::default();
        assert!(c.euler_gamma > 0.5772156 && c.euler_gamma < 0.5772157);
        assert!(c.apery > 1.2020569 && c.apery < 1.2020570);
        let pi26 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((c.pi_sq_over_6 - pi26).abs() < 1e-15);
        assert!((c.gamma_second_deriv_2 - (c.trigamma_2 + c.digamma_2 * c.digamma_2)).abs() == 0.0);
    }
}
