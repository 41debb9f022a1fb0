//! Closed-form asymptotic covariance machinery for the sliding- and
//! disjoint-blocks Fréchet estimators.
//!
//! All matrices are small and fixed-size, so plain arrays are used
//! throughout. Shape conventions: `Mat23` maps the three empirical-process
//! coordinates into the (shape, scale) pair.

use crate::error::{Error, Result};
use crate::special::{
    digamma, gamma, APERY, EULER_GAMMA, GAMMA_SECOND_DERIV_2, PI_SQ_OVER_6, PSI_2,
    ZETA_4, ZETA_5,
};

pub type Mat2 = [[f64; 2]; 2];
pub type Mat3 = [[f64; 3]; 3];
pub type Mat23 = [[f64; 3]; 2];

fn check_alpha(alpha0: f64) -> Result<()> {
    if !(alpha0 > 0.0 && alpha0.is_finite()) {
        return Err(Error::input(format!("alpha0 must be positive, got {alpha0}")));
    }
    Ok(())
}

/// Limit moments of the three score coordinates under the unit Fréchet law:
/// (Pf1, Pf2, Pf3) = ((gamma-1)/alpha0, 1, gamma/alpha0).
pub fn frechet_log_moments(alpha0: f64) -> Result<(f64, f64, f64)> {
    check_alpha(alpha0)?;
    Ok((
        (EULER_GAMMA - 1.0) / alpha0,
        1.0,
        EULER_GAMMA / alpha0,
    ))
}

/// The 2x3 linearization matrix mapping the empirical process to the
/// estimator's (shape, scale) coordinates.
pub fn m_matrix(alpha0: f64) -> Result<Mat23> {
    check_alpha(alpha0)?;
    let c = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let g = EULER_GAMMA;
    let a = alpha0;
    Ok([
        [c * a * a, c * a * (1.0 - g), -c * a * a],
        [
            c * (g - 1.0),
            -c * (GAMMA_SECOND_DERIV_2 + 1.0) / a,
            c * (1.0 - g),
        ],
    ])
}

/// Limit covariance of the three score coordinates over sliding blocks.
///
/// Closed forms in terms of log 2, pi^2/6, psi(2) and zeta(3). The zeta(3)
/// coefficients here are 7/2 and 7/4: each sigma_ij doubles the
/// corresponding xi-integral, which carries 7/4 resp. 7/8.
pub fn sigma_y(alpha0: f64) -> Result<Mat3> {
    check_alpha(alpha0)?;
    let a = alpha0;
    let l2 = std::f64::consts::LN_2;
    let p2 = PSI_2;
    let z6 = PI_SQ_OVER_6;

    let s11 = (4.0 * l2 * (p2 * p2 + z6 - p2 * l2 + l2 * l2 / 3.0) + p2 * 2.0 * z6
        - 3.5 * APERY
        - 2.0 * p2 * p2)
        / (a * a);
    let s22 = 4.0 * l2 - 2.0;
    let s33 = (8.0 * l2 - 4.0) / (a * a);
    let s12 = (2.0 * l2 * l2 - z6 - (1.0 - EULER_GAMMA) * (4.0 * l2 - 2.0)) / a;
    let s13 = ((1.0 + p2) * z6 + 2.0 * l2 * l2 - 4.0 * p2 * l2 + 2.0 * p2 - 1.75 * APERY)
        / (a * a);
    let s23 = (4.0 * l2 - 2.0 - z6) / a;

    Ok([[s11, s12, s13], [s12, s22, s23], [s13, s23, s33]])
}

/// Asymptotic covariance of the sliding-blocks estimator,
/// Sigma(alpha0) = M Sigma_Y M'.
pub fn sigma_sliding(alpha0: f64) -> Result<Mat2> {
    let m = m_matrix(alpha0)?;
    let sy = sigma_y(alpha0)?;
    // M * Sigma_Y * M'
    let mut msy = [[0.0; 3]; 2];
    for i in 0..2 {
        for j in 0..3 {
            msy[i][j] = (0..3).map(|k| m[i][k] * sy[k][j]).sum();
        }
    }
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (0..3).map(|k| msy[i][k] * m[j][k]).sum();
        }
    }
    // symmetrize away rounding noise
    let off = 0.5 * (out[0][1] + out[1][0]);
    out[0][1] = off;
    out[1][0] = off;
    Ok(out)
}

/// Inverse Fisher information of the Fréchet family at (alpha0, 1):
/// the asymptotic covariance of the disjoint-blocks estimator.
pub fn fisher_inverse_disjoint(alpha0: f64) -> Result<Mat2> {
    check_alpha(alpha0)?;
    let c = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let g = EULER_GAMMA;
    let a = alpha0;
    Ok([
        [c * a * a, c * (g - 1.0)],
        [
            c * (g - 1.0),
            c * ((1.0 - g) * (1.0 - g) + PI_SQ_OVER_6) / (a * a),
        ],
    ])
}

fn invert_2x2(m: Mat2) -> Mat2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

/// Eigenvalues (min, max) of Sigma(alpha0) * I_(alpha0,1): sharp bounds on
/// the sliding/disjoint variance ratio for any smooth functional.
pub fn ratio_bounds(alpha0: f64) -> Result<(f64, f64)> {
    let sigma = sigma_sliding(alpha0)?;
    let fisher = invert_2x2(fisher_inverse_disjoint(alpha0)?);
    let mut prod = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            prod[i][j] = (0..2).map(|k| sigma[i][k] * fisher[k][j]).sum();
        }
    }
    let trace = prod[0][0] + prod[1][1];
    let det = prod[0][0] * prod[1][1] - prod[0][1] * prod[1][0];
    let disc = (trace * trace - 4.0 * det).max(0.0).sqrt();
    Ok((0.5 * (trace - disc), 0.5 * (trace + disc)))
}

/// Asymptotic bias of the estimator pair under second-order regular
/// variation, scaled by the drift lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasVector {
    /// Bias component of the shape estimate.
    pub shape: f64,
    /// Bias component of the scale estimate.
    pub scale: f64,
    pub rho: f64,
    pub lambda: f64,
}

/// b1(x) = (1+x) Gamma(x) {gamma + psi(1+x)} for x > 0, pi^2/6 at 0.
pub fn bias_b1(x: f64) -> f64 {
    assert!(x >= 0.0);
    if x == 0.0 {
        return PI_SQ_OVER_6;
    }
    if x < 1e-4 {
        // series form: b1 = Gamma(2+x) * (gamma + psi(1+x)) / x, with the
        // removable 0/0 cancelled analytically
        return gamma_2_plus(x) * psi_shift_ratio(x);
    }
    (1.0 + x) * gamma(x) * (EULER_GAMMA + digamma(1.0 + x))
}

/// b2(x) = -pi^2/(6x) + (1+x) Gamma(x) {Gamma''(2) + gamma + (gamma-1) psi(1+x)}
/// for x > 0, 0 at 0.
pub fn bias_b2(x: f64) -> f64 {
    assert!(x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < 1e-4 {
        // The bracket equals zeta(2) + (gamma-1) x q(x) with
        // q(x) = (gamma + psi(1+x))/x, so the -pi^2/(6x) pole cancels:
        // b2 = zeta(2) (Gamma(2+x)-1)/x + Gamma(2+x) (gamma-1) q(x).
        let g2 = gamma_2_plus(x);
        return PI_SQ_OVER_6 * (g2 - 1.0) / x + g2 * (EULER_GAMMA - 1.0) * psi_shift_ratio(x);
    }
    -PI_SQ_OVER_6 / x
        + (1.0 + x)
            * gamma(x)
            * (GAMMA_SECOND_DERIV_2 + EULER_GAMMA + (EULER_GAMMA - 1.0) * digamma(1.0 + x))
}

/// Gamma(2+x) by Taylor series, accurate for |x| < 1e-4.
fn gamma_2_plus(x: f64) -> f64 {
    // log Gamma(2+x) = log Gamma(1+x) + log(1+x)
    let log_g1 = -EULER_GAMMA * x
        + x * x * (PI_SQ_OVER_6 / 2.0 - x * (APERY / 3.0 - x * ZETA_4 / 4.0));
    (log_g1 + x.ln_1p()).exp()
}

/// (gamma + psi(1+x)) / x = zeta(2) - zeta(3) x + zeta(4) x^2 - ...,
/// accurate for |x| < 1e-4.
fn psi_shift_ratio(x: f64) -> f64 {
    PI_SQ_OVER_6 - x * (APERY - x * (ZETA_4 - x * ZETA_5))
}

/// Bias vector lambda * (-6/pi^2) * (b1(|rho|/alpha0), b2(|rho|/alpha0)/alpha0^2).
///
/// At rho = 0 the displayed branch gives exactly (-1, 0) per unit lambda.
pub fn bias_iid(alpha0: f64, rho: f64, lambda: f64) -> Result<BiasVector> {
    check_alpha(alpha0)?;
    if rho > 0.0 {
        return Err(Error::input(format!(
            "second-order index rho must be <= 0, got {rho}"
        )));
    }
    let x = rho.abs() / alpha0;
    let (shape, scale) = if x == 0.0 {
        (-lambda, 0.0)
    } else {
        let c = -6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        (
            lambda * c * bias_b1(x),
            lambda * c * bias_b2(x) / (alpha0 * alpha0),
        )
    };
    Ok(BiasVector {
        shape,
        scale,
        rho,
        lambda,
    })
}

/// All asymptotic tables at a given shape, bundled for the CLI.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticTables {
    pub alpha0: f64,
    pub m: Mat23,
    pub sigma_y: Mat3,
    pub sigma_sliding: Mat2,
    pub fisher_inv_disjoint: Mat2,
}

impl AsymptoticTables {
    pub fn new(alpha0: f64) -> Result<Self> {
        Ok(AsymptoticTables {
            alpha0,
            m: m_matrix(alpha0)?,
            sigma_y: sigma_y(alpha0)?,
            sigma_sliding: sigma_sliding(alpha0)?,
            fisher_inv_disjoint: fisher_inverse_disjoint(alpha0)?,
        })
    }
}

/// Cholesky factorization of a symmetric matrix; `None` if not positive
/// definite. Used by tests and sanity checks.
pub fn cholesky3(m: &Mat3) -> Option<Mat3> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = m[i][i] - s;
                if d <= 0.0 {
                    return None;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (m[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}
