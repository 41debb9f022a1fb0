//! Extreme-value inference for heavy-tailed stationary time series via
//! block maxima.
//!
//! The library fits a two-parameter Fréchet distribution to sliding or
//! disjoint block maxima by maximum quasi-likelihood, provides the
//! closed-form asymptotic covariance machinery needed for confidence
//! statements (including the min-stable covariance functionals behind the
//! sliding-blocks limit), estimates return levels, and ships a reproducible
//! Monte Carlo harness for comparing estimators.

pub mod asymptotics;
pub mod blocks;
pub mod error;
pub mod frechet;
pub mod marshall_olkin;
pub mod quadrature;
pub mod returnlevel;
pub mod simulate;
pub mod special;

pub use blocks::{
    default_truncation, disjoint_maxima, left_truncate, sliding_maxima, BlockMaximaSample, Scheme,
    TimeSeries,
};
pub use error::{Error, Result};
pub use frechet::{FrechetFit, FrechetParams};
pub use returnlevel::ReturnLevelEstimate;
