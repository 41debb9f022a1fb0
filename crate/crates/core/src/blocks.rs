//! Block maxima extraction: sliding and disjoint windows plus left-truncation.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// An ordered sequence of finite real observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    /// Validates that the series is non-empty and every entry is finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("time series must contain at least one value"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "non-finite value {} at index {}",
                values[pos], pos
            )));
        }
        Ok(TimeSeries { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// How blocks are laid over the observation period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Sliding,
    Disjoint,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Sliding => write!(f, "sliding"),
            Scheme::Disjoint => write!(f, "disjoint"),
        }
    }
}

/// Block maxima extracted from a series, with provenance counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMaximaSample {
    maxima: Vec<f64>,
    /// Block size.
    pub r: usize,
    pub scheme: Scheme,
    /// Source series length.
    pub n: usize,
}

impl BlockMaximaSample {
    pub fn maxima(&self) -> &[f64] {
        &self.maxima
    }

    /// Sliding-block count, n - r + 1.
    pub fn k(&self) -> usize {
        self.n - self.r + 1
    }

    /// Disjoint-block count, floor(n / r).
    pub fn m(&self) -> usize {
        self.n / self.r
    }

    /// Number of maxima actually held (k for sliding, m for disjoint).
    pub fn len(&self) -> usize {
        self.maxima.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maxima.is_empty()
    }

    /// Wraps an externally produced maxima sequence (e.g. re-ingested CLI output).
    pub fn from_parts(maxima: Vec<f64>, r: usize, scheme: Scheme, n: usize) -> Result<Self> {
        let expected = match scheme {
            Scheme::Sliding => n.checked_sub(r).map(|d| d + 1),
            Scheme::Disjoint => Some(n / r),
        };
        if r == 0 || expected != Some(maxima.len()) {
            return Err(Error::input(format!(
                "maxima count {} inconsistent with n={}, r={}, scheme={}",
                maxima.len(),
                n,
                r,
                scheme
            )));
        }
        Ok(BlockMaximaSample { maxima, r, scheme, n })
    }
}

fn check_block_size(n: usize, r: usize) -> Result<()> {
    if r == 0 || r > n {
        return Err(Error::input(format!(
            "block size r={} out of range for series of length {}",
            r, n
        )));
    }
    Ok(())
}

/// Maxima over all windows of length `r`, one per start position.
///
/// Runs in O(n) via a monotonically decreasing deque of candidate indices.
pub fn sliding_maxima(series: &TimeSeries, r: usize) -> Result<BlockMaximaSample> {
    let values = series.values();
    let n = values.len();
    check_block_size(n, r)?;

    let mut maxima = Vec::with_capacity(n - r + 1);
    let mut deque: VecDeque<usize> = VecDeque::new();
    for (i, &v) in values.iter().enumerate() {
        while deque.back().is_some_and(|&j| values[j] <= v) {
            deque.pop_back();
        }
        deque.push_back(i);
        if i + 1 >= r {
            if *deque.front().unwrap() + r <= i {
                deque.pop_front();
            }
            maxima.push(values[*deque.front().unwrap()]);
        }
    }
    Ok(BlockMaximaSample {
        maxima,
        r,
        scheme: Scheme::Sliding,
        n,
    })
}

/// Maxima over the floor(n/r) disjoint blocks; a trailing partial block is discarded.
pub fn disjoint_maxima(series: &TimeSeries, r: usize) -> Result<BlockMaximaSample> {
    let values = series.values();
    let n = values.len();
    check_block_size(n, r)?;

    let maxima = values
        .chunks_exact(r)
        .map(|block| block.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok(BlockMaximaSample {
        maxima,
        r,
        scheme: Scheme::Disjoint,
        n,
    })
}

/// Replaces every maximum below `c` by `c`; counts and scheme are unchanged.
pub fn left_truncate(sample: &BlockMaximaSample, c: f64) -> Result<BlockMaximaSample> {
    if !(c > 0.0) {
        return Err(Error::input(format!(
            "truncation constant must be positive, got {}",
            c
        )));
    }
    let mut out = sample.clone();
    for v in &mut out.maxima {
        *v = v.max(c);
    }
    Ok(out)
}

/// Default truncation constant: the square root of machine precision.
pub fn default_truncation() -> f64 {
    f64::EPSILON.sqrt()
}
