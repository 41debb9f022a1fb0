//! Rolling return-level backtest: fit on a training window of sliding block
//! maxima, predict the return level, and check it against the maximum of the
//! block that follows.

use blockmax::{blocks, frechet, returnlevel, Error, Result, Scheme, TimeSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestConfig {
    /// Training length in observations.
    pub window: usize,
    /// Block size, in observations.
    pub r: usize,
    /// Roll increment.
    pub step: usize,
    /// Return periods, in blocks.
    pub t_list: Vec<f64>,
    /// Confidence level for the per-roll intervals.
    pub level: f64,
    /// Left-truncation constant for the block maxima.
    pub truncation: f64,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig {
            window: 2500,
            r: 62,
            step: 62,
            t_list: vec![20.0, 40.0, 80.0],
            level: 0.95,
            truncation: blocks::default_truncation(),
        }
    }
}

/// One roll of the backtest.
#[derive(Debug, Clone, PartialEq)]
pub struct Roll {
    /// Index one past the end of the training window.
    pub end: usize,
    /// Return-level estimates, one per configured period.
    pub estimates: Vec<returnlevel::ReturnLevelEstimate>,
    /// Maximum of the evaluation block following the window.
    pub realized: f64,
    /// Per-period exceedance flags: realized > estimate.
    pub exceeded: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub t_list: Vec<f64>,
    pub rolls: Vec<Roll>,
    /// Rolls whose fit failed, excluded from the totals.
    pub failed_rolls: usize,
    /// Exceedance counts per period, over successful rolls.
    pub counts: Vec<usize>,
    /// Expected counts rolls/T under a well-calibrated model.
    pub expected: Vec<f64>,
}

impl BacktestReport {
    pub fn rolls_evaluated(&self) -> usize {
        self.rolls.len()
    }
}

pub fn backtest(series: &TimeSeries, config: &BacktestConfig) -> Result<BacktestReport> {
    let n = series.len();
    if config.step < 1 {
        return Err(Error::input("step must be >= 1".to_string()));
    }
    if config.r < 2 || config.window < 2 * config.r {
        return Err(Error::input(format!(
            "window {} too short for block size {}",
            config.window, config.r
        )));
    }
    if config.window + config.r > n {
        return Err(Error::input(format!(
            "series length {n} cannot hold window {} plus one evaluation block of {}",
            config.window, config.r
        )));
    }
    if config.t_list.is_empty() || config.t_list.iter().any(|&t| !(t > 1.0)) {
        return Err(Error::input(
            "return periods must be a non-empty list of values > 1".to_string(),
        ));
    }

    let values = series.values();
    let mut rolls = Vec::new();
    let mut failed_rolls = 0usize;
    let mut counts = vec![0usize; config.t_list.len()];

    let mut start = 0usize;
    // roll while the evaluation block still fits
    while start + config.window + config.r <= n {
        let train = TimeSeries::new(values[start..start + config.window].to_vec())?;
        let end = start + config.window;
        let realized = values[end..end + config.r]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);

        let fit_result = blocks::sliding_maxima(&train, config.r)
            .and_then(|sample| blocks::left_truncate(&sample, config.truncation))
            .and_then(|sample| frechet::fit(&sample, config.truncation));
        match fit_result {
            Ok(fit) => {
                let estimates: Result<Vec<_>> = config
                    .t_list
                    .iter()
                    .map(|&t| returnlevel::ci(&fit, t, None, config.level, Scheme::Sliding))
                    .collect();
                match estimates {
                    Ok(estimates) => {
                        let exceeded: Vec<bool> =
                            estimates.iter().map(|e| realized > e.point).collect();
                        for (count, &hit) in counts.iter_mut().zip(&exceeded) {
                            *count += hit as usize;
                        }
                        rolls.push(Roll {
                            end,
                            estimates,
                            realized,
                            exceeded,
                        });
                    }
                    Err(_) => failed_rolls += 1,
                }
            }
            Err(_) => failed_rolls += 1,
        }
        start += config.step;
    }

    let evaluated = rolls.len() as f64;
    let expected = config.t_list.iter().map(|&t| evaluated / t).collect();
    Ok(BacktestReport {
        t_list: config.t_list.clone(),
        rolls,
        failed_rolls,
        counts,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use blockmax::frechet::FrechetParams;
    use rand::SeedableRng;

    #[test]
    fn roll_count_arithmetic() {
        // n = window + k*step + r exactly determines the number of rolls
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let params = FrechetParams::new(1.0, 1.0).unwrap();
        let n = 1000;
        let series = TimeSeries::new(frechet::sample(&mut rng, params, n)).unwrap();
        let config = BacktestConfig {
            window: 500,
            r: 50,
            step: 50,
            t_list: vec![20.0],
            ..Default::default()
        };
        let report = backtest(&series, &config).unwrap();
        let expected_rolls = (n - config.window - config.r) / config.step + 1;
        assert_eq!(
            report.rolls_evaluated() + report.failed_rolls,
            expected_rolls
        );
        for roll in &report.rolls {
            assert!(roll.end >= config.window && roll.end + config.r <= n);
        }
        assert!(report.counts[0] <= report.rolls_evaluated());
    }

    #[test]
    fn no_exceedances_on_bounded_tail() {
        // uniform-ish data: quarterly maxima never reach the fitted levels
        // at T large, since the fitted Fréchet extrapolates far beyond
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let params = FrechetParams::new(1.0, 1.0).unwrap();
        let mut values = frechet::sample(&mut rng, params, 700);
        // cap the evaluation region so the realized maxima are tiny
        for v in values.iter_mut().skip(500) {
            *v = 1e-3;
        }
        let series = TimeSeries::new(values).unwrap();
        let config = BacktestConfig {
            window: 500,
            r: 50,
            step: 50,
            t_list: vec![20.0, 40.0],
            ..Default::default()
        };
        let report = backtest(&series, &config).unwrap();
        assert!(report.rolls_evaluated() > 0);
        assert_eq!(report.counts, vec![0, 0]);
    }

    #[test]
    fn config_validation() {
        let series = TimeSeries::new(vec![1.0; 100]).unwrap();
        let bad = BacktestConfig {
            window: 2500,
            ..Default::default()
        };
        assert!(backtest(&series, &bad).is_err());
        let zero_step = BacktestConfig {
            window: 50,
            r: 10,
            step: 0,
            ..Default::default()
        };
        assert!(backtest(&series, &zero_step).is_err());
        let bad_t = BacktestConfig {
            window: 60,
            r: 10,
            step: 10,
            t_list: vec![0.5],
            ..Default::default()
        };
        assert!(backtest(&series, &bad_t).is_err());
    }

    #[test]
    fn expected_counts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let params = FrechetParams::new(1.0, 1.0).unwrap();
        let series = TimeSeries::new(frechet::sample(&mut rng, params, 2000)).unwrap();
        let config = BacktestConfig {
            window: 400,
            r: 40,
            step: 40,
            t_list: vec![10.0, 20.0],
            ..Default::default()
        };
        let report = backtest(&series, &config).unwrap();
        let m = report.rolls_evaluated() as f64;
        assert!((report.expected[0] - m / 10.0).abs() < 1e-12);
        assert!((report.expected[1] - m / 20.0).abs() < 1e-12);
    }
}
