//! Command-line surface: argument parsing, dispatch, and output formatting.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde::Serialize;
use serde_json::json;

use blockmax::asymptotics;
use blockmax::blocks::{self, Scheme};
use blockmax::frechet::{self, FrechetFit};
use blockmax::marshall_olkin::{self, HCase};
use blockmax::returnlevel;
use blockmax::simulate::{self, Estimator, Family, GeneratorSpec, Innovation, McConfig};
use blockmax::{Error, TimeSeries};

use crate::backtest::{backtest, BacktestConfig};
use crate::ingest::{ingest_csv, log_returns, ColumnSelector, Sign};

/// Exit status: 0 success, 2 input error, 3 estimation/numerical failure.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Input(_) => 2,
        _ => 3,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "blockmax",
    version,
    about = "Extreme-value inference on heavy-tailed time series via block maxima"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Sliding,
    Disjoint,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Sliding => Scheme::Sliding,
            SchemeArg::Disjoint => Scheme::Disjoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Iid,
    Armax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Frechet,
    Pareto,
    AbsT,
}

/// Flags shared by every data-reading subcommand.
#[derive(Debug, Args)]
struct InputArgs {
    /// CSV file to read.
    #[arg(long)]
    input: PathBuf,
    /// Column to use: zero-based index or header name.
    #[arg(long, default_value = "0")]
    column: String,
    /// Treat the first row as a header.
    #[arg(long, default_value_t = false)]
    header: bool,
}

impl InputArgs {
    fn read(&self) -> blockmax::Result<TimeSeries> {
        ingest_csv(&self.input, &ColumnSelector::parse(&self.column), self.header)
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn writer(&self) -> blockmax::Result<Box<dyn Write>> {
        match &self.output {
            Some(path) => Ok(Box::new(File::create(path).map_err(|e| {
                Error::input(format!("cannot create {}: {e}", path.display()))
            })?)),
            None => Ok(Box::new(io::stdout())),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute block maxima of a series.
    Blocks {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        block_size: usize,
        #[arg(long, value_enum, default_value_t = SchemeArg::Sliding)]
        scheme: SchemeArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit a Fréchet distribution to block maxima.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        block_size: usize,
        #[arg(long, value_enum, default_value_t = SchemeArg::Sliding)]
        scheme: SchemeArg,
        /// Left-truncation constant; defaults to sqrt(machine epsilon).
        #[arg(long)]
        truncation: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Estimate return levels with confidence intervals.
    ReturnLevel {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        block_size: usize,
        #[arg(long, value_enum, default_value_t = SchemeArg::Sliding)]
        scheme: SchemeArg,
        #[arg(long)]
        truncation: Option<f64>,
        /// Return periods in blocks, comma separated.
        #[arg(short = 'T', long = "periods", value_delimiter = ',', default_value = "20,40,80")]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Use this shape in the variance instead of the fitted one.
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the asymptotic covariance machinery for a given shape.
    Asymptotics {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Include the return-level variance grid.
        #[arg(long, default_value_t = false)]
        table1: bool,
        /// Cross-check closed-form integrals against quadrature and
        /// Monte Carlo.
        #[arg(long, default_value_t = false)]
        verify: bool,
        /// Second-order parameters for the bias vector.
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a Monte Carlo comparison of shape estimators.
    Simulate {
        #[arg(long, value_enum, default_value_t = ModelArg::Iid)]
        model: ModelArg,
        #[arg(long, value_enum, default_value_t = DistArg::Frechet)]
        dist: DistArg,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Effective sizes m, comma separated; ranges like 20..50 allowed.
        #[arg(long, default_value = "20,25,40")]
        grid: String,
        #[arg(long)]
        truncation: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Roll a return-level backtest over a price series.
    Backtest {
        #[command(flatten)]
        input: InputArgs,
        /// Training window length in observations.
        #[arg(long, default_value_t = 2500)]
        window: usize,
        #[arg(long, default_value_t = 62)]
        block_size: usize,
        /// Roll increment; defaults to the block size.
        #[arg(long)]
        step: Option<usize>,
        #[arg(short = 'T', long = "periods", value_delimiter = ',', default_value = "20,40,80")]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Which tail of the log-returns to analyze; `none` uses the input
        /// series as-is.
        #[arg(long, default_value = "negative")]
        sign: String,
        #[arg(long)]
        truncation: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn meta(command: &str, config: serde_json::Value) -> serde_json::Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
    })
}

fn parse_grid(s: &str) -> blockmax::Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("bad grid range '{part}'")))?;
            let hi: usize = hi
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("bad grid range '{part}'")))?;
            if lo > hi {
                return Err(Error::input(format!("empty grid range '{part}'")));
            }
            out.extend(lo..=hi);
        } else {
            out.push(
                part.parse()
                    .map_err(|_| Error::input(format!("bad grid entry '{part}'")))?,
            );
        }
    }
    if out.is_empty() {
        return Err(Error::input("empty grid".to_string()));
    }
    Ok(out)
}

#[derive(Serialize)]
struct FitPayload {
    alpha: f64,
    sigma: f64,
    k: usize,
    r: usize,
    scheme: String,
    n: usize,
    truncation: f64,
    iterations: usize,
    residual: f64,
}

impl FitPayload {
    fn from_fit(fit: &FrechetFit) -> FitPayload {
        FitPayload {
            alpha: fit.params.alpha(),
            sigma: fit.params.sigma(),
            k: fit.k,
            r: fit.r,
            scheme: fit.scheme.to_string(),
            n: fit.n,
            truncation: fit.truncation,
            iterations: fit.solver.iterations,
            residual: fit.solver.residual,
        }
    }
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> blockmax::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)
        .map_err(|e| Error::input(format!("cannot serialize output: {e}")))?;
    writeln!(w).map_err(|e| Error::input(format!("write error: {e}")))?;
    Ok(())
}

fn csv_writer(w: Box<dyn Write>) -> csv::Writer<Box<dyn Write>> {
    csv::WriterBuilder::new().from_writer(w)
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::input(format!("write error: {e}"))
}

/// Parse `args` and run; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> blockmax::Result<()> {
    match command {
        Command::Blocks {
            input,
            block_size,
            scheme,
            output,
        } => {
            let series = input.read()?;
            let scheme: Scheme = scheme.into();
            let sample = match scheme {
                Scheme::Sliding => blocks::sliding_maxima(&series, block_size)?,
                Scheme::Disjoint => blocks::disjoint_maxima(&series, block_size)?,
            };
            let mut w = output.writer()?;
            match output.format {
                Format::Json => write_json(
                    &mut *w,
                    &json!({
                        "meta": meta("blocks", json!({
                            "block_size": block_size,
                            "scheme": scheme.to_string(),
                        })),
                        "r": sample.r,
                        "scheme": sample.scheme.to_string(),
                        "n": sample.n,
                        "k": sample.k(),
                        "maxima": sample.maxima(),
                    }),
                )?,
                Format::Csv => {
                    let mut csv = csv_writer(w);
                    csv.write_record(["maximum"]).map_err(io_err)?;
                    for &x in sample.maxima() {
                        csv.write_record([format_f64(x)]).map_err(io_err)?;
                    }
                    csv.flush().map_err(io_err)?;
                }
            }
            Ok(())
        }
        Command::Fit {
            input,
            block_size,
            scheme,
            truncation,
            output,
        } => {
            let series = input.read()?;
            let fit = fit_series(&series, block_size, scheme.into(), truncation)?;
            let payload = FitPayload::from_fit(&fit);
            let mut w = output.writer()?;
            match output.format {
                Format::Json => write_json(
                    &mut *w,
                    &json!({
                        "meta": meta("fit", json!({
                            "block_size": block_size,
                            "scheme": fit.scheme.to_string(),
                            "truncation": fit.truncation,
                        })),
                        "fit": payload,
                    }),
                )?,
                Format::Csv => {
                    let mut csv = csv_writer(w);
                    csv.write_record(["alpha", "sigma", "k", "r", "scheme", "n"])
                        .map_err(io_err)?;
                    csv.write_record([
                        format_f64(payload.alpha),
                        format_f64(payload.sigma),
                        payload.k.to_string(),
                        payload.r.to_string(),
                        payload.scheme.clone(),
                        payload.n.to_string(),
                    ])
                    .map_err(io_err)?;
                    csv.flush().map_err(io_err)?;
                }
            }
            Ok(())
        }
        Command::ReturnLevel {
            input,
            block_size,
            scheme,
            truncation,
            t_list,
            confidence,
            alpha,
            output,
        } => {
            let series = input.read()?;
            let scheme: Scheme = scheme.into();
            let fit = fit_series(&series, block_size, scheme, truncation)?;
            let mut rows = Vec::new();
            for &t in &t_list {
                rows.push(returnlevel::ci(&fit, t, alpha, confidence, scheme)?);
            }
            let mut w = output.writer()?;
            match output.format {
                Format::Json => {
                    let levels: Vec<_> = rows
                        .iter()
                        .map(|e| {
                            json!({
                                "T": e.t,
                                "point": e.point,
                                "variance_factor": e.variance_factor,
                                "ci_low": e.ci_low,
                                "ci_high": e.ci_high,
                                "m_effective": e.m_effective,
                                "scheme": e.scheme.to_string(),
                            })
                        })
                        .collect();
                    write_json(
                        &mut *w,
                        &json!({
                            "meta": meta("return-level", json!({
                                "block_size": block_size,
                                "scheme": scheme.to_string(),
                                "confidence": confidence,
                                "alpha_override": alpha,
                            })),
                            "fit": FitPayload::from_fit(&fit),
                            "return_levels": levels,
                        }),
                    )?;
                }
                Format::Csv => {
                    let mut csv = csv_writer(w);
                    csv.write_record([
                        "T",
                        "point",
                        "variance_factor",
                        "ci_low",
                        "ci_high",
                        "m_effective",
                        "scheme",
                    ])
                    .map_err(io_err)?;
                    for e in &rows {
                        csv.write_record([
                            format_f64(e.t),
                            format_f64(e.point),
                            format_f64(e.variance_factor),
                            format_f64(e.ci_low),
                            format_f64(e.ci_high),
                            format_f64(e.m_effective),
                            e.scheme.to_string(),
                        ])
                        .map_err(io_err)?;
                    }
                    csv.flush().map_err(io_err)?;
                }
            }
            Ok(())
        }
        Command::Asymptotics {
            alpha,
            table1,
            verify,
            rho,
            lambda,
            seed,
            output,
        } => run_asymptotics(alpha, table1, verify, rho, lambda, seed, output),
        Command::Simulate {
            model,
            dist,
            alpha,
            beta,
            n,
            reps,
            seed,
            grid,
            truncation,
            output,
        } => {
            let innovation = match dist {
                DistArg::Frechet => Innovation::Frechet,
                DistArg::Pareto => Innovation::Pareto,
                DistArg::AbsT => Innovation::AbsT,
            };
            let spec = match model {
                ModelArg::Iid => GeneratorSpec::iid(innovation, alpha)?,
                ModelArg::Armax => GeneratorSpec::armax(innovation, alpha, beta)?,
            };
            let config = McConfig {
                n,
                estimators: vec![Estimator::Sliding, Estimator::Disjoint, Estimator::Hill],
                grid: parse_grid(&grid)?,
                reps,
                seed,
                truncation: truncation.unwrap_or_else(blocks::default_truncation),
            };
            let result = simulate::run_mc(&config, &spec)?;
            let config_echo = json!({
                "model": spec.family.to_string(),
                "dist": spec.innovation.to_string(),
                "alpha": spec.alpha,
                "beta": if spec.family == Family::Armax { Some(spec.beta) } else { None },
                "n": config.n,
                "reps": config.reps,
                "seed": config.seed,
                "grid": config.grid,
                "truncation": config.truncation,
                "rng": result.rng_family,
                "variance": "population (denominator reps), so mse = bias2 + variance exactly",
            });
            let cells: Vec<_> = result
                .cells
                .iter()
                .map(|c| {
                    json!({
                        "estimator": c.estimator.to_string(),
                        "m": c.m,
                        "r": c.r,
                        "mean": c.mean,
                        "bias2": c.bias2,
                        "variance": c.variance,
                        "mse": c.mse,
                        "reps": result.reps,
                        "failures": c.failures,
                        "valid": c.valid,
                    })
                })
                .collect();
            match output.format {
                Format::Json => {
                    let mut w = output.writer()?;
                    write_json(
                        &mut *w,
                        &json!({
                            "meta": meta("simulate", config_echo),
                            "cells": cells,
                        }),
                    )?;
                }
                Format::Csv => {
                    // long-format table; metadata goes to a sidecar file or,
                    // without --output, to stderr
                    match &output.output {
                        Some(path) => {
                            let meta_path = path.with_extension("meta.json");
                            let mut mw = File::create(&meta_path).map_err(|e| {
                                Error::input(format!("cannot create {}: {e}", meta_path.display()))
                            })?;
                            write_json(&mut mw, &meta("simulate", config_echo))?;
                        }
                        None => {
                            eprintln!("{}", meta("simulate", config_echo));
                        }
                    }
                    let w = output.writer()?;
                    let mut csv = csv_writer(w);
                    csv.write_record([
                        "estimator",
                        "m",
                        "r",
                        "mean",
                        "bias2",
                        "variance",
                        "mse",
                        "reps",
                        "failures",
                        "valid",
                    ])
                    .map_err(io_err)?;
                    for c in &result.cells {
                        csv.write_record([
                            c.estimator.to_string(),
                            c.m.to_string(),
                            c.r.to_string(),
                            format_f64(c.mean),
                            format_f64(c.bias2),
                            format_f64(c.variance),
                            format_f64(c.mse),
                            result.reps.to_string(),
                            c.failures.to_string(),
                            c.valid.to_string(),
                        ])
                        .map_err(io_err)?;
                    }
                    csv.flush().map_err(io_err)?;
                }
            }
            Ok(())
        }
        Command::Backtest {
            input,
            window,
            block_size,
            step,
            t_list,
            confidence,
            sign,
            truncation,
            output,
        } => {
            let raw = input.read()?;
            let series = match sign.as_str() {
                "positive" => log_returns(&raw, Sign::Positive)?,
                "negative" => log_returns(&raw, Sign::Negative)?,
                "none" => raw,
                other => {
                    return Err(Error::input(format!(
                        "sign must be positive, negative, or none; got '{other}'"
                    )))
                }
            };
            let config = BacktestConfig {
                window,
                r: block_size,
                step: step.unwrap_or(block_size),
                t_list: t_list.clone(),
                level: confidence,
                truncation: truncation.unwrap_or_else(blocks::default_truncation),
            };
            let report = backtest(&series, &config)?;
            let config_echo = json!({
                "window": config.window,
                "block_size": config.r,
                "step": config.step,
                "periods": config.t_list,
                "confidence": config.level,
                "sign": sign,
                "truncation": config.truncation,
            });
            let mut w = output.writer()?;
            match output.format {
                Format::Json => {
                    let rolls: Vec<_> = report
                        .rolls
                        .iter()
                        .map(|roll| {
                            json!({
                                "window_end": roll.end,
                                "realized": roll.realized,
                                "levels": roll
                                    .estimates
                                    .iter()
                                    .zip(&roll.exceeded)
                                    .map(|(e, &hit)| json!({
                                        "T": e.t,
                                        "point": e.point,
                                        "ci_low": e.ci_low,
                                        "ci_high": e.ci_high,
                                        "exceeded": hit,
                                    }))
                                    .collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    write_json(
                        &mut *w,
                        &json!({
                            "meta": meta("backtest", config_echo),
                            "rolls_evaluated": report.rolls_evaluated(),
                            "failed_rolls": report.failed_rolls,
                            "periods": report.t_list,
                            "exceedance_counts": report.counts,
                            "expected_counts": report.expected,
                            "rolls": rolls,
                        }),
                    )?;
                }
                Format::Csv => {
                    let mut csv = csv_writer(w);
                    csv.write_record([
                        "window_end",
                        "T",
                        "point",
                        "ci_low",
                        "ci_high",
                        "realized",
                        "exceeded",
                    ])
                    .map_err(io_err)?;
                    for roll in &report.rolls {
                        for (e, &hit) in roll.estimates.iter().zip(&roll.exceeded) {
                            csv.write_record([
                                roll.end.to_string(),
                                format_f64(e.t),
                                format_f64(e.point),
                                format_f64(e.ci_low),
                                format_f64(e.ci_high),
                                format_f64(roll.realized),
                                hit.to_string(),
                            ])
                            .map_err(io_err)?;
                        }
                    }
                    // summary rows keyed by window_end = "total"
                    for (i, &t) in report.t_list.iter().enumerate() {
                        csv.write_record([
                            "total".to_string(),
                            format_f64(t),
                            report.counts[i].to_string(),
                            String::new(),
                            String::new(),
                            format_f64(report.expected[i]),
                            String::new(),
                        ])
                        .map_err(io_err)?;
                    }
                    csv.flush().map_err(io_err)?;
                }
            }
            Ok(())
        }
    }
}

fn fit_series(
    series: &TimeSeries,
    block_size: usize,
    scheme: Scheme,
    truncation: Option<f64>,
) -> blockmax::Result<FrechetFit> {
    let sample = match scheme {
        Scheme::Sliding => blocks::sliding_maxima(series, block_size)?,
        Scheme::Disjoint => blocks::disjoint_maxima(series, block_size)?,
    };
    let c = truncation.unwrap_or_else(blocks::default_truncation);
    let sample = blocks::left_truncate(&sample, c)?;
    frechet::fit(&sample, c)
}

fn run_asymptotics(
    alpha: f64,
    table1: bool,
    verify: bool,
    rho: f64,
    lambda: f64,
    seed: u64,
    output: OutputArgs,
) -> blockmax::Result<()> {
    let tables = asymptotics::AsymptoticTables::new(alpha)?;
    let (ratio_lo, ratio_hi) = asymptotics::ratio_bounds(alpha)?;
    let bias = asymptotics::bias_iid(alpha, rho, lambda)?;

    let table1_rows: Option<Vec<(f64, f64, f64, f64)>> = if table1 {
        let periods = [50.0, 100.0, 200.0, 500.0, 1000.0, 5000.0, 10000.0];
        let mut rows = Vec::new();
        for &t in &periods {
            let s = returnlevel::variance_factor(alpha, t, Scheme::Sliding)?;
            let d = returnlevel::variance_factor(alpha, t, Scheme::Disjoint)?;
            rows.push((t, s, d, s / d));
        }
        Some(rows)
    } else {
        None
    };

    let verify_rows: Option<Vec<(String, f64, f64, f64, f64, f64)>> = if verify {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // unit shape: the MC oracle reports sigma_Y entries, which are
        // assembled from exactly these six integrals
        let oracle = marshall_olkin::mc_sigma_y_oracle(&mut rng, 1.0, 400_000)?;
        let mut rows = Vec::new();
        for case in HCase::ALL {
            let closed = marshall_olkin::cov_h_integral_closed(case);
            let quad = marshall_olkin::cov_h_integral_quadrature(case)?;
            let (mc, mc_se) = mc_integral(&oracle, case);
            rows.push((
                case.to_string(),
                closed,
                quad,
                (closed - quad).abs(),
                mc,
                mc_se,
            ));
        }
        Some(rows)
    } else {
        None
    };

    let mut w = output.writer()?;
    match output.format {
        Format::Json => {
            let mut doc = json!({
                "meta": meta("asymptotics", json!({
                    "alpha": alpha, "rho": rho, "lambda": lambda, "seed": seed,
                })),
                "sigma_y": tables.sigma_y,
                "m_matrix": tables.m,
                "sigma_sliding": tables.sigma_sliding,
                "fisher_inverse_disjoint": tables.fisher_inv_disjoint,
                "variance_ratio_shape": tables.sigma_sliding[0][0] / tables.fisher_inv_disjoint[0][0],
                "variance_ratio_scale": tables.sigma_sliding[1][1] / tables.fisher_inv_disjoint[1][1],
                "ratio_bounds": [ratio_lo, ratio_hi],
                "bias": {"shape": bias.shape, "scale": bias.scale, "rho": bias.rho, "lambda": bias.lambda},
            });
            if let Some(rows) = &table1_rows {
                doc["table1"] = json!(rows
                    .iter()
                    .map(|&(t, s, d, ratio)| json!({
                        "T": t, "sliding": s, "disjoint": d, "ratio": ratio,
                    }))
                    .collect::<Vec<_>>());
            }
            if let Some(rows) = &verify_rows {
                doc["verify"] = json!(rows
                    .iter()
                    .map(|(case, closed, quad, dev, mc, mc_se)| json!({
                        "case": case,
                        "closed": closed,
                        "quadrature": quad,
                        "abs_deviation": dev,
                        "mc": mc,
                        "mc_se": mc_se,
                    }))
                    .collect::<Vec<_>>());
            }
            write_json(&mut *w, &doc)?;
        }
        Format::Csv => {
            let mut csv = csv_writer(w);
            csv.write_record(["section", "key", "i", "j", "value"])
                .map_err(io_err)?;
            let mut matrix_rows = |name: &str, rows: &[Vec<f64>]| -> blockmax::Result<()> {
                for (i, row) in rows.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        csv.write_record([
                            "matrix".to_string(),
                            name.to_string(),
                            i.to_string(),
                            j.to_string(),
                            format_f64(v),
                        ])
                        .map_err(io_err)?;
                    }
                }
                Ok(())
            };
            matrix_rows("sigma_y", &tables.sigma_y.iter().map(|r| r.to_vec()).collect::<Vec<_>>())?;
            matrix_rows("m_matrix", &tables.m.iter().map(|r| r.to_vec()).collect::<Vec<_>>())?;
            matrix_rows(
                "sigma_sliding",
                &tables.sigma_sliding.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
            )?;
            matrix_rows(
                "fisher_inverse_disjoint",
                &tables.fisher_inv_disjoint.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
            )?;
            let mut scalar = |key: &str, v: f64| -> blockmax::Result<()> {
                csv.write_record([
                    "scalar".to_string(),
                    key.to_string(),
                    String::new(),
                    String::new(),
                    format_f64(v),
                ])
                .map_err(io_err)
            };
            scalar(
                "variance_ratio_shape",
                tables.sigma_sliding[0][0] / tables.fisher_inv_disjoint[0][0],
            )?;
            scalar(
                "variance_ratio_scale",
                tables.sigma_sliding[1][1] / tables.fisher_inv_disjoint[1][1],
            )?;
            scalar("ratio_lower", ratio_lo)?;
            scalar("ratio_upper", ratio_hi)?;
            scalar("bias_shape", bias.shape)?;
            scalar("bias_scale", bias.scale)?;
            if let Some(rows) = &table1_rows {
                for &(t, s, d, ratio) in rows {
                    csv.write_record([
                        "table1".to_string(),
                        format_f64(t),
                        format_f64(s),
                        format_f64(d),
                        format_f64(ratio),
                    ])
                    .map_err(io_err)?;
                }
            }
            if let Some(rows) = &verify_rows {
                for (case, closed, quad, dev, _mc, _mc_se) in rows {
                    csv.write_record([
                        "verify".to_string(),
                        case.clone(),
                        format_f64(*closed),
                        format_f64(*quad),
                        format_f64(*dev),
                    ])
                    .map_err(io_err)?;
                }
            }
            csv.flush().map_err(io_err)?;
        }
    }
    Ok(())
}

/// Pull the Monte Carlo analogue of one xi-integral out of the sigma_Y
/// oracle at unit shape. Each integral determines one sigma_Y entry up to
/// known constants, so invert those relations.
fn mc_integral(oracle: &marshall_olkin::SigmaYEstimate, case: HCase) -> (f64, f64) {
    let e = &oracle.estimate;
    let s = &oracle.std_err;
    // at alpha0 = 1 the scores are f1 = -S log S, f2 = S, f3 = -log S, so
    // each sigma_Y entry is (+/-) twice one of the six integrals
    match case {
        HCase::SxT => (e[1][1] / 2.0, s[1][1] / 2.0),
        HCase::SxTLogT => (-e[0][1] / 2.0, s[0][1] / 2.0),
        HCase::SLogSxTLogT => (e[0][0] / 2.0, s[0][0] / 2.0),
        HCase::SxLogT => (-e[1][2] / 2.0, s[1][2] / 2.0),
        HCase::SLogSxLogT => (e[0][2] / 2.0, s[0][2] / 2.0),
        HCase::LogSxLogT => (e[2][2] / 2.0, s[2][2] / 2.0),
    }
}

fn format_f64(x: f64) -> String {
    // shortest round-trip representation
    let mut buf = ryu_format(x);
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_format(x: f64) -> String {
    // `{}` on f64 is the shortest representation that round-trips
    format!("{x}")
}
