//! End-to-end checks of the binary: exit codes, format stability, and the
//! blocks -> fit round trip.

use std::process::Command;

use blockmax::blocks;
use blockmax::frechet::{self, FrechetParams};
use blockmax::TimeSeries;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blockmax"))
}

fn write_series_csv(dir: &tempfile::TempDir, name: &str, values: &[f64]) -> std::path::PathBuf {
    let path = dir.path().join(name);
    let body: String = values.iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn blocks_then_fit_matches_in_process_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let values = frechet::sample(&mut rng, FrechetParams::new(1.0, 1.0).unwrap(), 2000);
    let input = write_series_csv(&dir, "series.csv", &values);
    let maxima_path = dir.path().join("maxima.csv");

    let status = bin()
        .args([
            "blocks",
            "--input",
            input.to_str().unwrap(),
            "--block-size",
            "62",
            "--scheme",
            "sliding",
            "--format",
            "csv",
            "--output",
            maxima_path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());

    // re-ingest the emitted maxima as unit blocks and fit
    let out = bin()
        .args([
            "fit",
            "--input",
            maxima_path.to_str().unwrap(),
            "--header",
            "--block-size",
            "1",
            "--scheme",
            "disjoint",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cli_alpha = doc["fit"]["alpha"].as_f64().unwrap();
    let cli_sigma = doc["fit"]["sigma"].as_f64().unwrap();

    // in-process pipeline on the same data
    let series = TimeSeries::new(values).unwrap();
    let sample = blocks::sliding_maxima(&series, 62).unwrap();
    let fit = frechet::fit(&sample, blocks::default_truncation()).unwrap();

    assert_eq!(cli_alpha.to_bits(), fit.params.alpha().to_bits());
    assert_eq!(cli_sigma.to_bits(), fit.params.sigma().to_bits());
    assert_eq!(doc["fit"]["k"].as_u64().unwrap() as usize, fit.k);
}

#[test]
fn exit_codes() {
    // missing file: input error
    let out = bin()
        .args(["fit", "--input", "/no/such/file.csv", "--block-size", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // constant sample: estimation failure
    let dir = tempfile::tempdir().unwrap();
    let input = write_series_csv(&dir, "flat.csv", &[3.0; 50]);
    let out = bin()
        .args([
            "fit",
            "--input",
            input.to_str().unwrap(),
            "--block-size",
            "5",
            "--scheme",
            "disjoint",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // bad flag: usage error
    let out = bin().args(["fit", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // success path
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let values = frechet::sample(&mut rng, FrechetParams::new(2.0, 1.0).unwrap(), 300);
    let input = write_series_csv(&dir, "good.csv", &values);
    let out = bin()
        .args([
            "fit",
            "--input",
            input.to_str().unwrap(),
            "--block-size",
            "10",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn asymptotics_json_and_csv_agree() {
    let out = bin()
        .args(["asymptotics", "--alpha", "1.0", "--table1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["meta"]["version"].is_string());
    let t1 = doc["table1"].as_array().unwrap();
    assert_eq!(t1.len(), 7);
    assert!((t1[0]["sliding"].as_f64().unwrap() - 11.01).abs() < 0.01);
    assert!((t1[4]["disjoint"].as_f64().unwrap() - 33.66).abs() < 0.01);

    let csv_out = bin()
        .args(["asymptotics", "--alpha", "1.0", "--table1", "--format", "csv"])
        .output()
        .unwrap();
    assert!(csv_out.status.success());
    let text = String::from_utf8(csv_out.stdout).unwrap();
    let sliding_50: f64 = text
        .lines()
        .find(|l| l.starts_with("table1,50"))
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(sliding_50, t1[0]["sliding"].as_f64().unwrap());
}

#[test]
fn backtest_counts_invariant_to_format() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    // positive price path for the log-return transform
    let mut price = 100.0f64;
    let mut prices = vec![price];
    let shocks = frechet::sample(&mut rng, FrechetParams::new(4.0, 0.01).unwrap(), 1500);
    for (i, s) in shocks.iter().enumerate() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        price *= (sign * s).exp();
        prices.push(price);
    }
    let input = write_series_csv(&dir, "prices.csv", &prices);
    let common = [
        "backtest",
        "--input",
        input.to_str().unwrap(),
        "--window",
        "600",
        "--block-size",
        "40",
        "--periods",
        "10,20",
        "--sign",
        "negative",
    ];

    let json_out = bin().args(common).output().unwrap();
    assert!(json_out.status.success(), "{}", String::from_utf8_lossy(&json_out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&json_out.stdout).unwrap();
    let counts: Vec<u64> = doc["exceedance_counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();

    let csv_out = bin().args(common).args(["--format", "csv"]).output().unwrap();
    assert!(csv_out.status.success());
    let text = String::from_utf8(csv_out.stdout).unwrap();
    let mut csv_counts = Vec::new();
    for line in text.lines().filter(|l| l.starts_with("total,")) {
        csv_counts.push(line.split(',').nth(2).unwrap().parse::<u64>().unwrap());
    }
    assert_eq!(counts, csv_counts);
}

#[test]
fn simulate_csv_shape() {
    let out = bin()
        .args([
            "simulate", "--model", "iid", "--dist", "pareto", "--alpha", "1.5", "--n", "400",
            "--reps", "50", "--seed", "3", "--grid", "10,20", "--format", "csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "estimator,m,r,mean,bias2,variance,mse,reps,failures,valid"
    );
    // three estimators x two grid points
    assert_eq!(lines.count(), 6);
    // config echo goes to stderr when no output file is given
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"seed\""));
}
