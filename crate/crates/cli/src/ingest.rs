//! CSV ingestion and the log-return transform.

use std::path::Path;

use blockmax::{Error, Result, TimeSeries};

/// Which CSV column to read: positional index or header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl ColumnSelector {
    /// Numeric strings select by zero-based index, everything else by name.
    pub fn parse(s: &str) -> ColumnSelector {
        match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        }
    }
}

impl Default for ColumnSelector {
    fn default() -> Self {
        ColumnSelector::Index(0)
    }
}

/// Read one numeric column of a CSV file into a time series.
pub fn ingest_csv(path: &Path, column: &ColumnSelector, has_header: bool) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;

    let index = match column {
        ColumnSelector::Index(i) => *i,
        ColumnSelector::Name(name) => {
            if !has_header {
                return Err(Error::input(format!(
                    "column name '{name}' requires a header row"
                )));
            }
            let headers = reader
                .headers()
                .map_err(|e| Error::input(format!("cannot read header: {e}")))?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::input(format!("no column named '{name}'")))?
        }
    };

    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::input(format!("malformed CSV: {e}")))?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(values.len() as u64 + 1);
        let cell = record.get(index).ok_or_else(|| {
            Error::input(format!("line {line}: no column {index} (row has {} fields)", record.len()))
        })?;
        let value: f64 = cell
            .parse()
            .map_err(|_| Error::input(format!("line {line}: cannot parse '{cell}' as a number")))?;
        if !value.is_finite() {
            return Err(Error::input(format!("line {line}: non-finite value {value}")));
        }
        values.push(value);
    }
    TimeSeries::new(values)
}

/// Sign convention for log-returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

/// Log-returns r_t = log(p_{t+1}/p_t) of a positive price series;
/// `Sign::Negative` flips the sign (losses as positive numbers).
pub fn log_returns(series: &TimeSeries, sign: Sign) -> Result<TimeSeries> {
    let prices = series.values();
    if prices.len() < 2 {
        return Err(Error::input(format!(
            "log-returns need at least 2 prices, got {}",
            prices.len()
        )));
    }
    if let Some(p) = prices.iter().find(|&&p| p <= 0.0) {
        return Err(Error::input(format!("nonpositive price {p}")));
    }
    let flip = match sign {
        Sign::Positive => 1.0,
        Sign::Negative => -1.0,
    };
    TimeSeries::new(
        prices
            .windows(2)
            .map(|w| flip * (w[1] / w[0]).ln())
            .collect(),
    )
}
