//! Command-line front end for block-maxima extreme-value inference:
//! ingestion, estimation, asymptotic tables, simulation, and backtesting.

pub mod app;
pub mod backtest;
pub mod ingest;
