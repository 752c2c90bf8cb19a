//! Monte Carlo engine, experiment runner and command-line tool for
//! stochastic bounded confidence dynamics. The model itself lives in
//! `sbc-core`; this crate adds parallel estimation, configuration files,
//! CSV/JSON output and the `sbc` binary.

pub mod audit;
pub mod cli;
pub mod config;
pub mod engine;
pub mod evaluate;
pub mod figures;
pub mod output;
pub mod runner;
pub mod stats;
pub mod svg;
