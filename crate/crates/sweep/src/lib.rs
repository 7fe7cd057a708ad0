//! Declarative sweep runner over BS density.
//!
//! A sweep is described by a TOML config (or one of the bundled scenarios):
//! a path loss model, network parameters, a log-spaced density grid, and a
//! metric (coverage probability at a threshold, or area spectral
//! efficiency above a minimum working SINR). Each grid point is evaluated
//! by the closed-form engine, the Monte Carlo engine, or both, and the
//! result table is emitted as CSV or JSON with deterministic content for
//! a fixed config and seed.

pub mod config;
pub mod emit;
pub mod runner;
pub mod scenario;

pub use config::{ConfigError, EngineSelection, Metric, OutputFormat, SweepSpec};
pub use emit::EmitError;
pub use runner::{run_sweep, ResultRow, SweepOutcome};
