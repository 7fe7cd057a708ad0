//! Downlink coverage probability and area spectral efficiency (ASE) for
//! ultra-dense small-cell networks.
//!
//! Base stations form a homogeneous Poisson point process on the plane; the
//! typical user sits at the origin with a fixed antenna height difference to
//! every base station. Links are line-of-sight or non-line-of-sight according
//! to a distance-dependent probability, each state with its own piecewise
//! power-law path loss. The crate provides two independent evaluation routes:
//!
//! * [`analytic`] computes coverage and ASE by numerical integration of the
//!   exact expressions for the serving-distance distribution and the
//!   interference Laplace transform,
//! * [`sim`] estimates the same quantities from seeded Monte Carlo
//!   realizations of the Poisson field.
//!
//! Internally all distances are in kilometres and all powers in milliwatts;
//! [`units`] has the conversions from metres, dBm, and dB.

pub mod analytic;
pub mod channel;
pub mod quadrature;
pub mod sim;
pub mod units;

pub use analytic::{AnalyticError, AseRecord, CoverageRecord, Method, NetworkParams};
pub use channel::{FadingKind, LinkType, PathLossModel};
pub use quadrature::{QuadratureError, QuadratureSpec};
