//! Stochastic-calculus simulation toolkit.
//!
//! The crate is organised bottom-up:
//!
//! * [`rng`] – reproducible per-path random streams and exact normal draws.
//! * [`grid`] – time partitions of an interval and their refinement.
//! * [`brownian`] – sampled Brownian paths on a grid.
//! * [`ito`] – elementary (step) integrals, left-point Itô sums, the isometry
//!   check and mesh-refinement convergence diagnostics.
//! * [`sde`] – the exponential log-price scheme `d log Y = γ dt + σ dB`.
//! * [`calibrate`] – historical price series, log-returns and drift/volatility
//!   estimation.
//! * [`montecarlo`] – projection ensembles and the cumulative mean of
//!   per-path correlations against a historical series.
//! * [`stats`] – sample moments, exact summation and a Kolmogorov–Smirnov test
//!   against the standard normal law.
//! * [`formats`] – the CSV layouts shared with the command-line tool.

pub mod brownian;
pub mod calibrate;
mod error;
pub mod formats;
pub mod grid;
pub mod ito;
pub mod montecarlo;
pub mod rng;
pub mod sde;
pub mod stats;

pub use brownian::{BrownianPath, History};
pub use calibrate::{Calibration, CalibrationMode, LogReturns, PriceSeries};
pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use ito::{AdaptedIntegrand, IsometryReport, StepProcess};
pub use montecarlo::{CorrelationBasis, CorrelationTrace, ProjectionEnsemble};
pub use rng::{SeedSpec, Stream};
pub use sde::{GbmParams, PricePath};
