//! Exact and Monte Carlo tools for anti-concentration of `w_π · v`, the inner
//! product of a fixed vector with a uniformly permuted one.
//!
//! Inputs are exact rationals placed on an integer grid, distributions carry
//! arbitrary-precision counts, and every bound is evaluated with directed
//! rounding so reported values never understate the formula.

pub mod bounds;
pub mod engines;
pub mod error;
pub mod experiments;
pub mod numerics;
pub mod poset;
pub mod sampling;

pub use bounds::{BoundReport, BoundValue, PawlowskiCheck, Statement};
pub use engines::{SumMode, DEFAULT_PERM_CAP, MAX_PERM_N};
pub use error::{Error, Result};
pub use experiments::{SweepConfig, SweepOutcome, SweepRecord, SweepSummary};
pub use numerics::{DiscreteDistribution, Grid, Interval, RationalVector};
pub use poset::{DominancePoset, WidthCertificate};
pub use sampling::{ConcentrationEstimate, McConfig, McEstimate};
