//! Sweeps, scaling studies, extremal search and the trend test used to judge
//! whether a fitted constant stays bounded.

pub mod scaling;
pub mod search;
pub mod sweep;
pub mod trend;

pub use scaling::{scaling_study, KName, KRule, ScalingRow, ScalingStudy};
pub use search::{extremal_search, Objective, SearchConfig, SearchResult};
pub use sweep::{run_sweep, ExplicitInstance, GeneratorSpec, OutputSpec, SweepConfig, SweepOutcome, SweepRecord, SweepSummary};
pub use trend::{kendall_trend, TrendTest, TREND_LEVEL};
