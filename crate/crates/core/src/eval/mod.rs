//! Model scoring: per-horizon accuracy metrics, cross-run aggregation,
//! permutation variable importance, and Monte-Carlo dropout bands.

mod metrics;
mod uncertainty;
mod vip;

pub use metrics::{
    aggregate_reports, corr, evaluate, rmse, AggregateHorizon, AggregateReport, HorizonMetrics,
    MetricReport,
};
pub use uncertainty::{
    empirical_quantile, mc_dropout, Band, HorizonBand, UncertaintyBands, WindowBands,
};
pub use vip::{vip_reevaluate, vip_retrain, VipRepScore, VipReport};
