//! Evaluation harness: AUC, the reduced-footprint experiment, long-tail
//! statistics and the fusion sweep over simulated users.

mod auc;
mod footprint;
mod long_tail;
pub mod report;
mod sweep;

pub use auc::{auc, rank_by_score};
pub use footprint::{
    footprint_experiment, reduce_footprint, FootprintExperimentConfig, FootprintReport, FootprintRow, Method,
};
pub use long_tail::{coverage_fraction, long_tail_stats, popularity_ranks, LongTailReport, SMALL_FOOTPRINT};
pub use sweep::{
    fusion_sweep, simulate_users, PreferenceSource, SimulationConfig, SweepMethod, SweepReport, SweepRow,
    UserGroundTruth,
};
