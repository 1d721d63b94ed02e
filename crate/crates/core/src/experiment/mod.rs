//! Experiment harness: configuration, the result grid and the oracle check.

mod config;
mod oracle_check;
mod run;

pub use config::{DatasetSpec, ExperimentConfig, Targets, DEFAULT_BUDGETS, DEFAULT_TRIALS};
pub use oracle_check::{
    constructive_ratio_bound, destructive_ratio_bound, run_oracle_check, score_gain_ratio_bound, Fault,
    OracleCheckConfig, OracleReport, Violation, GADGET_WORLDS,
};
pub use run::{
    metadata, run_experiment, run_on, trial_seed, Dataset, ExperimentTable, ResultRow, Selector, CSV_HEADER,
};
