//! Random regular configuration-model instances: sampling, exact counting,
//! exact partition functions and small Monte Carlo experiments.

mod experiments;
mod instance;
mod io;
mod solve;

pub use experiments::{
    clause_resample_multi, clause_resample_sensitivity, concentration_experiment, sat_sweep, spread_non_increasing,
    ConcentrationRow, ResampleReport, SweepRow, RESAMPLE_MAX_N,
};
pub use instance::{sample_instance, substream, NaeInstance};
pub use io::{format_instance, parse_instance, read_instance, write_instance};
pub use solve::{
    count_solutions, is_satisfiable, log_partition_from_histogram, partition_function,
    violation_histogram, GibbsSummary, COUNT_MAX_N, PARTITION_MAX_N,
};
