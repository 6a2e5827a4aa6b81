//! Monte Carlo sweeps over `(n, density)` grids, threshold and window
//! estimation by bisection, and CSV output.
//!
//! Every trial is seeded by [`trial_seed`]`(master, n, density index, trial)`,
//! so a sweep is reproducible from its config and any single trial can be
//! re-run on its own.

mod config;
mod model;
mod sweep;
mod threshold;

pub use config::{density_range, SweepConfig, SweepKind, TrialFilter};
pub use model::{ClauseScaling, Model};
pub use sweep::{
    check_monotone, check_spine_implies_unsat, csv_string, format_g, mean, median, precheck,
    rerun_trial, run_sweep, sweep_sat_probability, sweep_spine_fraction, sweep_tree_size,
    trial_seed, unsat_order_parameter, write_csv, MonotonicityViolation, SweepOutput, SweepRow,
    Trial, CSV_COLUMNS,
};
pub use threshold::{
    estimate_threshold_location, estimate_window_width, wilson_interval, BisectionOptions, Probe,
    ThresholdEstimate, WindowEstimate, Z95,
};
