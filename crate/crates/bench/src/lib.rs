//! Experiment runner: sweep configs, per-cell aggregation and run reports.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{derive_seed, Engine, ExperimentConfig, ExperimentKind};
pub use experiments::{
    cluster, run_experiment, run_lattice_scaling, run_noise_sweep, run_noncentroidal,
    run_overlap_sweep, run_single,
};
pub use report::{loglog_slope, mean_std, Cell, Manifest, RunReport};
