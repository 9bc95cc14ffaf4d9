//! Configuration, deterministic ensemble execution and CSV persistence.
//!
//! An [`ExperimentConfig`] names a model, a time grid, a sweep over model
//! parameters and the quantities to record. [`run_experiment`] evaluates every
//! realization on its own random stream and reduces them in index order, so
//! the output does not depend on the number of worker threads.

mod config;
mod output;
mod presets;
mod run;

pub use config::{
    ExperimentConfig, K0Policy, ModelConfig, Output, Sweep, SweepPoint, TimeAxis, TimeSpan,
    DEFAULT_REALIZATIONS,
};
pub use output::{companion_path, format_float, header, meta_path, read_csv, write_csv, CsvData};
pub use presets::{preset, PRESETS};
pub use run::{
    build_instance, decay_rate_on_window, linear_slope, mean_stderr, presaturation_window,
    run_experiment, run_experiment_named, EnsembleResult, Instance, Metadata, Scalar, Series,
    Table, SATURATION_ONSET,
};

/// Runs `cfg` on a dedicated pool of `threads` workers, recording `preset`
/// in the metadata.
pub fn run_with_threads(
    cfg: &ExperimentConfig,
    preset: Option<&str>,
    threads: usize,
) -> crate::Result<EnsembleResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment_named(cfg, preset))
}
