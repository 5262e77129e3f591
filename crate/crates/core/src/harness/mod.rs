//! Data ingestion, synthetic mixtures and the experiment runner.

mod config;
mod dataset;
mod experiment;
mod mixture;

pub use config::{
    load_instance, AlgorithmSpec, DatasetSpec, ExperimentConfig, InitPolicy, Instance, Metric,
    SpaceSpec,
};
pub use dataset::{
    load_dataset, load_metric_csv, load_points_csv, write_points_csv, Dataset, DatasetFormat,
};
pub use experiment::{
    median, minimum, run_experiment, run_seed, AlgorithmResult, CurvePoint, RatioEntry,
    RepeatResult, RunOptions, RunResult, RunTiming, Timing, RESULT_SCHEMA,
};
pub use mixture::{gen_mixture, Mixture, MixtureSpec};
