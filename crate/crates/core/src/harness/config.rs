use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::dataset::{load_dataset, Dataset, DatasetFormat};
use super::mixture::{gen_mixture, MixtureSpec};
use crate::diagnostics::ReferenceSolution;
use crate::error::{Error, Result};
use crate::metric::{Norm, Point, PointSpace};
use crate::select::SelectorSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    Mixture(MixtureSpec),
    PointsCsv {
        path: PathBuf,
    },
    MetricCsv {
        path: PathBuf,
        #[serde(default)]
        allow_invalid_metric: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    /// Squared Euclidean cost.
    Kmeans,
    Euclidean {
        #[serde(default = "default_norm")]
        norm: Norm,
        p: f64,
    },
    FiniteMetric {
        p: f64,
    },
}

fn default_norm() -> Norm {
    Norm::L2
}

/// Starting centers for a greedy run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitPolicy {
    #[default]
    Empty,
    /// kmeans++ seeding of `centers` points before the greedy rounds.
    Kmeanspp { centers: usize },
    Provided { centers: Vec<Point> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    Greedy {
        selector: SelectorSpec,
        #[serde(default)]
        init: InitPolicy,
        t: usize,
        #[serde(default)]
        tau: f64,
    },
    /// Plain kmeans++ seeding of `t` centers.
    Kmeanspp { t: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MedianCost,
    MinCost,
    CostCurve,
    Ratios,
}

fn all_metrics() -> Vec<Metric> {
    vec![
        Metric::MedianCost,
        Metric::MinCost,
        Metric::CostCurve,
        Metric::Ratios,
    ]
}

fn default_repeats() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

/// One experiment: a data set, a space, named algorithms and a repeat count.
///
/// Algorithm names are the keys of `algorithms`, so they are unique by
/// construction; they run and report in lexicographic name order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub space: SpaceSpec,
    pub algorithms: BTreeMap<String, AlgorithmSpec>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "all_metrics")]
    pub metrics: Vec<Metric>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative dataset paths resolve against the
    /// config's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        match &mut cfg.dataset {
            DatasetSpec::PointsCsv { path } | DatasetSpec::MetricCsv { path, .. } => {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
            DatasetSpec::Mixture(_) => {}
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("no algorithms configured".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("threads must be >= 1".into()));
        }
        for (name, alg) in &self.algorithms {
            if name.is_empty() || name.contains(['/', '\\', ',']) {
                return Err(Error::InvalidConfig(format!(
                    "algorithm name {name:?} must be nonempty without '/', '\\' or ','"
                )));
            }
            match alg {
                AlgorithmSpec::Greedy {
                    selector, init, tau, ..
                } => {
                    selector
                        .validate()
                        .map_err(|e| Error::InvalidConfig(format!("{name}: {e}")))?;
                    if !(*tau >= 0.0 && tau.is_finite()) {
                        return Err(Error::InvalidConfig(format!("{name}: tau must be >= 0")));
                    }
                    if matches!(init, InitPolicy::Kmeanspp { centers: 0 }) {
                        return Err(Error::InvalidConfig(format!(
                            "{name}: kmeanspp init needs at least one center"
                        )));
                    }
                }
                AlgorithmSpec::Kmeanspp { t } if *t == 0 => {
                    return Err(Error::InvalidConfig(format!("{name}: t must be >= 1")));
                }
                AlgorithmSpec::Kmeanspp { .. } => {}
            }
        }
        Ok(())
    }

    pub fn wants(&self, m: Metric) -> bool {
        self.metrics.contains(&m)
    }
}

/// A loaded data set with its space and, for generated data, the planted reference.
#[derive(Clone, Debug)]
pub struct Instance {
    pub space: PointSpace,
    pub points: Vec<Point>,
    pub reference: Option<ReferenceSolution>,
}

/// Loads or generates the data and builds the space.
pub fn load_instance(dataset: &DatasetSpec, space: &SpaceSpec) -> Result<Instance> {
    let (data, reference) = match dataset {
        DatasetSpec::Mixture(m) => {
            let s = build_space(space, Some(m.dim), None)?;
            let mix = gen_mixture(m, &s)?;
            return Ok(Instance {
                space: s,
                points: mix.points,
                reference: Some(mix.reference),
            });
        }
        DatasetSpec::PointsCsv { path } => (load_dataset(path, DatasetFormat::PointsCsv, false)?, None),
        DatasetSpec::MetricCsv {
            path,
            allow_invalid_metric,
        } => (
            load_dataset(path, DatasetFormat::MetricCsv, *allow_invalid_metric)?,
            None,
        ),
    };
    let points = data.points();
    let space = match data {
        Dataset::Points { dim, .. } => build_space(space, Some(dim), None)?,
        Dataset::Metric { matrix, .. } => build_space(space, None, Some(matrix))?,
    };
    Ok(Instance {
        space,
        points,
        reference,
    })
}

fn build_space(
    spec: &SpaceSpec,
    dim: Option<usize>,
    matrix: Option<crate::metric::DistanceMatrix>,
) -> Result<PointSpace> {
    match (spec, dim, matrix) {
        (SpaceSpec::Kmeans, Some(d), None) => PointSpace::kmeans(d),
        (SpaceSpec::Euclidean { norm, p }, Some(d), None) => PointSpace::euclidean(d, *norm, *p),
        (SpaceSpec::FiniteMetric { p }, None, Some(m)) => PointSpace::finite_metric(m, *p),
        (SpaceSpec::FiniteMetric { .. }, ..) => Err(Error::InvalidConfig(
            "a finite_metric space needs a metric_csv dataset".into(),
        )),
        _ => Err(Error::InvalidConfig(
            "kmeans and euclidean spaces need point data".into(),
        )),
    }
}
