use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{load_instance, AlgorithmSpec, ExperimentConfig, InitPolicy, Instance, Metric};
use crate::cost::NearestCache;
use crate::error::{Error, Result};
use crate::greedy::{data_fingerprint, run_greedy, GreedyConfig, GreedyTrace};
use crate::metric::{Point, PointSpace};
use crate::rng::{derive_key, label_key, RngStream};
use crate::select::kmeanspp_seed;
use crate::serde_util::{finite_or_null, hex_u64};

pub const RESULT_SCHEMA: u32 = 1;

/// Knobs that do not change results.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the config value, then the rayon default.
    pub threads: Option<usize>,
    pub emit_traces: bool,
    /// Overrides the config's output directory.
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// `(number of centers, cost)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub centers: usize,
    #[serde(with = "finite_or_null")]
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatResult {
    pub repeat: usize,
    #[serde(with = "hex_u64")]
    pub seed: u64,
    /// `None` for a failed run.
    pub final_cost: Option<f64>,
    pub centers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub curve: Option<Vec<CurvePoint>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace_fingerprint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmResult {
    pub name: String,
    pub repeats: Vec<RepeatResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub median_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_cost: Option<f64>,
    pub failures: usize,
}

impl AlgorithmResult {
    pub fn final_costs(&self) -> Vec<f64> {
        self.repeats.iter().filter_map(|r| r.final_cost).collect()
    }
}

/// `med(a)/med(b)` and `min(a)/min(b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    pub numerator: String,
    pub denominator: String,
    pub median_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema: u32,
    #[serde(with = "hex_u64")]
    pub seed: u64,
    pub n: usize,
    #[serde(with = "hex_u64")]
    pub data_fingerprint: u64,
    /// Cost of the planted solution, for generated data.
    pub reference_cost: Option<f64>,
    pub algorithms: Vec<AlgorithmResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratios: Option<Vec<RatioEntry>>,
}

impl RunResult {
    pub fn failures(&self) -> usize {
        self.algorithms.iter().map(|a| a.failures).sum()
    }

    pub fn algorithm(&self, name: &str) -> Option<&AlgorithmResult> {
        self.algorithms.iter().find(|a| a.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Wall-clock seconds per run; kept apart from [`RunResult`] so results stay
/// byte-stable.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub runs: Vec<RunTiming>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub algorithm: String,
    pub repeat: usize,
    pub seconds: f64,
}

/// Median of a nonempty sample; the mean of the middle pair for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

pub fn minimum(values: &[f64]) -> Option<f64> {
    values.iter().copied().min_by(f64::total_cmp)
}

/// Seed of one `(algorithm, repeat)` run.
pub fn run_seed(base: u64, algorithm: &str, repeat: usize) -> u64 {
    derive_key(base, &[label_key(algorithm), repeat as u64])
}

/// Cost after each prefix `C[..i]`, `i = 1..=|C|`.
fn prefix_curve(space: &PointSpace, points: &[Point], centers: &[Point]) -> Result<Vec<CurvePoint>> {
    let mut cache = NearestCache::build(space, points, &[])?;
    let mut out = Vec::with_capacity(centers.len());
    for (i, c) in centers.iter().enumerate() {
        cache = cache.add_center(c)?;
        out.push(CurvePoint {
            centers: i + 1,
            cost: cache.total_cost().expect("nonempty"),
        });
    }
    Ok(out)
}

struct RunOutput {
    final_cost: f64,
    centers: usize,
    curve: Vec<CurvePoint>,
    trace: Option<GreedyTrace>,
}

fn run_one(instance: &Instance, spec: &AlgorithmSpec, seed: u64, record: bool) -> Result<RunOutput> {
    let Instance { space, points, .. } = instance;
    let root = RngStream::new(seed);
    match spec {
        AlgorithmSpec::Kmeanspp { t } => {
            let centers = kmeanspp_seed(space, points, *t, &mut root.labelled_child("kmeanspp"))?;
            let curve = prefix_curve(space, points, &centers)?;
            Ok(RunOutput {
                final_cost: curve.last().expect("t >= 1").cost,
                centers: centers.len(),
                curve,
                trace: None,
            })
        }
        AlgorithmSpec::Greedy {
            selector,
            init,
            t,
            tau,
        } => {
            let initial = match init {
                InitPolicy::Empty => Vec::new(),
                InitPolicy::Kmeanspp { centers } => {
                    kmeanspp_seed(space, points, *centers, &mut root.labelled_child("init"))?
                }
                InitPolicy::Provided { centers } => centers.clone(),
            };
            let mut curve = prefix_curve(space, points, &initial)?;
            let mut cfg = GreedyConfig::new(*t, selector.clone())
                .with_tau(*tau)
                .with_initial_centers(initial)
                .with_seed(root.labelled_child("greedy").key());
            cfg.record_candidates = record;
            let trace = run_greedy(space, points, &cfg)?;
            let c0 = trace.initial_centers.len();
            let mut count = c0;
            for r in &trace.rounds {
                if r.center.is_some() {
                    count += 1;
                }
                curve.push(CurvePoint {
                    centers: count,
                    cost: r.cost,
                });
            }
            Ok(RunOutput {
                final_cost: trace.final_cost(),
                centers: trace.centers.len(),
                curve,
                trace: Some(trace),
            })
        }
    }
}

/// Runs every `(algorithm, repeat)` pair and writes `result.json`,
/// `curve.csv`, `timing.json` and, with `emit_traces`, one JSONL trace per
/// greedy run under `traces/`.
///
/// Run failures are recorded in the result rather than aborting; callers
/// check [`RunResult::failures`].
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<RunResult> {
    config.validate()?;
    let out_dir = options.output.clone().unwrap_or_else(|| config.output.clone());
    let base_seed = options.seed.unwrap_or(config.seed);
    let threads = options.threads.or(config.threads);
    let instance = load_instance(&config.dataset, &config.space)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    let jobs: Vec<(&String, &AlgorithmSpec, usize)> = config
        .algorithms
        .iter()
        .flat_map(|(name, spec)| (0..config.repeats).map(move |r| (name, spec, r)))
        .collect();
    info!(
        "running {} jobs on {} points with {} threads",
        jobs.len(),
        instance.points.len(),
        pool.current_num_threads()
    );
    let outcomes: Vec<(Result<RunOutput>, f64, u64)> = pool.install(|| {
        jobs.par_iter()
            .map(|(name, spec, repeat)| {
                let seed = run_seed(base_seed, name, *repeat);
                let start = Instant::now();
                let out = run_one(&instance, spec, seed, options.emit_traces);
                (out, start.elapsed().as_secs_f64(), seed)
            })
            .collect()
    });

    fs::create_dir_all(&out_dir)?;
    if options.emit_traces {
        fs::create_dir_all(out_dir.join("traces"))?;
    }
    let mut timing = Timing::default();
    let mut algorithms: Vec<AlgorithmResult> = Vec::new();
    for ((name, _, repeat), (outcome, secs, seed)) in jobs.iter().zip(outcomes) {
        timing.runs.push(RunTiming {
            algorithm: name.to_string(),
            repeat: *repeat,
            seconds: secs,
        });
        if algorithms.last().is_none_or(|a| a.name != **name) {
            algorithms.push(AlgorithmResult {
                name: name.to_string(),
                repeats: Vec::new(),
                median_cost: None,
                min_cost: None,
                failures: 0,
            });
        }
        let entry = algorithms.last_mut().expect("just pushed");
        let rec = match outcome {
            Ok(out) => {
                if let (true, Some(trace)) = (options.emit_traces, &out.trace) {
                    let path = out_dir.join("traces").join(format!("{name}-{repeat}.jsonl"));
                    trace.write_jsonl(BufWriter::new(fs::File::create(path)?))?;
                }
                RepeatResult {
                    repeat: *repeat,
                    seed,
                    final_cost: out.final_cost.is_finite().then_some(out.final_cost),
                    centers: Some(out.centers),
                    curve: config.wants(Metric::CostCurve).then_some(out.curve),
                    trace_fingerprint: out.trace.map(|t| format!("{:016x}", t.fingerprint())),
                    error: None,
                }
            }
            Err(e) => {
                warn!("{name} repeat {repeat} failed: {e}");
                entry.failures += 1;
                RepeatResult {
                    repeat: *repeat,
                    seed,
                    final_cost: None,
                    centers: None,
                    curve: None,
                    trace_fingerprint: None,
                    error: Some(e.to_string()),
                }
            }
        };
        entry.repeats.push(rec);
    }
    for a in &mut algorithms {
        let costs = a.final_costs();
        if config.wants(Metric::MedianCost) {
            a.median_cost = median(&costs);
        }
        if config.wants(Metric::MinCost) {
            a.min_cost = minimum(&costs);
        }
    }
    let ratios = config.wants(Metric::Ratios).then(|| ratio_table(&algorithms));
    let result = RunResult {
        schema: RESULT_SCHEMA,
        seed: base_seed,
        n: instance.points.len(),
        data_fingerprint: data_fingerprint(&instance.points),
        reference_cost: instance.reference.as_ref().map(|r| r.cost),
        algorithms,
        ratios,
    };

    fs::write(out_dir.join("result.json"), result.to_json()?)?;
    fs::write(
        out_dir.join("timing.json"),
        serde_json::to_string_pretty(&timing)? + "\n",
    )?;
    if config.wants(Metric::CostCurve) {
        write_curve_csv(&out_dir.join("curve.csv"), &result)?;
    }
    Ok(result)
}

fn ratio_table(algorithms: &[AlgorithmResult]) -> Vec<RatioEntry> {
    let div = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    let mut out = Vec::new();
    for a in algorithms {
        for b in algorithms {
            if a.name == b.name {
                continue;
            }
            let (ca, cb) = (a.final_costs(), b.final_costs());
            out.push(RatioEntry {
                numerator: a.name.clone(),
                denominator: b.name.clone(),
                median_ratio: div(median(&ca), median(&cb)),
                min_ratio: div(minimum(&ca), minimum(&cb)),
            });
        }
    }
    out
}

fn write_curve_csv(path: &Path, result: &RunResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "repeat", "centers", "cost"])?;
    for a in &result.algorithms {
        for r in &a.repeats {
            for p in r.curve.iter().flatten() {
                w.write_record([
                    a.name.clone(),
                    r.repeat.to_string(),
                    p.centers.to_string(),
                    format!("{:?}", p.cost),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
