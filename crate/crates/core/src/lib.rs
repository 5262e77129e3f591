//! Greedy bi-criteria clustering for generalized k-medians and k-means.
//!
//! Each round asks a *selector* for a candidate set `Y` and adds the candidate
//! that lowers the clustering cost `φ_X(C) = Σ_x min_c Δ(x, c)` the most. Run
//! for more rounds than the target `k`, this trades extra centers for a cost
//! close to that of any reference `k`-solution.
//!
//! ```
//! use bicriteria::{run_greedy, GreedyConfig, Point, PointSpace, SelectorSpec};
//!
//! let space = PointSpace::kmeans(1)?;
//! let x: Vec<Point> = [0.0, 1.0, 4.0].iter().map(|&v| Point::Coords(vec![v])).collect();
//! let trace = run_greedy(&space, &x, &GreedyConfig::new(2, SelectorSpec::SelectAll))?;
//! assert_eq!(trace.costs(), vec![10.0, 1.0]);
//! # Ok::<(), bicriteria::Error>(())
//! ```
//!
//! Modules:
//! - [`metric`]: point spaces, `Δ = D^p`, metric validation, norm-ball sampling.
//! - [`cost`]: `φ`, `ψ` and the incremental nearest-center cache.
//! - [`select`]: candidate generators (exhaustive, kmeans++-style, subset means, SGD, ball).
//! - [`greedy`]: the loop and its JSONL trace.
//! - [`diagnostics`]: data-dependent constants and per-round certificates.
//! - [`oracle`]: exhaustive solvers for tiny instances.
//! - [`harness`]: data sets, synthetic mixtures and experiments.

pub mod cost;
pub mod diagnostics;
pub mod error;
pub mod greedy;
pub mod harness;
pub mod metric;
pub mod oracle;
pub mod rng;
pub mod select;
mod serde_util;

pub use cost::{assign, cost, normalized_cost, NearestCache, Partition};
pub use diagnostics::{
    audit_run, check_condition1, check_condition2, check_triangle_power, core_set, kappa_core,
    kappa_lb, AuditParams, ConditionCertificate, RecurrenceReport, ReferenceSolution,
};
pub use error::{Error, Result};
pub use greedy::{pick_candidate, run_greedy, run_greedy_certified, GreedyConfig, GreedyTrace};
pub use metric::{validate_finite_metric, DistanceMatrix, Norm, Point, PointSpace};
pub use oracle::{brute_force_kmeans, brute_force_medoids, inaba_search};
pub use rng::RngStream;
pub use select::{kmeanspp_seed, SelectorSpec};
