//! Candidate-selection routines for the greedy loop, and the kmeans++ baseline.
//!
//! A selector proposes the candidate set `Y_i` for one round given the data,
//! the current centers (through their [`NearestCache`]) and a round-specific
//! random stream. The greedy loop then keeps the best candidate.

use std::borrow::Cow;
use std::sync::OnceLock;

use log::warn;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost::NearestCache;
use crate::error::{Error, Result};
use crate::metric::{Point, PointSpace};
use crate::rng::RngStream;

mod ball;
pub(crate) mod means;
mod sgd;

pub use ball::{guess_ball, select_ball, BallGuess};
pub use means::{multiset_count, subset_means, Multisets, DEFAULT_SUBSET_MEANS_LIMIT};
pub use sgd::{select_sgd, sgd_ball, sgd_path, DEFAULT_ETA_FACTOR};

/// Ceiling on sample counts derived from the guarantee formulas when no explicit
/// count is configured.
pub const MAX_DEFAULT_SAMPLES: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectorSpec {
    /// `Y_i = X`.
    SelectAll,
    /// Samples with probability proportional to `Δ(x, C_{i-1})`.
    SelectPp {
        epsilon: f64,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        override_m: Option<usize>,
    },
    /// `m` uniform draws from `X` with replacement.
    SelectUniform { m: usize },
    /// Means of all size-`⌈1/ε⌉` multisets of `X` (k-means only).
    SubsetMeans { epsilon: f64 },
    /// guess-ball followed by projected SGD (Euclidean k-medians only).
    SelectSgd {
        epsilon: f64,
        samples: usize,
        #[serde(default = "default_eta_factor")]
        eta_factor: f64,
    },
    /// guess-ball followed by a uniform draw from a norm ball.
    SelectBall { epsilon: f64, samples: usize },
}

fn default_eta_factor() -> f64 {
    DEFAULT_ETA_FACTOR
}

impl SelectorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SelectorSpec::SelectAll => "select_all",
            SelectorSpec::SelectPp { .. } => "select_pp",
            SelectorSpec::SelectUniform { .. } => "select_uniform",
            SelectorSpec::SubsetMeans { .. } => "subset_means",
            SelectorSpec::SelectSgd { .. } => "select_sgd",
            SelectorSpec::SelectBall { .. } => "select_ball",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            SelectorSpec::SelectAll => Ok(()),
            SelectorSpec::SelectPp {
                epsilon,
                k,
                override_m,
            } => {
                if !(epsilon > 0.0 && epsilon.is_finite()) {
                    return bad(format!("select_pp: epsilon = {epsilon} must be > 0"));
                }
                if k == 0 {
                    return bad("select_pp: k must be positive".into());
                }
                if override_m == Some(0) {
                    return bad("select_pp: override_m must be positive".into());
                }
                Ok(())
            }
            SelectorSpec::SelectUniform { m } => {
                if m == 0 {
                    return bad("select_uniform: m must be positive".into());
                }
                Ok(())
            }
            SelectorSpec::SubsetMeans { epsilon } => check_unit_epsilon("subset_means", epsilon),
            SelectorSpec::SelectSgd {
                epsilon,
                samples,
                eta_factor,
            } => {
                check_unit_epsilon("select_sgd", epsilon)?;
                if samples == 0 {
                    return bad("select_sgd: samples must be positive".into());
                }
                if !(eta_factor > 0.0 && eta_factor.is_finite()) {
                    return bad(format!("select_sgd: eta_factor = {eta_factor} must be > 0"));
                }
                Ok(())
            }
            SelectorSpec::SelectBall { epsilon, samples } => {
                check_unit_epsilon("select_ball", epsilon)?;
                if samples == 0 {
                    return bad("select_ball: samples must be positive".into());
                }
                Ok(())
            }
        }
    }

    /// Checks that the selector is defined on `space`.
    pub fn check_space(&self, space: &PointSpace) -> Result<()> {
        match self {
            SelectorSpec::SubsetMeans { .. } if !space.is_kmeans() => Err(Error::UnsupportedSpace(
                "subset_means requires a k-means space".into(),
            )),
            SelectorSpec::SelectSgd { .. } => sgd::check_sgd_space(space),
            SelectorSpec::SelectBall { .. } if space.dim().is_none() => Err(
                Error::UnsupportedSpace("select_ball requires a Euclidean space".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Candidate count prescribed by the corresponding guarantee for `n`
    /// points, before any override or cap. `None` where no count is prescribed.
    pub fn prescribed_count(&self, n: usize, space: &PointSpace) -> Option<f64> {
        let q = space.q();
        let n = n as f64;
        match *self {
            SelectorSpec::SelectPp { epsilon, k, .. } => Some(select_pp_count(k, epsilon, q)),
            SelectorSpec::SelectSgd { epsilon, .. } => {
                let s = (1.0 / (epsilon * epsilon)).ceil();
                Some(2.0 * n.powf(3.0 + s))
            }
            SelectorSpec::SelectBall { epsilon, .. } => {
                let d = space.dim()? as f64;
                Some(n.powi(3) * epsilon.powf(-q * d / space.p()))
            }
            SelectorSpec::SubsetMeans { epsilon } => {
                let m = (1.0 / epsilon).ceil() as usize;
                Some(multiset_count(n as usize, m))
            }
            SelectorSpec::SelectAll => Some(n),
            SelectorSpec::SelectUniform { .. } => None,
        }
    }
}

fn check_unit_epsilon(name: &str, epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else if epsilon == 1.0 && name == "subset_means" {
        // m = 1 is well defined and gives Y = X.
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name}: epsilon = {epsilon} must lie in (0, 1)"
        )))
    }
}

/// `⌈4k((1+ε)/ε)^{q+4}⌉`, the select++ sample count.
pub fn select_pp_count(k: usize, epsilon: f64, q: f64) -> f64 {
    (4.0 * k as f64 * ((1.0 + epsilon) / epsilon).powf(q + 4.0)).ceil()
}

/// Candidate set for one round.
#[derive(Clone, Debug)]
pub struct Selection<'a> {
    pub candidates: Cow<'a, [Point]>,
    /// Set when the current cost is zero and no progress is possible.
    pub zero_cost: bool,
}

impl<'a> Selection<'a> {
    fn owned(candidates: Vec<Point>) -> Self {
        Selection {
            candidates: Cow::Owned(candidates),
            zero_cost: false,
        }
    }
}

/// A configured selector bound to one data set.
///
/// Round-independent candidate sets (subset means) are computed on first
/// use and reused for every later round.
#[derive(Debug)]
pub struct Selector<'a> {
    spec: SelectorSpec,
    space: &'a PointSpace,
    points: &'a [Point],
    subset_means_limit: f64,
    memo: OnceLock<Vec<Point>>,
}

impl<'a> Selector<'a> {
    pub fn new(spec: SelectorSpec, space: &'a PointSpace, points: &'a [Point]) -> Result<Self> {
        spec.validate()?;
        spec.check_space(space)?;
        Ok(Selector {
            spec,
            space,
            points,
            subset_means_limit: DEFAULT_SUBSET_MEANS_LIMIT,
            memo: OnceLock::new(),
        })
    }

    pub fn with_subset_means_limit(mut self, limit: f64) -> Self {
        self.subset_means_limit = limit;
        self
    }

    pub fn spec(&self) -> &SelectorSpec {
        &self.spec
    }

    pub fn select(&self, cache: &NearestCache<'_>, rng: &mut RngStream) -> Result<Selection<'_>> {
        match self.spec {
            SelectorSpec::SelectAll => Ok(Selection {
                candidates: Cow::Borrowed(select_all(self.points)),
                zero_cost: false,
            }),
            SelectorSpec::SelectPp {
                epsilon,
                k,
                override_m,
            } => select_pp(cache, epsilon, k, override_m, rng),
            SelectorSpec::SelectUniform { m } => {
                select_uniform(self.points, m, rng).map(Selection::owned)
            }
            SelectorSpec::SubsetMeans { epsilon } => {
                if self.memo.get().is_none() {
                    let means =
                        subset_means(self.space, self.points, epsilon, self.subset_means_limit)?;
                    let _ = self.memo.set(means);
                }
                Ok(Selection {
                    candidates: Cow::Borrowed(self.memo.get().expect("initialized above")),
                    zero_cost: false,
                })
            }
            SelectorSpec::SelectSgd {
                epsilon,
                samples,
                eta_factor,
            } => select_sgd(self.space, self.points, epsilon, samples, eta_factor, rng)
                .map(Selection::owned),
            SelectorSpec::SelectBall { epsilon, samples } => {
                select_ball(self.space, self.points, epsilon, samples, rng).map(Selection::owned)
            }
        }
    }
}

/// `Y = X`.
pub fn select_all(points: &[Point]) -> &[Point] {
    points
}

/// Draws `m` candidates i.i.d. with `Pr[x] ∝ Δ(x, C)`.
///
/// With no centers yet the draws are uniform. When the current cost is zero a
/// single uniform point is returned with `zero_cost` set.
pub fn select_pp(
    cache: &NearestCache<'_>,
    epsilon: f64,
    k: usize,
    override_m: Option<usize>,
    rng: &mut RngStream,
) -> Result<Selection<'static>> {
    SelectorSpec::SelectPp {
        epsilon,
        k,
        override_m,
    }
    .validate()?;
    let points = cache.points();
    if points.is_empty() {
        return Ok(Selection::owned(Vec::new()));
    }
    let m = match override_m {
        Some(m) => m,
        None => capped_count(select_pp_count(k, epsilon, cache.space().q()), "select_pp"),
    };
    match cache.total_cost() {
        None => select_uniform(points, m, rng).map(Selection::owned),
        Some(total) if total <= 0.0 => {
            let x = points[rng.random_range(0..points.len())].clone();
            Ok(Selection {
                candidates: Cow::Owned(vec![x]),
                zero_cost: true,
            })
        }
        Some(_) => {
            let law = WeightedIndex::new(cache.nearest_dist())
                .map_err(|e| Error::InvalidParameter(format!("select_pp weights: {e}")))?;
            Ok(Selection::owned(
                (0..m).map(|_| points[law.sample(rng)].clone()).collect(),
            ))
        }
    }
}

pub(crate) fn capped_count(count: f64, who: &str) -> usize {
    if count > MAX_DEFAULT_SAMPLES as f64 {
        warn!("{who}: prescribed count {count:.3e} capped at {MAX_DEFAULT_SAMPLES}");
        MAX_DEFAULT_SAMPLES
    } else {
        count.max(1.0) as usize
    }
}

/// `m` uniform draws from `X`, with replacement.
pub fn select_uniform(points: &[Point], m: usize, rng: &mut RngStream) -> Result<Vec<Point>> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "select_uniform: m must be positive".into(),
        ));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter(
            "select_uniform: no points to draw from".into(),
        ));
    }
    Ok((0..m)
        .map(|_| points[rng.random_range(0..points.len())].clone())
        .collect())
}

/// kmeans++ seeding: the first center uniform, each later one drawn with
/// probability proportional to `Δ(x, current centers)`.
///
/// Once every point coincides with a center, further draws are uniform.
pub fn kmeanspp_seed(
    space: &PointSpace,
    points: &[Point],
    t: usize,
    rng: &mut RngStream,
) -> Result<Vec<Point>> {
    if t == 0 {
        return Err(Error::InvalidParameter("kmeans++: t must be positive".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("kmeans++: no points to seed from".into()));
    }
    let mut cache = NearestCache::build(space, points, &[])?;
    for _ in 0..t {
        let pick = match cache.total_cost() {
            Some(total) if total > 0.0 => {
                let law = WeightedIndex::new(cache.nearest_dist())
                    .map_err(|e| Error::InvalidParameter(format!("kmeans++ weights: {e}")))?;
                law.sample(rng)
            }
            _ => rng.random_range(0..points.len()),
        };
        cache = cache.add_center(&points[pick])?;
    }
    Ok(cache.centers().to_vec())
}
