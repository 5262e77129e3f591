//! Data-dependent constants and per-round certificates against a reference
//! solution `C* = {c*_1, …, c*_k}` with induced clusters `A*_1, …, A*_k`.
//!
//! Every inequality certificate allows a slack of [`REL_TOL`] relative to the
//! larger side; raw residuals are reported alongside the verdicts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{assign, cost_unchecked, normalize, NearestCache, Partition};
use crate::error::{Error, Result};
use crate::greedy::{data_fingerprint, GreedyTrace};
use crate::metric::{Point, PointSpace};
use crate::serde_util::finite_or_null;

/// Relative slack on floating-point certificates.
pub const REL_TOL: f64 = 1e-9;

/// `lhs ≤ rhs` up to [`REL_TOL`] of the larger magnitude.
pub fn leq_tol(lhs: f64, rhs: f64) -> bool {
    if lhs <= rhs {
        return true;
    }
    let scale = lhs.abs().max(rhs.abs());
    scale.is_finite() && lhs - rhs <= REL_TOL * scale
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub centers: Vec<Point>,
    pub partition: Partition,
    /// `φ_X(C*)`.
    pub cost: f64,
    /// Set when every `c*_j` must equal the mean of its cluster (k-means).
    #[serde(default)]
    pub means_required: bool,
}

impl ReferenceSolution {
    /// Reference from arbitrary centers; the partition is `assign(X, centers)`.
    pub fn new(space: &PointSpace, points: &[Point], centers: Vec<Point>) -> Result<Self> {
        let partition = assign(space, points, &centers)?;
        let cost = cost_unchecked(space, points, &centers);
        Ok(ReferenceSolution {
            centers,
            partition,
            cost,
            means_required: false,
        })
    }

    /// k-means reference whose centers must be the means of their clusters.
    pub fn with_means(space: &PointSpace, points: &[Point], centers: Vec<Point>) -> Result<Self> {
        let mut r = Self::new(space, points, centers)?;
        r.means_required = true;
        r.verify(space, points)?;
        Ok(r)
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    /// Re-checks the invariants, e.g. after loading from JSON.
    pub fn verify(&self, space: &PointSpace, points: &[Point]) -> Result<()> {
        let fresh = assign(space, points, &self.centers)?;
        if fresh != self.partition {
            return Err(Error::DegenerateReference(
                "partition differs from the nearest-center assignment".into(),
            ));
        }
        let total: f64 = self.cluster_costs(space, points).iter().sum();
        if (total - self.cost).abs() > REL_TOL * total.abs().max(self.cost.abs()) {
            return Err(Error::DegenerateReference(format!(
                "recorded cost {} differs from recomputed {total}",
                self.cost
            )));
        }
        if self.means_required {
            if !space.is_kmeans() {
                return Err(Error::UnsupportedSpace(
                    "mean-centered references need a k-means space".into(),
                ));
            }
            for (j, part) in self.partition.parts.iter().enumerate() {
                if part.is_empty() {
                    continue;
                }
                let mean = cluster_mean(points, part);
                let c = self.centers[j].coords().expect("k-means point");
                for (a, b) in c.iter().zip(&mean) {
                    if (a - b).abs() > REL_TOL * b.abs().max(1.0) {
                        return Err(Error::DegenerateReference(format!(
                            "center {j} is not the mean of its cluster"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `φ_{A*_j}({c*_j})` for every `j`.
    pub fn cluster_costs(&self, space: &PointSpace, points: &[Point]) -> Vec<f64> {
        self.partition
            .parts
            .iter()
            .zip(&self.centers)
            .map(|(part, c)| part.iter().map(|&i| space.delta_unchecked(&points[i], c)).sum())
            .collect()
    }

    pub fn cluster(&self, j: usize, points: &[Point]) -> Vec<Point> {
        self.partition.members(j, points)
    }
}

pub(crate) fn cluster_mean(points: &[Point], idx: &[usize]) -> Vec<f64> {
    let dim = points[idx[0]].coords().expect("Euclidean point").len();
    crate::select::means::mean_of(points, idx, dim)
}

/// `ψ_{x}({c}) / ψ_A({c})` for every `x ∈ A`; all zero when `φ_A({c}) = 0`.
fn point_ratios(space: &PointSpace, cluster: &[&Point], c: &Point) -> Vec<f64> {
    let deltas: Vec<f64> = cluster.iter().map(|x| space.delta_unchecked(x, c)).collect();
    let phi: f64 = deltas.iter().sum();
    if phi <= 0.0 {
        return vec![0.0; deltas.len()];
    }
    let psi_a = normalize(space, phi, deltas.len());
    deltas
        .into_iter()
        .map(|d| normalize(space, d, 1) / psi_a)
        .collect()
}

fn reference_clusters<'p>(
    reference: &ReferenceSolution,
    points: &'p [Point],
) -> Vec<(usize, Vec<&'p Point>)> {
    reference
        .partition
        .parts
        .iter()
        .enumerate()
        .filter(|(_, part)| !part.is_empty())
        .map(|(j, part)| (j, part.iter().map(|&i| &points[i]).collect()))
        .collect()
}

/// `κ̂_lb`: over nonempty clusters, the largest single-point minimum of
/// `ψ_{x}({c*_j}) / ψ_{A*_j}({c*_j})`.
pub fn kappa_lb(space: &PointSpace, points: &[Point], reference: &ReferenceSolution) -> Result<f64> {
    let clusters = reference_clusters(reference, points);
    if clusters.is_empty() {
        return Err(Error::DegenerateReference("every cluster is empty".into()));
    }
    Ok(clusters
        .iter()
        .map(|(j, a)| {
            point_ratios(space, a, &reference.centers[*j])
                .into_iter()
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

/// Points of `A` whose `ψ`-ratio to `c` is at most `kappa`.
pub fn core_set(space: &PointSpace, cluster: &[Point], c: &Point, kappa: f64) -> Result<Vec<Point>> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster);
    }
    space.check_points(cluster)?;
    space.check_point(c)?;
    let refs: Vec<&Point> = cluster.iter().collect();
    Ok(point_ratios(space, &refs, c)
        .into_iter()
        .zip(cluster)
        .filter(|(r, _)| *r <= kappa)
        .map(|(_, x)| x.clone())
        .collect())
}

/// Smallest core size that meets `|core| ≥ ε|A|/(1+ε)`.
fn core_quota(epsilon: f64, size: usize) -> usize {
    let need = epsilon * size as f64 / (1.0 + epsilon);
    ((need * (1.0 - 1e-12)).ceil() as usize).clamp(1, size)
}

/// `κ̂`: the least `κ` for which every cluster's core holds an
/// `ε/(1+ε)` fraction of its points.
pub fn kappa_core(
    space: &PointSpace,
    points: &[Point],
    reference: &ReferenceSolution,
    epsilon: f64,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} must be > 0"
        )));
    }
    let clusters = reference_clusters(reference, points);
    if clusters.is_empty() {
        return Err(Error::DegenerateReference("every cluster is empty".into()));
    }
    Ok(clusters
        .iter()
        .map(|(j, a)| {
            let mut ratios = point_ratios(space, a, &reference.centers[*j]);
            ratios.sort_by(f64::total_cmp);
            ratios[core_quota(epsilon, a.len()) - 1]
        })
        .fold(0.0, f64::max))
}

/// For every cluster, `min_{c∈Y} φ_{A*_j}({c})` (+∞ for empty clusters).
fn min_single_center_costs(
    space: &PointSpace,
    points: &[Point],
    labels: &[usize],
    k: usize,
    candidates: &[Point],
) -> Vec<f64> {
    candidates
        .par_iter()
        .map(|c| {
            let mut sums = vec![0.0; k];
            for (x, &j) in points.iter().zip(labels) {
                sums[j] += space.delta_unchecked(x, c);
            }
            sums
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(vec![f64::INFINITY; k], |mut acc, sums| {
            acc.iter_mut().zip(sums).for_each(|(a, s)| *a = a.min(s));
            acc
        })
}

fn labels_of(reference: &ReferenceSolution, n: usize) -> Result<Vec<usize>> {
    reference
        .partition
        .labels(n)
        .ok_or_else(|| Error::DegenerateReference("partition does not cover the data".into()))
}

/// Condition 1: every nonempty cluster has a candidate `c` with
/// `φ_{A*_j}({c}) ≤ γ·φ_{A*_j}({c*_j})`.
pub fn check_condition1(
    space: &PointSpace,
    points: &[Point],
    reference: &ReferenceSolution,
    candidates: &[Point],
    gamma: f64,
) -> Result<bool> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    space.check_points(candidates)?;
    let labels = labels_of(reference, points.len())?;
    let mins = min_single_center_costs(space, points, &labels, reference.k(), candidates);
    let opt = reference.cluster_costs(space, points);
    Ok(condition1_from(&reference.partition, &mins, &opt, gamma))
}

fn condition1_from(partition: &Partition, mins: &[f64], opt: &[f64], gamma: f64) -> bool {
    partition
        .parts
        .iter()
        .zip(mins.iter().zip(opt))
        .filter(|(part, _)| !part.is_empty())
        .all(|(_, (&m, &o))| leq_tol(m, gamma * o))
}

/// Condition 2 verdict. The brackets are differences of cluster costs, so
/// the slack is taken relative to the largest cluster cost involved.
fn condition2_holds(prev: &[f64], opt: &[f64], gamma: f64, lhs: f64, rhs: f64) -> bool {
    let scale = prev
        .iter()
        .zip(opt)
        .map(|(p, o)| p.max(gamma * o))
        .fold(0.0, f64::max);
    rhs <= lhs + REL_TOL * scale
}

/// Both sides of Condition 2.
fn condition2_sides(prev: &[f64], mins: &[f64], opt: &[f64], gamma: f64) -> (f64, f64) {
    let lhs = prev
        .iter()
        .zip(mins)
        .map(|(p, m)| (p - m).max(0.0))
        .fold(0.0, f64::max);
    let rhs = prev
        .iter()
        .zip(opt)
        .map(|(p, o)| (p - gamma * o).max(0.0))
        .fold(0.0, f64::max);
    (lhs, rhs)
}

/// Condition 2: the best single-cluster improvement offered by the candidates
/// is at least the largest excess of `φ_{A*_j}(C_prev)` over `γ·φ_{A*_j}({c*_j})`.
pub fn check_condition2(
    space: &PointSpace,
    points: &[Point],
    reference: &ReferenceSolution,
    prev_centers: &[Point],
    candidates: &[Point],
    gamma: f64,
) -> Result<bool> {
    if prev_centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let cache = NearestCache::build(space, points, prev_centers)?;
    Ok(certify_round(space, points, reference, &cache, candidates, gamma)?.condition2)
}

/// Verdicts for one greedy round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCertificate {
    pub condition1: bool,
    pub condition2: bool,
    /// Left side of Condition 2 (+∞, written as null, while `C_prev` is empty).
    #[serde(with = "finite_or_null")]
    pub lhs: f64,
    #[serde(with = "finite_or_null")]
    pub rhs: f64,
}

/// Certifies both conditions for `(C_prev, Y)` where `cache` holds `C_prev`.
///
/// With `C_prev` empty every cluster cost is +∞ and Condition 2 holds
/// vacuously.
pub fn certify_round(
    space: &PointSpace,
    points: &[Point],
    reference: &ReferenceSolution,
    cache: &NearestCache<'_>,
    candidates: &[Point],
    gamma: f64,
) -> Result<ConditionCertificate> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    space.check_points(candidates)?;
    let k = reference.k();
    let labels = labels_of(reference, points.len())?;
    let mins = min_single_center_costs(space, points, &labels, k, candidates);
    let opt = reference.cluster_costs(space, points);
    let condition1 = condition1_from(&reference.partition, &mins, &opt, gamma);
    if cache.total_cost().is_none() {
        return Ok(ConditionCertificate {
            condition1,
            condition2: true,
            lhs: f64::INFINITY,
            rhs: f64::INFINITY,
        });
    }
    let mut prev = vec![0.0; k];
    for (&d, &j) in cache.nearest_dist().iter().zip(&labels) {
        prev[j] += d;
    }
    let (lhs, rhs) = condition2_sides(&prev, &mins, &opt, gamma);
    Ok(ConditionCertificate {
        condition1,
        condition2: condition2_holds(&prev, &opt, gamma, lhs, rhs),
        lhs,
        rhs,
    })
}

/// `ψ_A({y}) ≤ ψ_A({c*}) + ψ_{y}({c*})`.
pub fn check_triangle_power(
    space: &PointSpace,
    cluster: &[Point],
    c_star: &Point,
    y: &Point,
) -> Result<bool> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster);
    }
    space.check_points(cluster)?;
    space.check_point(c_star)?;
    space.check_point(y)?;
    let n = cluster.len();
    let lhs = normalize(space, cost_unchecked(space, cluster, std::slice::from_ref(y)), n);
    let rhs = normalize(space, cost_unchecked(space, cluster, std::slice::from_ref(c_star)), n)
        + normalize(space, space.delta_unchecked(y, c_star), 1);
    Ok(leq_tol(lhs, rhs))
}

/// Declared constants for [`audit_run`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditParams {
    pub gamma: f64,
    pub tau: f64,
    pub epsilon: f64,
    /// Declared initial approximation factor; measured when absent.
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundAudit {
    pub round: usize,
    pub condition1_holds: bool,
    pub condition2_holds: bool,
    /// Whether the recurrence was checked (only on condition rounds).
    pub recurrence_checked: bool,
    pub recurrence_satisfied: bool,
    /// Bound minus observed cost; negative means violated.
    #[serde(with = "finite_or_null")]
    pub recurrence_slack: f64,
    #[serde(with = "finite_or_null")]
    pub cost_before: f64,
    pub cost_after: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub rounds: Vec<RoundAudit>,
    pub k: usize,
    pub gamma: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub alpha_declared: Option<f64>,
    /// `φ_X(C_0)/φ_X(C*)`.
    #[serde(with = "finite_or_null")]
    pub alpha_measured: f64,
    pub kappa_lb: f64,
    pub kappa_core: f64,
    /// Fraction of rounds on which a condition held.
    pub rho_empirical: f64,
    pub reference_cost: f64,
    #[serde(with = "finite_or_null")]
    pub final_ratio: f64,
    /// `k·ln((α − γ)/(γε))`, zero when `α ≤ γ`.
    pub predicted_rounds: f64,
    /// First round (0 = initial centers) with `φ ≤ γ(1+ε)φ*`.
    pub first_round_within_target: Option<usize>,
    pub tau_within_bound: bool,
    pub implication_violations: usize,
    pub recurrence_violations: usize,
}

impl RecurrenceReport {
    pub fn all_rounds_conditioned(&self) -> bool {
        self.rounds.iter().all(|r| r.condition2_holds)
    }

    pub fn is_clean(&self) -> bool {
        self.implication_violations == 0 && self.recurrence_violations == 0
    }
}

/// Replays a trace against a reference solution: per-round condition flags,
/// the one-step recurrence on condition rounds, and summary constants.
///
/// The trace must carry candidate sets (`record_candidates`).
pub fn audit_run(
    space: &PointSpace,
    points: &[Point],
    reference: &ReferenceSolution,
    trace: &GreedyTrace,
    params: AuditParams,
) -> Result<RecurrenceReport> {
    if trace.data_fingerprint != data_fingerprint(points) {
        return Err(Error::TraceMismatch(format!(
            "trace fingerprint {:016x} does not match data {:016x}",
            trace.data_fingerprint,
            data_fingerprint(points)
        )));
    }
    let AuditParams {
        gamma,
        tau,
        epsilon,
        alpha,
    } = params;
    let k = reference.k();
    let opt = reference.cost;
    let mut cache = NearestCache::build(space, points, &trace.initial_centers)?;
    let initial = cache.total_cost().unwrap_or(f64::INFINITY);
    if initial.is_finite() && !close(initial, trace.initial_cost) {
        return Err(Error::TraceMismatch(format!(
            "initial cost {} recorded, {initial} recomputed",
            trace.initial_cost
        )));
    }

    let kf = k as f64;
    let shrink = (1.0 - 1.0 / kf) * (1.0 + tau);
    let additive = gamma / kf * (1.0 + tau) * opt;
    let mut rounds = Vec::with_capacity(trace.rounds.len());
    let mut before = initial;
    for rec in &trace.rounds {
        let candidates = rec.candidate_set.as_deref().ok_or_else(|| {
            Error::TraceMismatch(format!("round {} has no recorded candidate set", rec.round))
        })?;
        let cert = if candidates.is_empty() {
            None
        } else {
            Some(certify_round(space, points, reference, &cache, candidates, gamma)?)
        };
        if let Some(c) = &rec.center {
            cache = cache.add_center(c)?;
        }
        let after = cache.total_cost().unwrap_or(f64::INFINITY);
        if !(after == rec.cost || close(after, rec.cost)) {
            return Err(Error::TraceMismatch(format!(
                "round {}: cost {} recorded, {after} recomputed",
                rec.round, rec.cost
            )));
        }
        let (c1, c2) = cert.map_or((false, false), |c| (c.condition1, c.condition2));
        // With C_prev empty the bound is +∞ and the step is vacuous.
        let (checked, satisfied, slack) = if c2 && before.is_finite() {
            let bound = shrink * before + additive;
            (true, leq_tol(after, bound), bound - after)
        } else {
            (false, true, f64::NAN)
        };
        rounds.push(RoundAudit {
            round: rec.round,
            condition1_holds: c1,
            condition2_holds: c2,
            recurrence_checked: checked,
            recurrence_satisfied: satisfied,
            recurrence_slack: if slack.is_nan() { f64::INFINITY } else { slack },
            cost_before: before,
            cost_after: after,
        });
        before = after;
    }

    let final_cost = before;
    let ratio = |c: f64| {
        if opt > 0.0 {
            c / opt
        } else if c == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    };
    let alpha_measured = ratio(initial);
    let a = alpha.unwrap_or(alpha_measured);
    let predicted_rounds = if a > gamma && a.is_finite() {
        kf * ((a - gamma) / (gamma * epsilon)).ln().max(0.0)
    } else {
        0.0
    };
    let target = gamma * (1.0 + epsilon) * opt;
    let first_round_within_target = std::iter::once((0, initial))
        .chain(rounds.iter().map(|r| (r.round, r.cost_after)))
        .find(|&(_, c)| leq_tol(c, target))
        .map(|(i, _)| i);
    let conditioned = rounds.iter().filter(|r| r.condition2_holds).count();
    Ok(RecurrenceReport {
        k,
        gamma,
        tau,
        epsilon,
        alpha_declared: alpha,
        alpha_measured,
        kappa_lb: kappa_lb(space, points, reference)?,
        kappa_core: kappa_core(space, points, reference, epsilon)?,
        rho_empirical: if rounds.is_empty() {
            0.0
        } else {
            conditioned as f64 / rounds.len() as f64
        },
        reference_cost: opt,
        final_ratio: ratio(final_cost),
        predicted_rounds,
        first_round_within_target,
        tau_within_bound: k <= 1 || tau < 1.0 / (kf - 1.0),
        implication_violations: rounds
            .iter()
            .filter(|r| r.condition1_holds && !r.condition2_holds)
            .count(),
        recurrence_violations: rounds.iter().filter(|r| !r.recurrence_satisfied).count(),
        rounds,
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}
