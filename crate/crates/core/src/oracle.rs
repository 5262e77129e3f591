//! Exhaustive ground truth for tiny instances.
//!
//! Every size limit is a hard error; nothing here is ever approximate.

use rayon::prelude::*;

use crate::cost::{cost_unchecked, Partition};
use crate::error::{Error, Result};
use crate::metric::{Point, PointSpace};
use crate::select::means::{check_multiset_budget, mean_of};
use crate::select::Multisets;

pub const MEDOIDS_MAX_POINTS: usize = 16;
pub const KMEANS_MAX_POINTS: usize = 10;
pub const INABA_BUDGET: f64 = 1e6;

/// Best `k`-subset of `X` as centers.
#[derive(Clone, Debug, PartialEq)]
pub struct MedoidSolution {
    /// Indices into `X`, increasing.
    pub indices: Vec<usize>,
    pub centers: Vec<Point>,
    pub cost: f64,
}

/// Lexicographic `k`-combinations of `0..n`.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.take()?;
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                cur = Some(next);
                break;
            }
        }
        Some(out)
    })
}

/// Exact minimum of `φ_X(C)` over all size-`k` subsets `C ⊆ X`.
///
/// Ties go to the lexicographically smallest index set.
pub fn brute_force_medoids(space: &PointSpace, points: &[Point], k: usize) -> Result<MedoidSolution> {
    let n = points.len();
    if n > MEDOIDS_MAX_POINTS {
        return Err(Error::BudgetExceeded {
            what: "brute_force_medoids points",
            size: n as f64,
            limit: MEDOIDS_MAX_POINTS as f64,
        });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "brute_force_medoids: need 1 <= k <= {n}, got {k}"
        )));
    }
    space.check_points(points)?;
    let delta: Vec<Vec<f64>> = points
        .iter()
        .map(|x| points.iter().map(|c| space.delta_unchecked(x, c)).collect())
        .collect();
    let combos: Vec<Vec<usize>> = combinations(n, k).collect();
    let (indices, cost) = combos
        .into_par_iter()
        .map(|idx| {
            let cost: f64 = delta
                .iter()
                .map(|row| idx.iter().map(|&c| row[c]).fold(f64::INFINITY, f64::min))
                .sum();
            (idx, cost)
        })
        .reduce_with(|a, b| {
            // Combinations arrive in arbitrary order; compare keys explicitly.
            match a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)) {
                std::cmp::Ordering::Greater => b,
                _ => a,
            }
        })
        .expect("at least one combination");
    Ok(MedoidSolution {
        centers: indices.iter().map(|&i| points[i].clone()).collect(),
        indices,
        cost,
    })
}

/// Optimal k-means partition into at most `k` nonempty parts.
#[derive(Clone, Debug, PartialEq)]
pub struct KMeansSolution {
    pub partition: Partition,
    pub means: Vec<Point>,
    pub cost: f64,
}

/// Restricted-growth strings of length `n` using at most `k` blocks.
struct GrowthStrings {
    n: usize,
    k: usize,
    a: Vec<usize>,
    done: bool,
}

impl GrowthStrings {
    fn new(n: usize, k: usize) -> Self {
        GrowthStrings {
            n,
            k,
            a: vec![0; n],
            done: n == 0,
        }
    }
}

impl Iterator for GrowthStrings {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.a.clone();
        // Increment the rightmost position that may grow: a[i] ≤ max(a[..i]) and a[i] + 1 < k.
        let mut i = self.n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            let prefix_max = self.a[..i].iter().copied().max().unwrap_or(0);
            if self.a[i] <= prefix_max && self.a[i] + 1 < self.k {
                self.a[i] += 1;
                self.a[i + 1..].iter_mut().for_each(|v| *v = 0);
                break;
            }
        }
        Some(out)
    }
}

/// Exact minimum over partitions of `X` into at most `k` nonempty parts of
/// `Σ_j φ_{A_j}({μ(A_j)})`.
pub fn brute_force_kmeans(space: &PointSpace, points: &[Point], k: usize) -> Result<KMeansSolution> {
    if !space.is_kmeans() {
        return Err(Error::UnsupportedSpace(
            "brute_force_kmeans requires a k-means space".into(),
        ));
    }
    let n = points.len();
    if n > KMEANS_MAX_POINTS {
        return Err(Error::BudgetExceeded {
            what: "brute_force_kmeans points",
            size: n as f64,
            limit: KMEANS_MAX_POINTS as f64,
        });
    }
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter(
            "brute_force_kmeans: need at least one point and k >= 1".into(),
        ));
    }
    space.check_points(points)?;
    let dim = space.dim().expect("k-means space is Euclidean");
    let mut best: Option<(f64, Vec<usize>)> = None;
    for labels in GrowthStrings::new(n, k.min(n)) {
        let c = exact_cost(space, points, &labels, dim);
        // Strict: ties keep the earliest growth string.
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, labels));
        }
    }
    let (_, labels) = best.expect("n >= 1");
    let blocks = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut parts = vec![Vec::new(); blocks];
    for (i, &l) in labels.iter().enumerate() {
        parts[l].push(i);
    }
    let means: Vec<Point> = parts
        .iter()
        .map(|p| Point::Coords(mean_of(points, p, dim)))
        .collect();
    let cost = exact_cost(space, points, &labels, dim);
    Ok(KMeansSolution {
        partition: Partition { parts },
        means,
        cost,
    })
}

/// `Σ_j φ_{A_j}({μ(A_j)})` for the partition encoded by `labels`.
fn exact_cost(space: &PointSpace, points: &[Point], labels: &[usize], dim: usize) -> f64 {
    let blocks = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut sums = vec![vec![0.0; dim]; blocks];
    let mut counts = vec![0usize; blocks];
    for (x, &l) in points.iter().zip(labels) {
        let c = x.coords().expect("Euclidean point");
        sums[l].iter_mut().zip(c).for_each(|(s, v)| *s += v);
        counts[l] += 1;
    }
    let means: Vec<Point> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &m)| Point::Coords(s.into_iter().map(|v| v / m as f64).collect()))
        .collect();
    points
        .iter()
        .zip(labels)
        .map(|(x, &l)| space.delta_unchecked(x, &means[l]))
        .sum()
}

/// Best mean over all size-`⌈1/ε⌉` multisets of `A`, with its cost ratio
/// `φ_A({best})/φ_A({μ(A)})` (1 when `A` has zero spread).
pub fn inaba_search(space: &PointSpace, cluster: &[Point], epsilon: f64) -> Result<(Point, f64)> {
    if !space.is_kmeans() {
        return Err(Error::UnsupportedSpace(
            "inaba_search requires a k-means space".into(),
        ));
    }
    if cluster.is_empty() {
        return Err(Error::EmptyCluster);
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "inaba_search: epsilon = {epsilon} must be > 0"
        )));
    }
    space.check_points(cluster)?;
    let m = (1.0 / epsilon).ceil().max(1.0) as usize;
    check_multiset_budget("inaba_search multisets", cluster.len(), m, INABA_BUDGET)?;
    let dim = space.dim().expect("k-means space is Euclidean");
    let all: Vec<usize> = (0..cluster.len()).collect();
    let mu = Point::Coords(mean_of(cluster, &all, dim));
    let base = cost_unchecked(space, cluster, std::slice::from_ref(&mu));
    let mut best: Option<(Point, f64)> = None;
    for idx in Multisets::new(cluster.len(), m) {
        let c = Point::Coords(mean_of(cluster, &idx, dim));
        let v = cost_unchecked(space, cluster, std::slice::from_ref(&c));
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((c, v));
        }
    }
    let (point, cost) = best.expect("nonempty cluster");
    let ratio = if base > 0.0 { cost / base } else { 1.0 };
    Ok((point, ratio))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[f64]) -> Vec<Point> {
        v.iter().map(|&x| Point::Coords(vec![x])).collect()
    }

    fn km() -> PointSpace {
        PointSpace::kmeans(1).unwrap()
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(
            all,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 3).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
    }

    #[test]
    fn growth_strings_count_partitions() {
        // Bell numbers restricted by block count (Stirling sums).
        assert_eq!(GrowthStrings::new(3, 3).count(), 5);
        assert_eq!(GrowthStrings::new(4, 2).count(), 8);
        assert_eq!(GrowthStrings::new(5, 5).count(), 52);
        assert_eq!(GrowthStrings::new(4, 1).count(), 1);
    }

    #[test]
    fn medoid_examples() {
        let x = line(&[0., 1., 4.]);
        let s = brute_force_medoids(&km(), &x, 2).unwrap();
        assert_eq!(s.indices, vec![0, 2]);
        assert_eq!(s.cost, 1.0);
        assert_eq!(brute_force_medoids(&km(), &x, 3).unwrap().cost, 0.0);
        let one = brute_force_medoids(&km(), &x, 1).unwrap();
        assert_eq!((one.indices, one.cost), (vec![1], 10.0));
        let big = line(&(0..17).map(f64::from).collect::<Vec<_>>());
        assert!(matches!(
            brute_force_medoids(&km(), &big, 2),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn kmeans_examples() {
        let x = line(&[0., 1., 4.]);
        let s = brute_force_kmeans(&km(), &x, 2).unwrap();
        assert_eq!(s.partition.parts, vec![vec![0, 1], vec![2]]);
        assert_eq!(s.means, line(&[0.5, 4.]));
        assert_eq!(s.cost, 0.5);
        assert_eq!(brute_force_kmeans(&km(), &x, 5).unwrap().cost, 0.0);
        let twin = line(&[3., 3.]);
        let t = brute_force_kmeans(&km(), &twin, 1).unwrap();
        assert_eq!((t.cost, t.means.clone()), (0.0, line(&[3.])));
        let big = line(&(0..11).map(f64::from).collect::<Vec<_>>());
        assert!(brute_force_kmeans(&km(), &big, 2).is_err());
    }

    #[test]
    fn inaba_examples() {
        let (c, r) = inaba_search(&km(), &line(&[0., 2.]), 1.0).unwrap();
        assert_eq!(c, Point::Coords(vec![0.]));
        assert_eq!(r, 2.0);
        assert_eq!(inaba_search(&km(), &line(&[5.]), 0.5).unwrap().1, 1.0);
        let (_, r2) = inaba_search(&km(), &line(&[0., 2.]), 0.5).unwrap();
        assert_eq!(r2, 1.0);
    }
}
