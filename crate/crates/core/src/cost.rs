//! Clustering cost `φ_X(C)`, its normalized form `ψ_A(C)`, and the
//! nearest-center cache that makes a candidate evaluation O(n).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Point, PointSpace};

/// Marks "no center yet" in [`NearestCache::nearest_idx`].
pub const NO_CENTER: usize = usize::MAX;

/// `Σ_{x∈X} min_{c∈C} Δ(x, c)`.
pub fn cost(space: &PointSpace, points: &[Point], centers: &[Point]) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    space.check_points(points)?;
    space.check_points(centers)?;
    Ok(cost_unchecked(space, points, centers))
}

pub(crate) fn cost_unchecked(space: &PointSpace, points: &[Point], centers: &[Point]) -> f64 {
    points
        .iter()
        .map(|x| nearest(space, x, centers).1)
        .sum()
}

/// Lowest-index nearest center and its Δ-distance.
#[inline]
pub(crate) fn nearest(space: &PointSpace, x: &Point, centers: &[Point]) -> (usize, f64) {
    let mut best = (NO_CENTER, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = space.delta_unchecked(x, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// `ψ_A(C) = (φ_A(C) / |A|)^{1/q}`.
pub fn normalized_cost(space: &PointSpace, cluster: &[Point], centers: &[Point]) -> Result<f64> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let phi = cost(space, cluster, centers)?;
    Ok(normalize(space, phi, cluster.len()))
}

/// Turns a raw cost over `size` points into `ψ`.
pub fn normalize(space: &PointSpace, phi: f64, size: usize) -> f64 {
    let mean = phi / size as f64;
    let q = space.q();
    if q == 1.0 {
        mean
    } else if q == 2.0 {
        mean.sqrt()
    } else {
        mean.powf(1.0 / q)
    }
}

/// Center-indexed lists of point indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub parts: Vec<Vec<usize>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Points of part `j`, cloned out of `points`.
    pub fn members(&self, j: usize, points: &[Point]) -> Vec<Point> {
        self.parts[j].iter().map(|&i| points[i].clone()).collect()
    }

    /// Label of each point, or `None` if some point is missing.
    pub fn labels(&self, n: usize) -> Option<Vec<usize>> {
        let mut labels = vec![NO_CENTER; n];
        for (j, part) in self.parts.iter().enumerate() {
            for &i in part {
                *labels.get_mut(i)? = j;
            }
        }
        labels.iter().all(|&l| l != NO_CENTER).then_some(labels)
    }
}

/// Assigns each point to its nearest center, lowest center index on ties.
pub fn assign(space: &PointSpace, points: &[Point], centers: &[Point]) -> Result<Partition> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    space.check_points(points)?;
    space.check_points(centers)?;
    let mut parts = vec![Vec::new(); centers.len()];
    for (i, x) in points.iter().enumerate() {
        parts[nearest(space, x, centers).0].push(i);
    }
    Ok(Partition { parts })
}

/// Per-point distance to the nearest current center.
///
/// Immutable once built: [`NearestCache::candidate_cost`] is read-only and may
/// be called concurrently, and [`NearestCache::add_center`] returns a new cache.
#[derive(Clone, Debug)]
pub struct NearestCache<'a> {
    space: &'a PointSpace,
    points: &'a [Point],
    centers: Vec<Point>,
    nearest_dist: Vec<f64>,
    nearest_idx: Vec<usize>,
    total: Option<f64>,
}

impl<'a> NearestCache<'a> {
    /// Builds the cache for `(X, C)`; an empty `C` gives the +∞ sentinel state.
    pub fn build(space: &'a PointSpace, points: &'a [Point], centers: &[Point]) -> Result<Self> {
        space.check_points(points)?;
        space.check_points(centers)?;
        let (nearest_idx, nearest_dist): (Vec<_>, Vec<_>) =
            points.iter().map(|x| nearest(space, x, centers)).unzip();
        let total = (!centers.is_empty()).then(|| nearest_dist.iter().sum());
        Ok(NearestCache {
            space,
            points,
            centers: centers.to_vec(),
            nearest_dist,
            nearest_idx,
            total,
        })
    }

    pub fn space(&self) -> &'a PointSpace {
        self.space
    }

    pub fn points(&self) -> &'a [Point] {
        self.points
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn nearest_dist(&self) -> &[f64] {
        &self.nearest_dist
    }

    /// Index into [`Self::centers`], [`NO_CENTER`] while `C` is empty.
    pub fn nearest_idx(&self) -> &[usize] {
        &self.nearest_idx
    }

    /// `φ_X(C)`, or `None` while `C` is empty.
    pub fn total_cost(&self) -> Option<f64> {
        self.total
    }

    /// Number of distinct centers; duplicates in `C` count once.
    pub fn distinct_centers(&self) -> usize {
        distinct_count(&self.centers)
    }

    /// `φ_X(C ∪ {c})` without modifying the cache.
    pub fn candidate_cost(&self, c: &Point) -> Result<f64> {
        self.space.check_point(c)?;
        Ok(self.candidate_cost_unchecked(c))
    }

    #[inline]
    pub(crate) fn candidate_cost_unchecked(&self, c: &Point) -> f64 {
        self.points
            .iter()
            .zip(&self.nearest_dist)
            .map(|(x, &d)| d.min(self.space.delta_unchecked(x, c)))
            .sum()
    }

    /// Cache for `C ∪ {c}`. The center is appended even if already present.
    pub fn add_center(&self, c: &Point) -> Result<NearestCache<'a>> {
        self.space.check_point(c)?;
        let j = self.centers.len();
        let mut next = self.clone();
        next.centers.push(c.clone());
        for ((x, d), idx) in self
            .points
            .iter()
            .zip(next.nearest_dist.iter_mut())
            .zip(next.nearest_idx.iter_mut())
        {
            let dc = self.space.delta_unchecked(x, c);
            if dc < *d {
                *d = dc;
                *idx = j;
            }
        }
        next.total = Some(next.nearest_dist.iter().sum());
        Ok(next)
    }

    /// Partition of `X` induced by the current centers.
    pub fn partition(&self) -> Result<Partition> {
        if self.centers.is_empty() {
            return Err(Error::EmptyCenters);
        }
        let mut parts = vec![Vec::new(); self.centers.len()];
        for (i, &j) in self.nearest_idx.iter().enumerate() {
            parts[j].push(i);
        }
        Ok(Partition { parts })
    }
}

pub(crate) fn distinct_count(points: &[Point]) -> usize {
    points
        .iter()
        .enumerate()
        .filter(|(i, p)| !points[..*i].iter().any(|q| q.same_as(p)))
        .count()
}
