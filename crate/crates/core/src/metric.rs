//! Ambient spaces, the base distance `D`, and the cost kernel `Δ = D^p`.
//!
//! Two kinds of space are supported: Euclidean coordinates under the l2, l1
//! or l∞ norm, and finite metrics given as an explicit distance matrix whose
//! points are addressed by index. k-means is the l2 space with `p = 2` and
//! normalization exponent `q = 1`; every other space uses `q = p`.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L2,
    L1,
    Linf,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L2 => "l2",
            Norm::L1 => "l1",
            Norm::Linf => "linf",
        })
    }
}

/// Square matrix of pairwise distances, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from rows. Fails unless every row has `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Shape("distance matrix has no rows".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    Euclidean { dim: usize, norm: Norm },
    FiniteMetric(DistanceMatrix),
}

/// A point of a [`PointSpace`]: coordinates in a Euclidean space, or an
/// index into a finite metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Index(usize),
    Coords(Vec<f64>),
}

impl Point {
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coords(c) => Some(c),
            Point::Index(_) => None,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            Point::Index(i) => Some(*i),
            Point::Coords(_) => None,
        }
    }

    /// Bitwise identity, used to count distinct centers.
    pub fn same_as(&self, other: &Point) -> bool {
        match (self, other) {
            (Point::Index(a), Point::Index(b)) => a == b,
            (Point::Coords(a), Point::Coords(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            _ => false,
        }
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::Coords(v)
    }
}

/// The pair (space, Δ) together with the exponents `p` and `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSpace {
    kind: SpaceKind,
    p: f64,
    is_kmeans: bool,
}

impl PointSpace {
    /// Euclidean k-means: squared l2 distance, `p = 2`, `q = 1`.
    pub fn kmeans(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(PointSpace {
            kind: SpaceKind::Euclidean {
                dim,
                norm: Norm::L2,
            },
            p: 2.0,
            is_kmeans: true,
        })
    }

    /// Generalized k-medians over a normed space with `Δ = ‖x − y‖^p`, `q = p`.
    pub fn euclidean(dim: usize, norm: Norm, p: f64) -> Result<Self> {
        Self::check_dim(dim)?;
        Self::check_exponent(p)?;
        Ok(PointSpace {
            kind: SpaceKind::Euclidean { dim, norm },
            p,
            is_kmeans: false,
        })
    }

    /// Generalized k-medians over a finite metric with `Δ = D^p`, `q = p`.
    ///
    /// The matrix is not checked for the metric axioms; see
    /// [`validate_finite_metric`].
    pub fn finite_metric(dist: DistanceMatrix, p: f64) -> Result<Self> {
        Self::check_exponent(p)?;
        Ok(PointSpace {
            kind: SpaceKind::FiniteMetric(dist),
            p,
            is_kmeans: false,
        })
    }

    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(())
    }

    fn check_exponent(p: f64) -> Result<()> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidParameter(format!("exponent p = {p} must be >= 1")));
        }
        Ok(())
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        if self.is_kmeans {
            1.0
        } else {
            self.p
        }
    }

    pub fn is_kmeans(&self) -> bool {
        self.is_kmeans
    }

    /// Euclidean dimension, `None` for finite metrics.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            SpaceKind::Euclidean { dim, .. } => Some(*dim),
            SpaceKind::FiniteMetric(_) => None,
        }
    }

    pub fn norm(&self) -> Option<Norm> {
        match &self.kind {
            SpaceKind::Euclidean { norm, .. } => Some(*norm),
            SpaceKind::FiniteMetric(_) => None,
        }
    }

    pub fn is_l2(&self) -> bool {
        self.norm() == Some(Norm::L2)
    }

    pub fn check_point(&self, a: &Point) -> Result<()> {
        match (&self.kind, a) {
            (SpaceKind::Euclidean { dim, .. }, Point::Coords(c)) => {
                if c.len() != *dim {
                    return Err(Error::InvalidPoint(format!(
                        "point has {} coordinates, space has dimension {dim}",
                        c.len()
                    )));
                }
                Ok(())
            }
            (SpaceKind::FiniteMetric(m), Point::Index(i)) => {
                if *i >= m.len() {
                    return Err(Error::InvalidPoint(format!(
                        "index {i} out of range for a metric on {} points",
                        m.len()
                    )));
                }
                Ok(())
            }
            (SpaceKind::Euclidean { .. }, Point::Index(i)) => Err(Error::InvalidPoint(format!(
                "index {i} given for a Euclidean space"
            ))),
            (SpaceKind::FiniteMetric(_), Point::Coords(_)) => Err(Error::InvalidPoint(
                "coordinates given for a finite metric".into(),
            )),
        }
    }

    pub fn check_points(&self, points: &[Point]) -> Result<()> {
        points.iter().try_for_each(|x| self.check_point(x))
    }

    /// Base distance `D(a, b)`.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.distance_unchecked(a, b))
    }

    /// Cost kernel `Δ(a, b) = D(a, b)^p`; squared Euclidean distance for k-means.
    pub fn delta(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.delta_unchecked(a, b))
    }

    /// `D(a, b)` for points already known to belong to this space.
    #[inline]
    pub fn distance_unchecked(&self, a: &Point, b: &Point) -> f64 {
        match (&self.kind, a, b) {
            (SpaceKind::Euclidean { norm, .. }, Point::Coords(x), Point::Coords(y)) => {
                norm_distance(*norm, x, y)
            }
            (SpaceKind::FiniteMetric(m), Point::Index(i), Point::Index(j)) => m.get(*i, *j),
            _ => panic!("point does not belong to this space"),
        }
    }

    #[inline]
    pub fn delta_unchecked(&self, a: &Point, b: &Point) -> f64 {
        if self.is_kmeans {
            if let (Point::Coords(x), Point::Coords(y)) = (a, b) {
                return squared_l2(x, y);
            }
        }
        self.power(self.distance_unchecked(a, b))
    }

    /// `d^p`, with the common integer exponents computed exactly.
    #[inline]
    pub fn power(&self, d: f64) -> f64 {
        if self.p == 1.0 {
            d
        } else if self.p == 2.0 {
            d * d
        } else if self.p == 3.0 {
            d * d * d
        } else {
            d.powf(self.p)
        }
    }
}

#[inline]
pub(crate) fn squared_l2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
pub(crate) fn norm_distance(norm: Norm, x: &[f64], y: &[f64]) -> f64 {
    match norm {
        Norm::L2 => squared_l2(x, y).sqrt(),
        Norm::L1 => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
        Norm::Linf => x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).abs())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonFinite { i: usize, j: usize },
    Negative { i: usize, j: usize },
    ZeroDiagonal { i: usize },
    Symmetry { i: usize, j: usize },
    /// `D(i, k) > D(i, via) + D(via, k)`.
    Triangle { i: usize, k: usize, via: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { i, j } => write!(f, "non-finite entry at ({i},{j})"),
            Violation::Negative { i, j } => write!(f, "negative entry at ({i},{j})"),
            Violation::ZeroDiagonal { i } => write!(f, "nonzero diagonal at ({i},{i})"),
            Violation::Symmetry { i, j } => write!(f, "asymmetric entries at ({i},{j})"),
            Violation::Triangle { i, k, via } => {
                write!(f, "triangle inequality fails for ({i},{k}) via {via}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in self.violations.iter().take(10) {
            write!(f, "; {v}")?;
        }
        if self.violations.len() > 10 {
            f.write_str("; ...")?;
        }
        Ok(())
    }
}

/// Checks the metric axioms on a square matrix. O(n³).
///
/// Symmetry and triangle violations are reported once per unordered pair;
/// the triangle check allows a relative slack of 1e-12 for values that went
/// through a decimal round trip.
pub fn validate_finite_metric(dist: &[Vec<f64>]) -> Result<ValidationReport> {
    let n = dist.len();
    if let Some((i, row)) = dist.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Shape(format!(
            "row {i} has {} entries, expected {n}",
            row.len()
        )));
    }
    let mut violations = Vec::new();
    for (i, row) in dist.iter().enumerate() {
        for (j, &d) in row.iter().enumerate() {
            if !d.is_finite() {
                violations.push(Violation::NonFinite { i, j });
            } else if d < 0.0 {
                violations.push(Violation::Negative { i, j });
            }
        }
        if row[i] != 0.0 {
            violations.push(Violation::ZeroDiagonal { i });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] != dist[j][i] {
                violations.push(Violation::Symmetry { i, j });
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            let direct = dist[i][k];
            for via in 0..n {
                if via == i || via == k {
                    continue;
                }
                let detour = dist[i][via] + dist[via][k];
                if direct > detour + 1e-12 * direct.abs().max(detour.abs()) {
                    violations.push(Violation::Triangle { i, k, via });
                }
            }
        }
    }
    Ok(ValidationReport { violations })
}

/// Uniform sample from the closed ball `{z : ‖z − center‖ ≤ radius}` under the
/// space's norm.
///
/// l2 uses a normalized Gaussian direction with radius `r·u^{1/d}`; l1 and l∞
/// use rejection from the enclosing cube.
pub fn norm_ball_sample(
    space: &PointSpace,
    center: &Point,
    radius: f64,
    rng: &mut RngStream,
) -> Result<Point> {
    let (dim, norm) = match space.kind() {
        SpaceKind::Euclidean { dim, norm } => (*dim, *norm),
        SpaceKind::FiniteMetric(_) => {
            return Err(Error::UnsupportedSpace(
                "ball sampling requires a Euclidean space".into(),
            ))
        }
    };
    space.check_point(center)?;
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ball radius {radius} must be finite and nonnegative"
        )));
    }
    let c = center.coords().expect("checked");
    if radius == 0.0 {
        return Ok(center.clone());
    }
    let offset = match norm {
        Norm::L2 => loop {
            let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let len = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if len > 0.0 {
                let u: f64 = rng.random();
                let scale = radius * u.powf(1.0 / dim as f64) / len;
                break g.into_iter().map(|v| v * scale).collect::<Vec<_>>();
            }
        },
        Norm::L1 | Norm::Linf => loop {
            let z: Vec<f64> = (0..dim)
                .map(|_| rng.random_range(-radius..=radius))
                .collect();
            let zero = vec![0.0; dim];
            if norm_distance(norm, &z, &zero) <= radius {
                break z;
            }
        },
    };
    Ok(Point::Coords(
        c.iter().zip(&offset).map(|(a, b)| a + b).collect(),
    ))
}
