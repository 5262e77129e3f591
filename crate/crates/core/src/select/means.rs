use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::metric::{Point, PointSpace};

/// Default ceiling on the number of multisets enumerated by [`subset_means`].
pub const DEFAULT_SUBSET_MEANS_LIMIT: f64 = 2.0e6;

/// `C(n + m − 1, m)`, the number of size-`m` multisets over `n` items.
pub fn multiset_count(n: usize, m: usize) -> f64 {
    if n == 0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    (1..=m).fold(1.0, |acc, i| acc * (n - 1 + i) as f64 / i as f64).round()
}

/// Nondecreasing index sequences of length `m` over `0..n`, in
/// lexicographic order. Each multiset appears exactly once.
#[derive(Clone, Debug)]
pub struct Multisets {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Multisets {
    pub fn new(n: usize, m: usize) -> Self {
        Multisets {
            n,
            current: vec![0; m],
            done: n == 0 && m > 0,
        }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        match self.current.iter().rposition(|&i| i + 1 < self.n) {
            Some(pos) => {
                let v = self.current[pos] + 1;
                self.current[pos..].iter_mut().for_each(|i| *i = v);
            }
            None => self.done = true,
        }
        Some(out)
    }
}

pub(crate) fn check_multiset_budget(
    what: &'static str,
    n: usize,
    m: usize,
    limit: f64,
) -> Result<()> {
    let size = multiset_count(n, m);
    if size > limit {
        return Err(Error::BudgetExceeded { what, size, limit });
    }
    Ok(())
}

pub(crate) fn mean_of(points: &[Point], idx: &[usize], dim: usize) -> Vec<f64> {
    let mut sum = vec![0.0; dim];
    for &i in idx {
        let c = points[i].coords().expect("Euclidean point");
        sum.iter_mut().zip(c).for_each(|(s, v)| *s += v);
    }
    let m = idx.len() as f64;
    sum.into_iter().map(|s| s / m).collect()
}

/// Means of every size-`⌈1/ε⌉` multiset of `X`, exact duplicates removed,
/// in first-occurrence order.
pub fn subset_means(
    space: &PointSpace,
    points: &[Point],
    epsilon: f64,
    limit: f64,
) -> Result<Vec<Point>> {
    if !space.is_kmeans() {
        return Err(Error::UnsupportedSpace(
            "subset_means requires a k-means space".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "subset_means: epsilon = {epsilon} must lie in (0, 1]"
        )));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("subset_means: no points".into()));
    }
    space.check_points(points)?;
    let m = (1.0 / epsilon).ceil() as usize;
    check_multiset_budget("subset_means", points.len(), m, limit)?;
    let dim = space.dim().expect("k-means space is Euclidean");
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for idx in Multisets::new(points.len(), m) {
        let mean = mean_of(points, &idx, dim);
        let key: Vec<u64> = mean.iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            out.push(Point::Coords(mean));
        }
    }
    Ok(out)
}
