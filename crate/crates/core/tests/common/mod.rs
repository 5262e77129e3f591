//! Instance generators and reference computations shared by the test targets.
#![allow(dead_code)]

use bicriteria::metric::DistanceMatrix;
use bicriteria::{Norm, Point, PointSpace};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const REL: f64 = 1e-9;

pub fn line(v: &[f64]) -> Vec<Point> {
    v.iter().map(|&x| Point::Coords(vec![x])).collect()
}

pub fn coords(points: &[Point]) -> Vec<Vec<f64>> {
    points.iter().map(|p| p.coords().unwrap().to_vec()).collect()
}

/// `a ≤ b` up to `rel` of the larger magnitude.
pub fn leq(a: f64, b: f64, rel: f64) -> bool {
    a <= b || a - b <= rel * a.abs().max(b.abs())
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(r: &mut impl Rng, n: usize, dim: usize, scale: f64) -> Vec<Point> {
    (0..n)
        .map(|_| Point::Coords((0..dim).map(|_| r.random_range(-scale..scale)).collect()))
        .collect()
}

/// Shortest-path closure of random symmetric weights: always a metric.
pub fn random_metric(r: &mut impl Rng, n: usize) -> DistanceMatrix {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = r.random_range(0.1..10.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    DistanceMatrix::from_rows(&d).unwrap()
}

/// Rotating family of spaces: k-means, l2/l1/l∞ with `p ∈ {1,2,3}`, finite metrics.
pub fn space_family(r: &mut impl Rng, case: usize, n: usize, dim: usize) -> (PointSpace, Vec<Point>) {
    match case % 6 {
        0 => (PointSpace::kmeans(dim).unwrap(), random_points(r, n, dim, 10.0)),
        1 => (
            PointSpace::euclidean(dim, Norm::L2, 1.0).unwrap(),
            random_points(r, n, dim, 10.0),
        ),
        2 => (
            PointSpace::euclidean(dim, Norm::L2, 2.0).unwrap(),
            random_points(r, n, dim, 10.0),
        ),
        3 => (
            PointSpace::euclidean(dim, Norm::L1, 3.0).unwrap(),
            random_points(r, n, dim, 10.0),
        ),
        4 => (
            PointSpace::euclidean(dim, Norm::Linf, 2.0).unwrap(),
            random_points(r, n, dim, 10.0),
        ),
        _ => {
            let p = [1.0, 2.0, 3.0][case / 6 % 3];
            let m = random_metric(r, n);
            let pts = (0..n).map(Point::Index).collect();
            (PointSpace::finite_metric(m, p).unwrap(), pts)
        }
    }
}

/// Random `k`-center reference: centers drawn from the data.
pub fn random_centers(r: &mut impl Rng, points: &[Point], k: usize) -> Vec<Point> {
    (0..k)
        .map(|_| points[r.random_range(0..points.len())].clone())
        .collect()
}

pub fn mean(points: &[Vec<f64>]) -> Vec<f64> {
    let d = points[0].len();
    let mut m = vec![0.0; d];
    for p in points {
        m.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
    m.iter_mut().for_each(|a| *a /= points.len() as f64);
    m
}

/// Geometric median by Weiszfeld's fixed-point iteration, to about `tol`.
///
/// Test utility only: used as the continuous k-medians reference.
pub fn weiszfeld(points: &[Vec<f64>], tol: f64) -> Vec<f64> {
    let mut y = mean(points);
    for _ in 0..10_000 {
        let mut num = vec![0.0; y.len()];
        let mut den = 0.0;
        let mut coincident = false;
        for p in points {
            let d = p.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if d < 1e-15 {
                coincident = true;
                continue;
            }
            num.iter_mut().zip(p).for_each(|(n, v)| *n += v / d);
            den += 1.0 / d;
        }
        if den == 0.0 {
            return y;
        }
        let next: Vec<f64> = num.iter().map(|n| n / den).collect();
        let step = next.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        y = next;
        if step < tol || (coincident && step < tol * 10.0) {
            break;
        }
    }
    y
}

pub fn sum_dist(points: &[Vec<f64>], y: &[f64]) -> f64 {
    points
        .iter()
        .map(|p| p.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .sum()
}

/// Strategy for a small point cloud in `ℝ^dim`.
pub fn cloud(n: std::ops::RangeInclusive<usize>, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-100.0f64..100.0, dim), n)
}

pub fn to_points(v: &[Vec<f64>]) -> Vec<Point> {
    v.iter().cloned().map(Point::Coords).collect()
}
