use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{norm_ball_sample, Point, PointSpace};
use crate::rng::RngStream;

/// A guessed `(anchor, size, neighborhood)` triple.
///
/// `members` holds the indices of the `b` points closest to the anchor
/// (lowest index first among equal distances); `r_estimate = φ_B({y}) / m`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallGuess {
    pub anchor: usize,
    pub y: Point,
    pub m: usize,
    pub b: usize,
    pub members: Vec<usize>,
    pub ball_cost: f64,
    pub r_estimate: f64,
}

impl BallGuess {
    /// The triple for a fixed anchor index and sizes `b, m ∈ [1, n]`.
    pub fn from_triple(
        space: &PointSpace,
        points: &[Point],
        anchor: usize,
        b: usize,
        m: usize,
    ) -> Result<Self> {
        let n = points.len();
        if anchor >= n || !(1..=n).contains(&b) || !(1..=n).contains(&m) {
            return Err(Error::InvalidParameter(format!(
                "guess-ball triple (anchor {anchor}, b {b}, m {m}) out of range for n = {n}"
            )));
        }
        let y = &points[anchor];
        let mut order: Vec<(f64, usize)> = points
            .iter()
            .enumerate()
            .map(|(i, x)| (space.delta_unchecked(x, y), i))
            .collect();
        let closer = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if b < n {
            order.select_nth_unstable_by(b - 1, closer);
            order.truncate(b);
        }
        order.sort_unstable_by(closer);
        let ball_cost: f64 = order.iter().map(|&(d, _)| d).sum();
        Ok(BallGuess {
            anchor,
            y: y.clone(),
            m,
            b,
            members: order.into_iter().map(|(_, i)| i).collect(),
            ball_cost,
            r_estimate: ball_cost / m as f64,
        })
    }

    pub fn ball(&self, points: &[Point]) -> Vec<Point> {
        self.members.iter().map(|&i| points[i].clone()).collect()
    }
}

/// Uniform anchor `y ∈ X`, independent uniform sizes `b, m ∈ [1, n]`.
pub fn guess_ball(space: &PointSpace, points: &[Point], rng: &mut RngStream) -> Result<BallGuess> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidParameter("guess_ball: no points".into()));
    }
    space.check_points(points)?;
    let anchor = rng.random_range(0..n);
    let b = rng.random_range(1..=n);
    let m = rng.random_range(1..=n);
    BallGuess::from_triple(space, points, anchor, b, m)
}

/// `samples` candidates, each a uniform draw from the ball of radius
/// `2(φ_B({y})/m)^{1/p}` around a fresh guess-ball anchor.
///
/// Sample `i` uses child stream `i` of `rng`, so the result does not depend
/// on how the work is scheduled.
pub fn select_ball(
    space: &PointSpace,
    points: &[Point],
    epsilon: f64,
    samples: usize,
    rng: &mut RngStream,
) -> Result<Vec<Point>> {
    if space.dim().is_none() {
        return Err(Error::UnsupportedSpace(
            "select_ball requires a Euclidean space".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) || samples == 0 {
        return Err(Error::InvalidParameter(format!(
            "select_ball: need epsilon in (0,1) and samples >= 1, got {epsilon}, {samples}"
        )));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("select_ball: no points".into()));
    }
    space.check_points(points)?;
    let parent = rng.clone();
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = parent.child(i);
            let guess = guess_ball(space, points, &mut r)?;
            let radius = 2.0 * root_p(space, guess.r_estimate);
            norm_ball_sample(space, &guess.y, radius, &mut r)
        })
        .collect()
}

pub(crate) fn root_p(space: &PointSpace, v: f64) -> f64 {
    let p = space.p();
    if p == 1.0 {
        v
    } else if p == 2.0 {
        v.sqrt()
    } else {
        v.powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[f64]) -> Vec<Point> {
        v.iter().map(|&x| Point::Coords(vec![x])).collect()
    }

    #[test]
    fn single_point_guess() {
        let s = PointSpace::kmeans(1).unwrap();
        let x = line(&[3.]);
        let g = guess_ball(&s, &x, &mut RngStream::new(9)).unwrap();
        assert_eq!((g.anchor, g.b, g.m), (0, 1, 1));
        assert_eq!(g.members, vec![0]);
        assert_eq!(g.r_estimate, 0.0);
    }

    #[test]
    fn fixed_triple_example() {
        let s = PointSpace::kmeans(1).unwrap();
        let x = line(&[0., 1., 4.]);
        let g = BallGuess::from_triple(&s, &x, 0, 2, 2).unwrap();
        assert_eq!(g.members, vec![0, 1]);
        assert_eq!(g.ball_cost, 1.0);
        assert_eq!(g.r_estimate, 0.5);
    }

    #[test]
    fn ties_prefer_lowest_index() {
        let s = PointSpace::kmeans(1).unwrap();
        let x = line(&[1., 0., -1., 2.]);
        let g = BallGuess::from_triple(&s, &x, 1, 2, 1).unwrap();
        assert_eq!(g.members, vec![1, 0]);
    }

    #[test]
    fn zero_radius_gives_anchor() {
        let s = PointSpace::kmeans(2).unwrap();
        let x = vec![Point::Coords(vec![1.0, -2.0])];
        let c = select_ball(&s, &x, 0.5, 5, &mut RngStream::new(0)).unwrap();
        assert!(c.iter().all(|p| *p == x[0]));
    }
}
