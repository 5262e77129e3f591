use rand::Rng;
use rayon::prelude::*;

use super::ball::guess_ball;
use crate::error::{Error, Result};
use crate::metric::{Point, PointSpace};
use crate::rng::RngStream;

/// Step size is `eta_factor · r / √s`.
pub const DEFAULT_ETA_FACTOR: f64 = 2.0;

pub(crate) fn check_sgd_space(space: &PointSpace) -> Result<()> {
    if space.is_l2() && !space.is_kmeans() && space.p() == 1.0 {
        Ok(())
    } else {
        Err(Error::UnsupportedSpace(
            "SGD selection requires Euclidean k-medians (l2, p = 1)".into(),
        ))
    }
}

/// Projected stochastic subgradient descent on `w ↦ E‖x − w‖₂`, constrained
/// to the l2 ball of `radius` around `start`.
///
/// Iterates are `w_1 = start`, `w_{i+1} = Π(w_i − η g_i)` with
/// `g_i = (w_i − x_i)/‖w_i − x_i‖` (zero when `w_i = x_i`). Returns the plain
/// average of `w_1..w_steps`.
pub fn sgd_ball<'p, F>(
    space: &PointSpace,
    sample: F,
    start: &Point,
    radius: f64,
    steps: usize,
    step_size: f64,
    rng: &mut RngStream,
) -> Result<Point>
where
    F: FnMut(&mut RngStream) -> &'p Point,
{
    let path = sgd_path(space, sample, start, radius, steps, step_size, rng)?;
    let dim = path[0].len();
    let mut sum = vec![0.0; dim];
    for w in &path {
        sum.iter_mut().zip(w).for_each(|(s, wi)| *s += wi);
    }
    let n = steps as f64;
    Ok(Point::Coords(sum.into_iter().map(|s| s / n).collect()))
}

/// The iterates `w_1..w_steps` of [`sgd_ball`].
pub fn sgd_path<'p, F>(
    space: &PointSpace,
    mut sample: F,
    start: &Point,
    radius: f64,
    steps: usize,
    step_size: f64,
    rng: &mut RngStream,
) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(&mut RngStream) -> &'p Point,
{
    check_sgd_space(space)?;
    space.check_point(start)?;
    if steps == 0 {
        return Err(Error::InvalidParameter("sgd_ball: steps must be positive".into()));
    }
    if !(radius >= 0.0 && radius.is_finite() && step_size >= 0.0 && step_size.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sgd_ball: radius {radius} and step size {step_size} must be finite and nonnegative"
        )));
    }
    let origin = start.coords().expect("checked");
    let mut w = origin.to_vec();
    let mut path = Vec::with_capacity(steps);
    path.push(w.clone());
    for _ in 1..steps {
        let x = sample(rng);
        space.check_point(x)?;
        let x = x.coords().expect("checked");
        let gap = crate::metric::squared_l2(&w, x).sqrt();
        if gap > 0.0 {
            w.iter_mut()
                .zip(x)
                .for_each(|(wi, xi)| *wi -= step_size * (*wi - xi) / gap);
            project(&mut w, origin, radius);
        }
        path.push(w.clone());
    }
    Ok(path)
}

fn project(w: &mut [f64], center: &[f64], radius: f64) {
    let dist = crate::metric::squared_l2(w, center).sqrt();
    if dist > radius {
        let scale = if dist > 0.0 { radius / dist } else { 0.0 };
        w.iter_mut()
            .zip(center)
            .for_each(|(wi, ci)| *wi = ci + (*wi - ci) * scale);
    }
}

/// `samples` candidates, each from one guess-ball draw followed by
/// `s = ⌈1/ε²⌉` SGD iterations started at the anchor, with radius
/// `r = φ_B({y})/m` and step `eta_factor · r/√s`. SGD data are uniform over `X`.
pub fn select_sgd(
    space: &PointSpace,
    points: &[Point],
    epsilon: f64,
    samples: usize,
    eta_factor: f64,
    rng: &mut RngStream,
) -> Result<Vec<Point>> {
    check_sgd_space(space)?;
    if !(epsilon > 0.0 && epsilon < 1.0) || samples == 0 {
        return Err(Error::InvalidParameter(format!(
            "select_sgd: need epsilon in (0,1) and samples >= 1, got {epsilon}, {samples}"
        )));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("select_sgd: no points".into()));
    }
    space.check_points(points)?;
    let steps = (1.0 / (epsilon * epsilon)).ceil() as usize;
    let n = points.len();
    let parent = rng.clone();
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = parent.child(i);
            let guess = guess_ball(space, points, &mut r)?;
            let radius = guess.r_estimate;
            let eta = eta_factor * radius / (steps as f64).sqrt();
            sgd_ball(
                space,
                |r: &mut RngStream| &points[r.random_range(0..n)],
                &guess.y,
                radius,
                steps,
                eta,
                &mut r,
            )
        })
        .collect()
}
