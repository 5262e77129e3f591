use log::warn;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{cluster_mean, ReferenceSolution};
use crate::error::{Error, Result};
use crate::metric::{Point, PointSpace};
use crate::rng::RngStream;

/// Isotropic Gaussian blobs with centers uniform in `[-center_box, center_box]^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    pub k: usize,
    pub n_per_cluster: usize,
    pub dim: usize,
    pub center_box: f64,
    pub spread: f64,
    #[serde(default)]
    pub seed: u64,
}

impl MixtureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n_per_cluster == 0 || self.dim == 0 {
            return Err(Error::InvalidParameter(
                "mixture: k, n_per_cluster and dim must be positive".into(),
            ));
        }
        if !(self.spread > 0.0 && self.spread.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mixture: spread = {} must be > 0",
                self.spread
            )));
        }
        if !(self.center_box >= 0.0 && self.center_box.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mixture: center_box = {} must be >= 0",
                self.center_box
            )));
        }
        Ok(())
    }
}

/// A generated data set with its planted structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Mixture {
    pub points: Vec<Point>,
    /// Generating cluster of each point; cluster `j` occupies a contiguous block.
    pub labels: Vec<usize>,
    /// Generating centers.
    pub planted: Vec<Point>,
    pub reference: ReferenceSolution,
}

impl Mixture {
    /// Whether nearest-center assignment to the reference recovers the
    /// generating labels exactly.
    pub fn recovers_labels(&self) -> bool {
        self.reference
            .partition
            .labels(self.points.len())
            .is_some_and(|l| l == self.labels)
    }
}

/// Draws the mixture. In a k-means space the reference centers are the
/// empirical cluster means; otherwise they are the generating centers.
///
/// If the blobs overlap so that the empirical means do not reproduce their
/// own clusters, the reference falls back to plain nearest-center assignment
/// without the mean requirement.
pub fn gen_mixture(spec: &MixtureSpec, space: &PointSpace) -> Result<Mixture> {
    spec.validate()?;
    if space.dim() != Some(spec.dim) {
        return Err(Error::Shape(format!(
            "mixture dimension {} does not match the space",
            spec.dim
        )));
    }
    let root = RngStream::new(spec.seed);
    let mut center_rng = root.labelled_child("centers");
    let planted: Vec<Point> = (0..spec.k)
        .map(|_| {
            Point::Coords(
                (0..spec.dim)
                    .map(|_| {
                        if spec.center_box > 0.0 {
                            center_rng.random_range(-spec.center_box..=spec.center_box)
                        } else {
                            0.0
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    let mut point_rng = root.labelled_child("points");
    let mut points = Vec::with_capacity(spec.k * spec.n_per_cluster);
    let mut labels = Vec::with_capacity(points.capacity());
    for (j, c) in planted.iter().enumerate() {
        let c = c.coords().expect("coordinates");
        for _ in 0..spec.n_per_cluster {
            let x: Vec<f64> = c
                .iter()
                .map(|m| {
                    let z: f64 = point_rng.sample(StandardNormal);
                    m + spec.spread * z
                })
                .collect();
            points.push(Point::Coords(x));
            labels.push(j);
        }
    }
    let reference = if space.is_kmeans() {
        let means: Vec<Point> = (0..spec.k)
            .map(|j| {
                let idx: Vec<usize> = (j * spec.n_per_cluster..(j + 1) * spec.n_per_cluster).collect();
                Point::Coords(cluster_mean(&points, &idx))
            })
            .collect();
        match ReferenceSolution::with_means(space, &points, means.clone()) {
            Ok(r) => r,
            Err(Error::DegenerateReference(msg)) => {
                warn!("mixture clusters overlap ({msg}); reference drops the mean requirement");
                ReferenceSolution::new(space, &points, means)?
            }
            Err(e) => return Err(e),
        }
    } else {
        ReferenceSolution::new(space, &points, planted.clone())?
    };
    Ok(Mixture {
        points,
        labels,
        planted,
        reference,
    })
}
