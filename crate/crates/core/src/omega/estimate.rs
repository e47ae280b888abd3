use serde::{Deserialize, Serialize};

use super::cloud::PointCloud;
use crate::drivers::DriverSpec;
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::ifs::Orbit;

/// Finite-tail approximation of the omega-limit set of an orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaEstimate {
    pub representatives: PointCloud,
    pub burn_in: usize,
    pub tail_length: usize,
    pub cluster_eps: f64,
    pub x0: Vector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub driver: Option<DriverSpec>,
}

impl OmegaEstimate {
    pub fn with_driver(mut self, driver: DriverSpec) -> Self {
        self.driver = Some(driver);
        self
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every point of the tail `orbit.points[burn_in..]` lies within
    /// `cluster_eps` of a representative.
    pub fn covers(&self, orbit: &Orbit) -> bool {
        orbit.points[self.burn_in.min(orbit.len())..]
            .iter()
            .all(|p| {
                self.representatives
                    .iter()
                    .any(|r| r.distance(p) <= self.cluster_eps)
            })
    }

    /// Representatives are pairwise farther apart than `cluster_eps`.
    pub fn is_separated(&self) -> bool {
        let reps = self.representatives.points();
        reps.iter().enumerate().all(|(i, a)| {
            reps[i + 1..]
                .iter()
                .all(|b| a.distance(b) > self.cluster_eps)
        })
    }
}

/// Greedy clustering of `orbit.points[burn_in..]` in arrival order: a point
/// becomes a new representative iff it is farther than `cluster_eps` from
/// every existing one.
pub fn estimate_omega(orbit: &Orbit, burn_in: usize, cluster_eps: f64) -> Result<OmegaEstimate> {
    if !(cluster_eps > 0.0 && cluster_eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "cluster_eps {cluster_eps} must be positive"
        )));
    }
    if burn_in >= orbit.len() {
        return Err(Error::EmptyTail {
            burn_in,
            len: orbit.len(),
        });
    }
    let tail = &orbit.points[burn_in..];
    let mut reps: Vec<Vector> = Vec::new();
    for p in tail {
        // recent representatives are the likeliest neighbours
        if !reps.iter().rev().any(|r| r.distance(p) <= cluster_eps) {
            reps.push(p.clone());
        }
    }
    Ok(OmegaEstimate {
        representatives: PointCloud::new(reps)?,
        burn_in,
        tail_length: tail.len(),
        cluster_eps,
        x0: orbit.start().clone(),
        driver: None,
    })
}
