use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vector;

/// Points closer than this are merged when building a cloud.
pub const MERGE_TOL: f64 = 1e-12;

/// A finite, nonempty set of points of one dimension, deduplicated within
/// [`MERGE_TOL`]. Insertion order of first occurrences is preserved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vector>", into = "Vec<Vector>")]
pub struct PointCloud {
    points: Vec<Vector>,
}

impl PointCloud {
    pub fn new(points: impl IntoIterator<Item = Vector>) -> Result<Self> {
        let mut iter = points.into_iter();
        let first = iter.next().ok_or(Error::EmptyCloud)?;
        let mut cloud = Self {
            points: vec![first],
        };
        for p in iter {
            cloud.insert(p)?;
        }
        Ok(cloud)
    }

    pub fn singleton(p: Vector) -> Self {
        Self { points: vec![p] }
    }

    /// Adds `p` unless it lies within [`MERGE_TOL`] of an existing point.
    /// Returns whether the point was added.
    pub fn insert(&mut self, p: Vector) -> Result<bool> {
        p.check_dim(self.dim())?;
        if self.points.iter().any(|q| q.distance(&p) <= MERGE_TOL) {
            return Ok(false);
        }
        self.points.push(p);
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vector> {
        self.points.iter()
    }

    /// Distance from `p` to the nearest point of the cloud.
    pub fn distance_to(&self, p: &Vector) -> f64 {
        self.points
            .iter()
            .map(|q| q.distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Every point of `self` lies within `tol` of `other`.
    pub fn is_within(&self, other: &PointCloud, tol: f64) -> bool {
        self.points.iter().all(|p| other.distance_to(p) <= tol)
    }
}

impl TryFrom<Vec<Vector>> for PointCloud {
    type Error = Error;

    fn try_from(points: Vec<Vector>) -> Result<Self> {
        PointCloud::new(points)
    }
}

impl From<PointCloud> for Vec<Vector> {
    fn from(c: PointCloud) -> Self {
        c.points
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Vector;
    type IntoIter = std::slice::Iter<'a, Vector>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// `max_{a∈A} min_{b∈B} d(a, b)`, brute force.
pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    b.points[0].check_dim(a.dim())?;
    Ok(a.points
        .iter()
        .map(|p| b.distance_to(p))
        .fold(0.0, f64::max))
}

/// Symmetric Hausdorff distance between two clouds.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}
