use serde::{Deserialize, Serialize};

use super::checks::InvarianceReport;
use super::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::ifs::IFSystem;

/// Subdivisions per segment when a segment set is sampled for set
/// comparisons, and when a non-affine map's image of a segment is
/// approximated by a polyline.
pub const SEGMENT_SUBDIVISIONS: usize = 64;

/// A closed set that can report point distances and its own invariance
/// under a system.
pub trait ClosedSet {
    fn dim(&self) -> usize;

    /// `d(p, S) = inf_{s∈S} d(p, s)`
    fn distance_to(&self, p: &Vector) -> f64;

    fn invariance(&self, sys: &IFSystem, tol: f64) -> Result<InvarianceReport>;
}

impl ClosedSet for PointCloud {
    fn dim(&self) -> usize {
        PointCloud::dim(self)
    }

    fn distance_to(&self, p: &Vector) -> f64 {
        PointCloud::distance_to(self, p)
    }

    fn invariance(&self, sys: &IFSystem, tol: f64) -> Result<InvarianceReport> {
        super::check_invariance(sys, self, tol)
    }
}

/// Finite union of closed segments `[a, b]`, e.g. a polygon boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSet {
    segments: Vec<(Vector, Vector)>,
}

impl SegmentSet {
    pub fn new(segments: Vec<(Vector, Vector)>) -> Result<Self> {
        let dim = segments.first().ok_or(Error::EmptyCloud)?.0.dim();
        for (a, b) in &segments {
            a.check_dim(dim)?;
            b.check_dim(dim)?;
        }
        Ok(Self { segments })
    }

    /// Closed polygon boundary through `vertices` in order.
    pub fn polygon(vertices: &[Vector]) -> Result<Self> {
        let n = vertices.len();
        Self::new(
            (0..n)
                .map(|i| (vertices[i].clone(), vertices[(i + 1) % n].clone()))
                .collect(),
        )
    }

    /// Boundary of the triangle with vertices (0,0), (1,0), (0,1).
    pub fn unit_triangle_boundary() -> Self {
        let v = |x: f64, y: f64| Vector::new(vec![x, y]).expect("finite");
        Self::polygon(&[v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)]).expect("valid polygon")
    }

    pub fn segments(&self) -> &[(Vector, Vector)] {
        &self.segments
    }

    /// Points along every segment at spacing at most `spacing`, endpoints
    /// included.
    pub fn sample(&self, spacing: f64) -> Result<PointCloud> {
        if spacing.is_nan() || spacing <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "spacing {spacing} must be positive"
            )));
        }
        let mut pts = Vec::new();
        for (a, b) in &self.segments {
            let k = ((a.distance(b) / spacing).ceil() as usize).max(1);
            pts.extend(subdivide(a, b, k));
        }
        PointCloud::new(pts)
    }

    fn sample_fixed(&self, k: usize) -> impl Iterator<Item = Vector> + '_ {
        self.segments
            .iter()
            .flat_map(move |(a, b)| subdivide(a, b, k))
    }

    /// `Φ(S)` as a segment set. Affine maps send segments to segments; other
    /// maps are followed through [`SEGMENT_SUBDIVISIONS`] pieces.
    pub fn hutchinson(&self, sys: &IFSystem) -> Result<SegmentSet> {
        if self.dim() != sys.dim() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim(),
                found: self.dim(),
            });
        }
        let mut out = Vec::new();
        for map in sys.maps() {
            let pieces = if map.linear_part().is_some() {
                1
            } else {
                SEGMENT_SUBDIVISIONS
            };
            for (a, b) in &self.segments {
                let images = subdivide(a, b, pieces)
                    .map(|p| map.apply(&p))
                    .collect::<Result<Vec<_>>>()?;
                out.extend(images.windows(2).map(|w| (w[0].clone(), w[1].clone())));
            }
        }
        SegmentSet::new(out)
    }
}

fn subdivide<'a>(a: &'a Vector, b: &'a Vector, k: usize) -> impl Iterator<Item = Vector> + 'a {
    let dir = b.sub(a);
    (0..=k).map(move |i| {
        if i == k {
            b.clone()
        } else {
            a.axpy(i as f64 / k as f64, &dir)
        }
    })
}

fn segment_distance(p: &Vector, a: &Vector, b: &Vector) -> f64 {
    let dir = b.sub(a);
    let len_sq = dir.dot(&dir);
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = (p.sub(a).dot(&dir) / len_sq).clamp(0.0, 1.0);
    p.distance(&a.axpy(t, &dir))
}

impl ClosedSet for SegmentSet {
    fn dim(&self) -> usize {
        self.segments[0].0.dim()
    }

    fn distance_to(&self, p: &Vector) -> f64 {
        self.segments
            .iter()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Directed excesses between `S` and `Φ(S)`, each evaluated at
    /// [`SEGMENT_SUBDIVISIONS`] points per segment of the source set.
    fn invariance(&self, sys: &IFSystem, tol: f64) -> Result<InvarianceReport> {
        let image = self.hutchinson(sys)?;
        let forward = image
            .sample_fixed(SEGMENT_SUBDIVISIONS)
            .map(|p| self.distance_to(&p))
            .fold(0.0, f64::max);
        let backward = self
            .sample_fixed(SEGMENT_SUBDIVISIONS)
            .map(|p| image.distance_to(&p))
            .fold(0.0, f64::max);
        Ok(InvarianceReport::new(forward, backward, tol))
    }
}
