use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::vector::Vector;
use crate::error::{Error, Result};

/// Smallest admissible normal length.
pub const MIN_NORMAL_NORM: f64 = 1e-12;
/// Orthonormality tolerance for stored bases.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Residual norm below which Gram-Schmidt treats a vector as dependent.
pub const DEPENDENCE_TOL: f64 = 1e-10;

/// The hyperplane `{x : normal·x = offset}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HyperplaneRepr")]
pub struct Hyperplane {
    normal: Vector,
    offset: f64,
    #[serde(skip)]
    normal_sq: f64,
}

#[derive(Deserialize)]
struct HyperplaneRepr {
    normal: Vector,
    offset: f64,
}

impl TryFrom<HyperplaneRepr> for Hyperplane {
    type Error = Error;

    fn try_from(r: HyperplaneRepr) -> Result<Self> {
        Hyperplane::new(r.normal, r.offset)
    }
}

impl Hyperplane {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let norm = normal.norm();
        if norm < MIN_NORMAL_NORM {
            return Err(Error::DegenerateNormal { norm });
        }
        if !offset.is_finite() {
            return Err(Error::NonFinite {
                index: normal.dim(),
                value: offset,
            });
        }
        Ok(Self {
            normal,
            offset,
            normal_sq: norm * norm,
        })
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// Signed violation `normal·x − offset` divided by `‖normal‖`.
    pub fn signed_distance(&self, x: &Vector) -> f64 {
        (self.normal.dot(x) - self.offset) / self.normal_sq.sqrt()
    }

    /// Orthogonal projection `x − ((a·x − b)/‖a‖²) a`.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &Vector) -> Vector {
        let t = (self.normal.dot(x) - self.offset) / self.normal_sq;
        x.axpy(-t, &self.normal)
    }

    /// Linear part `I − a aᵀ/‖a‖²` of the projection.
    pub fn linear_part(&self) -> Matrix {
        Matrix::identity(self.dim()).sub(&Matrix::outer(
            &self.normal,
            &self.normal,
            1.0 / self.normal_sq,
        ))
    }
}

/// Orthogonal projection onto a hyperplane.
pub fn project_hyperplane(x: &Vector, h: &Hyperplane) -> Result<Vector> {
    h.project(x)
}

/// An affine subspace stored as a point on it plus an orthonormal basis of its
/// direction space. An empty basis is a single point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRepr")]
pub struct AffineSubspace {
    anchor: Vector,
    basis: Vec<Vector>,
}

#[derive(Deserialize)]
struct SubspaceRepr {
    anchor: Vector,
    #[serde(default)]
    basis: Vec<Vector>,
}

impl TryFrom<SubspaceRepr> for AffineSubspace {
    type Error = Error;

    fn try_from(r: SubspaceRepr) -> Result<Self> {
        AffineSubspace::new(r.anchor, r.basis)
    }
}

impl AffineSubspace {
    /// `basis` must already be orthonormal to within [`ORTHONORMAL_TOL`].
    pub fn new(anchor: Vector, basis: Vec<Vector>) -> Result<Self> {
        let dim = anchor.dim();
        for b in &basis {
            b.check_dim(dim)?;
        }
        for (i, bi) in basis.iter().enumerate() {
            for (j, bj) in basis.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                let got = bi.dot(bj);
                if (got - expected).abs() > ORTHONORMAL_TOL {
                    return Err(Error::NotOrthonormal(format!(
                        "<e{i}, e{j}> = {got}, expected {expected}"
                    )));
                }
            }
        }
        Ok(Self { anchor, basis })
    }

    /// Subspace through `anchor` spanned by arbitrary direction vectors.
    pub fn from_spanning(anchor: Vector, directions: &[Vector]) -> Result<Self> {
        for d in directions {
            d.check_dim(anchor.dim())?;
        }
        let basis = orthonormalize(directions)?;
        Ok(Self { anchor, basis })
    }

    /// Solution set of the constraints `a_k·x = b_k`.
    ///
    /// The constraint rows are orthonormalized together with their right-hand
    /// sides; the anchor is the minimum-norm solution and the basis spans the
    /// orthogonal complement of the row space.
    pub fn from_constraints(constraints: &[(Vector, f64)]) -> Result<Self> {
        let dim = constraints
            .first()
            .map(|(a, _)| a.dim())
            .ok_or_else(|| Error::InvalidParameter("no constraints".into()))?;
        let mut rows: Vec<(Vector, f64)> = Vec::new();
        for (a, b) in constraints {
            a.check_dim(dim)?;
            let mut r = a.clone();
            let mut rhs = *b;
            for _ in 0..2 {
                for (q, c) in &rows {
                    let coef = r.dot(q);
                    r = r.axpy(-coef, q);
                    rhs -= coef * c;
                }
            }
            let norm = r.norm();
            if norm < DEPENDENCE_TOL * a.norm().max(1.0) {
                if rhs.abs() > 1e-9 * (1.0 + b.abs()) {
                    return Err(Error::InconsistentConstraints);
                }
                continue;
            }
            rows.push((r.scale(1.0 / norm), rhs / norm));
        }
        let mut anchor = Vector::zeros(dim);
        for (q, c) in &rows {
            anchor = anchor.axpy(*c, q);
        }
        let mut candidates: Vec<Vector> = rows.iter().map(|(q, _)| q.clone()).collect();
        let n_rows = candidates.len();
        candidates.extend((0..dim).map(|i| Vector::unit(dim, i)));
        let full = orthonormalize(&candidates)?;
        let basis = full.into_iter().skip(n_rows).collect();
        Ok(Self { anchor, basis })
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.anchor.dim()
    }

    /// `anchor + Σ_k ((x − anchor)·e_k) e_k`
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &Vector) -> Vector {
        let rel = x.sub(&self.anchor);
        self.basis
            .iter()
            .fold(self.anchor.clone(), |acc, e| acc.axpy(rel.dot(e), e))
    }

    /// Linear part `Σ_k e_k e_kᵀ` of the projection.
    pub fn linear_part(&self) -> Matrix {
        let d = self.dim();
        self.basis.iter().fold(Matrix::zeros(d, d), |acc, e| {
            acc.add(&Matrix::outer(e, e, 1.0))
        })
    }
}

pub fn project_affine_subspace(x: &Vector, s: &AffineSubspace) -> Result<Vector> {
    s.project(x)
}

/// Closed convex sets with a closed-form nearest-point map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", try_from = "ConvexBodyRepr")]
pub enum ConvexBody {
    /// `{x : normal·x ≤ offset}`
    Halfspace {
        normal: Vector,
        offset: f64,
    },
    Ball {
        center: Vector,
        radius: f64,
    },
    Box {
        lower: Vector,
        upper: Vector,
    },
}

#[derive(Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
enum ConvexBodyRepr {
    Halfspace { normal: Vector, offset: f64 },
    Ball { center: Vector, radius: f64 },
    Box { lower: Vector, upper: Vector },
}

impl TryFrom<ConvexBodyRepr> for ConvexBody {
    type Error = Error;

    fn try_from(r: ConvexBodyRepr) -> Result<Self> {
        match r {
            ConvexBodyRepr::Halfspace { normal, offset } => ConvexBody::halfspace(normal, offset),
            ConvexBodyRepr::Ball { center, radius } => ConvexBody::ball(center, radius),
            ConvexBodyRepr::Box { lower, upper } => ConvexBody::cuboid(lower, upper),
        }
    }
}

impl ConvexBody {
    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        let norm = normal.norm();
        if norm < MIN_NORMAL_NORM {
            return Err(Error::DegenerateNormal { norm });
        }
        if !offset.is_finite() {
            return Err(Error::InvalidBody(format!("halfspace offset {offset}")));
        }
        Ok(ConvexBody::Halfspace { normal, offset })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidBody(format!(
                "ball radius {radius} must be positive"
            )));
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    pub fn cuboid(lower: Vector, upper: Vector) -> Result<Self> {
        upper.check_dim(lower.dim())?;
        if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InvalidBody(format!(
                "box lower[{i}] = {} exceeds upper[{i}] = {}",
                lower[i], upper[i]
            )));
        }
        Ok(ConvexBody::Box { lower, upper })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Halfspace { normal, .. } => normal.dim(),
            ConvexBody::Ball { center, .. } => center.dim(),
            ConvexBody::Box { lower, .. } => lower.dim(),
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        match self {
            ConvexBody::Halfspace { normal, offset } => {
                normal.dot(x) - offset <= tol * normal.norm()
            }
            ConvexBody::Ball { center, radius } => x.distance(center) <= radius + tol,
            ConvexBody::Box { lower, upper } => {
                (0..x.dim()).all(|i| x[i] >= lower[i] - tol && x[i] <= upper[i] + tol)
            }
        }
    }

    pub fn project(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &Vector) -> Vector {
        match self {
            ConvexBody::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x.axpy(-excess / normal.dot(normal), normal)
                }
            }
            ConvexBody::Ball { center, radius } => {
                let rel = x.sub(center);
                let r = rel.norm();
                if r <= *radius {
                    x.clone()
                } else {
                    center.axpy(radius / r, &rel)
                }
            }
            ConvexBody::Box { lower, upper } => Vector::from_raw(
                (0..x.dim())
                    .map(|i| x[i].clamp(lower[i], upper[i]))
                    .collect(),
            ),
        }
    }
}

pub fn project_convex(x: &Vector, k: &ConvexBody) -> Result<Vector> {
    k.project(x)
}

/// Gram-Schmidt with one reorthogonalization pass. Vectors whose residual
/// after deflation has norm below [`DEPENDENCE_TOL`] are dropped.
pub fn orthonormalize(vectors: &[Vector]) -> Result<Vec<Vector>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let dim = first.dim();
    let mut out: Vec<Vector> = Vec::new();
    for v in vectors {
        v.check_dim(dim)?;
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &out {
                r = r.axpy(-r.dot(q), q);
            }
        }
        let norm = r.norm();
        if norm < DEPENDENCE_TOL {
            continue;
        }
        out.push(r.scale(1.0 / norm));
    }
    Ok(out)
}
