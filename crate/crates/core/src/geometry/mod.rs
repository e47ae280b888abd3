//! Euclidean primitives and metric projections.
//!
//! The metric is fixed to ℓ². Orthogonal projections onto hyperplanes are also
//! nonexpansive in ℓ¹, but no alternate metric is implemented.

mod matrix;
mod sets;
mod vector;

pub use matrix::{Matrix, POWER_MAX_ITER, POWER_TOL};
pub use sets::{
    orthonormalize, project_affine_subspace, project_convex, project_hyperplane, AffineSubspace,
    ConvexBody, Hyperplane, DEPENDENCE_TOL, MIN_NORMAL_NORM, ORTHONORMAL_TOL,
};
pub use vector::{distance, Vector};
