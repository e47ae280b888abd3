//! Omega-limit set estimation and numerical checks of the structural
//! relations between omega-limit sets and (sub/super)invariant sets.
//!
//! `ω((x_n))` is approximated by clustering an orbit tail after a burn-in.
//! Sets are compared through directed Hausdorff excesses so that the two
//! inclusions `Φ(S) ⊆ S` and `S ⊆ Φ(S)` are reported separately.

mod checks;
mod cloud;
mod estimate;
mod segments;

pub use checks::{
    check_invariance, check_minimality, check_monotone_distance, compare_omegas, InvarianceReport,
    MinimalityReport, MonotoneDistanceReport, OmegaComparison, Verdict, MONOTONE_SLACK,
};
pub use cloud::{directed_hausdorff, hausdorff, PointCloud, MERGE_TOL};
pub use estimate::{estimate_omega, OmegaEstimate};
pub use segments::{ClosedSet, SegmentSet, SEGMENT_SUBDIVISIONS};

/// Default burn-in: 10% of the run length.
pub fn default_burn_in(steps: usize) -> usize {
    steps / 10
}

/// Default clustering radius for omega sets made of isolated points.
pub const POINT_CLUSTER_EPS: f64 = 1e-6;
/// Default clustering radius for continuum omega sets.
pub const CONTINUUM_CLUSTER_EPS: f64 = 1e-2;
