use serde::{Deserialize, Serialize};

use super::cloud::{directed_hausdorff, hausdorff, PointCloud};
use super::estimate::OmegaEstimate;
use super::segments::ClosedSet;
use crate::error::{Error, Result};
use crate::ifs::{IFSystem, Orbit};

/// Relative slack for the monotone-distance check.
pub const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check's premise does not hold, so its conclusion was not tested.
    HypothesisUnmet,
    /// Premise holds but the conclusion is vacuous (no intersection).
    NoIntersection,
}

impl Verdict {
    pub fn passed(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::NoIntersection)
    }
}

/// Directed excesses between a set `S` and its image `Φ(S)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    /// `sup_{y∈Φ(S)} d(y, S)`; zero iff `Φ(S) ⊆ S`.
    pub forward_excess: f64,
    /// `sup_{s∈S} d(s, Φ(S))`; zero iff `S ⊆ Φ(S)`.
    pub backward_excess: f64,
    pub symmetric: f64,
    pub tol: f64,
    pub subinvariant: bool,
    pub superinvariant: bool,
    pub invariant: bool,
}

impl InvarianceReport {
    pub fn new(forward_excess: f64, backward_excess: f64, tol: f64) -> Self {
        let subinvariant = forward_excess <= tol;
        let superinvariant = backward_excess <= tol;
        Self {
            forward_excess,
            backward_excess,
            symmetric: forward_excess.max(backward_excess),
            tol,
            subinvariant,
            superinvariant,
            invariant: subinvariant && superinvariant,
        }
    }
}

/// Compares a cloud with its Hutchinson image.
pub fn check_invariance(sys: &IFSystem, set: &PointCloud, tol: f64) -> Result<InvarianceReport> {
    let image = sys.hutchinson(set)?;
    Ok(InvarianceReport::new(
        directed_hausdorff(&image, set)?,
        directed_hausdorff(set, &image)?,
        tol,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneDistanceReport {
    /// `d(x_n, C)` for every orbit point.
    pub distances: Vec<f64>,
    pub initial: f64,
    pub infimum: f64,
    /// Largest single-step increase `d(x_{n+1}, C) − d(x_n, C)`, 0 if none.
    pub max_increase: f64,
    /// Every `d(x_n, C) ≤ d(x_0, C) + MONOTONE_SLACK`.
    pub bounded: bool,
    /// Final distance within `MONOTONE_SLACK` of the infimum.
    pub settled: bool,
    pub hypothesis: InvarianceReport,
    pub verdict: Verdict,
}

/// Tracks `d(x_n, C)` along an orbit of `sys`.
///
/// The distance can only be expected to be nonincreasing when `C` is
/// subinvariant; if `C.invariance(sys, tol)` says otherwise the verdict is
/// [`Verdict::HypothesisUnmet`] and monotonicity is not asserted.
pub fn check_monotone_distance<C: ClosedSet + ?Sized>(
    sys: &IFSystem,
    orbit: &Orbit,
    set: &C,
    tol: f64,
) -> Result<MonotoneDistanceReport> {
    if set.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: set.dim(),
        });
    }
    orbit.start().check_dim(sys.dim())?;
    let hypothesis = set.invariance(sys, tol)?;
    let distances: Vec<f64> = orbit.points.iter().map(|p| set.distance_to(p)).collect();
    let initial = distances[0];
    let infimum = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let max_increase = distances
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    let bounded = distances.iter().all(|&d| d <= initial + MONOTONE_SLACK);
    let last = *distances.last().expect("orbit is nonempty");
    let settled = last - infimum <= MONOTONE_SLACK;

    let verdict = if !hypothesis.subinvariant {
        Verdict::HypothesisUnmet
    } else if max_increase <= MONOTONE_SLACK * (1.0 + initial) && bounded {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(MonotoneDistanceReport {
        distances,
        initial,
        infimum,
        max_increase,
        bounded,
        settled,
        hypothesis,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub hypothesis: InvarianceReport,
    /// `min_{r} d(r, C)` over omega representatives.
    pub min_distance: f64,
    /// `max_{r} d(r, C)` over omega representatives.
    pub containment_excess: f64,
    pub intersects: bool,
    pub tol: f64,
    pub verdict: Verdict,
}

/// A subinvariant candidate that meets the omega estimate must contain it.
pub fn check_minimality<C: ClosedSet + ?Sized>(
    sys: &IFSystem,
    estimate: &OmegaEstimate,
    candidate: &C,
    tol: f64,
) -> Result<MinimalityReport> {
    let reps = &estimate.representatives;
    if candidate.dim() != reps.dim() {
        return Err(Error::DimensionMismatch {
            expected: reps.dim(),
            found: candidate.dim(),
        });
    }
    let hypothesis = candidate.invariance(sys, tol)?;
    let dists: Vec<f64> = reps.iter().map(|r| candidate.distance_to(r)).collect();
    let min_distance = dists.iter().copied().fold(f64::INFINITY, f64::min);
    let containment_excess = dists.iter().copied().fold(0.0, f64::max);
    let intersects = min_distance <= tol;
    let verdict = if !hypothesis.subinvariant {
        Verdict::HypothesisUnmet
    } else if !intersects {
        Verdict::NoIntersection
    } else if containment_excess <= tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(MinimalityReport {
        hypothesis,
        min_distance,
        containment_excess,
        intersects,
        tol,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaComparison {
    pub distance: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Hausdorff distance between the representative clouds of two estimates.
pub fn compare_omegas(a: &OmegaEstimate, b: &OmegaEstimate, tol: f64) -> Result<OmegaComparison> {
    let distance = hausdorff(&a.representatives, &b.representatives)?;
    Ok(OmegaComparison {
        distance,
        tol,
        pass: distance <= tol,
    })
}
