//! The Kaczmarz projection method viewed as a nonexpansive system of
//! hyperplane projections.
//!
//! Consistency is never decided symbolically: a run that does not reach the
//! residual tolerance carries an omega estimate of its final stretch instead.

use serde::{Deserialize, Serialize};

use crate::drivers::DriverSpec;
use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, Vector, MIN_NORMAL_NORM};
use crate::ifs::{IFSystem, MapSpec, Orbit};
use crate::omega::{estimate_omega, OmegaEstimate};

/// Angle tolerance for deciding that two row normals are parallel.
pub const PARALLEL_TOL: f64 = 1e-10;
/// Fraction of a non-converged run used for the omega estimate.
pub const OMEGA_TAIL_FRACTION: f64 = 0.2;

/// Rows `a_i · x = b_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Vector, f64)>", into = "Vec<(Vector, f64)>")]
pub struct LinearSystem {
    rows: Vec<(Vector, f64)>,
}

impl TryFrom<Vec<(Vector, f64)>> for LinearSystem {
    type Error = Error;

    fn try_from(rows: Vec<(Vector, f64)>) -> Result<Self> {
        LinearSystem::new(rows)
    }
}

impl From<LinearSystem> for Vec<(Vector, f64)> {
    fn from(s: LinearSystem) -> Self {
        s.rows
    }
}

impl LinearSystem {
    pub fn new(rows: Vec<(Vector, f64)>) -> Result<Self> {
        let dim = rows
            .first()
            .ok_or_else(|| Error::InvalidParameter("linear system has no rows".into()))?
            .0
            .dim();
        for (a, b) in &rows {
            a.check_dim(dim)?;
            let norm = a.norm();
            if norm < MIN_NORMAL_NORM {
                return Err(Error::DegenerateNormal { norm });
            }
            if !b.is_finite() {
                return Err(Error::NonFinite {
                    index: dim,
                    value: *b,
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[(Vector, f64)] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows[0].0.dim()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `|a_i·x − b_i| / ‖a_i‖`, the distance from `x` to row `i`'s hyperplane.
    pub fn row_residual(&self, i: usize, x: &Vector) -> f64 {
        let (a, b) = &self.rows[i];
        (a.dot(x) - b).abs() / a.norm()
    }

    /// Largest row-normalized violation.
    pub fn residual(&self, x: &Vector) -> f64 {
        (0..self.rows.len())
            .map(|i| self.row_residual(i, x))
            .fold(0.0, f64::max)
    }

    /// One hyperplane projection per row, in row order.
    pub fn to_ifs(&self) -> IFSystem {
        let maps = self
            .rows
            .iter()
            .map(|(a, b)| {
                MapSpec::HyperplaneProjection(
                    Hyperplane::new(a.clone(), *b).expect("rows validated at construction"),
                )
            })
            .collect();
        IFSystem::new(maps).expect("rows share one dimension")
    }

    /// Infimum distance between the hyperplanes of rows `i` and `j`
    /// (0-based): zero unless the normals are parallel.
    pub fn gap_between(&self, i: usize, j: usize) -> Result<f64> {
        let row = |k: usize| {
            self.rows.get(k).ok_or_else(|| {
                Error::InvalidParameter(format!("row {k} out of range 0..{}", self.rows.len()))
            })
        };
        let ((ai, bi), (aj, bj)) = (row(i)?, row(j)?);
        let (ni, nj) = (ai.norm(), aj.norm());
        let ui = ai.scale(1.0 / ni);
        let uj = aj.scale(1.0 / nj);
        let sign = if ui.dot(&uj) >= 0.0 { 1.0 } else { -1.0 };
        if ui.sub(&uj.scale(sign)).norm() > PARALLEL_TOL {
            return Ok(0.0);
        }
        Ok((bi / ni - sign * bj / nj).abs())
    }
}

/// Converts a linear system into its projection IFS.
pub fn system_to_ifs(sys: &LinearSystem) -> IFSystem {
    sys.to_ifs()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Starting point; the origin when absent.
    #[serde(default)]
    pub x0: Option<Vector>,
}

impl SolveOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        Self {
            tol,
            max_iter,
            x0: None,
        }
    }

    pub fn starting_at(mut self, x0: Vector) -> Self {
        self.x0 = Some(x0);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub final_point: Vector,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tol: f64,
    pub driver: DriverSpec,
    /// `max_n ‖x_n‖` over the whole run.
    pub max_norm: f64,
    /// `max_n ‖x_n‖` over the first half of the run.
    pub max_norm_first_half: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaEstimate>,
}

/// Runs the projection method until the residual drops to `opts.tol` or
/// `opts.max_iter` projections have been made.
pub fn solve(sys: &LinearSystem, driver: &DriverSpec, opts: &SolveOptions) -> Result<SolveReport> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tol {} must be positive",
            opts.tol
        )));
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidParameter(
            "max_iter must be at least 1".into(),
        ));
    }
    let ifs = sys.to_ifs();
    driver.validate_for(ifs.len())?;
    let mut seq = driver.sequence()?;

    let x0 = match &opts.x0 {
        Some(x) => {
            x.check_dim(sys.dim())?;
            x.clone()
        }
        None => Vector::zeros(sys.dim()),
    };
    let mut residual = sys.residual(&x0);
    let mut points = vec![x0];
    let mut symbols = Vec::new();
    let mut converged = residual <= opts.tol;
    while !converged && symbols.len() < opts.max_iter {
        let s = seq.next_symbol()?;
        let next = ifs.apply_map(s, points.last().expect("nonempty"))?;
        residual = sys.residual(&next);
        converged = residual <= opts.tol;
        symbols.push(s);
        points.push(next);
    }

    let norm_max = |pts: &[Vector]| pts.iter().map(Vector::norm).fold(0.0, f64::max);
    let max_norm = norm_max(&points);
    let max_norm_first_half = norm_max(&points[..points.len().div_ceil(2)]);
    let iterations = symbols.len();
    let final_point = points.last().expect("nonempty").clone();

    let omega = if converged {
        None
    } else {
        let orbit = Orbit { points, symbols };
        let tail = ((orbit.len() as f64 * OMEGA_TAIL_FRACTION).ceil() as usize).max(1);
        let eps = opts.tol.max(1e-9);
        Some(estimate_omega(&orbit, orbit.len() - tail, eps)?.with_driver(driver.clone()))
    };

    Ok(SolveReport {
        final_point,
        residual,
        iterations,
        converged,
        tol: opts.tol,
        driver: driver.clone(),
        max_norm,
        max_norm_first_half,
        omega,
    })
}
