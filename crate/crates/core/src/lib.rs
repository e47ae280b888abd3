//! Numerical laboratory for nonexpansive iterated function systems.
//!
//! A system `(R^d; f_1, …, f_N)` of nonexpansive maps is iterated along a
//! driving sequence of symbols, `x_n = f_{i_n} ∘ … ∘ f_{i_1}(x_0)`. The crate
//! generates and audits drivers, estimates omega-limit sets of the resulting
//! orbits, and checks their relation to invariant sets of the Hutchinson
//! operator `Φ(S) = ∪ f_i(S)`. Projections onto the hyperplanes of a linear
//! system turn the Kaczmarz method into such a system.

pub mod drivers;
pub mod error;
pub mod geometry;
pub mod ifs;
pub mod io;
pub mod kaczmarz;
pub mod omega;
pub mod scenarios;

pub use drivers::{DriverSpec, SymbolSequence};
pub use error::{Error, Result};
pub use geometry::{AffineSubspace, ConvexBody, Hyperplane, Matrix, Vector};
pub use ifs::{AffineMap, IFSystem, MapSpec, Orbit, Word};
pub use kaczmarz::{LinearSystem, SolveOptions, SolveReport};
pub use omega::{OmegaEstimate, PointCloud};
