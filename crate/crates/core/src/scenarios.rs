//! The four planar line configurations used throughout the tests and CLI
//! presets.

use crate::geometry::{Hyperplane, Vector};
use crate::ifs::{IFSystem, MapSpec};
use crate::omega::PointCloud;

fn v(x: f64, y: f64) -> Vector {
    Vector::new(vec![x, y]).expect("finite literal")
}

fn line(a: f64, b: f64, offset: f64) -> MapSpec {
    MapSpec::HyperplaneProjection(Hyperplane::new(v(a, b), offset).expect("nonzero normal"))
}

/// `f_1` onto y = x, `f_2` onto y = 0; the lines meet at the origin at 45°.
pub fn intersecting_lines() -> IFSystem {
    IFSystem::new(vec![line(-1.0, 1.0, 0.0), line(0.0, 1.0, 0.0)]).expect("valid system")
}

/// `f_1` onto y = 0, `f_2` onto y = 1.
pub fn parallel_lines() -> IFSystem {
    IFSystem::new(vec![line(0.0, 1.0, 0.0), line(0.0, 1.0, 1.0)]).expect("valid system")
}

/// `f_1..f_4` onto x = 1, x = 0, y = 1, y = 0.
pub fn unit_square() -> IFSystem {
    IFSystem::new(vec![
        line(1.0, 0.0, 1.0),
        line(1.0, 0.0, 0.0),
        line(0.0, 1.0, 1.0),
        line(0.0, 1.0, 0.0),
    ])
    .expect("valid system")
}

/// `f_1..f_3` onto y = 0, x = 0, x + y = 1, meeting pairwise at (0,0),
/// (1,0) and (0,1).
pub fn unit_triangle() -> IFSystem {
    IFSystem::new(vec![
        line(0.0, 1.0, 0.0),
        line(1.0, 0.0, 0.0),
        line(1.0, 1.0, 1.0),
    ])
    .expect("valid system")
}

pub fn square_corners() -> PointCloud {
    PointCloud::new([v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0), v(1.0, 1.0)]).expect("nonempty")
}

pub fn triangle_vertices() -> [Vector; 3] {
    [v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)]
}
