//! The four planar line configurations as ready-to-run scenarios.

use omegalab::omega::CONTINUUM_CLUSTER_EPS;
use omegalab::{scenarios, DriverSpec, IFSystem, Vector};

use crate::scenario::{CheckSpec, ReferenceSet, Scenario};

pub const NAMES: [(&str, &str); 4] = [
    (
        "example1_intersecting",
        "two lines crossing at 45 degrees; the orbit converges to the crossing point",
    ),
    (
        "example2_parallel",
        "two parallel lines; the orbit settles on a pair of nearest points",
    ),
    (
        "example3_square",
        "four lines bounding the unit square; the omega set is the four corners",
    ),
    (
        "example4_triangle",
        "three lines bounding a triangle; the omega set is the triangle boundary",
    ),
];

fn v(x: f64, y: f64) -> Vector {
    Vector::new(vec![x, y]).expect("finite literal")
}

fn base(name: &str, sys: IFSystem, driver: DriverSpec, x0: Vector, steps: usize) -> Scenario {
    Scenario {
        name: name.into(),
        dim: sys.dim(),
        x0,
        steps,
        burn_in: None,
        cluster_eps: None,
        audit_window: None,
        svg: None,
        driver,
        maps: sys.maps().to_vec(),
        reference_set: None,
        checks: Vec::new(),
    }
}

pub fn get(name: &str) -> Option<Scenario> {
    let s = match name {
        "example1_intersecting" => Scenario {
            burn_in: Some(100),
            reference_set: Some(ReferenceSet::Points {
                points: vec![Vector::zeros(2)],
            }),
            checks: vec![
                CheckSpec::RepresentativeCount { expected: 1 },
                CheckSpec::ReferenceDistance { tol: 1e-8 },
                CheckSpec::MonotoneDistance { tol: 1e-9 },
                CheckSpec::Invariance { tol: 1e-9 },
                CheckSpec::Contraction {
                    word: vec![1, 2],
                    seed: 0,
                },
            ],
            ..base(
                name,
                scenarios::intersecting_lines(),
                DriverSpec::cyclic(2),
                v(0.0, 2.0),
                200,
            )
        },
        "example2_parallel" => Scenario {
            burn_in: Some(10),
            reference_set: Some(ReferenceSet::Points {
                points: vec![v(0.0, 0.0), v(0.0, 1.0)],
            }),
            checks: vec![
                CheckSpec::RepresentativeCount { expected: 2 },
                CheckSpec::ReferenceDistance { tol: 1e-12 },
                CheckSpec::Invariance { tol: 1e-9 },
                CheckSpec::MonotoneDistance { tol: 1e-9 },
                CheckSpec::CompareOmegas {
                    driver: None,
                    x0: Some(v(5.0, 0.3)),
                    tol: 1e-9,
                    expected_distance: Some(5.0),
                },
            ],
            ..base(
                name,
                scenarios::parallel_lines(),
                DriverSpec::cyclic(2),
                v(0.0, 0.3),
                100,
            )
        },
        "example3_square" => Scenario {
            burn_in: Some(1_000),
            reference_set: Some(ReferenceSet::SquareCorners),
            checks: vec![
                CheckSpec::RepresentativeCount { expected: 4 },
                CheckSpec::ReferenceDistance { tol: 1e-9 },
                CheckSpec::Invariance { tol: 1e-9 },
                CheckSpec::MonotoneDistance { tol: 1e-9 },
                CheckSpec::Minimality { tol: 1e-9 },
                CheckSpec::Contraction {
                    word: vec![1, 3],
                    seed: 0,
                },
                CheckSpec::CompareOmegas {
                    driver: Some(DriverSpec::iid_uniform(7, 4)),
                    x0: Some(v(-2.0, 3.0)),
                    tol: 1e-9,
                    expected_distance: None,
                },
            ],
            ..base(
                name,
                scenarios::unit_square(),
                DriverSpec::disjunctive(4),
                v(0.3, 0.7),
                10_000,
            )
        },
        "example4_triangle" => Scenario {
            burn_in: Some(10_000),
            cluster_eps: Some(CONTINUUM_CLUSTER_EPS),
            reference_set: Some(ReferenceSet::TriangleBoundary { spacing: 5e-3 }),
            checks: vec![
                CheckSpec::ReferenceDistance { tol: 0.05 },
                CheckSpec::Invariance { tol: 0.05 },
                CheckSpec::MonotoneDistance { tol: 1e-9 },
                CheckSpec::CompareOmegas {
                    driver: Some(DriverSpec::iid_uniform(7, 3)),
                    x0: None,
                    tol: 0.05,
                    expected_distance: None,
                },
            ],
            ..base(
                name,
                scenarios::unit_triangle(),
                DriverSpec::disjunctive(3),
                v(0.3, 0.3),
                100_000,
            )
        },
        _ => return None,
    };
    Some(s)
}
