use nalgebra::{DMatrix, DVector};
use omegalab::drivers::{check_disjunctive, check_repetitive, enumeration_prefix_len, generate};
use omegalab::geometry::{AffineSubspace, ConvexBody, Hyperplane, Vector};
use omegalab::ifs::{IFSystem, MapSpec, Word};
use omegalab::kaczmarz::{solve, LinearSystem, SolveOptions};
use omegalab::omega::{directed_hausdorff, hausdorff, PointCloud};
use omegalab::DriverSpec;
use proptest::prelude::*;

const TOL: f64 = 1e-10;

fn vec_of(dim: usize, scale: f64) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-scale..scale, dim).prop_map(|c| Vector::new(c).unwrap())
}

fn normal(dim: usize) -> impl Strategy<Value = Vector> {
    vec_of(dim, 2.0).prop_filter("normal too short", |a| a.norm() > 1e-3)
}

fn hyperplane(dim: usize) -> impl Strategy<Value = Hyperplane> {
    (normal(dim), -3.0..3.0).prop_map(|(a, b)| Hyperplane::new(a, b).unwrap())
}

fn subspace(dim: usize) -> impl Strategy<Value = AffineSubspace> {
    (
        vec_of(dim, 3.0),
        prop::collection::vec(vec_of(dim, 1.0), 0..dim),
    )
        .prop_map(|(anchor, dirs)| AffineSubspace::from_spanning(anchor, &dirs).unwrap())
}

fn body(dim: usize) -> impl Strategy<Value = ConvexBody> {
    prop_oneof![
        (normal(dim), -3.0..3.0).prop_map(|(a, b)| ConvexBody::halfspace(a, b).unwrap()),
        (vec_of(dim, 3.0), 0.1..3.0).prop_map(|(c, r)| ConvexBody::ball(c, r).unwrap()),
        (vec_of(dim, 3.0), prop::collection::vec(0.0..2.0, dim)).prop_map(|(lo, w)| {
            let hi = lo.add(&Vector::new(w).unwrap());
            ConvexBody::cuboid(lo, hi).unwrap()
        }),
    ]
}

fn projection(dim: usize) -> impl Strategy<Value = MapSpec> {
    prop_oneof![
        hyperplane(dim).prop_map(MapSpec::HyperplaneProjection),
        subspace(dim).prop_map(MapSpec::SubspaceProjection),
        body(dim).prop_map(MapSpec::ConvexProjection),
    ]
}

fn projection_with_points() -> impl Strategy<Value = (MapSpec, Vector, Vector)> {
    (1usize..=5).prop_flat_map(|d| (projection(d), vec_of(d, 10.0), vec_of(d, 10.0)))
}

fn line_system(n: usize) -> impl Strategy<Value = IFSystem> {
    prop::collection::vec(hyperplane(2), n).prop_map(|hs| {
        IFSystem::new(hs.into_iter().map(MapSpec::HyperplaneProjection).collect()).unwrap()
    })
}

fn cloud() -> impl Strategy<Value = PointCloud> {
    prop::collection::vec(vec_of(2, 5.0), 1..10).prop_map(|ps| PointCloud::new(ps).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn projections_are_idempotent_and_nonexpansive((p, x, y) in projection_with_points()) {
        let (px, py) = (p.apply(&x).unwrap(), p.apply(&y).unwrap());
        prop_assert!(p.apply(&px).unwrap().distance(&px) <= TOL);
        prop_assert!(px.distance(&py) <= x.distance(&y) + TOL);
    }

    #[test]
    fn convex_projection_is_nearest_point(
        (k, x, samples) in (1usize..=4).prop_flat_map(|d| {
            (body(d), vec_of(d, 10.0), prop::collection::vec(vec_of(d, 10.0), 1000))
        })
    ) {
        let p = k.project(&x).unwrap();
        prop_assert!(k.contains(&p, 1e-9));
        let dp = x.distance(&p);
        for s in samples.iter().map(|s| k.project(s).unwrap()) {
            prop_assert!(dp <= x.distance(&s) + TOL);
        }
    }

    #[test]
    fn single_constraint_subspace_is_the_hyperplane(
        (h, x) in (1usize..=5).prop_flat_map(|d| (hyperplane(d), vec_of(d, 10.0)))
    ) {
        let s = AffineSubspace::from_constraints(&[(h.normal().clone(), h.offset())]).unwrap();
        let a = h.project(&x).unwrap();
        let b = s.project(&x).unwrap();
        prop_assert!(a.distance(&b) <= 1e-9);
    }

    #[test]
    fn hausdorff_is_a_metric(a in cloud(), b in cloud(), c in cloud()) {
        prop_assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        let ab = hausdorff(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff(&b, &a).unwrap());
        prop_assert!(ab >= 0.0);
        prop_assert!(hausdorff(&a, &c).unwrap() <= ab + hausdorff(&b, &c).unwrap() + 1e-9);
    }

    #[test]
    fn hutchinson_is_monotone(sys in line_system(3), a in cloud(), extra in cloud()) {
        let mut b = a.clone();
        for p in extra.iter() {
            b.insert(p.clone()).unwrap();
        }
        let (fa, fb) = (sys.hutchinson(&a).unwrap(), sys.hutchinson(&b).unwrap());
        prop_assert_eq!(directed_hausdorff(&fa, &fb).unwrap(), 0.0);
    }

    #[test]
    fn orbits_do_not_separate(
        sys in line_system(3),
        x in vec_of(2, 5.0),
        y in vec_of(2, 5.0),
        seed in any::<u64>(),
    ) {
        let driver = DriverSpec::iid_uniform(seed, 3);
        let ox = sys.run_orbit_with(&x, &driver, 50).unwrap();
        let oy = sys.run_orbit_with(&y, &driver, 50).unwrap();
        let gaps: Vec<f64> = ox.points.iter().zip(&oy.points).map(|(p, q)| p.distance(q)).collect();
        for w in gaps.windows(2) {
            prop_assert!(w[1] <= w[0] + TOL);
        }
    }

    #[test]
    fn tree_estimate_never_exceeds_exact(
        sys in line_system(3),
        word in prop::collection::vec(1usize..=3, 1..4),
        x0 in vec_of(2, 3.0),
        seed in any::<u64>(),
    ) {
        let word = Word::new(word, 3).unwrap();
        let exact = sys.composition_lipschitz_exact(&word).unwrap().unwrap();
        if let Ok(tree) = sys.composition_lipschitz_on_tree(&word, &x0, 5, 16, seed) {
            prop_assert!(tree.estimate <= exact + 1e-6, "tree {} exact {}", tree.estimate, exact);
        }
    }

    #[test]
    fn subword_closure_of_enumeration(n in 1usize..=4, m in 1usize..=3, k in 1usize..=3) {
        let k = k.min(m);
        let prefix = generate(&DriverSpec::disjunctive(n), enumeration_prefix_len(n, m)).unwrap();
        prop_assert!(check_disjunctive(&prefix, n, m).unwrap().passes());
        prop_assert!(check_disjunctive(&prefix, n, k).unwrap().passes());
    }

    #[test]
    fn cyclic_counts(perm in (1usize..=5).prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle()), len in 0usize..200) {
        let n = perm.len();
        let seq = generate(&DriverSpec::Cyclic { permutation: perm }, len).unwrap();
        let r = check_repetitive(&seq, n).unwrap();
        prop_assert!(r.counts.iter().all(|&c| c >= len / n));
    }

    #[test]
    fn kaczmarz_last_row_is_satisfied(
        rows in prop::collection::vec((normal(3), -3.0..3.0), 2..6),
        seed in any::<u64>(),
        steps in 1usize..200,
    ) {
        let n = rows.len();
        let sys = LinearSystem::new(rows).unwrap();
        let driver = DriverSpec::iid_uniform(seed, n);
        let orbit = sys.to_ifs().run_orbit_with(&Vector::zeros(3), &driver, steps).unwrap();
        let last = *orbit.symbols.last().unwrap();
        prop_assert!(sys.row_residual(last - 1, orbit.last()) <= 1e-12 * (1.0 + orbit.last().norm()));
    }
}

#[test]
fn iid_prefixes_are_disjunctive_for_frozen_seeds() {
    for seed in [1u64, 42, 31_337] {
        for n in 1..=3 {
            let seq = generate(&DriverSpec::iid_uniform(seed, n), 5_000).unwrap();
            let r = check_disjunctive(&seq, n, 3).unwrap();
            assert!(r.passes(), "seed {seed} N={n} missing {:?}", r.missing);
        }
    }
}

fn inconsistent_rows() -> LinearSystem {
    LinearSystem::new(vec![
        (Vector::new(vec![1.0, 0.0]).unwrap(), 0.0),
        (Vector::new(vec![0.0, 1.0]).unwrap(), 0.0),
        (Vector::new(vec![1.0, 1.0]).unwrap(), 1.0),
        (Vector::new(vec![1.0, -2.0]).unwrap(), 3.0),
    ])
    .unwrap()
}

#[test]
fn cyclic_running_max_stabilizes() {
    let sys = inconsistent_rows();
    let x0 = Vector::new(vec![4.0, -7.0]).unwrap();
    for perm in [vec![1, 2, 3, 4], vec![4, 2, 1, 3], vec![3, 1, 4, 2]] {
        let driver = DriverSpec::Cyclic { permutation: perm };
        let opts = SolveOptions::new(1e-9, 20_000).starting_at(x0.clone());
        let report = solve(&sys, &driver, &opts).unwrap();
        assert!(!report.converged);
        assert!((report.max_norm - report.max_norm_first_half).abs() <= 1e-6);
        assert!(report.omega.is_some());
    }
}

#[test]
fn random_iterates_respect_static_bound() {
    let sys = inconsistent_rows();
    let x0 = Vector::new(vec![4.0, -7.0]).unwrap();
    let gaps: f64 = (0..sys.len())
        .flat_map(|i| ((i + 1)..sys.len()).map(move |j| (i, j)))
        .map(|(i, j)| sys.gap_between(i, j).unwrap())
        .sum();
    let bound = x0.norm() + 2.0 * sys.row_residual(0, &x0) + gaps + 10.0;
    for seed in 0..3 {
        let opts = SolveOptions::new(1e-9, 20_000).starting_at(x0.clone());
        let report = solve(&sys, &DriverSpec::iid_uniform(seed, 4), &opts).unwrap();
        assert!(report.max_norm <= bound, "{} > {bound}", report.max_norm);
    }
}

#[test]
fn parallel_pair_mutual_projection() {
    let rows = vec![
        (Vector::new(vec![1.0, 2.0]).unwrap(), 1.0),
        (Vector::new(vec![-2.0, -4.0]).unwrap(), 3.0),
    ];
    let sys = LinearSystem::new(rows).unwrap();
    let gap = sys.gap_between(0, 1).unwrap();
    // x + 2y = 1 and x + 2y = -1.5 lie 2.5 / sqrt(5) apart
    assert!((gap - 2.5 / 5f64.sqrt()).abs() <= 1e-12);
    let report = solve(
        &sys,
        &DriverSpec::cyclic(2),
        &SolveOptions::new(1e-9, 1_000),
    )
    .unwrap();
    let omega = report
        .omega
        .expect("inconsistent run carries an omega estimate");
    assert_eq!(omega.len(), 2);
    let ifs = sys.to_ifs();
    let pts = omega.representatives.points();
    let (p, q) = (&pts[0], &pts[1]);
    assert!((p.distance(q) - gap).abs() <= 1e-9);
    let swapped = [ifs.apply_map(1, q).unwrap(), ifs.apply_map(2, p).unwrap()];
    assert!(swapped
        .iter()
        .all(|s| s.distance(p) <= 1e-9 || s.distance(q) <= 1e-9));
}

#[test]
fn random_square_system_matches_direct_solve() {
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    let n = 6;
    let a = DMatrix::<f64>::from_fn(n, n, |i, j| if i == j { 4.0 } else { 0.0 } + u());
    let b = DVector::from_fn(n, |_, _| u());
    let oracle = a.clone().lu().solve(&b).unwrap();
    let rows = (0..n)
        .map(|i| {
            (
                Vector::new(a.row(i).iter().copied().collect()).unwrap(),
                b[i],
            )
        })
        .collect();
    let sys = LinearSystem::new(rows).unwrap();
    let report = solve(
        &sys,
        &DriverSpec::cyclic(n),
        &SolveOptions::new(1e-12, 100_000),
    )
    .unwrap();
    assert!(report.converged);
    for (x, y) in report.final_point.as_slice().iter().zip(oracle.iter()) {
        assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
    }
}
