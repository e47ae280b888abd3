//! Scenario configuration files and their execution.
//!
//! A scenario is a TOML (or JSON, by extension) document:
//!
//! ```toml
//! name = "square"
//! dim = 2
//! x0 = [0.3, 0.7]
//! steps = 10000
//! burn_in = 1000        # default: 10% of steps
//! cluster_eps = 1e-6    # default: 1e-6
//!
//! [driver]
//! kind = "disjunctive"
//! alphabet = 4
//!
//! [[maps]]
//! kind = "hyperplane"
//! normal = [1.0, 0.0]
//! offset = 1.0
//!
//! [reference_set]
//! kind = "square_corners"
//!
//! [[checks]]
//! check = "invariance"
//! tol = 1e-9
//! ```

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use omegalab::drivers::{
    check_disjunctive, check_repetitive, DisjunctivityReport, RepetitivityReport,
};
use omegalab::io::write_orbit_csv;
use omegalab::omega::{
    check_invariance, check_minimality, check_monotone_distance, compare_omegas, default_burn_in,
    estimate_omega, hausdorff, ClosedSet, SegmentSet, POINT_CLUSTER_EPS,
};
use omegalab::{
    scenarios, DriverSpec, IFSystem, MapSpec, OmegaEstimate, Orbit, PointCloud, Vector, Word,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::svg;

const DEFAULT_SPACING: f64 = 5e-3;
const DEFAULT_AUDIT_WINDOW: usize = 2;
const TREE_DEPTH: usize = 8;
const TREE_SAMPLES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub dim: usize,
    pub x0: Vector,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_eps: Option<f64>,
    /// Window length for the disjunctivity audit of the symbols used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit_window: Option<usize>,
    /// Write an SVG scatter; defaults to on for planar scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<bool>,
    pub driver: DriverSpec,
    pub maps: Vec<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_set: Option<ReferenceSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSet {
    Points {
        points: Vec<Vector>,
    },
    SquareCorners,
    /// Boundary of the triangle with vertices (0,0), (1,0), (0,1).
    TriangleBoundary {
        #[serde(default = "default_spacing")]
        spacing: f64,
    },
    /// Closed polygon boundary through `vertices`.
    Polygon {
        vertices: Vec<Vector>,
        #[serde(default = "default_spacing")]
        spacing: f64,
    },
}

fn default_spacing() -> f64 {
    DEFAULT_SPACING
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    /// `Φ(Ω) = Ω` up to `tol` in both directed excesses.
    Invariance {
        tol: f64,
    },
    Subinvariance {
        tol: f64,
    },
    Superinvariance {
        tol: f64,
    },
    /// `d(x_n, C)` is nonincreasing for the reference set `C`; `tol` is
    /// used for the subinvariance hypothesis on `C`.
    MonotoneDistance {
        tol: f64,
    },
    /// Hausdorff distance from the omega estimate to the reference set.
    ReferenceDistance {
        tol: f64,
    },
    RepresentativeCount {
        expected: usize,
    },
    /// The reference set, if subinvariant and meeting Ω, contains Ω.
    Minimality {
        tol: f64,
    },
    /// Reruns the orbit with another driver and/or start. Passes when the
    /// distance is within `tol` of `expected_distance` (default 0).
    CompareOmegas {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        driver: Option<DriverSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x0: Option<Vector>,
        tol: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expected_distance: Option<f64>,
    },
    /// The composition `f_{w_k} ∘ … ∘ f_{w_1}` is a strict contraction.
    Contraction {
        word: Vec<usize>,
        #[serde(default)]
        seed: u64,
    },
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::Invariance { .. } => "invariance",
            CheckSpec::Subinvariance { .. } => "subinvariance",
            CheckSpec::Superinvariance { .. } => "superinvariance",
            CheckSpec::MonotoneDistance { .. } => "monotone_distance",
            CheckSpec::ReferenceDistance { .. } => "reference_distance",
            CheckSpec::RepresentativeCount { .. } => "representative_count",
            CheckSpec::Minimality { .. } => "minimality",
            CheckSpec::CompareOmegas { .. } => "compare_omegas",
            CheckSpec::Contraction { .. } => "contraction",
        }
    }

    fn needs_reference(&self) -> bool {
        matches!(
            self,
            CheckSpec::MonotoneDistance { .. }
                | CheckSpec::ReferenceDistance { .. }
                | CheckSpec::Minimality { .. }
        )
    }
}

/// A reference set, kept exact where possible and sampled for set distances.
enum Reference {
    Cloud(PointCloud),
    Segments { set: SegmentSet, sample: PointCloud },
}

impl Reference {
    fn closed(&self) -> &dyn ClosedSet {
        match self {
            Reference::Cloud(c) => c,
            Reference::Segments { set, .. } => set,
        }
    }

    fn cloud(&self) -> &PointCloud {
        match self {
            Reference::Cloud(c) | Reference::Segments { sample: c, .. } => c,
        }
    }
}

impl ReferenceSet {
    fn build(&self) -> Result<Reference> {
        Ok(match self {
            ReferenceSet::Points { points } => Reference::Cloud(PointCloud::new(points.clone())?),
            ReferenceSet::SquareCorners => Reference::Cloud(scenarios::square_corners()),
            ReferenceSet::TriangleBoundary { spacing } => {
                let set = SegmentSet::unit_triangle_boundary();
                let sample = set.sample(*spacing)?;
                Reference::Segments { set, sample }
            }
            ReferenceSet::Polygon { vertices, spacing } => {
                let set = SegmentSet::polygon(vertices)?;
                let sample = set.sample(*spacing)?;
                Reference::Segments { set, sample }
            }
        })
    }
}

pub fn load(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    } else {
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub fn to_toml(s: &Scenario) -> Result<String> {
    Ok(toml::to_string(s)?)
}

pub fn to_json(s: &Scenario) -> Result<String> {
    Ok(serde_json::to_string_pretty(s)?)
}

fn check_tol(tol: f64, what: &str) -> Result<()> {
    ensure!(
        tol.is_finite() && tol >= 0.0,
        "{what}: tol {tol} must be finite and nonnegative"
    );
    Ok(())
}

fn check_driver(driver: &DriverSpec, alphabet: usize, steps: usize, what: &str) -> Result<()> {
    driver
        .validate_for(alphabet)
        .with_context(|| format!("{what}: invalid driver"))?;
    if let DriverSpec::Custom { symbols } = driver {
        ensure!(
            symbols.len() >= steps,
            "{what}: custom driver has {} symbols but {steps} steps were requested",
            symbols.len()
        );
    }
    Ok(())
}

/// A scenario whose parameters have all been checked against each other.
pub struct Validated {
    pub scenario: Scenario,
    pub system: IFSystem,
    pub burn_in: usize,
    pub cluster_eps: f64,
    pub audit_window: usize,
    reference: Option<Reference>,
}

pub fn validate(s: Scenario) -> Result<Validated> {
    ensure!(s.dim > 0, "dim must be at least 1");
    ensure!(!s.maps.is_empty(), "scenario has no maps");
    for (i, m) in s.maps.iter().enumerate() {
        ensure!(
            m.dim() == s.dim,
            "map {} has dimension {}, expected {}",
            i + 1,
            m.dim(),
            s.dim
        );
    }
    let system = IFSystem::new(s.maps.clone())?;
    s.x0.check_dim(s.dim).context("x0")?;
    ensure!(s.steps >= 1, "steps must be at least 1");
    check_driver(&s.driver, system.len(), s.steps, "driver")?;

    let burn_in = s.burn_in.unwrap_or_else(|| default_burn_in(s.steps));
    ensure!(
        burn_in <= s.steps,
        "burn_in {burn_in} leaves no tail of a {}-step orbit",
        s.steps
    );
    let cluster_eps = s.cluster_eps.unwrap_or(POINT_CLUSTER_EPS);
    ensure!(
        cluster_eps.is_finite() && cluster_eps > 0.0,
        "cluster_eps {cluster_eps} must be positive"
    );
    let audit_window = s.audit_window.unwrap_or(DEFAULT_AUDIT_WINDOW);
    ensure!(audit_window >= 1, "audit_window must be at least 1");

    let reference = s
        .reference_set
        .as_ref()
        .map(ReferenceSet::build)
        .transpose()
        .context("reference_set")?;
    if let Some(r) = &reference {
        ensure!(
            r.cloud().dim() == s.dim,
            "reference_set has dimension {}, expected {}",
            r.cloud().dim(),
            s.dim
        );
    }

    for (i, c) in s.checks.iter().enumerate() {
        let what = format!("check {} ({})", i + 1, c.name());
        if c.needs_reference() && reference.is_none() {
            bail!("{what} needs a reference_set");
        }
        match c {
            CheckSpec::Invariance { tol }
            | CheckSpec::Subinvariance { tol }
            | CheckSpec::Superinvariance { tol }
            | CheckSpec::MonotoneDistance { tol }
            | CheckSpec::ReferenceDistance { tol }
            | CheckSpec::Minimality { tol } => check_tol(*tol, &what)?,
            CheckSpec::RepresentativeCount { .. } => {}
            CheckSpec::CompareOmegas {
                driver,
                x0,
                tol,
                expected_distance,
            } => {
                check_tol(*tol, &what)?;
                if let Some(d) = driver {
                    check_driver(d, system.len(), s.steps, &what)?;
                }
                if let Some(x) = x0 {
                    x.check_dim(s.dim).with_context(|| format!("{what}: x0"))?;
                }
                if let Some(e) = expected_distance {
                    ensure!(
                        e.is_finite() && *e >= 0.0,
                        "{what}: expected_distance {e} is invalid"
                    );
                }
            }
            CheckSpec::Contraction { word, .. } => {
                Word::new(word.clone(), system.len()).with_context(|| what.clone())?;
            }
        }
    }

    Ok(Validated {
        scenario: s,
        system,
        burn_in,
        cluster_eps,
        audit_window,
        reference,
    })
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub pass: bool,
    pub details: Value,
}

#[derive(Debug, Serialize)]
pub struct DriverAudit {
    pub repetitive: RepetitivityReport,
    pub disjunctive: DisjunctivityReport,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub parameters: Value,
    pub seeds: Vec<u64>,
    pub driver_audit: DriverAudit,
    pub final_point: Vector,
    pub max_norm: f64,
    pub representatives: usize,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub files: BTreeMap<&'static str, PathBuf>,
}

pub struct Outcome {
    pub orbit: Orbit,
    pub estimate: OmegaEstimate,
    pub report: Report,
}

fn seed_of(d: &DriverSpec) -> Option<u64> {
    match d {
        DriverSpec::IidRandom { seed, .. } => Some(*seed),
        _ => None,
    }
}

impl Validated {
    fn omega_for(&self, driver: &DriverSpec, x0: &Vector) -> Result<(Orbit, OmegaEstimate)> {
        let orbit = self
            .system
            .run_orbit_with(x0, driver, self.scenario.steps)?;
        let est =
            estimate_omega(&orbit, self.burn_in, self.cluster_eps)?.with_driver(driver.clone());
        Ok((orbit, est))
    }

    fn reference(&self) -> &Reference {
        self.reference
            .as_ref()
            .expect("validated: checks needing a reference have one")
    }

    fn run_check(
        &self,
        check: &CheckSpec,
        orbit: &Orbit,
        est: &OmegaEstimate,
    ) -> Result<CheckResult> {
        let sys = &self.system;
        let reps = &est.representatives;
        let (pass, details) = match check {
            CheckSpec::Invariance { tol } => {
                let r = check_invariance(sys, reps, *tol)?;
                (r.invariant, serde_json::to_value(r)?)
            }
            CheckSpec::Subinvariance { tol } => {
                let r = check_invariance(sys, reps, *tol)?;
                (r.subinvariant, serde_json::to_value(r)?)
            }
            CheckSpec::Superinvariance { tol } => {
                let r = check_invariance(sys, reps, *tol)?;
                (r.superinvariant, serde_json::to_value(r)?)
            }
            CheckSpec::MonotoneDistance { tol } => {
                let mut r = check_monotone_distance(sys, orbit, self.reference().closed(), *tol)?;
                let pass = r.verdict.passed();
                let distances = std::mem::take(&mut r.distances);
                let mut v = serde_json::to_value(r)?;
                v["final_distance"] = json!(distances.last());
                (pass, v)
            }
            CheckSpec::ReferenceDistance { tol } => {
                let d = hausdorff(reps, self.reference().cloud())?;
                (d <= *tol, json!({ "distance": d, "tol": tol }))
            }
            CheckSpec::RepresentativeCount { expected } => (
                est.len() == *expected,
                json!({ "found": est.len(), "expected": expected }),
            ),
            CheckSpec::Minimality { tol } => {
                let r = check_minimality(sys, est, self.reference().closed(), *tol)?;
                (r.verdict.passed(), serde_json::to_value(r)?)
            }
            CheckSpec::CompareOmegas {
                driver,
                x0,
                tol,
                expected_distance,
            } => {
                let driver = driver.as_ref().unwrap_or(&self.scenario.driver);
                let x0 = x0.as_ref().unwrap_or(&self.scenario.x0);
                let (_, other) = self.omega_for(driver, x0)?;
                let c = compare_omegas(est, &other, *tol)?;
                let target = expected_distance.unwrap_or(0.0);
                let pass = (c.distance - target).abs() <= *tol;
                (
                    pass,
                    json!({
                        "distance": c.distance,
                        "expected_distance": target,
                        "tol": tol,
                        "driver": driver,
                        "x0": x0,
                        "representatives": other.len(),
                    }),
                )
            }
            CheckSpec::Contraction { word, seed } => {
                let w = Word::new(word.clone(), sys.len())?;
                match sys.composition_lipschitz_exact(&w)? {
                    Some(l) => (l < 1.0, json!({ "method": "exact", "lipschitz": l })),
                    None => {
                        let t = sys.composition_lipschitz_on_tree(
                            &w,
                            &self.scenario.x0,
                            TREE_DEPTH,
                            TREE_SAMPLES,
                            *seed,
                        )?;
                        (
                            t.estimate < 1.0,
                            json!({ "method": "tree", "lipschitz": t.estimate, "tree": t }),
                        )
                    }
                }
            }
        };
        Ok(CheckResult {
            check: check.name(),
            pass,
            details,
        })
    }

    pub fn run(&self, out_dir: Option<&Path>) -> Result<Outcome> {
        let s = &self.scenario;
        let (orbit, estimate) = self.omega_for(&s.driver, &s.x0)?;
        let driver_audit = DriverAudit {
            repetitive: check_repetitive(&orbit.symbols, self.system.len())?,
            disjunctive: check_disjunctive(&orbit.symbols, self.system.len(), self.audit_window)?,
        };
        let checks = s
            .checks
            .iter()
            .map(|c| self.run_check(c, &orbit, &estimate))
            .collect::<Result<Vec<_>>>()?;

        let mut seeds: Vec<u64> = seed_of(&s.driver).into_iter().collect();
        for c in &s.checks {
            match c {
                CheckSpec::CompareOmegas {
                    driver: Some(d), ..
                } => seeds.extend(seed_of(d)),
                CheckSpec::Contraction { seed, .. } => seeds.push(*seed),
                _ => {}
            }
        }
        let mut report = Report {
            scenario: s.name.clone(),
            parameters: json!({
                "dim": s.dim,
                "maps": s.maps.len(),
                "steps": s.steps,
                "burn_in": self.burn_in,
                "cluster_eps": self.cluster_eps,
                "audit_window": self.audit_window,
                "x0": s.x0,
                "driver": s.driver,
            }),
            seeds,
            driver_audit,
            final_point: orbit.last().clone(),
            max_norm: orbit.points.iter().map(Vector::norm).fold(0.0, f64::max),
            representatives: estimate.len(),
            pass: checks.iter().all(|c| c.pass),
            checks,
            files: BTreeMap::new(),
        };

        if let Some(dir) = out_dir {
            self.write_files(dir, &orbit, &estimate, &mut report)?;
        }
        Ok(Outcome {
            orbit,
            estimate,
            report,
        })
    }

    fn write_files(
        &self,
        dir: &Path,
        orbit: &Orbit,
        est: &OmegaEstimate,
        report: &mut Report,
    ) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let name = &self.scenario.name;
        let path = |suffix: &str| dir.join(format!("{name}.{suffix}"));

        let orbit_path = path("orbit.csv");
        write_orbit_csv(orbit, BufWriter::new(create(&orbit_path)?))?;
        report.files.insert("orbit", orbit_path);

        let omega_path = path("omega.json");
        serde_json::to_writer_pretty(BufWriter::new(create(&omega_path)?), est)?;
        report.files.insert("omega", omega_path);

        if self.scenario.dim == 2 && self.scenario.svg.unwrap_or(true) {
            let svg_path = path("svg");
            let tail = &orbit.points[self.burn_in..];
            let reference = self.reference.as_ref().map(Reference::cloud);
            fs::write(
                &svg_path,
                svg::scatter(tail, &est.representatives, reference),
            )
            .with_context(|| format!("writing {}", svg_path.display()))?;
            report.files.insert("svg", svg_path);
        }

        let report_path = path("report.json");
        report.files.insert("report", report_path.clone());
        serde_json::to_writer_pretty(BufWriter::new(create(&report_path)?), report)?;
        Ok(())
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}
