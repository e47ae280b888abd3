//! Nonexpansive iterated function systems: generators, orbits, the Hutchinson
//! operator on finite clouds and contractivity diagnostics for composition
//! words.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::drivers::{DriverSpec, SymbolSequence};
use crate::error::{Error, Result};
use crate::geometry::{AffineSubspace, ConvexBody, Hyperplane, Matrix, Vector};
use crate::omega::PointCloud;

/// Affine maps with spectral norm up to `1 + NONEXPANSIVE_SLACK` are accepted.
pub const NONEXPANSIVE_SLACK: f64 = 1e-9;
/// Pairs of tree points closer than this are skipped by the tree estimate.
pub const DEGENERATE_PAIR_TOL: f64 = 1e-12;

/// `x ↦ linear·x + shift` with `‖linear‖₂ ≤ 1 + NONEXPANSIVE_SLACK`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AffineRepr")]
pub struct AffineMap {
    linear: Matrix,
    shift: Vector,
}

#[derive(Deserialize)]
struct AffineRepr {
    linear: Matrix,
    shift: Vector,
}

impl TryFrom<AffineRepr> for AffineMap {
    type Error = Error;

    fn try_from(r: AffineRepr) -> Result<Self> {
        AffineMap::new(r.linear, r.shift)
    }
}

impl AffineMap {
    pub fn new(linear: Matrix, shift: Vector) -> Result<Self> {
        if !linear.is_square() {
            return Err(Error::InvalidParameter(format!(
                "affine linear part is {}x{}, expected square",
                linear.rows(),
                linear.cols()
            )));
        }
        shift.check_dim(linear.rows())?;
        let norm = linear.spectral_norm();
        if norm > 1.0 + NONEXPANSIVE_SLACK {
            return Err(Error::NotNonexpansive { norm });
        }
        Ok(Self { linear, shift })
    }

    pub fn linear(&self) -> &Matrix {
        &self.linear
    }

    pub fn shift(&self) -> &Vector {
        &self.shift
    }

    pub fn dim(&self) -> usize {
        self.shift.dim()
    }

    fn apply_unchecked(&self, x: &Vector) -> Vector {
        let mut y = self.linear.mul_slice(x.as_slice());
        for (yi, si) in y.iter_mut().zip(self.shift.as_slice()) {
            *yi += si;
        }
        Vector::new(y).expect("affine image overflowed")
    }
}

/// One nonexpansive generator `f_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    #[serde(rename = "hyperplane")]
    HyperplaneProjection(Hyperplane),
    #[serde(rename = "subspace")]
    SubspaceProjection(AffineSubspace),
    #[serde(rename = "convex")]
    ConvexProjection(ConvexBody),
    Affine(AffineMap),
}

impl MapSpec {
    pub fn dim(&self) -> usize {
        match self {
            MapSpec::HyperplaneProjection(h) => h.dim(),
            MapSpec::SubspaceProjection(s) => s.dim(),
            MapSpec::ConvexProjection(k) => k.dim(),
            MapSpec::Affine(a) => a.dim(),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        Ok(self.apply_unchecked(x))
    }

    fn apply_unchecked(&self, x: &Vector) -> Vector {
        match self {
            MapSpec::HyperplaneProjection(h) => h.project_unchecked(x),
            MapSpec::SubspaceProjection(s) => s.project_unchecked(x),
            MapSpec::ConvexProjection(k) => k.project_unchecked(x),
            MapSpec::Affine(a) => a.apply_unchecked(x),
        }
    }

    /// Linear part of the map, when it is affine.
    pub fn linear_part(&self) -> Option<Matrix> {
        match self {
            MapSpec::HyperplaneProjection(h) => Some(h.linear_part()),
            MapSpec::SubspaceProjection(s) => Some(s.linear_part()),
            MapSpec::ConvexProjection(_) => None,
            MapSpec::Affine(a) => Some(a.linear().clone()),
        }
    }
}

/// The tuple `(R^dim; f_1, …, f_N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MapSpec>", into = "Vec<MapSpec>")]
pub struct IFSystem {
    maps: Vec<MapSpec>,
    dim: usize,
}

impl TryFrom<Vec<MapSpec>> for IFSystem {
    type Error = Error;

    fn try_from(maps: Vec<MapSpec>) -> Result<Self> {
        IFSystem::new(maps)
    }
}

impl From<IFSystem> for Vec<MapSpec> {
    fn from(s: IFSystem) -> Self {
        s.maps
    }
}

/// A finite orbit: `points[k + 1] = f_{symbols[k]}(points[k])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub points: Vec<Vector>,
    pub symbols: Vec<usize>,
}

impl Orbit {
    pub fn start(&self) -> &Vector {
        &self.points[0]
    }

    pub fn last(&self) -> &Vector {
        self.points.last().expect("orbit always holds its start")
    }

    /// Number of points, `n + 1` for an orbit of `n` steps.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.symbols.len()
    }

    /// Recomputes every step and compares bit for bit.
    pub fn is_consistent_with(&self, sys: &IFSystem) -> bool {
        self.points.len() == self.symbols.len() + 1
            && self.symbols.iter().enumerate().all(|(k, &s)| {
                sys.apply_map(s, &self.points[k])
                    .map(|y| y == self.points[k + 1])
                    .unwrap_or(false)
            })
    }
}

/// A nonempty composition word `(u_1, …, u_l)`; `f_{u_1}` is applied first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>, alphabet: usize) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParameter("composition word is empty".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s == 0 || s > alphabet) {
            return Err(Error::SymbolOutOfRange {
                symbol: s,
                alphabet,
            });
        }
        Ok(Self(symbols))
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }
}

/// Empirical Lipschitz constant of a word restricted to sampled tree points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeLipschitzEstimate {
    pub estimate: f64,
    pub pairs_used: usize,
    pub pairs_skipped: usize,
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
}

impl IFSystem {
    pub fn new(maps: Vec<MapSpec>) -> Result<Self> {
        let dim = maps.first().ok_or(Error::EmptySystem)?.dim();
        for m in &maps {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        Ok(Self { maps, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Alphabet size `N`.
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[MapSpec] {
        &self.maps
    }

    pub fn map(&self, symbol: usize) -> Result<&MapSpec> {
        symbol
            .checked_sub(1)
            .and_then(|i| self.maps.get(i))
            .ok_or(Error::SymbolOutOfRange {
                symbol,
                alphabet: self.maps.len(),
            })
    }

    /// `f_symbol(x)`, with 1-based `symbol`.
    pub fn apply_map(&self, symbol: usize, x: &Vector) -> Result<Vector> {
        let map = self.map(symbol)?;
        x.check_dim(self.dim)?;
        Ok(map.apply_unchecked(x))
    }

    /// `f_{u_l} ∘ … ∘ f_{u_1}(x)`
    pub fn apply_word(&self, word: &Word, x: &Vector) -> Result<Vector> {
        word.symbols()
            .iter()
            .try_fold(x.clone(), |acc, &s| self.apply_map(s, &acc))
    }

    /// `n` steps from `x0`, pulling symbols from `driver`.
    pub fn run_orbit(&self, x0: &Vector, driver: &mut SymbolSequence, n: usize) -> Result<Orbit> {
        x0.check_dim(self.dim)?;
        let mut points = Vec::with_capacity(n + 1);
        let mut symbols = Vec::with_capacity(n);
        points.push(x0.clone());
        for _ in 0..n {
            let s = driver.next_symbol()?;
            let next = self.apply_map(s, points.last().expect("nonempty"))?;
            symbols.push(s);
            points.push(next);
        }
        Ok(Orbit { points, symbols })
    }

    /// Convenience wrapper building a fresh producer from `spec`.
    pub fn run_orbit_with(&self, x0: &Vector, spec: &DriverSpec, n: usize) -> Result<Orbit> {
        spec.validate_for(self.len())?;
        self.run_orbit(x0, &mut spec.sequence()?, n)
    }

    /// `Φ(S) = ∪_i f_i(S)` on a finite cloud, without closure.
    pub fn hutchinson(&self, cloud: &PointCloud) -> Result<PointCloud> {
        cloud.points()[0].check_dim(self.dim)?;
        let images = self
            .maps
            .iter()
            .flat_map(|m| cloud.iter().map(move |p| m.apply_unchecked(p)));
        PointCloud::new(images)
    }

    /// Product `L_{u_l} ⋯ L_{u_1}` of linear parts, if all maps are affine.
    pub fn word_linear_part(&self, word: &Word) -> Result<Option<Matrix>> {
        let mut product = Matrix::identity(self.dim);
        for &s in word.symbols() {
            match self.map(s)?.linear_part() {
                Some(l) => product = l.matmul(&product),
                None => return Ok(None),
            }
        }
        Ok(Some(product))
    }

    /// Global Lipschitz constant of the composition along `word`: the
    /// spectral norm of the product of linear parts. `None` when the word
    /// passes through a convex-body projection, which has no global linear
    /// part.
    pub fn composition_lipschitz_exact(&self, word: &Word) -> Result<Option<f64>> {
        Ok(self.word_linear_part(word)?.map(|m| m.spectral_norm()))
    }

    /// Lower bound on the Lipschitz constant of `f_word` restricted to the
    /// branching tree `∪_n Φ^n({x0})`.
    ///
    /// Draws `samples` tree nodes, each reached by a random word of length
    /// `0..=depth` (ChaCha8 seeded by `seed`), then evaluates
    /// `d(f_w(p), f_w(q)) / d(p, q)` over every pair. Node generation is
    /// sequential, so the result is a function of the arguments alone.
    pub fn composition_lipschitz_on_tree(
        &self,
        word: &Word,
        x0: &Vector,
        depth: usize,
        samples: usize,
        seed: u64,
    ) -> Result<TreeLipschitzEstimate> {
        if samples < 2 {
            return Err(Error::InvalidParameter(
                "tree estimate needs at least 2 samples".into(),
            ));
        }
        x0.check_dim(self.dim)?;
        for &s in word.symbols() {
            self.map(s)?;
        }
        let n = self.len() as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes = Vec::with_capacity(samples);
        for _ in 0..samples {
            let len = (rng.next_u64() % (depth as u64 + 1)) as usize;
            let mut p = x0.clone();
            for _ in 0..len {
                let s = (rng.next_u64() % n) as usize;
                p = self.maps[s].apply_unchecked(&p);
            }
            nodes.push(p);
        }
        let images = nodes
            .iter()
            .map(|p| self.apply_word(word, p))
            .collect::<Result<Vec<_>>>()?;

        let (mut best, mut used, mut skipped) = (0.0_f64, 0usize, 0usize);
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                let d = nodes[i].distance(&nodes[j]);
                if d < DEGENERATE_PAIR_TOL {
                    skipped += 1;
                    continue;
                }
                used += 1;
                best = best.max(images[i].distance(&images[j]) / d);
            }
        }
        if used == 0 {
            return Err(Error::DegenerateTree { pairs: skipped });
        }
        Ok(TreeLipschitzEstimate {
            estimate: best,
            pairs_used: used,
            pairs_skipped: skipped,
            depth,
            samples,
            seed,
        })
    }
}
