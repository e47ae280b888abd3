//! Driving sequences `(i_n)` and finite-prefix audits of their properties.
//!
//! Symbols are 1-based: an alphabet of size `N` is `{1, …, N}`.
//!
//! Random drivers use ChaCha8 (`rand_chacha::ChaCha8Rng`, a counter-based
//! stream generator) seeded with `seed_from_u64(seed)`. Each symbol consumes
//! one `next_u64()`; its top 53 bits give `u ∈ [0, 1)` and the symbol is the
//! first index whose cumulative weight exceeds `u`. Streams are therefore
//! reproducible from the seed and weights alone.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ weights = 1` for i.i.d. drivers.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;
/// Missing words listed in a [`DisjunctivityReport`].
pub const MISSING_LIST_LIMIT: usize = 20;
/// Largest `N^m` that [`check_disjunctive`] will enumerate.
pub const MAX_AUDIT_WORDS: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriverSpec {
    /// `i_n = π((n − 1) mod N + 1)`
    Cyclic { permutation: Vec<usize> },
    /// Independent draws with the given positive weights.
    IidRandom { seed: u64, weights: Vec<f64> },
    /// All words over `{1..N}` concatenated in length-then-lexicographic order.
    #[serde(rename = "disjunctive")]
    DisjunctiveEnumeration { alphabet: usize },
    /// Finite replay; running past the end is an error.
    Custom { symbols: Vec<usize> },
}

impl DriverSpec {
    pub fn cyclic(alphabet: usize) -> Self {
        DriverSpec::Cyclic {
            permutation: (1..=alphabet).collect(),
        }
    }

    pub fn iid_uniform(seed: u64, alphabet: usize) -> Self {
        DriverSpec::IidRandom {
            seed,
            weights: vec![1.0 / alphabet as f64; alphabet],
        }
    }

    pub fn disjunctive(alphabet: usize) -> Self {
        DriverSpec::DisjunctiveEnumeration { alphabet }
    }

    /// Alphabet size implied by the spec; `None` for custom sequences.
    pub fn alphabet(&self) -> Option<usize> {
        match self {
            DriverSpec::Cyclic { permutation } => Some(permutation.len()),
            DriverSpec::IidRandom { weights, .. } => Some(weights.len()),
            DriverSpec::DisjunctiveEnumeration { alphabet } => Some(*alphabet),
            DriverSpec::Custom { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DriverSpec::Cyclic { permutation } => {
                let n = permutation.len();
                if n == 0 {
                    return Err(Error::InvalidDriver("empty permutation".into()));
                }
                let mut seen = vec![false; n];
                for &s in permutation {
                    if s == 0 || s > n {
                        return Err(Error::SymbolOutOfRange {
                            symbol: s,
                            alphabet: n,
                        });
                    }
                    if std::mem::replace(&mut seen[s - 1], true) {
                        return Err(Error::InvalidDriver(format!(
                            "permutation repeats symbol {s}"
                        )));
                    }
                }
            }
            DriverSpec::IidRandom { weights, .. } => {
                if weights.is_empty() {
                    return Err(Error::InvalidDriver("no weights".into()));
                }
                if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
                    return Err(Error::InvalidDriver(format!(
                        "weight {w} is not strictly positive"
                    )));
                }
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(Error::InvalidDriver(format!("weights sum to {sum}, not 1")));
                }
            }
            DriverSpec::DisjunctiveEnumeration { alphabet } => {
                if *alphabet == 0 {
                    return Err(Error::InvalidDriver("alphabet must be nonempty".into()));
                }
            }
            DriverSpec::Custom { symbols } => {
                if let Some(&s) = symbols.iter().find(|&&s| s == 0) {
                    return Err(Error::SymbolOutOfRange {
                        symbol: s,
                        alphabet: 0,
                    });
                }
            }
        }
        Ok(())
    }

    /// Validates the spec and checks that every symbol it can emit lies in
    /// `1..=alphabet`.
    pub fn validate_for(&self, alphabet: usize) -> Result<()> {
        self.validate()?;
        match self {
            DriverSpec::Custom { symbols } => {
                if let Some(&s) = symbols.iter().find(|&&s| s > alphabet) {
                    return Err(Error::SymbolOutOfRange {
                        symbol: s,
                        alphabet,
                    });
                }
            }
            other => {
                let n = other.alphabet().unwrap_or(0);
                if n > alphabet {
                    return Err(Error::SymbolOutOfRange {
                        symbol: n,
                        alphabet,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn sequence(&self) -> Result<SymbolSequence> {
        SymbolSequence::new(self.clone())
    }
}

#[derive(Debug)]
enum State {
    Cyclic,
    Iid {
        rng: Box<ChaCha8Rng>,
        cumulative: Vec<f64>,
    },
    /// Current word as 0-based digits and the offset of the next symbol in it.
    Enumeration {
        word: Vec<usize>,
        offset: usize,
    },
    Custom,
}

/// Stateful producer of a driving sequence.
#[derive(Debug)]
pub struct SymbolSequence {
    spec: DriverSpec,
    position: usize,
    state: State,
}

impl SymbolSequence {
    pub fn new(spec: DriverSpec) -> Result<Self> {
        spec.validate()?;
        let state = match &spec {
            DriverSpec::Cyclic { .. } => State::Cyclic,
            DriverSpec::IidRandom { seed, weights } => {
                let mut acc = 0.0;
                let mut cumulative: Vec<f64> = weights
                    .iter()
                    .map(|w| {
                        acc += w;
                        acc
                    })
                    .collect();
                // guard against the last partial sum rounding below 1
                if let Some(last) = cumulative.last_mut() {
                    *last = f64::INFINITY;
                }
                State::Iid {
                    rng: Box::new(ChaCha8Rng::seed_from_u64(*seed)),
                    cumulative,
                }
            }
            DriverSpec::DisjunctiveEnumeration { .. } => State::Enumeration {
                word: vec![0],
                offset: 0,
            },
            DriverSpec::Custom { .. } => State::Custom,
        };
        Ok(Self {
            spec,
            position: 0,
            state,
        })
    }

    pub fn spec(&self) -> &DriverSpec {
        &self.spec
    }

    /// Number of symbols produced so far.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn next_symbol(&mut self) -> Result<usize> {
        let symbol = match (&mut self.state, &self.spec) {
            (State::Cyclic, DriverSpec::Cyclic { permutation }) => {
                permutation[self.position % permutation.len()]
            }
            (State::Iid { rng, cumulative }, _) => {
                let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                cumulative
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(cumulative.len() - 1)
                    + 1
            }
            (
                State::Enumeration { word, offset },
                DriverSpec::DisjunctiveEnumeration { alphabet },
            ) => {
                let s = word[*offset] + 1;
                *offset += 1;
                if *offset == word.len() {
                    *offset = 0;
                    advance_word(word, *alphabet);
                }
                s
            }
            (State::Custom, DriverSpec::Custom { symbols }) => {
                *symbols.get(self.position).ok_or(Error::DriverExhausted {
                    position: self.position,
                })?
            }
            _ => unreachable!("driver state does not match its spec"),
        };
        self.position += 1;
        Ok(symbol)
    }

    pub fn take_symbols(&mut self, n: usize) -> Result<Vec<usize>> {
        (0..n).map(|_| self.next_symbol()).collect()
    }
}

/// Lexicographic successor among words of the same length; wraps to the
/// all-zero word one symbol longer.
fn advance_word(word: &mut Vec<usize>, alphabet: usize) {
    for digit in word.iter_mut().rev() {
        *digit += 1;
        if *digit < alphabet {
            return;
        }
        *digit = 0;
    }
    word.push(0);
}

/// First `n` symbols of the driver described by `spec`.
pub fn generate(spec: &DriverSpec, n: usize) -> Result<Vec<usize>> {
    spec.sequence()?.take_symbols(n)
}

/// Length of the enumeration prefix containing every word of length ≤ `m`:
/// `Σ_{k=1}^{m} k·N^k`.
pub fn enumeration_prefix_len(alphabet: usize, m: usize) -> usize {
    (1..=m).map(|k| k * alphabet.pow(k as u32)).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjunctivityReport {
    pub window_length: usize,
    pub alphabet: usize,
    pub total_words: usize,
    pub found: usize,
    pub missing_count: usize,
    /// First [`MISSING_LIST_LIMIT`] missing words in lexicographic order.
    pub missing: Vec<Vec<usize>>,
    pub prefix_length: usize,
    pub warning: Option<String>,
}

impl DisjunctivityReport {
    /// Every word of the window length occurs in the prefix.
    pub fn passes(&self) -> bool {
        self.missing_count == 0 && self.warning.is_none()
    }
}

/// Which of the `N^m` words of length `m` occur as contiguous windows of `seq`.
pub fn check_disjunctive(seq: &[usize], alphabet: usize, m: usize) -> Result<DisjunctivityReport> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "window length must be at least 1".into(),
        ));
    }
    if alphabet == 0 {
        return Err(Error::InvalidParameter("alphabet must be nonempty".into()));
    }
    if let Some(&s) = seq.iter().find(|&&s| s == 0 || s > alphabet) {
        return Err(Error::SymbolOutOfRange {
            symbol: s,
            alphabet,
        });
    }
    let total = u32::try_from(m)
        .ok()
        .and_then(|m| alphabet.checked_pow(m))
        .filter(|&t| t <= MAX_AUDIT_WORDS)
        .ok_or_else(|| {
            Error::InvalidParameter(format!("{alphabet}^{m} words exceeds the audit limit"))
        })?;

    let mut seen = vec![false; total];
    let warning = if seq.len() < m {
        Some(format!(
            "sequence length {} is shorter than window {m}",
            seq.len()
        ))
    } else {
        // rolling base-N code of the current window
        let high = total / alphabet;
        let mut code = 0usize;
        for (i, &s) in seq.iter().enumerate() {
            if i >= m {
                code -= (seq[i - m] - 1) * high;
            }
            code = code * alphabet + (s - 1);
            if i + 1 >= m {
                seen[code] = true;
            }
        }
        None
    };

    let found = seen.iter().filter(|&&b| b).count();
    let missing = seen
        .iter()
        .enumerate()
        .filter(|(_, &b)| !b)
        .take(MISSING_LIST_LIMIT)
        .map(|(code, _)| decode_word(code, alphabet, m))
        .collect();
    Ok(DisjunctivityReport {
        window_length: m,
        alphabet,
        total_words: total,
        found,
        missing_count: total - found,
        missing,
        prefix_length: seq.len(),
        warning,
    })
}

fn decode_word(mut code: usize, alphabet: usize, m: usize) -> Vec<usize> {
    let mut word = vec![0; m];
    for slot in word.iter_mut().rev() {
        *slot = code % alphabet + 1;
        code /= alphabet;
    }
    word
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitivityReport {
    /// `counts[σ − 1]` occurrences of symbol `σ`.
    pub counts: Vec<usize>,
    /// Symbols that never occur.
    pub absent: Vec<usize>,
}

impl RepetitivityReport {
    pub fn passes(&self) -> bool {
        self.absent.is_empty()
    }
}

/// Per-symbol occurrence counts of a finite prefix.
pub fn check_repetitive(seq: &[usize], alphabet: usize) -> Result<RepetitivityReport> {
    let mut counts = vec![0usize; alphabet];
    for &s in seq {
        if s == 0 || s > alphabet {
            return Err(Error::SymbolOutOfRange {
                symbol: s,
                alphabet,
            });
        }
        counts[s - 1] += 1;
    }
    let absent = (1..=alphabet).filter(|&s| counts[s - 1] == 0).collect();
    Ok(RepetitivityReport { counts, absent })
}
