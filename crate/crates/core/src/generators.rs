//! Generator matrices: the `n × d` matrix whose rows are the step vectors of the walk.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::decimal17;

/// Rows that load fine but make the walk degenerate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneratorWarnings {
    /// Indices (0-based) of rows equal to the zero vector after reduction.
    pub zero_rows: Vec<usize>,
    /// Pairs `(i, j)`, `i < j`, of rows that are bit-identical after reduction.
    pub duplicate_rows: Vec<(usize, usize)>,
}

impl GeneratorWarnings {
    pub fn is_empty(&self) -> bool {
        self.zero_rows.is_empty() && self.duplicate_rows.is_empty()
    }
}

/// An `n × d` real matrix with entries reduced into `[0, 1)`.
///
/// Row `j` is the generator `α_{j+1}`; row order is preserved. The matrix is
/// immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    n: usize,
    d: usize,
    entries: Vec<f64>,
    warnings: GeneratorWarnings,
}

fn reduce_mod1(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r + 0.0
    }
}

impl GeneratorMatrix {
    /// Validates and reduces `rows`. Zero and duplicate rows are accepted and
    /// reported through [`GeneratorMatrix::warnings`].
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::invalid("generator list is empty"))?;
        let d = first.as_ref().len();
        if d == 0 {
            return Err(Error::invalid("generator rows must have at least one coordinate"));
        }
        let mut entries = Vec::with_capacity(rows.len() * d);
        for (j, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::invalid(format!(
                    "ragged rows: row {} has {} coordinates, expected {d}",
                    j + 1,
                    row.len()
                )));
            }
            for &x in row {
                if !x.is_finite() {
                    return Err(Error::invalid(format!("row {} contains non-finite value {x}", j + 1)));
                }
                entries.push(reduce_mod1(x));
            }
        }
        let n = rows.len();
        let mut warnings = GeneratorWarnings::default();
        for j in 0..n {
            let rj = &entries[j * d..(j + 1) * d];
            if rj.iter().all(|&x| x == 0.0) {
                warnings.zero_rows.push(j);
            }
            for i in 0..j {
                let ri = &entries[i * d..(i + 1) * d];
                if ri.iter().zip(rj).all(|(a, b)| a.to_bits() == b.to_bits()) {
                    warnings.duplicate_rows.push((i, j));
                }
            }
        }
        Ok(Self {
            n,
            d,
            entries,
            warnings,
        })
    }

    /// Number of generators.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Torus dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.entries[j * self.d..(j + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.entries.chunks_exact(self.d)
    }

    pub fn entry(&self, j: usize, i: usize) -> f64 {
        self.entries[j * self.d + i]
    }

    pub fn warnings(&self) -> &GeneratorWarnings {
        &self.warnings
    }

    /// Parses the matrix text format: one row per line, fields separated by
    /// commas and/or whitespace, `#` starts a comment line.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|tok| !tok.is_empty())
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| Error::invalid(format!("line {}: cannot parse {tok:?} as a number", lineno + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    /// Serialises into the matrix text format with at least 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let fields: Vec<String> = row.iter().map(|&x| decimal17(x)).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Realises the `rows` list as a generator matrix (entries reduced mod 1).
pub fn load_generators<R: AsRef<[f64]>>(rows: &[R]) -> Result<GeneratorMatrix> {
    GeneratorMatrix::from_rows(rows)
}

/// Built-in generator families used as fixtures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `frac((1+√5)/2)`; 1×1 only.
    Golden,
    /// Entry `(j, i)` is `frac(√p)` for the `(j·d + i + 1)`-th prime.
    SqrtPrimes,
    /// Entries are multiples of `1/q` with numerators cycling through `1..q`.
    Rational(u32),
    /// A single row `(x, …, x)`.
    Diagonal(f64),
    /// Seeded uniform entries.
    Random,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Golden => write!(f, "golden"),
            Family::SqrtPrimes => write!(f, "sqrt_primes"),
            Family::Rational(q) => write!(f, "rational({q})"),
            Family::Diagonal(x) => write!(f, "diagonal({x})"),
            Family::Random => write!(f, "random"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts `golden`, `sqrt_primes`, `random`, `rational(q)` and `diagonal(x)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once('(') {
            Some((name, rest)) => {
                let arg = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::invalid(format!("unbalanced parenthesis in family {s:?}")))?;
                (name.trim(), Some(arg.trim()))
            }
            None => (s, None),
        };
        let family = match (name, arg) {
            ("golden", None) => Family::Golden,
            ("sqrt_primes", None) => Family::SqrtPrimes,
            ("random", None) => Family::Random,
            ("rational", Some(q)) => Family::Rational(
                q.parse()
                    .map_err(|_| Error::invalid(format!("rational family needs an integer q, got {q:?}")))?,
            ),
            ("diagonal", Some(x)) => Family::Diagonal(
                x.parse()
                    .map_err(|_| Error::invalid(format!("diagonal family needs a real x, got {x:?}")))?,
            ),
            _ => return Err(Error::invalid(format!("unknown generator family {s:?}"))),
        };
        Ok(family)
    }
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Builds a fixture matrix from a named family.
pub fn builtin_generators(family: Family, n: usize, d: usize, seed: Option<u64>) -> Result<GeneratorMatrix> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("builtin families need n ≥ 1 and d ≥ 1"));
    }
    let rows: Vec<Vec<f64>> = match family {
        Family::Golden => {
            if n * d != 1 {
                return Err(Error::invalid(format!("golden is 1×1, requested {n}×{d}")));
            }
            vec![vec![(1.0 + 5f64.sqrt()) / 2.0]]
        }
        Family::SqrtPrimes => {
            let primes = first_primes(n * d);
            primes
                .chunks(d)
                .map(|chunk| chunk.iter().map(|&p| (p as f64).sqrt()).collect())
                .collect()
        }
        Family::Rational(q) => {
            if q < 2 {
                return Err(Error::invalid(format!("rational family needs q ≥ 2, got {q}")));
            }
            let q = q as usize;
            (0..n)
                .map(|j| (0..d).map(|i| (1 + (j * d + i) % (q - 1)) as f64 / q as f64).collect())
                .collect()
        }
        Family::Diagonal(x) => {
            if n != 1 {
                return Err(Error::invalid(format!("diagonal has a single row, requested n = {n}")));
            }
            vec![vec![x; d]]
        }
        Family::Random => {
            let seed = seed.ok_or_else(|| Error::invalid("random family requires a seed"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect()
        }
    };
    GeneratorMatrix::from_rows(&rows)
}

fn is_shape(item: &str) -> bool {
    item.split_once('x')
        .is_some_and(|(n, d)| !n.is_empty() && !d.is_empty() && n.bytes().chain(d.bytes()).all(|b| b.is_ascii_digit()))
}

/// A builtin family together with its shape, parsed from `family[:params]`.
///
/// Parameters are comma separated: `NxD` sets the shape, `n=`, `d=`, `q=`, `x=`
/// and `seed=` set individual values, and a bare value is the family's own
/// parameter (`q` for rational, `x` for diagonal). Examples: `golden`,
/// `sqrt_primes:2x2`, `rational:3`, `diagonal:x=0.3,d=2`, `random:n=2,d=2,seed=5`.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinSpec {
    pub family: Family,
    pub n: usize,
    pub d: usize,
    pub seed: Option<u64>,
}

impl BuiltinSpec {
    pub fn build(&self, fallback_seed: Option<u64>) -> Result<GeneratorMatrix> {
        builtin_generators(self.family, self.n, self.d, self.seed.or(fallback_seed))
    }
}

impl FromStr for BuiltinSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((name, params)) => (name.trim(), params.trim()),
            None => (s.trim(), ""),
        };
        if name.contains('(') {
            let family: Family = name.parse()?;
            return BuiltinSpec::with_params(family, params, None);
        }
        let mut primary = None;
        let mut rest = Vec::new();
        for item in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if item.contains('=') || is_shape(item) {
                rest.push(item);
            } else if primary.is_none() {
                primary = Some(item);
            } else {
                return Err(Error::invalid(format!("unexpected parameter {item:?} in {s:?}")));
            }
        }
        let mut param_of = |key: &str| -> Option<String> {
            let pos = rest
                .iter()
                .position(|p| p.split_once('=').map(|(k, _)| k.trim()) == Some(key))?;
            let item = rest.remove(pos);
            Some(item.split_once('=').unwrap().1.trim().to_string())
        };
        let family = match name {
            "rational" => {
                let q = primary
                    .map(str::to_string)
                    .or_else(|| param_of("q"))
                    .ok_or_else(|| Error::invalid("rational needs q, e.g. rational:3"))?;
                format!("rational({q})").parse()?
            }
            "diagonal" => {
                let x = primary
                    .map(str::to_string)
                    .or_else(|| param_of("x"))
                    .ok_or_else(|| Error::invalid("diagonal needs x, e.g. diagonal:x=0.3,d=2"))?;
                format!("diagonal({x})").parse()?
            }
            other => {
                if let Some(p) = primary {
                    return Err(Error::invalid(format!(
                        "family {other} takes no bare parameter, got {p:?}"
                    )));
                }
                other.parse()?
            }
        };
        BuiltinSpec::with_params(family, &rest.join(","), None)
    }
}

impl BuiltinSpec {
    fn with_params(family: Family, params: &str, seed: Option<u64>) -> Result<Self> {
        let mut spec = BuiltinSpec {
            family,
            n: 1,
            d: 1,
            seed,
        };
        for item in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::invalid(format!("cannot parse builtin parameter {item:?}"));
            if let Some((key, value)) = item.split_once('=') {
                match key.trim() {
                    "n" => spec.n = value.trim().parse().map_err(|_| bad())?,
                    "d" => spec.d = value.trim().parse().map_err(|_| bad())?,
                    "seed" => spec.seed = Some(value.trim().parse().map_err(|_| bad())?),
                    _ => return Err(bad()),
                }
            } else if let Some((n, d)) = item.split_once('x') {
                spec.n = n.trim().parse().map_err(|_| bad())?;
                spec.d = d.trim().parse().map_err(|_| bad())?;
            } else {
                return Err(bad());
            }
        }
        Ok(spec)
    }
}
