//! Fourier coefficients of the step law and the bounds built from them.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorMatrix;
use crate::numeric::{centered_residue, CompensatedSum};

/// Cap on the number of lattice points in a frequency box `(2H+1)^d`.
pub const FREQUENCY_BOX_CAP: u64 = 1 << 26;

/// Frequencies per work unit; fixed so floating-point sums do not depend on
/// the thread count.
const FREQ_CHUNK: u64 = 4096;

/// An integer frequency `h ∈ Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyVector(pub Vec<i64>);

impl FrequencyVector {
    pub fn new(h: Vec<i64>) -> Self {
        Self(h)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn sup_norm(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }
}

impl From<Vec<i64>> for FrequencyVector {
    fn from(h: Vec<i64>) -> Self {
        Self(h)
    }
}

impl fmt::Display for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The box `‖h‖_∞ ≤ H` in `Z^d`, enumerated lexicographically by index.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FrequencyBox {
    d: usize,
    radius: i64,
    len: u64,
}

impl FrequencyBox {
    pub(crate) fn new(d: usize, radius: u64, what: &'static str) -> Result<Self> {
        let side = 2 * radius as u128 + 1;
        let len = (0..d).try_fold(1u128, |acc, _| acc.checked_mul(side));
        match len {
            Some(len) if len <= FREQUENCY_BOX_CAP as u128 => Ok(Self {
                d,
                radius: radius as i64,
                len: len as u64,
            }),
            _ => Err(Error::CapExceeded {
                what,
                required: len.unwrap_or(u128::MAX),
                cap: FREQUENCY_BOX_CAP as u128,
                hint: "reduce the frequency radius",
            }),
        }
    }

    pub(crate) fn len(&self) -> u64 {
        self.len
    }

    /// Fills `h` with the `index`-th vector; the first coordinate varies slowest.
    pub(crate) fn fill(&self, mut index: u64, h: &mut [i64]) {
        let side = (2 * self.radius + 1) as u64;
        for slot in h.iter_mut().rev() {
            *slot = (index % side) as i64 - self.radius;
            index /= side;
        }
    }

    /// Folds every nonzero `h` into a per-chunk accumulator; chunks have a
    /// fixed size and the results come back in index order.
    pub(crate) fn fold_chunks<T, I, F>(&self, init: I, step: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> T + Sync,
        F: Fn(&mut T, &[i64]) + Sync,
    {
        let chunks = self.len.div_ceil(FREQ_CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * FREQ_CHUNK;
                let end = (start + FREQ_CHUNK).min(self.len);
                let mut acc = init();
                let mut h = vec![0i64; self.d];
                for idx in start..end {
                    self.fill(idx, &mut h);
                    if h.iter().any(|&x| x != 0) {
                        step(&mut acc, &h);
                    }
                }
                acc
            })
            .collect()
    }
}

fn check_dim(g: &GeneratorMatrix, h: &[i64]) -> Result<()> {
    if h.len() != g.d() {
        return Err(Error::invalid(format!(
            "frequency has {} coordinates but the torus has d = {}",
            h.len(),
            g.d()
        )));
    }
    Ok(())
}

/// Signed distance from `h·α_j` to the nearest integer.
pub(crate) fn row_residue(g: &GeneratorMatrix, j: usize, h: &[i64], scale: i64) -> f64 {
    centered_residue(h.iter().zip(g.row(j)).map(|(&hi, &a)| ((scale * hi) as f64, a)))
}

fn qhat_unchecked(g: &GeneratorMatrix, h: &[i64]) -> f64 {
    if h.iter().all(|&x| x == 0) {
        return 1.0;
    }
    let sum: CompensatedSum = (0..g.n())
        .map(|j| (2.0 * PI * row_residue(g, j, h, 1).abs()).cos())
        .collect();
    sum.value() / g.n() as f64
}

/// `Q̂(h) = (1/n) Σ_j cos(2π h·α_j)`.
///
/// The phase is reduced to the nearest-integer residue before the cosine, so
/// `qhat(G, -h)` equals `qhat(G, h)` bit-for-bit and `qhat(G, 0) = 1` exactly.
pub fn qhat(g: &GeneratorMatrix, h: &[i64]) -> Result<f64> {
    check_dim(g, h)?;
    Ok(qhat_unchecked(g, h))
}

/// `R(h) = Π_i max(1, |h_i|)` over all `d` coordinates.
pub fn weight_r(h: &[i64]) -> u64 {
    h.iter().map(|x| x.unsigned_abs().max(1)).product()
}

/// One-frequency specialisation of the Fourier lower bound
/// `[ |Q̂(h)|^{2k} Π_i term_i ]^{1/2}` with
/// `term_i = sin²(2π h_i r_i) / (π² h_i²)` for `h_i ≠ 0` and `4 r_i²` otherwise.
///
/// With `r = None` the default schedule `r_i = 1/(4|h_i|)` (or `1/(2π)` when
/// `h_i = 0`) is used, which reduces the value to `|Q̂(h)|^k / (π^d R(h))`.
pub fn single_h_lower_bound(g: &GeneratorMatrix, k: u32, h: &[i64], r: Option<&[f64]>) -> Result<f64> {
    check_dim(g, h)?;
    if h.iter().all(|&x| x == 0) {
        return Err(Error::invalid("the Fourier lower bound needs h ≠ 0"));
    }
    if let Some(r) = r {
        if r.len() != h.len() {
            return Err(Error::invalid("r must have one entry per coordinate"));
        }
        if let Some(x) = r.iter().find(|&&x| !(x > 0.0 && x <= 0.5)) {
            return Err(Error::invalid(format!("r entries must lie in (0, 0.5], got {x}")));
        }
    }
    Ok(lower_bound_term(g, k, h, r))
}

fn lower_bound_term(g: &GeneratorMatrix, k: u32, h: &[i64], r: Option<&[f64]>) -> f64 {
    // sqrt(term_i) taken per coordinate so large k cannot underflow |Q̂|^{2k}.
    let root: f64 = h
        .iter()
        .enumerate()
        .map(|(i, &hi)| {
            let ri = match r {
                Some(r) => r[i],
                None if hi == 0 => 1.0 / (2.0 * PI),
                None => 1.0 / (4.0 * hi.unsigned_abs() as f64),
            };
            if hi == 0 {
                2.0 * ri
            } else {
                let hf = hi as f64;
                (2.0 * PI * hf * ri).sin().abs() / (PI * hf.abs())
            }
        })
        .product();
    qhat_unchecked(g, h).abs().powi(k as i32) * root
}

/// Best default-schedule single-frequency bound over `0 < ‖h‖_∞ ≤ hmax`.
///
/// Ties go to the lexicographically smallest `h`.
pub fn best_fourier_lower_bound(g: &GeneratorMatrix, k: u32, hmax: u64) -> Result<(f64, FrequencyVector)> {
    if hmax == 0 {
        return Err(Error::invalid("hmax must be ≥ 1"));
    }
    let fbox = FrequencyBox::new(g.d(), hmax, "Fourier search box (2H+1)^d")?;
    let pick = |a: (f64, Vec<i64>), b: (f64, Vec<i64>)| match b.0.total_cmp(&a.0) {
        Ordering::Greater => b,
        Ordering::Equal if b.1 < a.1 => b,
        _ => a,
    };
    let best = fbox
        .fold_chunks(
            || (f64::NEG_INFINITY, Vec::new()),
            |best, h| {
                let v = lower_bound_term(g, k, h, None);
                if v > best.0 {
                    *best = (v, h.to_vec());
                }
            },
        )
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), pick);
    Ok((best.0, FrequencyVector(best.1)))
}

/// Erdős–Turán–Koksma bound
/// `(3/2)^d ( 2/(M+1) + Σ_{0<‖h‖_∞≤M} |Q̂(h)|^k / R(h) )`.
pub fn etk_upper_bound(g: &GeneratorMatrix, k: u32, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("M must be ≥ 1"));
    }
    let fbox = FrequencyBox::new(g.d(), m, "ETK frequency box (2M+1)^d")?;
    let mut total = CompensatedSum::new();
    for part in fbox.fold_chunks(CompensatedSum::new, |acc, h| {
        acc.add(qhat_unchecked(g, h).abs().powi(k as i32) / weight_r(h) as f64)
    }) {
        total.merge(&part);
    }
    Ok(1.5f64.powi(g.d() as i32) * (2.0 / (m as f64 + 1.0) + total.value()))
}
