//! Nearest-integer distances, Dirichlet's pigeonhole search and range-limited
//! estimates of the bad-approximability constant.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{row_residue, FrequencyBox, FrequencyVector};
use crate::generators::GeneratorMatrix;
use crate::numeric::dist_to_int;

/// `({x}_∞, {x})`: sup and Euclidean distance from `x` to the nearest integer vector.
pub fn nearest_integer_distance(x: &[f64]) -> (f64, f64) {
    let mut sup = 0.0f64;
    let mut sq = 0.0;
    for &xi in x {
        let t = dist_to_int(xi);
        sup = sup.max(t);
        sq += t * t;
    }
    (sup, sq.sqrt())
}

/// `{A h}_∞` evaluated on the stored matrix.
pub fn sup_distance(g: &GeneratorMatrix, h: &[i64]) -> f64 {
    (0..g.n()).map(|j| row_residue(g, j, h, 1).abs()).fold(0.0, f64::max)
}

/// `{A h}²` (squared Euclidean distance).
pub(crate) fn euclid_distance_sq(g: &GeneratorMatrix, h: &[i64], scale: i64) -> f64 {
    (0..g.n())
        .map(|j| {
            let r = row_residue(g, j, h, scale);
            r * r
        })
        .sum()
}

/// Largest integer `b` with `b ≤ q^{n/d}`, i.e. `b^d ≤ q^n`.
fn dirichlet_radius(q: f64, n: usize, d: usize) -> u64 {
    let approx = q.powf(n as f64 / d as f64).floor().max(1.0) as u64;
    let fits = |b: u64| (b as f64).powi(d as i32) <= q.powi(n as i32);
    let mut b = approx;
    while b > 1 && !fits(b) {
        b -= 1;
    }
    while fits(b + 1) {
        b += 1;
    }
    b
}

/// First `h` with `0 < ‖h‖_∞ ≤ ⌊q^{n/d}⌋` and `{A h}_∞ < 1/q`.
///
/// Shells `‖h‖_∞ = 1, 2, …` are scanned in order; within a shell only one of
/// each pair `±h` is visited (the one whose first nonzero coordinate is
/// positive, since `{A(-h)} = {A h}`), in lexicographic order.
pub fn dirichlet_search(g: &GeneratorMatrix, q: f64) -> Result<FrequencyVector> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::invalid(format!("q must be a finite real ≥ 1, got {q}")));
    }
    let (n, d) = (g.n(), g.d());
    let radius = dirichlet_radius(q, n, d);
    FrequencyBox::new(d, radius, "Dirichlet search box (2⌊q^{n/d}⌋+1)^d")?;
    let threshold = 1.0 / q;
    let mut best: Option<(f64, Vec<i64>)> = None;
    let mut h = vec![0i64; d];
    for shell in 1..=radius as i64 {
        let shell_box = FrequencyBox::new(d, shell as u64, "Dirichlet shell")?;
        for idx in 0..shell_box.len() {
            shell_box.fill(idx, &mut h);
            let on_shell = h.iter().any(|x| x.abs() == shell);
            let canonical = h.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0);
            if !(on_shell && canonical) {
                continue;
            }
            let dist = sup_distance(g, &h);
            if dist < threshold {
                return Ok(FrequencyVector(h));
            }
            if best.as_ref().is_none_or(|(b, _)| dist < *b) {
                best = Some((dist, h.clone()));
            }
        }
    }
    let (dist, h) = best.unwrap_or((f64::NAN, vec![]));
    Err(Error::Consistency(format!(
        "no h with ‖h‖_∞ ≤ {radius} has {{Ah}}_∞ < 1/q = {threshold}; best candidate {} with {{Ah}}_∞ = {dist}",
        FrequencyVector(h)
    )))
}

/// Minimum of `{A h}_∞ · ‖h‖_∞^{d/n}` over `0 < ‖h‖_∞ ≤ hmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadApproxEstimate {
    pub c_est: f64,
    pub argmin_h: FrequencyVector,
    pub hmax: u64,
    /// The estimate is an exact minimum over the searched box only.
    pub certified_up_to: u64,
}

impl BadApproxEstimate {
    /// Accepts `c_a` as an approximation constant on the searched range when
    /// `0 < c_a < c_est`.
    pub fn certify(&self, c_a: f64) -> Result<CertifiedConstant> {
        if !(c_a.is_finite() && c_a > 0.0) {
            return Err(Error::invalid(format!("C_A must be positive, got {c_a}")));
        }
        if c_a >= self.c_est {
            return Err(Error::invalid(format!(
                "C_A = {c_a} is not certified: {{Ah}}_∞·‖h‖_∞^(d/n) reaches {} at h = {} within ‖h‖_∞ ≤ {}",
                self.c_est, self.argmin_h, self.certified_up_to
            )));
        }
        Ok(CertifiedConstant {
            value: c_a,
            certified_up_to: self.certified_up_to,
            c_est: self.c_est,
        })
    }
}

/// An approximation constant together with the search range that supports it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedConstant {
    pub value: f64,
    pub certified_up_to: u64,
    pub c_est: f64,
}

/// Exhaustive estimate of the approximation constant over `‖h‖_∞ ≤ hmax`.
///
/// `c_est = 0` means an exact integer relation was found in range. Ties go to
/// the smallest `‖h‖_∞`, then to the lexicographically smallest `h`.
pub fn estimate_bad_constant(g: &GeneratorMatrix, hmax: u64) -> Result<BadApproxEstimate> {
    if hmax == 0 {
        return Err(Error::invalid("hmax must be ≥ 1"));
    }
    let exponent = g.d() as f64 / g.n() as f64;
    let fbox = FrequencyBox::new(g.d(), hmax, "bad-approximability search box (2H+1)^d")?;
    let parts = fbox.fold_chunks(
        || (f64::INFINITY, u64::MAX, Vec::new()),
        |best, h| {
            let norm = h.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
            let v = sup_distance(g, h) * (norm as f64).powf(exponent);
            if v < best.0 || (v == best.0 && norm < best.1) {
                *best = (v, norm, h.to_vec());
            }
        },
    );
    let (c_est, _, h) = parts.into_iter().fold((f64::INFINITY, u64::MAX, Vec::new()), |a, b| {
        match b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)).then_with(|| b.2.cmp(&a.2)) {
            Ordering::Less => b,
            _ => a,
        }
    });
    Ok(BadApproxEstimate {
        c_est,
        argmin_h: FrequencyVector(h),
        hmax,
        certified_up_to: hmax,
    })
}
