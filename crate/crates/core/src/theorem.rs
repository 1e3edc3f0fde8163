//! Closed-form discrepancy bounds and the quantities used to check them.
//!
//! Lower bound, valid for every generator set:
//! `D(Q^{*k}) ≥ k^{-n/2} / (π^d 5^{n+1} d^{n/2})`. Its constant absorbs the
//! fixed `Z₁ = 2π²/25` used to pick the Dirichlet frequency.
//!
//! Upper bound, for a badly approximable matrix with constant `C_A`:
//! `D(Q^{*k}) ≤ (3/2)^d · 20 · (n / (C_A √2))^{n/d} · k^{-n/(2d)}`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::diophantine::{euclid_distance_sq, CertifiedConstant};
use crate::error::{Error, Result};
use crate::fourier::{weight_r, FrequencyBox};
use crate::generators::GeneratorMatrix;
use crate::numeric::CompensatedSum;

fn check_shape(n: usize, d: usize, k: u64) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("n and d must be ≥ 1"));
    }
    if k == 0 {
        return Err(Error::invalid("k must be ≥ 1"));
    }
    Ok(())
}

fn check_ca(c_a: f64) -> Result<()> {
    if !(c_a.is_finite() && c_a > 0.0) {
        return Err(Error::invalid(format!(
            "C_A must be positive (matrix not certified badly approximable), got {c_a}"
        )));
    }
    Ok(())
}

/// `k^{-n/2} / (π^d · 5^{n+1} · d^{n/2})`.
pub fn theorem1_lower_bound(n: usize, d: usize, k: u64) -> Result<f64> {
    check_shape(n, d, k)?;
    let (nf, df, kf) = (n as f64, d as f64, k as f64);
    Ok(kf.powf(-nf / 2.0) / (PI.powi(d as i32) * 5f64.powi(n as i32 + 1) * df.powf(nf / 2.0)))
}

/// `(3/2)^d · 20 · (n/(C_A √2))^{n/d} · k^{-n/(2d)}`.
pub fn theorem2_upper_bound(n: usize, d: usize, c_a: f64, k: u64) -> Result<f64> {
    check_shape(n, d, k)?;
    check_ca(c_a)?;
    let (nf, df, kf) = (n as f64, d as f64, k as f64);
    Ok(1.5f64.powi(d as i32) * 20.0 * (nf / (c_a * SQRT_2)).powf(nf / df) * kf.powf(-nf / (2.0 * df)))
}

/// `(1/8)(2k C_A² / n²)^{n/(2d)}`, the real number `M` is the floor of.
pub fn m_target(n: usize, d: usize, c_a: f64, k: u64) -> f64 {
    let (nf, df, kf) = (n as f64, d as f64, k as f64);
    (2.0 * kf * c_a * c_a / (nf * nf)).powf(nf / (2.0 * df)) / 8.0
}

/// The integer `M` with `M ≤ (1/8)(2k C_A²/n²)^{n/(2d)} < M + 1`.
pub fn choose_m(n: usize, d: usize, c_a: f64, k: u64) -> Result<u64> {
    check_shape(n, d, k)?;
    check_ca(c_a)?;
    let target = m_target(n, d, c_a, k);
    if target < 1.0 {
        return Err(Error::Infeasible(format!(
            "M target {target:.6} < 1: k = {k} is too small for C_A = {c_a}"
        )));
    }
    Ok(target.floor() as u64)
}

/// `S = Σ_{0<‖h‖_∞≤M} exp(-(4k/n) {2Ah}²) / R(h)` with the Euclidean
/// nearest-integer distance, summed directly. Returns `(S, S ≤ 0.5/(M+1))`.
pub fn cohort_sum_s(g: &GeneratorMatrix, k: u64, m: u64) -> Result<(f64, bool)> {
    if m == 0 {
        return Err(Error::invalid("M must be ≥ 1"));
    }
    let fbox = FrequencyBox::new(g.d(), m, "cohort sum frequency box (2M+1)^d")?;
    let rate = 4.0 * k as f64 / g.n() as f64;
    let mut total = CompensatedSum::new();
    for part in fbox.fold_chunks(CompensatedSum::new, |acc, h| {
        acc.add((-rate * euclid_distance_sq(g, h, 2)).exp() / weight_r(h) as f64)
    }) {
        total.merge(&part);
    }
    let s = total.value();
    Ok((s, s <= 0.5 / (m as f64 + 1.0)))
}

/// Least-squares slope of `log D` against `log k`.
pub fn fit_decay_exponent(series: &[(f64, f64)]) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::invalid(format!("need at least 3 points, got {}", series.len())));
    }
    for w in series.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::invalid("k values must be strictly increasing"));
        }
    }
    if let Some(&(k, v)) = series
        .iter()
        .find(|(k, v)| !(*k > 0.0 && *v > 0.0 && k.is_finite() && v.is_finite()))
    {
        return Err(Error::invalid(format!("k and D must be positive, got ({k}, {v})")));
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|&(k, v)| (k.ln(), v.ln())).collect();
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub value: f64,
    pub c_a: f64,
    /// `C_A` was checked against every `‖h‖_∞` up to this radius.
    pub certified_up_to: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub d: usize,
    pub k: u64,
    pub lower: f64,
    pub upper: Option<UpperBound>,
    #[serde(rename = "M")]
    pub m: Option<u64>,
    pub s_value: Option<f64>,
    pub lemma_ok: Option<bool>,
}

impl BoundReport {
    /// Evaluates both theorems for `g` after `k` steps. With a certified
    /// constant, `M` must be feasible and the cohort sum is evaluated at it.
    pub fn evaluate(g: &GeneratorMatrix, k: u64, c_a: Option<&CertifiedConstant>) -> Result<Self> {
        let (n, d) = (g.n(), g.d());
        let lower = theorem1_lower_bound(n, d, k)?;
        let mut report = BoundReport {
            n,
            d,
            k,
            lower,
            upper: None,
            m: None,
            s_value: None,
            lemma_ok: None,
        };
        if let Some(c) = c_a {
            report.upper = Some(UpperBound {
                value: theorem2_upper_bound(n, d, c.value, k)?,
                c_a: c.value,
                certified_up_to: c.certified_up_to,
            });
            let m = choose_m(n, d, c.value, k)?;
            let (s, ok) = cohort_sum_s(g, k, m)?;
            report.m = Some(m);
            report.s_value = Some(s);
            report.lemma_ok = Some(ok);
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{builtin_generators, load_generators, Family};

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn theorem1_values() {
        assert!(close(theorem1_lower_bound(1, 1, 1).unwrap(), 1.0 / (25.0 * PI), 1e-15));
        assert!(close(theorem1_lower_bound(1, 1, 1).unwrap(), 0.01273240, 1e-6));
        assert!(close(theorem1_lower_bound(1, 1, 100).unwrap(), 0.001273240, 1e-6));
        assert!(close(theorem1_lower_bound(2, 2, 10).unwrap(), 4.0528e-5, 1e-4));
        assert!(theorem1_lower_bound(1, 1, 0).is_err());
        assert!(theorem1_lower_bound(0, 1, 1).is_err());
    }

    #[test]
    fn theorem2_values() {
        assert!(close(theorem2_upper_bound(1, 1, 0.44, 10_000).unwrap(), 0.482119, 1e-5));
        assert!(close(theorem2_upper_bound(1, 1, 0.44, 1).unwrap(), 48.2119, 1e-5));
        // 45 · (1/(0.3√2))^{1/2} · (10^6)^{-1/4}
        let expected = 45.0 * (1.0 / (0.3 * SQRT_2)).sqrt() * 10f64.powf(-1.5);
        assert!(close(
            theorem2_upper_bound(1, 2, 0.3, 1_000_000).unwrap(),
            expected,
            1e-14
        ));
        assert!(close(expected, 2.184713, 1e-6));
        assert!(theorem2_upper_bound(1, 1, 0.0, 10).is_err());
        assert!(theorem2_upper_bound(1, 1, -0.2, 10).is_err());
    }

    #[test]
    fn choose_m_values() {
        assert_eq!(choose_m(1, 1, 0.44, 10_000).unwrap(), 7);
        assert!(matches!(choose_m(1, 1, 0.44, 10), Err(Error::Infeasible(_))));
        assert_eq!(choose_m(1, 2, 0.3, 100_000_000).unwrap(), 8);
        assert!(choose_m(1, 1, 0.0, 10_000).is_err());
    }

    #[test]
    fn cohort_sum_examples() {
        let quarter = load_generators(&[[0.25]]).unwrap();
        let (s, ok) = cohort_sum_s(&quarter, 20, 1).unwrap();
        assert!(close(s, 2.0 * (-20.0f64).exp(), 1e-12));
        assert!(ok);

        let half = load_generators(&[[0.5]]).unwrap();
        let (s, ok) = cohort_sum_s(&half, 100, 1).unwrap();
        assert_eq!(s, 2.0);
        assert!(!ok);

        let golden = builtin_generators(Family::Golden, 1, 1, None).unwrap();
        let m = choose_m(1, 1, 0.437, 10_000).unwrap();
        assert_eq!(m, 7);
        assert!(cohort_sum_s(&golden, 10_000, m).unwrap().1);
    }

    #[test]
    fn cos_envelope_spot_check() {
        // |cos(2πx)| ≤ 1 - 4{2x}², used to bound |Q̂| inside the cohort sum.
        for i in 0..=20_000 {
            let x = -2.0 + i as f64 * 4.0 / 20_000.0;
            let t = 2.0 * x - (2.0 * x).round();
            assert!((2.0 * PI * x).cos().abs() <= 1.0 - 4.0 * t * t + 1e-12, "x = {x}");
        }
    }

    #[test]
    fn fit_examples() {
        let s = fit_decay_exponent(&[(1.0, 1.0), (4.0, 0.5), (16.0, 0.25)]).unwrap();
        assert!((s + 0.5).abs() < 1e-12);
        let s = fit_decay_exponent(&[(1.0, 0.3), (10.0, 0.3), (100.0, 0.3)]).unwrap();
        assert!(s.abs() < 1e-12);
        assert!(fit_decay_exponent(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(fit_decay_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 0.2)]).is_err());
        assert!(fit_decay_exponent(&[(2.0, 1.0), (1.0, 0.5), (3.0, 0.2)]).is_err());
    }

    #[test]
    fn report_round_trips_through_json() {
        let g = builtin_generators(Family::Golden, 1, 1, None).unwrap();
        let est = crate::diophantine::estimate_bad_constant(&g, 1000).unwrap();
        let c = est.certify(0.38).unwrap();
        let report = BoundReport::evaluate(&g, 10_000, Some(&c)).unwrap();
        assert_eq!(report.m, Some(6));
        assert_eq!(report.lemma_ok, Some(true));
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"M\":6"));
        let back: BoundReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(matches!(
            BoundReport::evaluate(&g, 10, Some(&c)),
            Err(Error::Infeasible(_))
        ));
    }
}
