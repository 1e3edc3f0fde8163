//! The full pipeline: walk, discrepancy and bounds for every `k` in a schedule.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use toruswalk::numeric::sci17;
use toruswalk::{
    choose_m, discrepancy_exact, discrepancy_grid_detailed, estimate_bad_constant, etk_upper_bound,
    exact_walk_distribution, fit_decay_exponent, project_to_torus, simulate_walk, theorem1_lower_bound,
    theorem2_upper_bound, AxisBox, CertifiedConstant, Direction, DiscrepancyResult, Error, Exactness, GeneratorMatrix,
    WeightedPointSet,
};

use crate::config::{Policy, ScanConfig};
use crate::error::{CliError, CliResult};
use crate::svg;

/// Absolute slack for bound checks on exact rows.
const CHECK_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Exact,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub k: u32,
    /// How the distribution of the walk was obtained.
    pub method: Method,
    /// How its discrepancy was obtained.
    pub estimator: Estimator,
    pub resolution: Option<u32>,
    pub atoms: usize,
    #[serde(rename = "D")]
    pub d_value: f64,
    pub direction: Direction,
    pub witness: AxisBox,
    pub theorem1_lower: f64,
    pub theorem2_upper: Option<f64>,
    #[serde(rename = "etk_M")]
    pub etk_m: Option<u64>,
    pub etk_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixInfo {
    pub source: String,
    pub n: usize,
    pub d: usize,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub tool: String,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
    pub seed: u64,
    pub matrix: MatrixInfo,
    pub method: Policy,
    pub trials: u64,
    pub resolution: u32,
    pub certification: Option<CertifiedConstant>,
    pub rows: Vec<ScanRow>,
    /// Least-squares slope of `log D` against `log k`.
    pub fitted_exponent: Option<f64>,
}

/// Unix time from `SOURCE_DATE_EPOCH` when set, otherwise the wall clock.
fn timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .and_then(|s| chrono::DateTime::from_timestamp(s, 0));
    fixed
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn is_cap(e: &Error) -> bool {
    matches!(e, Error::CapExceeded { .. })
}

fn distribution(g: &GeneratorMatrix, k: u32, cfg: &ScanConfig) -> CliResult<(Method, WeightedPointSet)> {
    let exact = || -> Result<WeightedPointSet, Error> { project_to_torus(&exact_walk_distribution(g, k)?, g) };
    match cfg.method {
        Policy::Mc => Ok((Method::Mc, simulate_walk(g, k, cfg.trials, cfg.seed)?)),
        Policy::Exact | Policy::Grid => Ok((Method::Exact, exact()?)),
        Policy::Auto => match exact() {
            Ok(p) => Ok((Method::Exact, p)),
            Err(e) if is_cap(&e) => Ok((Method::Mc, simulate_walk(g, k, cfg.trials, cfg.seed)?)),
            Err(e) => Err(e.into()),
        },
    }
}

fn discrepancy(p: &WeightedPointSet, cfg: &ScanConfig) -> CliResult<DiscrepancyResult> {
    match cfg.method {
        Policy::Exact => Ok(discrepancy_exact(p)?),
        Policy::Grid => Ok(discrepancy_grid_detailed(p, cfg.resolution)?),
        Policy::Auto | Policy::Mc => match discrepancy_exact(p) {
            Ok(r) => Ok(r),
            Err(e) if is_cap(&e) => Ok(discrepancy_grid_detailed(p, cfg.resolution)?),
            Err(e) => Err(e.into()),
        },
    }
}

/// Checks `lower ≤ D ≤ min(1, upper)` as far as the row's provenance allows.
///
/// Exact rows are checked strictly. A grid value never exceeds the true
/// discrepancy, so only its upper side is strict; the lower side gets the
/// estimator's `d·2/res` slack. Simulated rows estimate a different measure
/// and are not checked.
fn check_row(row: &ScanRow, d: usize) -> CliResult<()> {
    if row.method == Method::Mc {
        return Ok(());
    }
    let slack = match row.estimator {
        Estimator::Exact => CHECK_EPS,
        Estimator::Grid => d as f64 * 2.0 / row.resolution.unwrap_or(1) as f64 + CHECK_EPS,
    };
    let fail = |what: String| Err(CliError::Violation(format!("k = {}: {what}", row.k)));
    if row.d_value + slack < row.theorem1_lower {
        return fail(format!(
            "D = {} below the lower bound {}",
            row.d_value, row.theorem1_lower
        ));
    }
    if row.d_value > 1.0 + CHECK_EPS {
        return fail(format!("D = {} exceeds 1", row.d_value));
    }
    if let Some(u) = row.theorem2_upper {
        if row.d_value > u + CHECK_EPS {
            return fail(format!("D = {} above the upper bound {u}", row.d_value));
        }
    }
    if let Some(u) = row.etk_bound {
        if row.d_value > u + CHECK_EPS {
            return fail(format!("D = {} above the ETK bound {u}", row.d_value));
        }
    }
    Ok(())
}

fn scan_row(g: &GeneratorMatrix, k: u32, cfg: &ScanConfig, cert: Option<&CertifiedConstant>) -> CliResult<ScanRow> {
    let (n, d) = (g.n(), g.d());
    let (method, p) = distribution(g, k, cfg)?;
    let disc = discrepancy(&p, cfg)?;
    let (estimator, resolution) = match disc.exactness {
        Exactness::Exact => (Estimator::Exact, None),
        Exactness::Grid(r) => (Estimator::Grid, Some(r)),
    };
    let mut row = ScanRow {
        k,
        method,
        estimator,
        resolution,
        atoms: p.len(),
        d_value: disc.value,
        direction: disc.direction,
        witness: disc.witness,
        theorem1_lower: theorem1_lower_bound(n, d, k as u64)?,
        theorem2_upper: None,
        etk_m: None,
        etk_bound: None,
    };
    if let Some(c) = cert {
        row.theorem2_upper = Some(theorem2_upper_bound(n, d, c.value, k as u64)?);
        // Small k has no admissible M; the row then carries no ETK value.
        match choose_m(n, d, c.value, k as u64) {
            Ok(m) => {
                row.etk_m = Some(m);
                row.etk_bound = Some(etk_upper_bound(g, k, m)?);
            }
            Err(Error::Infeasible(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    check_row(&row, d)?;
    Ok(row)
}

/// Runs the scan. Output is a function of the configuration alone apart from
/// the two timestamp fields.
pub fn run_scan(cfg: &ScanConfig) -> CliResult<ScanReport> {
    let started_at = timestamp();
    let g = cfg.source.load(cfg.seed)?;
    let certification = match cfg.ca {
        Some(c) => Some(estimate_bad_constant(&g, cfg.hmax)?.certify(c)?),
        None => None,
    };
    let rows = cfg
        .k_schedule
        .iter()
        .map(|&k| scan_row(&g, k, cfg, certification.as_ref()))
        .collect::<CliResult<Vec<_>>>()?;
    let series: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.d_value > 0.0)
        .map(|r| (r.k as f64, r.d_value))
        .collect();
    let fitted_exponent = if series.len() >= 3 {
        Some(fit_decay_exponent(&series)?)
    } else {
        None
    };
    Ok(ScanReport {
        tool: "toruswalk".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        started_at,
        finished_at: timestamp(),
        seed: cfg.seed,
        matrix: MatrixInfo {
            source: cfg.source.to_string(),
            n: g.n(),
            d: g.d(),
            rows: g.rows().map(<[f64]>::to_vec).collect(),
        },
        method: cfg.method,
        trials: cfg.trials,
        resolution: cfg.resolution,
        certification,
        rows,
        fitted_exponent,
    })
}

fn opt<T>(x: Option<T>, f: impl Fn(T) -> String) -> String {
    x.map(f).unwrap_or_default()
}

impl ScanReport {
    pub const CSV_HEADER: &'static str =
        "k,method,estimator,resolution,atoms,D,theorem1_lower,theorem2_upper,etk_M,etk_bound";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let method = match r.method {
                Method::Exact => "exact",
                Method::Mc => "mc",
            };
            let estimator = match r.estimator {
                Estimator::Exact => "exact",
                Estimator::Grid => "grid",
            };
            let _ = writeln!(
                out,
                "{},{method},{estimator},{},{},{},{},{},{},{}",
                r.k,
                opt(r.resolution, |x| x.to_string()),
                r.atoms,
                sci17(r.d_value),
                sci17(r.theorem1_lower),
                opt(r.theorem2_upper, sci17),
                opt(r.etk_m, |x| x.to_string()),
                opt(r.etk_bound, sci17),
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serialisable");
        s.push('\n');
        s
    }

    /// Writes `scan.json`, `scan.csv` and optionally `scan.svg` into `dir`.
    pub fn write(&self, dir: &Path, with_svg: bool) -> CliResult<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut files = vec![
            (dir.join("scan.json"), self.to_json()),
            (dir.join("scan.csv"), self.to_csv()),
        ];
        if with_svg {
            files.push((dir.join("scan.svg"), svg::render(self)));
        }
        for (path, body) in &files {
            std::fs::write(path, body).map_err(|e| CliError::io(path, e))?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}
