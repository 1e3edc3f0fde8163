use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use toruswalk::{
    dirichlet_search, discrepancy_exact, discrepancy_grid_detailed, estimate_bad_constant, etk_upper_bound,
    exact_walk_distribution, project_to_torus, simulate_walk, BoundReport, DiscrepancyResult, GeneratorMatrix,
    WeightedPointSet,
};
use toruswalk_cli::{run_scan, CliError, CliResult, RawConfig, Source};

#[derive(Parser)]
#[command(
    name = "toruswalk",
    version,
    about = "Random walks on the torus: distributions, discrepancy and bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the k-step distribution, exact or simulated with --trials.
    Dist {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        trials: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Discrepancy of a point-set CSV file.
    Disc {
        file: PathBuf,
        /// Use the grid estimator at this resolution instead of the exact sweep.
        #[arg(long)]
        resolution: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the lower, upper and ETK bounds at one k.
    Bounds {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        ca: Option<f64>,
        #[arg(long, default_value_t = toruswalk_cli::config::DEFAULT_HMAX)]
        hmax: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dirichlet search for h with {Ah}_∞ < 1/q.
    Dirichlet {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Estimate the bad-approximability constant up to --hmax, optionally certifying --ca.
    Badapprox {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long, default_value_t = toruswalk_cli::config::DEFAULT_HMAX)]
        hmax: u64,
        #[arg(long)]
        ca: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full pipeline over a k schedule and write scan.json and scan.csv.
    Scan(ScanArgs),
}

#[derive(Args)]
struct MatrixArgs {
    /// Matrix text file, one row per line.
    #[arg(long, conflicts_with = "builtin")]
    matrix: Option<PathBuf>,
    /// Builtin family, e.g. golden, sqrt_primes:2x2, rational:3, random:n=2,d=2.
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl MatrixArgs {
    fn load(&self) -> CliResult<GeneratorMatrix> {
        Source::from_flags(self.matrix.as_deref(), self.builtin.as_deref())?
            .ok_or_else(|| CliError::config("one of --matrix or --builtin is required"))?
            .load(self.seed)
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write into this directory instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "builtin")]
    matrix: Option<PathBuf>,
    #[arg(long)]
    builtin: Option<String>,
    /// Single k, shorthand for a one-item schedule.
    #[arg(long, conflicts_with = "k_schedule")]
    k: Option<u32>,
    /// Items `N`, `A..B` or `2^A..2^B`, comma separated.
    #[arg(long)]
    k_schedule: Option<String>,
    /// auto, exact, grid or mc.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    resolution: Option<u32>,
    #[arg(long)]
    hmax: Option<u64>,
    #[arg(long)]
    ca: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: bool,
    /// Also print the report in this format.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn emit(output: &OutputArgs, name: &str, json: impl Serialize, csv: impl FnOnce() -> String) -> CliResult<()> {
    let (body, ext) = match output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json).expect("serialisable");
            s.push('\n');
            (s, "json")
        }
        Format::Csv => (csv(), "csv"),
    };
    match &output.out {
        Some(dir) => write_file(dir, &format!("{name}.{ext}"), &body),
        None => print(&body),
    }
}

fn write_file(dir: &Path, file: &str, body: &str) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(file);
    std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn print(body: &str) -> CliResult<()> {
    std::io::stdout()
        .write_all(body.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

#[derive(Serialize)]
struct JsonAtom<'a> {
    point: &'a [f64],
    weight: f64,
}

fn dist(matrix: &MatrixArgs, k: u32, trials: Option<u64>, output: &OutputArgs) -> CliResult<()> {
    let g = matrix.load()?;
    let p = match trials {
        Some(t) => simulate_walk(&g, k, t, matrix.seed)?,
        None => project_to_torus(&exact_walk_distribution(&g, k)?, &g)?,
    };
    let atoms: Vec<JsonAtom> = p
        .atoms()
        .iter()
        .map(|a| JsonAtom {
            point: &a.point,
            weight: a.weight,
        })
        .collect();
    emit(output, "dist", &atoms, || p.to_csv())
}

fn disc_csv(r: &DiscrepancyResult) -> String {
    use toruswalk::numeric::sci17;
    let join = |v: &[f64]| v.iter().map(|&x| sci17(x)).collect::<Vec<_>>().join(" ");
    format!(
        "D,direction,lower,upper\n{},{},{},{}\n",
        sci17(r.value),
        serde_json::to_value(r.direction).unwrap().as_str().unwrap_or(""),
        join(r.witness.lower()),
        join(r.witness.upper())
    )
}

fn disc(file: &Path, resolution: Option<u32>, output: &OutputArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(file).map_err(|e| CliError::io(file, e))?;
    let p = WeightedPointSet::from_csv(&text)?;
    let r = match resolution {
        Some(res) => discrepancy_grid_detailed(&p, res)?,
        None => discrepancy_exact(&p)?,
    };
    emit(output, "disc", &r, || disc_csv(&r))
}

#[derive(Serialize)]
struct BoundsOutput {
    #[serde(flatten)]
    report: BoundReport,
    etk_bound: Option<f64>,
}

fn bounds(matrix: &MatrixArgs, k: u64, ca: Option<f64>, hmax: u64, output: &OutputArgs) -> CliResult<()> {
    let g = matrix.load()?;
    let cert = match ca {
        Some(c) => Some(estimate_bad_constant(&g, hmax)?.certify(c)?),
        None => None,
    };
    let report = BoundReport::evaluate(&g, k, cert.as_ref())?;
    let etk_bound = match (&cert, report.m) {
        (Some(_), Some(m)) => {
            let k32 = u32::try_from(k).map_err(|_| CliError::config("k too large for the ETK sum"))?;
            Some(etk_upper_bound(&g, k32, m)?)
        }
        _ => None,
    };
    let out = BoundsOutput { report, etk_bound };
    emit(output, "bounds", &out, || {
        use toruswalk::numeric::sci17;
        let r = &out.report;
        let o = |x: Option<f64>| x.map(sci17).unwrap_or_default();
        format!(
            "n,d,k,lower,upper,c_a,certified_up_to,M,s_value,lemma_ok,etk_bound\n{},{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.d,
            r.k,
            sci17(r.lower),
            o(r.upper.map(|u| u.value)),
            o(r.upper.map(|u| u.c_a)),
            r.upper.map(|u| u.certified_up_to.to_string()).unwrap_or_default(),
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            o(r.s_value),
            r.lemma_ok.map(|b| b.to_string()).unwrap_or_default(),
            o(out.etk_bound),
        )
    })
}

#[derive(Serialize)]
struct DirichletOutput {
    q: f64,
    h: Vec<i64>,
    sup_norm: u64,
    distance: f64,
}

fn dirichlet(matrix: &MatrixArgs, q: f64, output: &OutputArgs) -> CliResult<()> {
    let g = matrix.load()?;
    let h = dirichlet_search(&g, q)?;
    let out = DirichletOutput {
        q,
        sup_norm: h.sup_norm(),
        distance: toruswalk::diophantine::sup_distance(&g, h.as_slice()),
        h: h.0,
    };
    emit(output, "dirichlet", &out, || {
        let h: Vec<String> = out.h.iter().map(i64::to_string).collect();
        format!(
            "q,h,sup_norm,distance\n{},{},{},{}\n",
            out.q,
            h.join(" "),
            out.sup_norm,
            out.distance
        )
    })
}

fn badapprox(matrix: &MatrixArgs, hmax: u64, ca: Option<f64>, output: &OutputArgs) -> CliResult<()> {
    let g = matrix.load()?;
    let est = estimate_bad_constant(&g, hmax)?;
    if let Some(c) = ca {
        est.certify(c)?;
    }
    emit(output, "badapprox", &est, || {
        let h: Vec<String> = est.argmin_h.0.iter().map(i64::to_string).collect();
        format!("c_est,argmin_h,hmax\n{},{},{}\n", est.c_est, h.join(" "), est.hmax)
    })
}

fn scan(args: &ScanArgs) -> CliResult<()> {
    let file = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let flags = RawConfig {
        source: Source::from_flags(args.matrix.as_deref(), args.builtin.as_deref())?,
        k_schedule: args.k.map(|k| k.to_string()).or_else(|| args.k_schedule.clone()),
        method: args.method.clone(),
        trials: args.trials,
        seed: args.seed,
        resolution: args.resolution,
        ca: args.ca,
        hmax: args.hmax,
        out: args.out.clone(),
        svg: args.svg.then_some(true),
    };
    let cfg = file.overridden_by(flags).resolve()?;
    let report = run_scan(&cfg)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("scan-out"));
    for path in report.write(&dir, cfg.svg)? {
        eprintln!("wrote {}", path.display());
    }
    match args.format {
        Some(Format::Json) => print(&report.to_json()),
        Some(Format::Csv) => print(&report.to_csv()),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Dist {
            matrix,
            k,
            trials,
            output,
        } => dist(matrix, *k, *trials, output),
        Command::Disc {
            file,
            resolution,
            output,
        } => disc(file, *resolution, output),
        Command::Bounds {
            matrix,
            k,
            ca,
            hmax,
            output,
        } => bounds(matrix, *k, *ca, *hmax, output),
        Command::Dirichlet { matrix, q, output } => dirichlet(matrix, *q, output),
        Command::Badapprox {
            matrix,
            hmax,
            ca,
            output,
        } => badapprox(matrix, *hmax, *ca, output),
        Command::Scan(args) => scan(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
