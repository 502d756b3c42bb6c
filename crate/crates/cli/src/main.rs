use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ginibre_holes::balayage::{solve_with, BalayageOptions, DEFAULT_COLLOCATION, DEFAULT_MODES, DEFAULT_MOMENTS};
use ginibre_holes::closed_forms::{balayage_closed, catalog, r_prime_closed, r_u_closed};
use ginibre_holes::extrapolate::{fit, Term};
use ginibre_holes::fekete::{optimize, DEFAULT_MAX_ITERS, DEFAULT_RESTARTS};
use ginibre_holes::holeprob::{hole_probability, limit_estimate};
use ginibre_holes::io::{format_f64, parse_region, RegionSpec};
use ginibre_holes::kostlan::{log_hole_radial, slope_study, RadialHoleSpec};
use ginibre_holes::{Error, QuadratureRule, Region};

const EXIT_INVALID: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_CROSSCHECK: u8 = 3;

// crosscheck tolerances
const TOL_SMOOTH: f64 = 1e-6;
const TOL_CORNER: f64 = 1e-4;
const TOL_FEKETE: f64 = 0.02;
const TOL_DET: f64 = 0.10;
const TOL_KOSTLAN: f64 = 0.03;

#[derive(Parser)]
#[command(name = "ginibre-hole", version, about = "Ginibre hole probabilities and the rate constant R_U")]
struct Cli {
    /// Worker threads (default: HOLEPROB_THREADS, else all cores).
    #[arg(long, global = true, env = "HOLEPROB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form catalog as CSV.
    Table(OutArg),
    /// R_U of a region (closed form when known, balayage otherwise).
    Ru(RuArgs),
    /// Solve for the boundary part of the equilibrium measure.
    Balayage(BalayageArgs),
    /// Weighted Fekete points and the Fekete estimate of R_U.
    Fekete(FeketeArgs),
    /// log P[no eigenvalue of the n×n Ginibre matrix in rU].
    Holeprob(HoleprobArgs),
    /// Extrapolate (1/n²) log P[X_n(√n U) = 0] over an order sweep.
    HoleprobLimit(LimitArgs),
    /// Radial product study of (1/r⁴) log P for {cr < |z| < r}.
    Kostlan(KostlanArgs),
    /// Compare every applicable route against the catalog.
    Crosscheck(CrosscheckArgs),
}

#[derive(Args)]
struct OutArg {
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = DEFAULT_MODES)]
    modes: usize,
    #[arg(long, default_value_t = DEFAULT_MOMENTS)]
    moments: usize,
    #[arg(long, default_value_t = DEFAULT_COLLOCATION)]
    collocation: usize,
}

impl SolverArgs {
    fn options(&self) -> BalayageOptions {
        BalayageOptions { modes: self.modes, moments: self.moments, collocation: self.collocation, ..Default::default() }
    }
}

#[derive(Args)]
struct RuArgs {
    #[arg(long)]
    region: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BalayageArgs {
    #[arg(long)]
    region: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FeketeArgs {
    #[arg(long)]
    region: PathBuf,
    /// Point count; a comma list runs a sweep and extrapolates.
    #[arg(long, value_delimiter = ',', default_value = "200")]
    n: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// Points of the largest n as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report JSON (stdout when absent).
    #[arg(long)]
    report: Option<PathBuf>,
    /// CSV with columns n, r_estimate.
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

#[derive(Args)]
struct HoleprobArgs {
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    r: f64,
    /// Matrix order, or `auto` for ⌈2r²⌉ + 40.
    #[arg(long, default_value = "auto")]
    n: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long)]
    region: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "40,80,160")]
    n: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV with columns n, inv_n2_logP.
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

#[derive(Args)]
struct KostlanArgs {
    #[arg(long)]
    c: f64,
    #[arg(long, value_delimiter = ',', default_value = "8,12,16,20")]
    r: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV with columns r, inv_r4_logP.
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long)]
    region: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
    fekete_n: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "40,80,160")]
    det_n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "8,12,16,20")]
    kostlan_r: Vec<f64>,
    /// Report file; each run appends one JSON line.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Core(Error),
    Usage(String),
    Io(String),
    Numerical(String),
    Crosscheck(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Run = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            return report_failure(Failure::Usage("--threads must be positive".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return report_failure(Failure::Usage(format!("thread pool: {e}")));
        }
    }
    let res = match cli.cmd {
        Cmd::Table(a) => table(a),
        Cmd::Ru(a) => ru(a),
        Cmd::Balayage(a) => balayage(a),
        Cmd::Fekete(a) => fekete(a),
        Cmd::Holeprob(a) => holeprob(a),
        Cmd::HoleprobLimit(a) => holeprob_limit(a),
        Cmd::Kostlan(a) => kostlan(a),
        Cmd::Crosscheck(a) => crosscheck(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(f),
    }
}

fn report_failure(f: Failure) -> ExitCode {
    let (code, kind, message) = match f {
        Failure::Core(e) => {
            let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INVALID };
            (code, if e.is_numerical() { "numerical" } else { "validation" }, e.to_string())
        }
        Failure::Usage(m) => (EXIT_INVALID, "validation", m),
        Failure::Io(m) => (EXIT_INVALID, "io", m),
        Failure::Numerical(m) => (EXIT_NUMERICAL, "numerical", m),
        Failure::Crosscheck(v) => {
            eprintln!("{}", json!({"error": "crosscheck", "report": v}));
            return ExitCode::from(EXIT_CROSSCHECK);
        }
    };
    eprintln!("{}", json!({"error": kind, "message": message}));
    ExitCode::from(code)
}

fn load_region(path: &Path) -> Result<(Region<f64>, Value), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let region = parse_region::<f64>(&text)?;
    let spec: RegionSpec = serde_json::from_str(&text).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok((region, serde_json::to_value(spec).expect("spec serializes")))
}

fn emit(out: Option<&Path>, text: &str) -> Run {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, v: &Value) -> Run {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    emit(out, &s)
}

fn to_value<S: serde::Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("report serializes")
}

/// CSV with a header row; floats at 17 significant digits.
fn emit_plot_data(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Run {
    if rows.is_empty() {
        return Err(Failure::Usage("no plot data to write".into()));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| Failure::Io(e.to_string()))?;
    w.write_record(header).map_err(|e| Failure::Io(e.to_string()))?;
    for row in rows {
        w.write_record(row.iter().map(|&x| format_f64(x))).map_err(|e| Failure::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Failure::Io(e.to_string()))
}

fn is_corner_shape(region: &Region<f64>) -> bool {
    matches!(region, Region::Polygon { .. } | Region::HalfDisk { .. })
}

fn validate_unit_disk(region: &Region<f64>) -> Run {
    if region.fits_in_unit_disk() {
        Ok(())
    } else {
        Err(Failure::Usage("region must lie in the closed unit disk".into()))
    }
}

fn table(a: OutArg) -> Run {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(["shape", "parameters", "r_prime_formula", "density_formula", "r_prime", "r_u", "note"]).map_err(io)?;
    for (_, e) in catalog() {
        w.write_record([
            e.shape.to_string(),
            e.parameters.clone(),
            e.r_prime_formula.to_string(),
            e.density_formula.unwrap_or("").to_string(),
            format_f64(e.r_prime),
            format_f64(e.r_u),
            e.note.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    emit(a.out.as_deref(), &String::from_utf8(bytes).expect("utf8"))
}

fn ru(a: RuArgs) -> Run {
    let (region, spec) = load_region(&a.region)?;
    validate_unit_disk(&region)?;
    let v = match r_u_closed(&region) {
        Ok(r_u) => json!({"region": spec, "route": "closed_form", "r_u": r_u, "r_prime": r_u - 0.75}),
        Err(Error::NotCatalog(_)) => {
            let sol = solve_with(&region, &a.solver.options())?;
            if !sol.converged {
                return Err(Failure::Numerical(format!("balayage moment residual {:e}", sol.moment_residual)));
            }
            json!({
                "region": spec,
                "route": "balayage",
                "r_u": sol.r_u,
                "r_prime": sol.r_u - 0.75,
                "moment_residual": sol.moment_residual,
            })
        }
        Err(e) => return Err(e.into()),
    };
    emit_json(a.out.as_deref(), &v)
}

fn balayage(a: BalayageArgs) -> Run {
    let (region, spec) = load_region(&a.region)?;
    let sol = solve_with(&region, &a.solver.options())?;
    let v = json!({"region": spec, "options": to_value(&a.solver.options()), "solution": to_value(&sol)});
    emit_json(a.out.as_deref(), &v)?;
    if sol.converged {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("balayage moment residual {:e}", sol.moment_residual)))
    }
}

fn fekete_sweep(region: &Region<f64>, ns: &[usize], seed: u64, restarts: usize, max_iters: usize) -> Result<(Vec<ginibre_holes::FeketeReport64>, Option<f64>), Failure> {
    if ns.is_empty() {
        return Err(Failure::Usage("--n needs at least one value".into()));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::Usage("--n values must be strictly increasing".into()));
    }
    let reports = ns.iter().map(|&n| optimize(region, n, seed, restarts, max_iters)).collect::<Result<Vec<_>, _>>()?;
    let limit = if ns.len() >= 3 {
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let ys: Vec<f64> = reports.iter().map(|r| r.r_estimate).collect();
        Some(fit(&xs, &ys, None, &[Term::LogOverX, Term::Inverse])?.limit)
    } else {
        None
    };
    Ok((reports, limit))
}

fn fekete(a: FeketeArgs) -> Run {
    let (region, spec) = load_region(&a.region)?;
    let (reports, limit) = fekete_sweep(&region, &a.n, a.seed, a.restarts, a.max_iters)?;
    let last = reports.last().expect("non-empty sweep");
    if let Some(p) = &a.out {
        let rows: Vec<Vec<f64>> = last.best.points.iter().map(|z| vec![z.re, z.im]).collect();
        emit_plot_data(p, &["x", "y"], &rows)?;
    }
    if let Some(p) = &a.plot_data {
        let rows: Vec<Vec<f64>> = a.n.iter().zip(&reports).map(|(&n, r)| vec![n as f64, r.r_estimate]).collect();
        emit_plot_data(p, &["n", "r_estimate"], &rows)?;
    }
    let runs: Vec<Value> = a
        .n
        .iter()
        .zip(&reports)
        .map(|(&n, r)| {
            json!({
                "n": n,
                "weighted_log_product": r.best.value,
                "delta_n": r.delta_n,
                "r_estimate": r.r_estimate,
                "min_separation": r.min_separation,
                "feasible": r.best.feasible,
                "restarts": r.restarts,
                "iterations": r.iterations,
                "best_so_far": r.best_so_far,
            })
        })
        .collect();
    let v = json!({
        "region": spec,
        "seed": a.seed,
        "runs": runs,
        "extrapolated_r_u": limit,
        "closed_form_r_u": r_u_closed(&region).ok(),
    });
    emit_json(a.report.as_deref(), &v)
}

fn holeprob(a: HoleprobArgs) -> Run {
    let (region, spec) = load_region(&a.region)?;
    let n = match a.n.as_str() {
        "auto" => None,
        s => Some(s.parse::<usize>().map_err(|_| Failure::Usage(format!("--n must be `auto` or an integer, got {s}")))?),
    };
    let res = hole_probability(&region, a.r, n, &QuadratureRule::default())?;
    emit_json(a.out.as_deref(), &json!({"region": spec, "result": to_value(&res)}))
}

fn holeprob_limit(a: LimitArgs) -> Run {
    let (region, spec) = load_region(&a.region)?;
    let est = limit_estimate(&region, &a.n, &QuadratureRule::default())?;
    if let Some(p) = &a.plot_data {
        let rows: Vec<Vec<f64>> = est.sequence.iter().map(|&(n, y)| vec![n as f64, y]).collect();
        emit_plot_data(p, &["n", "inv_n2_logP"], &rows)?;
    }
    emit_json(a.out.as_deref(), &json!({"region": spec, "estimate": to_value(&est), "r_u_estimate": 0.75 - est.extrapolated}))
}

fn kostlan(a: KostlanArgs) -> Run {
    let rep = slope_study(a.c, &a.r)?;
    if let Some(p) = &a.plot_data {
        let rows: Vec<Vec<f64>> = rep.values.iter().map(|&(r, y)| vec![r, y]).collect();
        emit_plot_data(p, &["r", "inv_r4_logP"], &rows)?;
    }
    emit_json(a.out.as_deref(), &to_value(&rep))
}

/// `−R′_U` from `(1/r⁴) log P[X_∞(rU) = 0]` for a rotation-invariant `U`.
fn kostlan_slope(region: &Region<f64>, radii: &[f64]) -> Result<Option<f64>, Failure> {
    let Some(dec) = region.radial_decomposition() else { return Ok(None) };
    if radii.len() < 3 {
        return Err(Failure::Usage("--kostlan-r needs at least 3 radii".into()));
    }
    let mut ys = Vec::new();
    for &r in radii {
        ys.push(log_hole_radial(&RadialHoleSpec::new(dec.bands.clone(), r)?)?.log_probability / r.powi(4));
    }
    let w: Vec<f64> = radii.iter().map(|r| r.powi(4)).collect();
    Ok(Some(fit(radii, &ys, Some(&w), &[Term::LogOverXSquare, Term::InverseSquare])?.limit))
}

fn crosscheck(a: CrosscheckArgs) -> Run {
    let (region, spec) = load_region(&a.region)?;
    validate_unit_disk(&region)?;
    let closed = match r_u_closed(&region) {
        Ok(v) => Some(v),
        Err(Error::NotCatalog(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let mut routes = serde_json::Map::new();
    let mut checks = Vec::new();
    let mut check = |route: &str, value: f64, reference: f64, gap: f64, tol: f64, measure: &str| {
        checks.push(json!({
            "route": route, "value": value, "reference": reference,
            "gap": gap, "measure": measure, "tolerance": tol, "pass": gap <= tol,
        }));
    };
    if let Some(c) = closed {
        routes.insert("closed_form".into(), json!(c));
    }
    let balayage_ru = if region.is_empty() {
        None
    } else {
        let sol = solve_with(&region, &BalayageOptions::default())?;
        routes.insert("balayage".into(), json!(sol.r_u));
        Some(sol.r_u)
    };
    // the best available reference for R_U
    let reference = closed.or(balayage_ru).unwrap_or(0.75);
    let r_prime_ref = reference - 0.75;
    if let (Some(c), Some(b)) = (closed, balayage_ru) {
        let tol = if is_corner_shape(&region) { TOL_CORNER } else { TOL_SMOOTH };
        check("balayage", b, c, (b - c).abs(), tol, "absolute");
    }
    let (_, fek) = fekete_sweep(&region, &a.fekete_n, a.seed, a.restarts, DEFAULT_MAX_ITERS)?;
    if let Some(f) = fek {
        routes.insert("fekete".into(), json!(f));
        check("fekete", f, reference, ((f - reference) / reference).abs(), TOL_FEKETE, "relative R_U");
    }
    let det = limit_estimate(&region, &a.det_n, &QuadratureRule::default())?;
    let det_ru = 0.75 - det.extrapolated;
    routes.insert("det_extrapolation".into(), json!(det_ru));
    let rel = |v: f64| if r_prime_ref == 0.0 { (v - 0.75).abs() } else { ((v - reference) / r_prime_ref).abs() };
    check("det_extrapolation", det_ru, reference, rel(det_ru), TOL_DET, "relative R′");
    if let Some(slope) = kostlan_slope(&region, &a.kostlan_r)? {
        let k_ru = 0.75 - slope;
        routes.insert("kostlan".into(), json!(k_ru));
        check("kostlan", k_ru, reference, rel(k_ru), TOL_KOSTLAN, "relative R′");
    }
    let below: Vec<&String> = routes.iter().filter(|(_, v)| v.as_f64().is_some_and(|x| x < 0.75 - 1e-9)).map(|(k, _)| k).collect();
    let pass = below.is_empty() && checks.iter().all(|c| c["pass"] == json!(true));
    let r_prime_closed_v = r_prime_closed(&region).ok();
    let report = json!({
        "region": spec,
        "routes": Value::Object(routes.clone()),
        "r_prime_closed": r_prime_closed_v,
        "has_closed_density": balayage_closed(&region).is_ok(),
        "checks": checks,
        "routes_below_three_quarters": below,
        "pass": pass,
    });
    match &a.out {
        Some(p) => {
            let mut f = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            writeln!(f, "{}", serde_json::to_string(&report).expect("json")).map_err(|e| Failure::Io(e.to_string()))?;
        }
        None => emit_json(None, &report)?,
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Crosscheck(report))
    }
}
