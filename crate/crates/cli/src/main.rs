//! Command-line driver for the join/suspension solvers.
//!
//! Exit codes: 0 ok, 1 usage error, 2 solver did not converge, 3 shooting
//! branch not found, 4 existence condition not satisfied, 5 verification
//! failure.

mod plot;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use ymjoin::damping;
use ymjoin::eigenmaps::{bounded_catalog, CatalogRecord, Eigenmap, Family};
use ymjoin::exact::Scalar;
use ymjoin::functional::{JoinProblem, ProblemMode, SuspensionProblem};
use ymjoin::grid::Scheme;
use ymjoin::results::{self, ResultDoc};
use ymjoin::solvers::{
    minimize_join, minimize_join_beta0_constrained, shoot_join, solve_suspension,
    SeedProfile, SolveOptions, SolveReport,
};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_NO_CONVERGENCE: u8 = 2;
const EXIT_BRANCH_NOT_FOUND: u8 = 3;
const EXIT_UNSATISFIED: u8 = 4;
const EXIT_VERIFY_FAILED: u8 = 5;

#[derive(Parser)]
#[command(
    name = "ymjoin",
    about = "Equivariant Yang-Mills connections on sphere joins: reduced-energy solvers,\nexistence checks and curvature reconstruction",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in eigenmap catalog
    Catalog(CatalogArgs),
    /// Solve the join boundary value problem
    SolveJoin(SolveJoinArgs),
    /// Solve a suspension nodal branch
    SolveSuspension(SolveSuspensionArgs),
    /// Evaluate the analytic existence conditions
    Check(CheckArgs),
    /// Re-verify a stored result from its profile alone
    Verify(VerifyArgs),
    /// Render a stored result as a standalone SVG
    Plot(PlotArgs),
}

#[derive(Args)]
struct CatalogArgs {
    /// Filter by family name (identity | circle | standard | custom)
    #[arg(long)]
    family: Option<String>,
    /// Filter by domain dimension
    #[arg(long)]
    m: Option<u32>,
    /// Filter by degree parameter
    #[arg(long)]
    ell: Option<u32>,
    /// Emit JSON records instead of the table
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    UniformS,
    UniformT,
    Chebyshev,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::UniformS => Scheme::UniformS,
            SchemeArg::UniformT => Scheme::UniformT,
            SchemeArg::Chebyshev => Scheme::ChebyshevT,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Minimize,
    Shoot,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedArg {
    LeviCivita,
    Constant01,
    Constant10,
}

/// Numeric options shared by the solve commands. Every flag can also be
/// given in a `key=value` config file; explicit flags win.
#[derive(Args, Clone)]
struct NumericArgs {
    /// Grid nodes
    #[arg(long)]
    nodes: Option<usize>,
    /// Grid scheme
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Half-length of the log-tangent coordinate range
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    gradient_tolerance: Option<f64>,
    #[arg(long)]
    residual_tolerance: Option<f64>,
    /// Shooting parameter search range, "lo..hi"
    #[arg(long)]
    shooting_box: Option<String>,
    #[arg(long, value_enum)]
    seed_profile: Option<SeedArg>,
    /// Deterministic seed-perturbation amplitude
    #[arg(long)]
    seed_perturbation: Option<f64>,
    /// RNG seed for full determinism
    #[arg(long)]
    seed: Option<u64>,
    /// Optional key=value config file mirroring these flags
    #[arg(long)]
    config: Option<PathBuf>,
}

impl NumericArgs {
    fn build(&self, base: SolveOptions) -> Result<SolveOptions> {
        let cfg = match &self.config {
            Some(path) => parse_config(path)?,
            None => HashMap::new(),
        };
        let get = |key: &str| cfg.get(key).cloned();
        let mut opts = base;
        if let Some(n) = self.nodes.or(parse_opt(get("nodes"))?) {
            opts.grid.nodes = n;
        }
        if let Some(s) = self.s_max.or(parse_opt(get("s_max"))?) {
            opts.grid.s_max = s;
        }
        let scheme_cfg: Option<String> = get("scheme");
        if let Some(s) = self.scheme {
            opts.grid.scheme = s.into();
        } else if let Some(name) = scheme_cfg {
            opts.grid.scheme = match name.as_str() {
                "uniform-s" => Scheme::UniformS,
                "uniform-t" => Scheme::UniformT,
                "chebyshev" => Scheme::ChebyshevT,
                other => bail!("unknown scheme '{other}' in config"),
            };
        }
        if let Some(v) = self.max_iterations.or(parse_opt(get("max_iterations"))?) {
            opts.max_iterations = v;
        }
        if let Some(v) = self
            .gradient_tolerance
            .or(parse_opt(get("gradient_tolerance"))?)
        {
            opts.gradient_tolerance = v;
        }
        if let Some(v) = self
            .residual_tolerance
            .or(parse_opt(get("residual_tolerance"))?)
        {
            opts.residual_tolerance = v;
        }
        let box_cfg: Option<String> = get("shooting_box");
        if let Some(spec) = self.shooting_box.clone().or(box_cfg) {
            let (lo, hi) = spec
                .split_once("..")
                .ok_or_else(|| anyhow!("shooting box must be 'lo..hi'"))?;
            opts.shooting_box = (lo.trim().parse()?, hi.trim().parse()?);
        }
        if let Some(s) = self.seed_profile {
            opts.seed_profile = match s {
                SeedArg::LeviCivita => SeedProfile::LeviCivita,
                SeedArg::Constant01 => SeedProfile::Constant01,
                SeedArg::Constant10 => SeedProfile::Constant10,
            };
        }
        if let Some(v) = self
            .seed_perturbation
            .or(parse_opt(get("seed_perturbation"))?)
        {
            opts.seed_perturbation = v;
        }
        if let Some(v) = self.seed.or(parse_opt(get("seed"))?) {
            opts.rng_seed = v;
        }
        Ok(opts)
    }
}

fn parse_opt<T: std::str::FromStr>(v: Option<String>) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match v {
        None => Ok(None),
        Some(s) => s
            .parse::<T>()
            .map(Some)
            .map_err(|e| anyhow!("bad config value '{s}': {e}")),
    }
}

fn parse_config(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {} is not key=value", lineno + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

#[derive(Args)]
struct SolveJoinArgs {
    /// First eigenmap, `id:m | standard:m:ell | circle:ell | custom:m:lambda:mu`
    #[arg(long)]
    eig1: String,
    /// Second eigenmap (same grammar)
    #[arg(long)]
    eig2: String,
    #[arg(long, value_enum, default_value = "minimize")]
    method: MethodArg,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Write the result document (profile + report JSON)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also export the profile as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Export the signed curvature component amplitudes as CSV
    #[arg(long)]
    components_csv: Option<PathBuf>,
}

#[derive(Args)]
struct SolveSuspensionArgs {
    /// Eigenmap spec for the suspended factor
    #[arg(long)]
    eig: Option<String>,
    /// Domain dimension (with --lambda/--mu instead of --eig)
    #[arg(long)]
    m1: Option<u32>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Nodal index or inclusive range, e.g. `0` or `0..2`
    #[arg(long, default_value = "0")]
    nodal: String,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Output path; ranges insert `-nodalK` before the extension
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    eig1: Option<String>,
    #[arg(long)]
    eig2: Option<String>,
    /// Suspension check for a single eigenmap
    #[arg(long)]
    eig: Option<String>,
    #[arg(long)]
    m1: Option<u32>,
    #[arg(long)]
    mu: Option<f64>,
    /// Sweep joins over m-ranges: family1/family2 with m ranges `a..b`
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value = "identity")]
    family1: String,
    #[arg(long, default_value = "identity")]
    family2: String,
    #[arg(long, default_value = "2..8")]
    m1_range: String,
    #[arg(long, default_value = "2..8")]
    m2_range: String,
    #[arg(long, default_value = "2")]
    ell1: u32,
    #[arg(long, default_value = "2")]
    ell2: u32,
    /// Write the sweep table as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write reports as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Stored result document
    path: PathBuf,
    /// Emit the check list as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// Stored result document
    path: PathBuf,
    /// Output SVG path
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not usage errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK),
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Catalog(args) => cmd_catalog(args),
        Command::SolveJoin(args) => cmd_solve_join(args),
        Command::SolveSuspension(args) => cmd_solve_suspension(args),
        Command::Check(args) => cmd_check(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

/// Parse the `family:m[:ell]` eigenmap grammar.
fn parse_eigenmap(spec: &str) -> Result<Eigenmap> {
    let parts: Vec<&str> = spec.split(':').collect();
    let err = || anyhow!("bad eigenmap spec '{spec}' (id:m | standard:m:ell | circle:ell | custom:m:lambda:mu)");
    let parse_u32 = |s: &str| s.parse::<u32>().map_err(|_| err());
    match parts.as_slice() {
        ["id", m] => {
            let m = parse_u32(m)?;
            if m == 0 {
                bail!("m = 0 is a suspension endpoint; use solve-suspension instead");
            }
            Eigenmap::identity(m).map_err(|e| anyhow!("{e}"))
        }
        ["circle", ell] => {
            let ell: i32 = ell.parse().map_err(|_| err())?;
            Eigenmap::circle_power(ell).map_err(|e| anyhow!("{e}"))
        }
        ["standard", m, ell] => {
            Eigenmap::standard_immersion(parse_u32(m)?, parse_u32(ell)?).map_err(|e| anyhow!("{e}"))
        }
        ["custom", m, lambda, mu] => {
            let m = parse_u32(m)?;
            if m == 0 {
                bail!("m = 0 is a suspension endpoint; use solve-suspension instead");
            }
            let parse_scalar = |s: &str| -> Result<Scalar> {
                if let Some((num, den)) = s.split_once('/') {
                    Ok(Scalar::ratio(
                        num.parse().map_err(|_| err())?,
                        den.parse().map_err(|_| err())?,
                    ))
                } else {
                    Ok(Scalar::Approx(s.parse().map_err(|_| err())?))
                }
            };
            Eigenmap::custom(m, parse_scalar(lambda)?, parse_scalar(mu)?)
                .map_err(|e| anyhow!("{e}"))
        }
        _ => Err(err()),
    }
}

fn cmd_catalog(args: CatalogArgs) -> Result<u8> {
    let family = match args.family.as_deref() {
        None => None,
        Some("identity") | Some("id") => Some(Family::Identity),
        Some("circle") => Some(Family::CirclePower),
        Some("standard") => Some(Family::StandardImmersion),
        Some("custom") => Some(Family::Custom),
        Some(other) => bail!("unknown family '{other}'"),
    };
    let rows: Vec<Eigenmap> = bounded_catalog()
        .into_iter()
        .filter(|e| family.is_none_or(|f| e.family == f))
        .filter(|e| args.m.is_none_or(|m| e.m == m))
        .filter(|e| args.ell.is_none_or(|l| e.ell == l))
        .collect();
    if args.json {
        let records: Vec<CatalogRecord> = rows.iter().map(CatalogRecord::from).collect();
        println!("{}", serde_json::to_string_pretty(&records)?);
    } else {
        println!("{:<18} {:>3} {:>6} {:>4} {:>12} {:>12}", "spec", "m", "n", "ell", "lambda", "mu");
        for e in &rows {
            println!(
                "{:<18} {:>3} {:>6} {:>4} {:>12.6} {:>12.6}",
                e.spec_string(),
                e.m,
                e.n,
                e.ell,
                e.lambda_f64(),
                e.mu_f64()
            );
        }
    }
    Ok(EXIT_OK)
}

fn summarize(report: &SolveReport) {
    println!(
        "J = {:.12}, residual = {:.3e} (buffer {}), classification = {}, {}",
        report.j_value,
        report.el_residual_sup,
        report.residual_buffer,
        report.classification,
        if report.converged { "converged" } else { "NOT converged" }
    );
    for m in &report.messages {
        println!("  note: {m}");
    }
}

fn cmd_solve_join(args: SolveJoinArgs) -> Result<u8> {
    let mut e1 = parse_eigenmap(&args.eig1)?;
    let mut e2 = parse_eigenmap(&args.eig2)?;
    if e1.m == 1 && e2.m >= 2 {
        // join solutions map under the factor swap t -> pi/2 - t
        println!("note: swapping factors so the circle factor sits second");
        std::mem::swap(&mut e1, &mut e2);
    }
    let p = JoinProblem::new(e1, e2).map_err(|e| anyhow!("{e}"))?;
    let base = match args.method {
        MethodArg::Minimize => SolveOptions::minimize(),
        MethodArg::Shoot => SolveOptions::shoot(),
    };
    let opts = args.numeric.build(base)?;
    let solved = match (args.method, p.mode()) {
        (MethodArg::Minimize, ProblemMode::Main) => minimize_join(&p, &opts),
        (MethodArg::Minimize, ProblemMode::ConstrainedBeta) => {
            println!("note: m2 = 1 routes to the beta(0) = 1 constrained minimizer");
            minimize_join_beta0_constrained(&p, &opts)
        }
        (MethodArg::Shoot, _) => shoot_join(&p, &opts),
    };
    let (profile, report) = match solved {
        Ok(x) => x,
        Err(ymjoin::Error::Solver(msg)) => {
            eprintln!("solver failed: {msg}");
            return Ok(EXIT_NO_CONVERGENCE);
        }
        Err(e) => return Err(anyhow!("{e}")),
    };
    summarize(&report);
    let converged = report.converged;
    if let Some(csv) = &args.csv {
        std::fs::write(csv, profile.to_csv())?;
    }
    if let Some(path) = &args.components_csv {
        std::fs::write(path, ymjoin::geometry::components_csv(&p, &profile))?;
    }
    if let Some(out) = &args.out {
        ResultDoc::new_join(&p, opts, profile, report).save(out).map_err(|e| anyhow!("{e}"))?;
        println!("wrote {}", out.display());
    }
    Ok(if converged { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}

fn parse_nodal_range(spec: &str) -> Result<(u32, u32)> {
    if let Some((a, b)) = spec.split_once("..") {
        let lo: u32 = a.trim().parse().context("bad nodal range")?;
        let hi: u32 = b.trim().parse().context("bad nodal range")?;
        if hi < lo {
            bail!("empty nodal range");
        }
        Ok((lo, hi))
    } else {
        let k: u32 = spec.trim().parse().context("bad nodal index")?;
        Ok((k, k))
    }
}

fn nodal_out_path(base: &Path, k: u32, multi: bool) -> PathBuf {
    if !multi {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("result");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("json");
    base.with_file_name(format!("{stem}-nodal{k}.{ext}"))
}

fn cmd_solve_suspension(args: SolveSuspensionArgs) -> Result<u8> {
    let sp = match (&args.eig, args.m1, args.lambda, args.mu) {
        (Some(spec), None, None, None) => {
            let e = parse_eigenmap(spec)?;
            if e.m < 2 {
                bail!("suspension needs m1 >= 2");
            }
            SuspensionProblem::from_eigenmap(e)
        }
        (None, Some(m1), Some(lambda), Some(mu)) => {
            SuspensionProblem::custom(m1, lambda, mu).map_err(|e| anyhow!("{e}"))?
        }
        _ => bail!("give either --eig or all of --m1/--lambda/--mu"),
    };
    let (lo, hi) = parse_nodal_range(&args.nodal)?;
    let opts = args.numeric.build(SolveOptions::suspension())?;
    let multi = hi > lo;

    // independent deterministic solves; fan out across worker threads and
    // emit in nodal order
    let indices: Vec<u32> = (lo..=hi).collect();
    let results: Vec<(u32, ymjoin::Result<_>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = indices
            .iter()
            .map(|&k| {
                let sp = sp.clone();
                let opts = opts.clone();
                scope.spawn(move || (k, solve_suspension(&sp, k, &opts)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
    });

    let mut worst = EXIT_OK;
    for (k, solved) in results {
        match solved {
            Ok((profile, report)) => {
                print!("nodal {k}: ");
                summarize(&report);
                if !report.converged {
                    worst = worst.max(EXIT_NO_CONVERGENCE);
                }
                if let Some(csv) = &args.csv {
                    std::fs::write(nodal_out_path(csv, k, multi), profile.to_csv())?;
                }
                if let Some(out) = &args.out {
                    let path = nodal_out_path(out, k, multi);
                    ResultDoc::new_suspension(&sp, opts.clone(), profile, report)
                        .save(&path)
                        .map_err(|e| anyhow!("{e}"))?;
                    println!("wrote {}", path.display());
                }
            }
            Err(ymjoin::Error::BranchNotFound(msg)) => {
                println!("nodal {k}: branch not found; {msg}");
                worst = worst.max(EXIT_BRANCH_NOT_FOUND);
            }
            Err(e) => return Err(anyhow!("{e}")),
        }
    }
    Ok(worst)
}

fn print_report(label: &str, r: &damping::DampingReport) {
    println!("{label}: {} (margin {:+.6})", r.verdict_string(), r.margin);
    for c in &r.clauses {
        let verdict = match c.holds {
            Some(true) => "holds",
            Some(false) => "fails",
            None => "not applicable",
        };
        let values: Vec<String> = c
            .quantities
            .iter()
            .map(|(k, v)| format!("{k} = {v:.6}"))
            .collect();
        println!("    {:<22} {verdict:<14} {}", c.label, values.join(", "));
    }
}

fn cmd_check(args: CheckArgs) -> Result<u8> {
    if args.sweep {
        return cmd_check_sweep(args);
    }
    if let Some(eig) = &args.eig {
        let e = parse_eigenmap(eig)?;
        let r = damping::check_suspension(e.m, &e.mu).map_err(|e| anyhow!("{e}"))?;
        print_report(&format!("suspension({})", e.spec_string()), &r);
        return Ok(if r.satisfied { EXIT_OK } else { EXIT_UNSATISFIED });
    }
    if let (Some(m1), Some(mu)) = (args.m1, args.mu) {
        let r = damping::check_suspension(m1, &Scalar::Approx(mu)).map_err(|e| anyhow!("{e}"))?;
        print_report(&format!("suspension(m1 = {m1}, mu1 = {mu})"), &r);
        return Ok(if r.satisfied { EXIT_OK } else { EXIT_UNSATISFIED });
    }
    let (Some(s1), Some(s2)) = (&args.eig1, &args.eig2) else {
        bail!("give --eig1/--eig2, --eig, --m1/--mu, or --sweep");
    };
    let e1 = parse_eigenmap(s1)?;
    let e2 = parse_eigenmap(s2)?;
    let p = JoinProblem::new(e1, e2).map_err(|e| anyhow!("{e}"))?;
    let mut all = true;
    if p.mode() == ProblemMode::ConstrainedBeta {
        let k = p.lambda2.sqrt().round() as i32;
        let r = damping::check_main2(p.m1, &p.eig1.mu, k).map_err(|e| anyhow!("{e}"))?;
        print_report("main2", &r);
        all &= r.satisfied;
    } else {
        let d1 = damping::check_d1(&p).map_err(|e| anyhow!("{e}"))?;
        let d2 = damping::check_d2(&p).map_err(|e| anyhow!("{e}"))?;
        print_report("D1", &d1);
        print_report("D2", &d2);
        all &= d1.satisfied && d2.satisfied;
    }
    println!(
        "=> {}",
        if all {
            "conditions satisfied: a nonconstant join solution exists"
        } else {
            "conditions not satisfied: existence unknown (the conditions are sufficient only)"
        }
    );
    Ok(if all { EXIT_OK } else { EXIT_UNSATISFIED })
}

fn parse_m_range(spec: &str) -> Result<(u32, u32)> {
    let (a, b) = spec.split_once("..").ok_or_else(|| anyhow!("range must be a..b"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn sweep_factor(family: &str, m: u32, ell: u32) -> Result<Eigenmap> {
    match family {
        "identity" | "id" => Eigenmap::identity(m).map_err(|e| anyhow!("{e}")),
        "standard" => Eigenmap::standard_immersion(m, ell).map_err(|e| anyhow!("{e}")),
        "circle" => Eigenmap::circle_power(ell as i32).map_err(|e| anyhow!("{e}")),
        other => bail!("unknown sweep family '{other}'"),
    }
}

fn cmd_check_sweep(args: CheckArgs) -> Result<u8> {
    let (m1_lo, m1_hi) = parse_m_range(&args.m1_range)?;
    let (m2_lo, m2_hi) = parse_m_range(&args.m2_range)?;
    let mut pairs = Vec::new();
    for m1 in m1_lo..=m1_hi {
        for m2 in m2_lo..=m2_hi {
            let e1 = sweep_factor(&args.family1, m1, args.ell1);
            let e2 = sweep_factor(&args.family2, m2, args.ell2);
            if let (Ok(e1), Ok(e2)) = (e1, e2) {
                pairs.push((e1, e2));
            }
        }
    }
    let rows = damping::sweep(&pairs);
    let csv = damping::sweep_csv(&rows);
    if let Some(path) = &args.csv {
        std::fs::write(path, &csv)?;
        println!("wrote {} rows to {}", rows.len(), path.display());
    } else {
        print!("{csv}");
    }
    if let Some(path) = &args.json {
        std::fs::write(path, serde_json::to_string_pretty(&rows)?)?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let doc = match ResultDoc::load(&args.path) {
        Ok(doc) => doc,
        Err(ymjoin::Error::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            return Ok(EXIT_VERIFY_FAILED);
        }
        Err(e) => return Err(anyhow!("{e}")),
    };
    let report = match results::verify(&doc) {
        Ok(r) => r,
        Err(ymjoin::Error::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            return Ok(EXIT_VERIFY_FAILED);
        }
        Err(e) => return Err(anyhow!("{e}")),
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for c in &report.checks {
            println!(
                "{:<26} {}   measured {:.3e} allowed {:.3e}",
                c.name,
                if c.pass { "pass" } else { "FAIL" },
                c.measured,
                c.allowed
            );
        }
    }
    if report.pass {
        println!("verification passed");
        Ok(EXIT_OK)
    } else {
        let failed = report.first_failure().expect("failed check");
        eprintln!("verification failed at check '{}'", failed.name);
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn cmd_plot(args: PlotArgs) -> Result<u8> {
    let doc = ResultDoc::load(&args.path).map_err(|e| anyhow!("{e}"))?;
    let svg = plot::render(&doc)?;
    std::fs::write(&args.out, svg)?;
    println!("wrote {}", args.out.display());
    Ok(EXIT_OK)
}
