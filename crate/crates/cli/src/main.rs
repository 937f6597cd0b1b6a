//! `shafkit`: command-line front end for computing elliptic curves over Q
//! with good reduction outside a finite set of primes.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use shafkit::arith::PrimeSet;
use shafkit::assembly::{
    annotate, assemble_database, export_statistics, read_curve_file, write_database_jsonl, AssemblyConfig,
    CurveRecord, LabeledCurve,
};
use shafkit::curve::{parse_rational, WeierstrassCurve};
use shafkit::hall::{check_heights, hall_bound, heuristic_height_bound, ln_hall_bound, HallParams};
use shafkit::localdata::{global_minimal_model, integral_scaling, tate_local, ReductionKind};
use shafkit::maxcond::verify_maximal_conductor;
use shafkit::mordell::{
    plan_for, search_plan, search_s_integral_points, three_isogeny_curve, three_isogeny_point, SIntegralPoint,
    SearchBounds,
};
use shafkit::sunit::{default_exponent_bound, solution_to_json, solve_s_unit_equation};

#[derive(Parser, Debug)]
#[command(name = "shafkit", version, about = "Elliptic curves over Q with good reduction outside S")]
struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true, env = "SHAFKIT_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tate's algorithm: Kodaira type, conductor exponent and discriminant valuation.
    Tate(TateArgs),
    /// Global minimal model, conductor and minimal discriminant.
    Minimal(CurveInput),
    /// S-integral points on y^2 = x^3 + a in a bounded box.
    Points(PointsArgs),
    /// Image of a point under the 3-isogeny E_a -> E_{-27a}.
    Isogeny3(Isogeny3Args),
    /// Compute M(S) and write the database, summary and statistics.
    Assemble(AssembleArgs),
    /// Szpiro ratios and statistics for curves from a file.
    Stats(StatsArgs),
    /// Hall-type height bounds from the abc conjecture.
    HallBound(HallArgs),
    /// Build and verify a curve of maximal conductor for S.
    Maxcond(MaxcondArgs),
    /// Brute-force S-unit equation x + y = 1 with Frey curves.
    Sunit(SunitArgs),
    /// Parse a curve file and report malformed lines.
    IngestCheck(IngestArgs),
}

#[derive(Args, Debug)]
struct CurveInput {
    /// Curve as "a1,a2,a3,a4,a6" (integers or fractions).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "file", required_unless_present = "file")]
    curve: Option<String>,
    /// JSON-lines file of curves.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Treat a malformed line in --file as fatal.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct TateArgs {
    #[command(flatten)]
    input: CurveInput,
    /// Primes to examine (comma-separated); default: primes of bad reduction.
    #[arg(long, value_parser = parse_prime_set)]
    primes: Option<PrimeSet>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Bound on |n| for x = n / s^2.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    num_bound: u64,
    /// Bound on the exponent of each prime in s.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(0..=64))]
    denom_exponent_bound: u32,
}

impl BoundArgs {
    fn bounds(&self) -> SearchBounds {
        SearchBounds { num_bound: self.num_bound, denom_exponent_bound: self.denom_exponent_bound }
    }
}

#[derive(Args, Debug)]
struct PointsArgs {
    /// Coefficient a of y^2 = x^3 + a.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_nonzero_int)]
    a: BigInt,
    #[arg(long, value_parser = parse_prime_set)]
    primes: PrimeSet,
    #[command(flatten)]
    bounds: BoundArgs,
}

#[derive(Args, Debug)]
struct Isogeny3Args {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_nonzero_int)]
    a: BigInt,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
}

#[derive(Args, Debug)]
struct AssembleArgs {
    #[arg(long, value_parser = parse_prime_set)]
    primes: PrimeSet,
    #[command(flatten)]
    bounds: BoundArgs,
    /// Exponent window for the reconstruction scaling u.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=12))]
    u_window: u32,
    /// Largest prime used for isogeny clustering by traces.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(2..=100_000))]
    trace_prime_bound: u32,
    /// Histogram bin width.
    #[arg(long, default_value_t = 0.25, value_parser = parse_positive_f64)]
    bin_width: f64,
    /// Output directory.
    #[arg(long, default_value = "shafkit-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// JSON-lines curve file (database output is accepted too).
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    strict: bool,
    /// Directory for statistics CSVs; when absent only per-curve lines are printed.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.25, value_parser = parse_positive_f64)]
    bin_width: f64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(2..=100_000))]
    trace_prime_bound: u32,
}

#[derive(Args, Debug)]
struct HallArgs {
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.1e8)]
    k_epsilon: f64,
    /// Prime set S (default: the first six primes).
    #[arg(long, value_parser = parse_prime_set_allow_empty, default_value = "2,3,5,7,11,13")]
    primes: PrimeSet,
    #[arg(long, default_value = "1", allow_hyphen_values = true, value_parser = parse_nonzero_int)]
    d: BigInt,
    /// Also search points on the targets for these primes and compare their
    /// heights with the heuristic bound.
    #[arg(long, value_parser = parse_prime_set)]
    check_primes: Option<PrimeSet>,
    #[command(flatten)]
    bounds: BoundArgs,
}

#[derive(Args, Debug)]
struct MaxcondArgs {
    #[arg(long, value_parser = parse_prime_set)]
    primes: PrimeSet,
}

#[derive(Args, Debug)]
struct SunitArgs {
    #[arg(long, value_parser = parse_prime_set)]
    primes: PrimeSet,
    /// Bound on |e_p| (default 30 for |S| <= 3, else 15).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=200))]
    exponent_bound: Option<u32>,
    /// Output file for the JSON lines (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    strict: bool,
}

/// Parsed and validated settings of an `assemble` run.
#[derive(Clone, Debug, Serialize)]
struct PipelineConfig {
    primes: Vec<u64>,
    num_bound: u64,
    denom_exponent_bound: u32,
    u_window: u32,
    trace_prime_bound: u32,
    bin_width: f64,
    out: PathBuf,
    jobs: usize,
}

impl PipelineConfig {
    fn assembly(&self) -> AssemblyConfig {
        AssemblyConfig {
            bounds: SearchBounds { num_bound: self.num_bound, denom_exponent_bound: self.denom_exponent_bound },
            u_window: self.u_window,
            trace_prime_bound: self.trace_prime_bound,
            bin_width: self.bin_width,
        }
    }
}

fn parse_prime_set_allow_empty(s: &str) -> Result<PrimeSet, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(PrimeSet::empty());
    }
    let mut v = Vec::new();
    for part in s.split(',') {
        let p: u64 = part.trim().parse().map_err(|_| format!("not a prime: {part:?}"))?;
        v.push(p);
    }
    PrimeSet::new(v).map_err(|e| e.to_string())
}

fn parse_prime_set(s: &str) -> Result<PrimeSet, String> {
    let set = parse_prime_set_allow_empty(s)?;
    if set.is_empty() {
        return Err("the prime set must be nonempty".into());
    }
    Ok(set)
}

fn parse_nonzero_int(s: &str) -> Result<BigInt, String> {
    let n: BigInt = s.trim().parse().map_err(|_| format!("not an integer: {s:?}"))?;
    if n == BigInt::from(0) {
        return Err("must be nonzero".into());
    }
    Ok(n)
}

fn parse_positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err("must be positive".into());
    }
    Ok(v)
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<shafkit::Error> for Failure {
    fn from(e: shafkit::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let jobs = match cli.jobs {
        Some(0) => return Err(Failure::Usage("--jobs must be positive".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| Failure::Runtime(anyhow!("cannot start worker pool: {e}")))?;

    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Tate(args) => cmd_tate(&args, &mut out)?,
        Command::Minimal(args) => cmd_minimal(&args, &mut out)?,
        Command::Points(args) => cmd_points(&args, &mut out)?,
        Command::Isogeny3(args) => cmd_isogeny3(&args, &mut out)?,
        Command::Assemble(args) => {
            let config = PipelineConfig {
                primes: args.primes.primes().to_vec(),
                num_bound: args.bounds.num_bound,
                denom_exponent_bound: args.bounds.denom_exponent_bound,
                u_window: args.u_window,
                trace_prime_bound: args.trace_prime_bound,
                bin_width: args.bin_width,
                out: args.out.clone(),
                jobs,
            };
            run_pipeline(&config, &mut out)?;
        }
        Command::Stats(args) => cmd_stats(&args, &mut out)?,
        Command::HallBound(args) => cmd_hall(&args, &mut out)?,
        Command::Maxcond(args) => {
            let report = verify_maximal_conductor(&args.primes)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report).context("serializing report")?)?;
        }
        Command::Sunit(args) => cmd_sunit(&args, &mut out)?,
        Command::IngestCheck(args) => cmd_ingest(&args, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn load_curves(path: &Path, strict: bool) -> CliResult<Vec<LabeledCurve>> {
    let (curves, bad) = read_curve_file(path, strict)?;
    for (line, e) in &bad {
        eprintln!("warning: {}: line {line}: {e}; skipped", path.display());
    }
    if curves.is_empty() && bad.is_empty() {
        eprintln!("warning: {}: no curves", path.display());
    }
    Ok(curves)
}

fn input_curves(input: &CurveInput) -> CliResult<Vec<LabeledCurve>> {
    match (&input.curve, &input.file) {
        (Some(c), _) => {
            let curve: WeierstrassCurve = c.parse().map_err(|e: shafkit::Error| Failure::Usage(e.to_string()))?;
            Ok(vec![LabeledCurve { line: 0, label: None, curve }])
        }
        (None, Some(path)) => load_curves(path, input.strict),
        (None, None) => Err(Failure::Usage("one of --curve or --file is required".into())),
    }
}

fn reduction_name(r: ReductionKind) -> &'static str {
    match r {
        ReductionKind::Good => "good",
        ReductionKind::SplitMultiplicative => "split multiplicative",
        ReductionKind::NonsplitMultiplicative => "nonsplit multiplicative",
        ReductionKind::Additive => "additive",
    }
}

fn with_label(mut v: Value, label: &Option<String>) -> Value {
    if let Some(l) = label {
        v["label"] = json!(l);
    }
    v
}

fn cmd_tate(args: &TateArgs, out: &mut impl Write) -> CliResult<()> {
    for lc in input_curves(&args.input)? {
        let (_, a) = integral_scaling(&lc.curve);
        let integral = WeierstrassCurve::from_bigints(&a)?;
        let primes: Vec<BigInt> = match &args.primes {
            Some(s) => s.iter().map(BigInt::from).collect(),
            None => global_minimal_model(&lc.curve)?.bad_primes(),
        };
        for p in primes {
            let ld = tate_local(&integral, &p)?;
            let v = json!({
                "curve": lc.curve.to_string(),
                "p": p.to_string(),
                "kodaira": ld.kodaira.to_string(),
                "f": ld.conductor_exponent,
                "ord_disc": ld.ord_disc,
                "reduction": reduction_name(ld.reduction),
                "exit_step": ld.exit_step,
                "non_minimal_steps": ld.non_minimal_steps,
            });
            writeln!(out, "{}", with_label(v, &lc.label))?;
        }
    }
    Ok(())
}

fn cmd_minimal(args: &CurveInput, out: &mut impl Write) -> CliResult<()> {
    for lc in input_curves(args)? {
        let g = global_minimal_model(&lc.curve)?;
        let m = &g.minimal_model;
        let v = json!({
            "curve": lc.curve.to_string(),
            "minimal_ainvs": m.ainvs().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "c4": m.c4().to_string(),
            "c6": m.c6().to_string(),
            "j": m.j_invariant().to_string(),
            "conductor": g.conductor_value().to_string(),
            "conductor_factored": g.conductor.to_string(),
            "min_disc": g.min_disc.value().to_string(),
            "min_disc_factored": g.min_disc.to_string(),
            "local": g.locals.iter().map(|l| json!({
                "p": l.p.to_string(),
                "kodaira": l.kodaira.to_string(),
                "f": l.conductor_exponent,
                "ord_disc": l.ord_disc,
                "reduction": reduction_name(l.reduction),
            })).collect::<Vec<_>>(),
        });
        writeln!(out, "{}", with_label(v, &lc.label))?;
    }
    Ok(())
}

fn point_json(p: &SIntegralPoint) -> Value {
    json!({ "x": p.x.to_string(), "y": p.y.to_string() })
}

fn cmd_points(args: &PointsArgs, out: &mut impl Write) -> CliResult<()> {
    let res = search_s_integral_points(&args.a, &args.primes, &args.bounds.bounds());
    for p in &res.points {
        writeln!(out, "{}", point_json(p))?;
    }
    eprintln!(
        "{} points on y^2 = x^3 + {} (num_bound {}, denominator exponent bound {}; not exhaustive)",
        res.points.len(),
        args.a,
        args.bounds.num_bound,
        args.bounds.denom_exponent_bound
    );
    Ok(())
}

fn cmd_isogeny3(args: &Isogeny3Args, out: &mut impl Write) -> CliResult<()> {
    let x = parse_rational(&args.x).map_err(|e| Failure::Usage(e.to_string()))?;
    let y = parse_rational(&args.y).map_err(|e| Failure::Usage(e.to_string()))?;
    let p = SIntegralPoint::new(x, y);
    let image = three_isogeny_point(&args.a, &p)?;
    let v = json!({
        "a": args.a.to_string(),
        "point": point_json(&p),
        "codomain_a": three_isogeny_curve(&args.a).to_string(),
        "image": point_json(&image),
    });
    writeln!(out, "{v}")?;
    Ok(())
}

/// Runs the assembly and writes database.jsonl, summary.json and the
/// statistics CSVs into the output directory.
fn run_pipeline(config: &PipelineConfig, out: &mut impl Write) -> CliResult<()> {
    let s = PrimeSet::new(config.primes.iter().copied()).map_err(|e| Failure::Usage(e.to_string()))?;
    let start = Instant::now();
    let db = assemble_database(&s, &config.assembly())?;
    let elapsed = start.elapsed().as_secs_f64();

    fs::create_dir_all(&config.out).with_context(|| format!("creating {}", config.out.display()))?;
    let db_path = config.out.join("database.jsonl");
    let file = fs::File::create(&db_path).with_context(|| format!("creating {}", db_path.display()))?;
    let mut w = BufWriter::new(file);
    write_database_jsonl(&db.records, &mut w)?;
    w.flush()?;
    let stats = if db.records.is_empty() {
        eprintln!("warning: no records; statistics not written");
        None
    } else {
        Some(export_statistics(&db.records, &config.out, config.bin_width)?)
    };

    let summary = json!({
        "summary": db.summary,
        "run": {
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "wall_time_seconds": format!("{elapsed:.3}"),
        },
    });
    let summary_path = config.out.join("summary.json");
    fs::write(&summary_path, serde_json::to_string_pretty(&summary).context("serializing summary")?)
        .with_context(|| format!("writing {}", summary_path.display()))?;

    for w in &db.summary.warnings {
        eprintln!("warning: {w}");
    }
    writeln!(
        out,
        "S = {}: {} curves, {} j-invariants",
        s, db.summary.curve_count, db.summary.j_count
    )?;
    match (&db.summary.count_identity_expected, db.summary.count_identity_holds) {
        (Some(e), Some(h)) => writeln!(
            out,
            "counting identity: expected {e} from {} j-invariants, {}",
            db.summary.direct_j_count,
            if h { "holds" } else { "MISMATCH" }
        )?,
        _ => writeln!(out, "counting identity: not applicable (needs 2 and 3 in S)")?,
    }
    if let Some((m, j)) = db.summary.reference_counts {
        writeln!(
            out,
            "known counts: {m} curves, {j} j-invariants ({})",
            if db.summary.matches_reference == Some(true) { "match" } else { "MISMATCH" }
        )?;
    }
    writeln!(out, "wrote {}", db_path.display())?;
    writeln!(out, "wrote {}", summary_path.display())?;
    if let Some(f) = stats {
        for p in [&f.table, &f.log_conductor_histogram, &f.szpiro_histogram] {
            writeln!(out, "wrote {}", p.display())?;
        }
    }
    Ok(())
}

fn cmd_stats(args: &StatsArgs, out: &mut impl Write) -> CliResult<()> {
    let curves = load_curves(&args.file, args.strict)?;
    let mut records = curves
        .iter()
        .map(|lc| CurveRecord::from_curve(&lc.curve, lc.label.clone()))
        .collect::<shafkit::Result<Vec<_>>>()?;
    annotate(&mut records, args.trace_prime_bound)?;
    for r in &records {
        let v = json!({
            "label": r.label,
            "ainvs": r.curve.ainvs().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "conductor": r.conductor_value().to_string(),
            "min_disc": r.min_disc.to_string(),
            "log_N": format!("{:.6}", r.log_conductor()),
            "szpiro": format!("{:.6}", r.szpiro),
        });
        writeln!(out, "{v}")?;
    }
    if let Some(dir) = &args.out {
        let f = export_statistics(&records, dir, args.bin_width)?;
        eprintln!("wrote {}", f.table.display());
    }
    Ok(())
}

fn cmd_hall(args: &HallArgs, out: &mut impl Write) -> CliResult<()> {
    let params = HallParams::new(args.epsilon, args.k_epsilon, args.primes.clone(), args.d.clone())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let mut v = json!({
        "epsilon": args.epsilon,
        "k_epsilon": args.k_epsilon,
        "primes": args.primes.primes(),
        "n_s": args.primes.radical().to_string(),
        "d": args.d.to_string(),
        "ln_hall_bound": format!("{:.6}", ln_hall_bound(&params)?),
        "hall_bound": format!("{:.6e}", hall_bound(&params)?),
        "heuristic_height_bound": format!("{:.6}", heuristic_height_bound(&params)?),
    });
    if let Some(cs) = &args.check_primes {
        let plan = plan_for(cs, args.bounds.denom_exponent_bound);
        let points = search_plan(&plan, &args.bounds.bounds());
        let check = check_heights(points.iter().flat_map(|(a, ps)| ps.iter().map(move |p| (a, p))), &params)?;
        if !check.violations.is_empty() {
            eprintln!("warning: {} points exceed the heuristic bound", check.violations.len());
        }
        v["height_check"] = json!({
            "primes": cs.primes(),
            "checked": check.checked,
            "max_proxy": format!("{:.6}", check.max_proxy),
            "violations": check.violations,
        });
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&v).context("serializing")?)?;
    Ok(())
}

fn cmd_sunit(args: &SunitArgs, out: &mut impl Write) -> CliResult<()> {
    let bound = args.exponent_bound.unwrap_or_else(|| default_exponent_bound(&args.primes));
    let res = solve_s_unit_equation(&args.primes, bound)?;
    let mut lines = String::new();
    for sol in &res.solutions {
        lines.push_str(&solution_to_json(sol)?.to_string());
        lines.push('\n');
    }
    match &args.out {
        Some(path) => fs::write(path, lines).with_context(|| format!("writing {}", path.display()))?,
        None => out.write_all(lines.as_bytes())?,
    }
    eprintln!("{}", serde_json::to_string(&res.summary()).context("serializing")?);
    Ok(())
}

fn cmd_ingest(args: &IngestArgs, out: &mut impl Write) -> CliResult<()> {
    let (curves, bad) = read_curve_file(&args.file, args.strict)?;
    for (line, e) in &bad {
        writeln!(out, "line {line}: {e}")?;
    }
    if curves.is_empty() && bad.is_empty() {
        eprintln!("warning: {}: no curves", args.file.display());
    }
    writeln!(out, "{} curves parsed, {} malformed lines skipped", curves.len(), bad.len())?;
    for lc in &curves {
        writeln!(out, "line {}: {} [{}]", lc.line, lc.label.as_deref().unwrap_or("-"), lc.curve)?;
    }
    Ok(())
}
