use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ck_core::bounds::{cor_potential_good, thm1_general, thm1_hyperelliptic, thm_integral, BoundReport};
use ck_core::coleman::{analyze_disk, default_precision, describe_operator, find_disk, run_pipeline, ColemanSpec};
use ck_core::hyperelliptic::{CurveModel, ModelKind, PointCounts};
use ck_core::{Error, Prime, Result};

#[derive(Parser)]
#[command(name = "ckbound", version, about = "Chabauty-Kim style bounds and residue-disk analysis for hyperelliptic curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count points over F_p by residue-disk type.
    Count {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a closed-form bound on rational or integral points.
    Bound(BoundArgs),
    /// Build the differential operator used on one residue disk.
    Operator {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        p: u64,
        /// Disk label such as "(3, 2)", "3,2", "inf+" or "inf".
        #[arg(long)]
        disk: String,
        #[arg(long = "T")]
        precision: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the series pipeline on a single residue disk.
    AnalyzeDisk {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        disk: String,
    },
    /// Run the series pipeline on every residue disk.
    Pipeline {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct CurveArgs {
    /// Curve file or line ("kind g c_0 c_1 ... c_deg"), or "c_0,c_1,..." with --kind.
    #[arg(long)]
    curve: String,
    #[arg(long)]
    kind: Option<ModelKind>,
}

#[derive(Args)]
struct RunArgs {
    /// Spec file (TOML).
    #[arg(long)]
    spec: PathBuf,
    /// Overrides the prime given in the spec file.
    #[arg(long)]
    p: Option<u64>,
    /// Overrides the working precision given in the spec file.
    #[arg(long = "T")]
    precision: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// Curve file or inline coefficients; required unless --corollary is given.
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    kind: Option<ModelKind>,
    #[arg(long)]
    p: Option<u64>,
    /// Genus, for --corollary without a curve.
    #[arg(long)]
    genus: Option<u64>,
    /// Asserts that the Jacobian has rank equal to the genus.
    #[arg(long)]
    attest_rank_eq_g: bool,
    /// Asserts that condition A or condition B holds.
    #[arg(long)]
    attest_condition: bool,
    /// Product of the local constants n_v.
    #[arg(long)]
    nv: Option<u64>,
    /// Product of the local constants m_v (integral points).
    #[arg(long)]
    mv: Option<u64>,
    /// Where the local constants come from.
    #[arg(long)]
    local_note: Option<String>,
    #[arg(long, conflicts_with_all = ["integral", "general"])]
    corollary: bool,
    #[arg(long, conflicts_with = "general")]
    integral: bool,
    /// Use the bound for general curves instead of the hyperelliptic one.
    #[arg(long)]
    general: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_curve(args: &CurveArgs) -> Result<CurveModel> {
    let path = Path::new(&args.curve);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let line = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| Error::InvalidInput(format!("{}: no curve line", path.display())))?;
        return CurveModel::parse_line(line);
    }
    match args.kind {
        Some(kind) => CurveModel::parse_inline(kind, &args.curve),
        None if args.curve.contains(char::is_whitespace) => CurveModel::parse_line(&args.curve),
        None => Err(Error::InvalidInput(format!("{:?} is not a file; inline coefficients need --kind", args.curve))),
    }
}

fn load_spec(path: &Path) -> Result<ColemanSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    ColemanSpec::from_toml(&text)
}

fn write_json<T: Serialize>(out: Option<&PathBuf>, value: &T) -> Result<()> {
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(value).expect("report serializes");
        fs::write(path, text + "\n").map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CountReport {
    curve: String,
    p: u64,
    counts: PointCounts,
    hasse_weil_ok: bool,
}

fn cmd_count(curve: &CurveArgs, p: u64, out: Option<&PathBuf>) -> Result<i32> {
    let curve = load_curve(curve)?;
    let p = Prime::new(p)?;
    let counts = curve.count_points_fp(p)?;
    let hw = counts.hasse_weil_ok(p, curve.genus());
    println!("curve        {curve}");
    println!("p            {p}");
    println!("total        {}", counts.total);
    println!("non-W affine {}", counts.affine_nonweierstrass);
    println!("W affine     {}", counts.weierstrass_affine);
    println!("infinite     {}", counts.infinite);
    println!("hasse-weil   {}", if hw { "ok" } else { "VIOLATED" });
    write_json(out, &CountReport { curve: curve.to_string(), p: p.get(), counts, hasse_weil_ok: hw })?;
    Ok(0)
}

fn cmd_bound(a: &BoundArgs) -> Result<i32> {
    if !a.attest_condition {
        return Err(Error::InvalidInput(
            "refusing to evaluate: the hypotheses (condition A or B) cannot be checked here; pass --attest-condition to assert them".into(),
        ));
    }
    if !a.corollary && !a.attest_rank_eq_g {
        return Err(Error::InvalidInput(
            "refusing to evaluate: rank = g cannot be checked here; pass --attest-rank-eq-g to assert it".into(),
        ));
    }
    let curve_args = a.curve.clone().map(|curve| CurveArgs { curve, kind: a.kind });
    let report: BoundReport = if a.corollary {
        let g = match (&curve_args, a.genus) {
            (Some(c), _) => load_curve(c)?.genus() as u64,
            (None, Some(g)) => g,
            (None, None) => return Err(Error::InvalidInput("--corollary needs --genus or --curve".into())),
        };
        cor_potential_good(g)?
    } else {
        let curve = curve_args.as_ref().ok_or_else(|| Error::InvalidInput("--curve is required".into()))?;
        let curve = load_curve(curve)?;
        let p = a.p.ok_or_else(|| Error::InvalidInput("--p is required".into()))?;
        let prime = Prime::new(p)?;
        let counts = curve.count_points_fp(prime)?;
        let g = curve.genus() as u64;
        let w_inf = u64::from(curve.kind() == ModelKind::Odd);
        if a.integral {
            let mv = a.mv.ok_or_else(|| Error::InvalidInput("--integral needs --mv".into()))?;
            let y_fp = counts.total - counts.infinite;
            thm_integral(g, p, mv, y_fp, counts.weierstrass_affine)?
        } else {
            let nv = a.nv.ok_or_else(|| Error::InvalidInput("--nv is required".into()))?;
            if a.general {
                thm1_general(g, p, nv, counts.total)?
            } else {
                thm1_hyperelliptic(g, p, nv, counts.total, counts.weierstrass_affine + w_inf)?
            }
        }
    };
    let report = match &a.local_note {
        Some(note) => report.with_local_note(note.clone()),
        None => report,
    };
    println!("theorem        {}", serde_json::to_value(report.theorem_id).expect("id serializes").as_str().unwrap_or(""));
    println!("raw value      {} ({})", report.raw_value, report.raw_decimal);
    println!("integer bound  {}", report.integer_bound);
    for line in &report.provenance {
        println!("  {line}");
    }
    write_json(a.out.as_ref(), &report)?;
    Ok(0)
}

fn cmd_operator(curve: &CurveArgs, p: u64, disk: &str, precision: Option<usize>, out: Option<&PathBuf>) -> Result<i32> {
    let curve = load_curve(curve)?;
    let p = Prime::new(p)?;
    let disk = find_disk(&curve, p, disk)?;
    let t = precision.unwrap_or_else(|| default_precision(curve.genus()));
    let report = describe_operator(&curve, disk, p, t)?;
    println!("disk       {}", report.label);
    if let Some(param) = &report.parameter {
        println!("parameter  {param}");
    }
    println!("operator   {}", report.operator);
    println!("order      {}", report.order);
    if let Some(res) = &report.det_b_residues {
        let list: Vec<String> = res.iter().map(|(x, d)| format!("x={x}: {d}")).collect();
        println!("det B mod p  {}", list.join(", "));
    }
    let mut code = 0;
    if let Some(cert) = &report.niceness {
        if cert.is_nice() {
            println!("nice       yes");
        } else {
            let why = cert.failure.as_ref().map(|f| f.reason.clone()).unwrap_or_default();
            println!("nice       no ({why})");
            code = 1;
        }
    }
    if let Some(note) = &report.note {
        println!("note       {note}");
    }
    write_json(out, &report)?;
    Ok(code)
}

fn resolve_run(run: &RunArgs) -> Result<(ColemanSpec, Prime, usize)> {
    let spec = load_spec(&run.spec)?;
    let p = run.p.or(spec.p).ok_or_else(|| Error::InvalidInput("no prime: pass --p or set p in the spec".into()))?;
    let t = run.precision.or(spec.precision).unwrap_or_else(|| default_precision(spec.curve.genus()));
    Ok((spec, Prime::new(p)?, t))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

fn status_text(status: &ck_core::coleman::DiskStatus) -> String {
    use ck_core::coleman::DiskStatus;
    match status {
        DiskStatus::Ok => "ok".into(),
        DiskStatus::Skipped(why) => format!("skipped: {why}"),
        DiskStatus::Failed(why) => format!("FAILED: {why}"),
    }
}

fn print_disk_row(d: &ck_core::coleman::DiskReport) {
    println!(
        "{:<10} {:>5} {:>5} {:>6}  {:<24} {}",
        d.label,
        opt(&d.order),
        opt(&d.n_b),
        opt(&d.bound),
        d.image.as_deref().unwrap_or("-"),
        status_text(&d.status)
    );
}

fn print_header() {
    println!("{:<10} {:>5} {:>5} {:>6}  {:<24} status", "disk", "N", "N_b", "bound", "D(G)");
}

fn cmd_analyze_disk(run: &RunArgs, disk: &str) -> Result<i32> {
    let (spec, p, t) = resolve_run(run)?;
    let disk = find_disk(&spec.curve, p, disk)?;
    let report = analyze_disk(&spec, disk, p, t)?;
    println!("curve {} at p = {p}, T = {t}", spec.curve);
    print_header();
    print_disk_row(&report);
    write_json(run.out.as_ref(), &report)?;
    Ok(report.exit_code)
}

fn cmd_pipeline(run: &RunArgs) -> Result<i32> {
    let (spec, p, t) = resolve_run(run)?;
    let report = run_pipeline(&spec, p, t)?;
    println!("curve {} at p = {p}, T = {t}", spec.curve);
    print_header();
    for d in &report.disks {
        print_disk_row(d);
    }
    match report.total {
        Some(total) => println!("total {total}"),
        None => println!("total unavailable ({} disk(s) failed)", report.failures),
    }
    write_json(run.out.as_ref(), &report)?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Count { curve, p, out } => cmd_count(curve, *p, out.as_ref()),
        Command::Bound(args) => cmd_bound(args),
        Command::Operator { curve, p, disk, precision, out } => cmd_operator(curve, *p, disk, *precision, out.as_ref()),
        Command::AnalyzeDisk { run, disk } => cmd_analyze_disk(run, disk),
        Command::Pipeline { run } => cmd_pipeline(run),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
