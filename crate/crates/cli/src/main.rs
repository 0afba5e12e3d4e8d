use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use oddkh::complex::Flavor;
use oddkh::homology::Coeffs;
use oddkh::linkdiag::{parse_pd, PdCode, DEFAULT_CROSSING_CAP};
use oddkh::pipeline::{compute, estimate_size, FlavorChoice, Prepared, RunConfig};
use oddkh::signs::{assignment_json, AssignmentType};
use oddkh::table::{KnotTable, TABLE_ENV};
use oddkh::verify::{check_assignment, compare, invariance, verify_subject, Check, Subject};
use oddkh::Error;

#[derive(Parser)]
#[command(name = "oddkh", version, about = "Odd Khovanov homology of links from PD codes")]
struct Cli {
    /// Knot table (JSON array of records); defaults to the bundled table.
    #[arg(long, global = true, env = TABLE_ENV)]
    table: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute homology groups and Poincaré polynomials.
    Compute(ComputeArgs),
    /// Run consistency checks over table entries.
    Verify(VerifyArgs),
    /// Reduced odd vs even ranks over Q.
    Compare(CompareArgs),
    /// Check that several diagrams of one link give the same homology.
    Invariance(InvarianceArgs),
    /// Print the cube of resolutions with face types and edge signs as JSON.
    DumpCube(DumpArgs),
    /// Print the chain complex as JSON.
    DumpComplex(DumpArgs),
}

#[derive(Args, Clone)]
struct Select {
    /// Table entry by name; repeatable.
    #[arg(long = "knot")]
    knots: Vec<String>,
    /// A PD code, e.g. "PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]"; repeatable.
    #[arg(long = "pd")]
    pds: Vec<String>,
    /// Every table entry (after the filters below).
    #[arg(long)]
    all: bool,
    #[arg(long)]
    min_crossings: Option<usize>,
    #[arg(long)]
    max_crossings: Option<usize>,
    #[arg(long, conflicts_with = "non_alternating_only")]
    alternating_only: bool,
    #[arg(long)]
    non_alternating_only: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Odd,
    Even,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum TypeArg {
    X,
    Y,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone)]
struct Config {
    #[arg(long, value_enum, default_value = "odd")]
    flavor: FlavorArg,
    #[arg(long)]
    reduced: bool,
    /// Z, Q or Fp for a prime p (F2, F3, ...).
    #[arg(long, default_value = "Z")]
    coeffs: String,
    #[arg(long, value_enum, default_value = "x")]
    assignment: TypeArg,
    /// Arc marking the reduced circle (default 1).
    #[arg(long)]
    basepoint: Option<u32>,
    /// Largest crossing number accepted; memory grows like 2^n times the
    /// exterior algebra dimension.
    #[arg(long, default_value_t = DEFAULT_CROSSING_CAP)]
    cap: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    select: Select,
    #[command(flatten)]
    config: Config,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    select: Select,
    #[command(flatten)]
    config: Config,
    /// Checks to run (repeatable); default is every check except `thin`.
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Flip the sign of this edge before checking the assignment; used to
    /// confirm that a broken assignment is caught.
    #[arg(long, hide = true)]
    corrupt_edge: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    select: Select,
    #[command(flatten)]
    config: Config,
    /// Also list knots where both theories are thin.
    #[arg(long)]
    show_thin: bool,
}

#[derive(Args)]
struct InvarianceArgs {
    #[command(flatten)]
    select: Select,
    #[command(flatten)]
    config: Config,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    select: Select,
    #[command(flatten)]
    config: Config,
}

/// Exit codes: 0 ok, 1 verification failure, 2 input error, 3 resource cap.
enum Failure {
    Verification(String),
    Input(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit { .. } => Failure::Resource(e.to_string()),
            Error::FaceClassification { .. }
            | Error::NotCocycle(_)
            | Error::NonzeroSquare { .. }
            | Error::Overflow(_) => Failure::Verification(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

impl Config {
    fn run_config(&self) -> CliResult<RunConfig> {
        Ok(RunConfig {
            flavor: match self.flavor {
                FlavorArg::Odd => FlavorChoice::Odd,
                FlavorArg::Even => FlavorChoice::Even,
                FlavorArg::Both => FlavorChoice::Both,
            },
            reduced: self.reduced,
            coeffs: self.coeffs.parse::<Coeffs>()?,
            assignment: match self.assignment {
                TypeArg::X => AssignmentType::X,
                TypeArg::Y => AssignmentType::Y,
            },
            basepoint: self.basepoint,
            arrows: None,
            cap: self.cap,
        })
    }
}

fn subjects(cli: &Cli, sel: &Select) -> CliResult<Vec<Subject>> {
    let mut out = vec![];
    for (i, text) in sel.pds.iter().enumerate() {
        let name = if sel.pds.len() == 1 { "pd".to_string() } else { format!("pd{}", i + 1) };
        out.push(Subject::from_pd(&name, parse_pd(text)?));
    }
    if !sel.knots.is_empty() || sel.all || out.is_empty() {
        let table = KnotTable::resolve(cli.table.as_deref())?;
        let keep = |r: &&oddkh::table::KnotRecord| {
            sel.min_crossings.is_none_or(|k| r.crossings() >= k)
                && sel.max_crossings.is_none_or(|k| r.crossings() <= k)
                && (!sel.alternating_only || r.alternating == Some(true))
                && (!sel.non_alternating_only || r.alternating == Some(false))
        };
        if !sel.knots.is_empty() {
            for name in &sel.knots {
                let r = table.get(name).ok_or_else(|| Failure::Input(format!("no knot named {name:?}")))?;
                out.push(Subject::from_record(r)?);
            }
        } else if sel.all || out.is_empty() {
            if !sel.all && sel.min_crossings.is_none() && sel.max_crossings.is_none() {
                return Err(Failure::Input("give --knot, --pd, --all or a crossing range".into()));
            }
            for r in table.records().iter().filter(keep) {
                out.push(Subject::from_record(r)?);
            }
        }
    }
    Ok(out)
}

fn single(cli: &Cli, sel: &Select) -> CliResult<Subject> {
    let mut s = subjects(cli, sel)?;
    if s.len() != 1 {
        return Err(Failure::Input(format!("expected exactly one diagram, got {}", s.len())));
    }
    Ok(s.remove(0))
}

fn human_bytes(bytes: u128) -> String {
    let mut x = bytes as f64;
    for unit in ["B", "KiB", "MiB", "GiB"] {
        if x < 1024.0 {
            return format!("{x:.1} {unit}");
        }
        x /= 1024.0;
    }
    format!("{x:.1} TiB")
}

fn cap_message(pd: &PdCode, cap: usize) -> String {
    let (gens, bytes) = estimate_size(pd);
    format!(
        "{} crossings exceeds the cap of {cap}; the complex would have about {gens} generators \
         (~{}); raise --cap to proceed",
        pd.num_crossings(),
        human_bytes(bytes)
    )
}

fn with_cap<T>(s: &Subject, cfg: &RunConfig, r: oddkh::Result<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        Error::ResourceLimit { .. } => Failure::Resource(format!("{}: {}", s.name, cap_message(&s.pd, cfg.cap))),
        e => Failure::from(e),
    })
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_compute(cli: &Cli, a: &ComputeArgs) -> CliResult<()> {
    let cfg = a.config.run_config()?;
    let subjects = subjects(cli, &a.select)?;
    let results: Vec<_> =
        subjects.par_iter().map(|s| with_cap(s, &cfg, compute(&s.name, &s.pd, &cfg))).collect::<CliResult<_>>()?;
    let results: Vec<_> = results.into_iter().flatten().collect();
    match a.config.format {
        Format::Json => print_json(&Value::Array(results.iter().map(|r| r.to_json()).collect())),
        Format::Text => {
            for r in &results {
                print!("{r}");
            }
        }
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> CliResult<()> {
    let cfg = a.config.run_config()?;
    let subjects = subjects(cli, &a.select)?;
    if let Some(edge) = a.corrupt_edge {
        for s in &subjects {
            let prep = with_cap(s, &cfg, Prepared::new(&s.name, &s.pd, &cfg))?;
            let mut eps = prep.setup.assignment.clone();
            let v = eps.values.get_mut(edge).ok_or_else(|| Failure::Input(format!("{} has no edge {edge}", s.name)))?;
            *v = -*v;
            if let Some(w) = check_assignment(&prep.setup, &eps) {
                let report = json!({"knot": s.name, "check": "assignment", "witness": w});
                return Err(Failure::Verification(serde_json::to_string(&report).expect("serializable")));
            }
        }
        return Ok(());
    }
    let checks: Vec<Check> = if a.checks.is_empty() {
        Check::DEFAULT.to_vec()
    } else {
        a.checks.iter().map(|c| c.parse()).collect::<oddkh::Result<_>>()?
    };
    let outcomes: Vec<_> =
        subjects.par_iter().map(|s| with_cap(s, &cfg, verify_subject(s, &checks, &cfg))).collect::<CliResult<_>>()?;
    let names: Vec<String> = checks.iter().map(|c| c.to_string()).collect();
    let failures: Vec<_> = outcomes.into_iter().flatten().collect();
    match a.config.format {
        Format::Json => print_json(&json!({
            "checked": subjects.len(),
            "checks": names,
            "failures": failures,
        })),
        Format::Text => {
            println!("{} diagrams, checks: {}", subjects.len(), names.join(", "));
            if failures.is_empty() {
                println!("all passed");
            }
        }
    }
    match failures.first() {
        None => Ok(()),
        Some(f) => Err(Failure::Verification(serde_json::to_string(f).expect("serializable"))),
    }
}

fn cmd_compare(cli: &Cli, a: &CompareArgs) -> CliResult<()> {
    let cfg = a.config.run_config()?;
    let subjects = subjects(cli, &a.select)?;
    let rows: Vec<_> = subjects.par_iter().map(|s| with_cap(s, &cfg, compare(s, &cfg))).collect::<CliResult<_>>()?;
    let shown: Vec<_> = rows.iter().filter(|r| a.show_thin || !r.both_thin()).collect();
    match a.config.format {
        Format::Json => print_json(&serde_json::to_value(&shown).expect("serializable")),
        Format::Text => {
            let thin = |t: Option<bool>| match t {
                Some(true) => "thin",
                Some(false) => "thick",
                None => "?",
            };
            println!("{:<10} {:>5} {:>5}  {:<6} {:<6}", "knot", "odd", "even", "odd", "even");
            for r in &shown {
                println!(
                    "{:<10} {:>5} {:>5}  {:<6} {:<6}",
                    r.knot,
                    r.odd_rank,
                    r.even_rank,
                    thin(r.odd_thin),
                    thin(r.even_thin)
                );
            }
            let hidden = rows.len() - shown.len();
            if hidden > 0 {
                println!("({hidden} knots with both theories thin not shown)");
            }
        }
    }
    Ok(())
}

fn cmd_invariance(cli: &Cli, a: &InvarianceArgs) -> CliResult<()> {
    let cfg = a.config.run_config()?;
    let subjects = subjects(cli, &a.select)?;
    if subjects.len() < 2 {
        return Err(Failure::Input("invariance needs at least two diagrams".into()));
    }
    for s in &subjects {
        if s.pd.num_crossings() > cfg.cap {
            return Err(Failure::Resource(format!("{}: {}", s.name, cap_message(&s.pd, cfg.cap))));
        }
    }
    match invariance(&subjects, &cfg)? {
        None => {
            println!("{} diagrams agree", subjects.len());
            Ok(())
        }
        Some(diff) => Err(Failure::Verification(serde_json::to_string(&diff).expect("serializable"))),
    }
}

fn cmd_dump_cube(cli: &Cli, a: &DumpArgs) -> CliResult<()> {
    let cfg = a.config.run_config()?;
    let s = single(cli, &a.select)?;
    let prep = with_cap(&s, &cfg, Prepared::new(&s.name, &s.pd, &cfg))?;
    let setup = &prep.setup;
    let [ta, tc, tx, ty] = setup.cube.count_types();
    print_json(&json!({
        "knot": s.name,
        "pd": s.pd.to_string(),
        "signs": setup.diagram.signs(),
        "face_counts": {"A": ta, "C": tc, "X": tx, "Y": ty},
        "cube": setup.cube.to_json(),
        "assignment": assignment_json(&setup.cube, &setup.assignment),
    }));
    Ok(())
}

fn cmd_dump_complex(cli: &Cli, a: &DumpArgs) -> CliResult<()> {
    let cfg = a.config.run_config()?;
    let s = single(cli, &a.select)?;
    let prep = with_cap(&s, &cfg, Prepared::new(&s.name, &s.pd, &cfg))?;
    let flavor = match a.config.flavor {
        FlavorArg::Odd => Flavor::Odd,
        FlavorArg::Even => Flavor::Even,
        FlavorArg::Both => return Err(Failure::Input("dump-complex takes one flavor".into())),
    };
    let p = if cfg.reduced { Some(cfg.basepoint.map_or_else(|| prep.default_basepoint(), Ok)?) } else { None };
    let c = prep.complex(flavor, p)?;
    print_json(&json!({"knot": s.name, "complex": c.to_json()}));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(&cli, a),
        Command::Verify(a) => cmd_verify(&cli, a),
        Command::Compare(a) => cmd_compare(&cli, a),
        Command::Invariance(a) => cmd_invariance(&cli, a),
        Command::DumpCube(a) => cmd_dump_cube(&cli, a),
        Command::DumpComplex(a) => cmd_dump_complex(&cli, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
