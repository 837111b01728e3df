use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dunkl_core::identities::{run_oracle_suite, OracleReport, REGISTRY};
use dunkl_core::oracle::{numeric_check_pairs, Domain, OracleConfig};
use dunkl_core::{
    parse_expr, parse_tree, pretty, run_suite_with, CheckReport, Error, FieldCtx, Filter, Mutation, OpExpr, Status,
    SuiteOptions, DEFAULT_MAX_K,
};

mod klist;

#[derive(Parser)]
#[command(name = "dunkl", version, about = "Exact checks for dihedral Dunkl operator identities")]
struct Cli {
    /// Largest admissible k.
    #[arg(long, global = true, env = "DUNKL_MAX_K", default_value_t = DEFAULT_MAX_K)]
    max_k: usize,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the identity suite.
    Verify(VerifyArgs),
    /// List registered checks.
    List,
    /// Print the normal form of an operator, e.g. `--op Dphi`.
    Show {
        #[arg(long)]
        op: String,
        #[arg(long)]
        k: usize,
    },
    /// Normal form of an expression.
    Norm {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        k: usize,
    },
    /// Commutator `[A, B]`.
    Commute {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        k: usize,
    },
    /// Formal adjoint.
    Adjoint {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        k: usize,
    },
    /// Projection onto the identity representation.
    Project {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        k: usize,
    },
    /// Numeric comparison of two expressions at random points.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct VerifyArgs {
    /// Values of k: ranges `1..6` or `1..=6`, lists `1,3,5`, or a mix.
    #[arg(long, default_value = "1..8")]
    k: String,
    /// `all`, `odd`, `even`, or comma-separated check id prefixes.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    json: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also run the numeric oracle on every check.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = OracleConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = OracleConfig::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = OracleConfig::default().trials)]
    trials: usize,
    /// Perturb one builder coefficient, see `list`.
    #[arg(long)]
    mutate: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(allow_hyphen_values = true)]
    lhs: String,
    #[arg(allow_hyphen_values = true)]
    rhs: String,
    #[arg(long)]
    k: usize,
    /// Compare on invariant test functions after projecting the left side.
    #[arg(long)]
    project: bool,
    #[arg(long, default_value_t = OracleConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = OracleConfig::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = OracleConfig::default().trials)]
    trials: usize,
}

/// Validated settings for `verify`.
struct RunConfig {
    k_list: Vec<usize>,
    suite_filter: Filter,
    output: Format,
    oracle: Option<OracleConfig>,
    options: SuiteOptions,
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Core(Error, Option<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e, None)
    }
}

type CmdResult = Result<bool, Failure>;

fn oracle_config(seed: u64, tol: f64, trials: usize) -> Result<OracleConfig, Failure> {
    if trials < 1 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    Ok(OracleConfig { seed, tol, trials, ..OracleConfig::default() })
}

impl RunConfig {
    fn from_args(a: &VerifyArgs, max_k: usize) -> Result<RunConfig, Failure> {
        let k_list = klist::parse(&a.k, max_k).map_err(Failure::Usage)?;
        let mutation = a.mutate.as_deref().map(str::parse::<Mutation>).transpose()?;
        let output = a.format.unwrap_or(if a.json { Format::Json } else { Format::Text });
        let cfg = oracle_config(a.seed, a.tol, a.trials)?;
        Ok(RunConfig {
            k_list,
            suite_filter: Filter::parse(&a.suite)?,
            output,
            oracle: a.oracle.then_some(cfg),
            options: SuiteOptions { mutation, max_k },
            out: a.out.clone(),
        })
    }
}

fn render_text(reports: &[CheckReport], oracle: &[OracleReport]) -> String {
    let mut s = String::new();
    s.push_str(&format!("{:>3}  {:<28} {:<8} {:>6} {:>8}\n", "k", "check", "status", "terms", "ms"));
    for r in reports {
        s.push_str(&format!(
            "{:>3}  {:<28} {:<8} {:>6} {:>8}\n",
            r.k,
            r.check_id,
            r.status.as_str(),
            r.residual_term_count,
            r.elapsed_ms
        ));
        if r.status == Status::Fail {
            s.push_str(&format!("       first residual term: {}\n", r.residual_sample));
        }
    }
    if !oracle.is_empty() {
        s.push_str(&format!("\n{:>3}  {:<28} {:<8} {:>12} {:>9}\n", "k", "oracle", "status", "max_dev", "deviating"));
        for r in oracle {
            s.push_str(&format!(
                "{:>3}  {:<28} {:<8} {:>12.3e} {:>5}/{}\n",
                r.k,
                r.check_id,
                r.status.as_str(),
                r.max_deviation,
                r.deviating_trials,
                r.trials
            ));
        }
    }
    let fails = reports.iter().filter(|r| r.status == Status::Fail).count()
        + oracle.iter().filter(|r| r.status == Status::Fail).count();
    let passes = reports.iter().filter(|r| r.status == Status::Pass).count();
    let skips = reports.iter().filter(|r| r.status == Status::Skipped).count();
    s.push_str(&format!("\n{passes} pass, {fails} fail, {skips} skipped\n"));
    s
}

fn render_json(reports: &[CheckReport], oracle: Option<&[OracleReport]>) -> String {
    let v = match oracle {
        None => serde_json::to_value(reports).expect("reports serialize"),
        Some(o) => serde_json::json!({ "reports": reports, "oracle": o }),
    };
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

fn cmd_verify(cfg: RunConfig) -> CmdResult {
    let reports = run_suite_with(&cfg.k_list, &cfg.suite_filter, &cfg.options)?;
    let oracle = match &cfg.oracle {
        Some(o) => Some(run_oracle_suite(&cfg.k_list, &cfg.suite_filter, &cfg.options, o)?),
        None => None,
    };
    let text = match cfg.output {
        Format::Text => render_text(&reports, oracle.as_deref().unwrap_or(&[])),
        Format::Json => render_json(&reports, oracle.as_deref()),
    };
    match &cfg.out {
        Some(path) => fs::write(path, &text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    let mut ok = true;
    for r in reports.iter().filter(|r| r.status == Status::Fail) {
        ok = false;
        if r.check_id.starts_with("integral_commutes") {
            eprintln!("!!! integral_commutes FAILED at k={}", r.k);
            eprintln!("!!! {} residual terms, first: {}", r.residual_term_count, r.residual_sample);
        }
    }
    ok &= oracle.iter().flatten().all(|r| r.status != Status::Fail);
    Ok(ok)
}

fn context(k: usize, max_k: usize) -> Result<Arc<FieldCtx>, Failure> {
    Ok(Arc::new(FieldCtx::with_max(k, max_k)?))
}

fn parse_at(text: &str, ctx: &Arc<FieldCtx>) -> Result<OpExpr, Failure> {
    parse_expr(text, ctx).map_err(|e| Failure::Core(e, Some(text.to_string())))
}

fn print_op(x: &OpExpr) -> CmdResult {
    println!("{}", pretty(x));
    Ok(true)
}

fn cmd_oracle(a: &OracleArgs, max_k: usize) -> CmdResult {
    let ctx = context(a.k, max_k)?;
    let cfg = oracle_config(a.seed, a.tol, a.trials)?;
    let tree = |t: &str| parse_tree(t, &ctx).map_err(|e| Failure::Core(e, Some(t.to_string())));
    let (mut lhs, rhs) = (tree(&a.lhs)?, tree(&a.rhs)?);
    let domain = if a.project {
        lhs = lhs.eval(&ctx)?.project_identity().into();
        Domain::Invariant
    } else {
        Domain::General
    };
    let rep = numeric_check_pairs(&[(lhs, rhs, domain)], &ctx, &cfg);
    println!(
        "{} trials={} max_deviation={:.3e} deviating={} tol={:e}",
        if rep.pass { "pass" } else { "fail" },
        rep.trials,
        rep.max_deviation,
        rep.deviating_trials,
        cfg.tol
    );
    Ok(rep.pass)
}

fn cmd_list() -> CmdResult {
    println!("{:<22} {:<10} mutation", "check", "applies");
    for c in REGISTRY.iter() {
        let parity = match c.parity {
            dunkl_core::identities::Parity::Any => "any k".to_string(),
            dunkl_core::identities::Parity::Odd => "odd k".to_string(),
            dunkl_core::identities::Parity::Even => "even k".to_string(),
            dunkl_core::identities::Parity::Only(k) => format!("k = {k}"),
        };
        println!("{:<22} {:<10} {}", c.id, parity, c.target);
    }
    Ok(true)
}

fn run(cli: Cli) -> CmdResult {
    let max_k = cli.max_k;
    match cli.cmd {
        Cmd::Verify(a) => cmd_verify(RunConfig::from_args(&a, max_k)?),
        Cmd::List => cmd_list(),
        Cmd::Show { op, k } => print_op(&parse_at(&op, &context(k, max_k)?)?),
        Cmd::Norm { expr, k } => print_op(&parse_at(&expr, &context(k, max_k)?)?),
        Cmd::Commute { a, b, k } => {
            let ctx = context(k, max_k)?;
            print_op(&parse_at(&a, &ctx)?.commutator(&parse_at(&b, &ctx)?)?)
        }
        Cmd::Adjoint { expr, k } => print_op(&parse_at(&expr, &context(k, max_k)?)?.adjoint()),
        Cmd::Project { expr, k } => print_op(&parse_at(&expr, &context(k, max_k)?)?.project_identity()),
        Cmd::Oracle(a) => cmd_oracle(&a, max_k),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            let mut err = std::io::stderr().lock();
            match f {
                Failure::Usage(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                }
                Failure::Core(e, src) => {
                    let _ = writeln!(err, "error: {e}");
                    if let (Error::Parse { pos, .. }, Some(src)) = (&e, src) {
                        let _ = writeln!(err, "  {src}\n  {}^", " ".repeat(*pos));
                    }
                }
            }
            ExitCode::from(2)
        }
    }
}
