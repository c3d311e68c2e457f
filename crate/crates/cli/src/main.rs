//! `fracspl`: scenario runner and verification front-end.
//!
//! Exit codes: 0 ok, 1 usage/config, 2 numerical convergence or solver
//! failure, 3 validation regression, 4 property failure.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracspl_core::crossval::cross_validate;
use fracspl_core::mittag::{mml, MlQuery, SeriesControl};
use fracspl_core::rothe::RotheRun;
use fracspl_core::scenario::ScenarioConfig;
use fracspl_core::spectral::SpectralModel;
use fracspl_core::verify::{self, Fault, Suite};
use fracspl_core::Error;

use output::CsvTable;

const EXIT_USAGE: u8 = 1;
const EXIT_CONVERGENCE: u8 = 2;
const EXIT_REGRESSION: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

#[derive(Parser)]
#[command(name = "fracspl", version, about = "Fractional single-phase-lag heat equation solvers")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON document.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for the randomised property suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory (overrides output.directory of the scenario).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a (multinomial) Mittag-Leffler function.
    MlEval {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alphas: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        zs: Vec<f64>,
    },
    /// Spectral solution on the scenario's evaluation grid (u.csv, dtu.csv, norms.csv).
    Spectral,
    /// Rothe solve (trajectory.csv, ledger.csv); defaults to the finest refinement.
    Rothe {
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        elements: Option<usize>,
    },
    /// Rothe against spectral over the refinement list (error_table.csv).
    CrossValidate,
    /// Property suites: fracops, mittag, spectral, rothe or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Deliberate defect: none or increasing-kernel.
        #[arg(long, default_value = "none")]
        inject_fault: String,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_convergence() || matches!(e, Error::Solver { .. }) {
            EXIT_CONVERGENCE
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("fracspl: {}", f.message);
        return ExitCode::from(f.code);
    }
    let result = match &cli.command {
        Command::MlEval { alphas, beta, zs } => ml_eval(alphas, *beta, zs),
        Command::Spectral => spectral(&cli.common),
        Command::Rothe { steps, elements } => rothe(&cli.common, *steps, *elements),
        Command::CrossValidate => cross_validate_cmd(&cli.common),
        Command::Verify { suite, inject_fault } => verify_cmd(&cli.common, suite, inject_fault),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("fracspl: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("FRACSPL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::usage(format!("FRACSPL_THREADS must be a positive integer, got \"{raw}\"")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(format!("cannot configure thread pool: {e}")))
}

fn load(common: &Common) -> Result<(ScenarioConfig, PathBuf), Failure> {
    let path = common
        .config
        .as_deref()
        .ok_or_else(|| Failure::usage("this subcommand needs --config PATH"))?;
    let cfg = ScenarioConfig::from_path(path)?;
    let out = common.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    Ok((cfg, out))
}

fn io(e: String) -> Failure {
    Failure::usage(e)
}

fn ml_eval(alphas: &[f64], beta: f64, zs: &[f64]) -> Outcome {
    let query = MlQuery::new(alphas.to_vec(), beta, zs.to_vec()).map_err(|e| Failure::usage(e.to_string()))?;
    let e = mml(&query, SeriesControl::default())?;
    println!(
        "{:?} terms_used={} tail_estimate={:e} error_estimate={:e} method={}",
        e.value,
        e.terms_used,
        e.tail_estimate,
        e.error_estimate,
        e.method.as_str()
    );
    Ok(0)
}

fn spectral(common: &Common) -> Outcome {
    let (cfg, out) = load(common)?;
    let spec = cfg.spectral_config()?;
    let prob = &cfg.problem;
    let len = prob.length;
    if !prob.source.is_zero() {
        eprintln!("fracspl: warning: the spectral solution ignores the source term");
    }
    let model = SpectralModel::from_fns(spec, |x| prob.u0.eval(x, len), |x| prob.v0.eval(x, len))?;
    let (xs, ts) = cfg.spectral_eval_grid();
    let sol = model.solve(&xs, &ts)?;
    for w in &sol.warnings {
        eprintln!("fracspl: warning: {w}");
    }
    let p = cfg.output.precision;
    let mut u = CsvTable::create(&out, "u.csv", &["x", "t", "u"], p).map_err(io)?;
    let mut dtu = CsvTable::create(&out, "dtu.csv", &["x", "t", "dtu"], p).map_err(io)?;
    let mut norms = CsvTable::create(&out, "norms.csv", &["t", "u_norm", "dtu_norm"], p).map_err(io)?;
    for (it, &t) in sol.ts.iter().enumerate() {
        for (ix, &x) in sol.xs.iter().enumerate() {
            u.row(&[], &[x, t, sol.u[it][ix]]).map_err(io)?;
            dtu.row(&[], &[x, t, sol.dtu[it][ix]]).map_err(io)?;
        }
        norms.row(&[], &[t, sol.u_norm[it], sol.dtu_norm[it]]).map_err(io)?;
    }
    for table in [u, dtu, norms] {
        println!("wrote {}", table.finish().map_err(io)?.display());
    }
    Ok(0)
}

fn rothe(common: &Common, steps: Option<usize>, elements: Option<usize>) -> Outcome {
    let (cfg, out) = load(common)?;
    let (n_last, m_last) = *cfg.refinements().last().expect("validated non-empty");
    let (n, m) = (steps.unwrap_or(n_last), elements.unwrap_or(m_last));
    let prob = &cfg.problem;
    let len = prob.length;
    let mesh = cfg.mesh(m)?;
    let grid = cfg.grid(n)?;
    let xs = mesh.nodes();
    let u0 = prob.u0.sample(&xs, len);
    let v0 = prob.v0.sample(&xs, len);
    let source = prob.source.clone();
    let mut run = RotheRun::new(cfg.model_params()?, mesh, grid, &u0, &v0, move |x, _| source.eval(x, len))?;
    run.run()?;
    let p = cfg.output.precision;
    let mut traj = CsvTable::create(&out, "trajectory.csv", &["t", "x", "u", "delta_u"], p).map_err(io)?;
    for i in 0..=n {
        let t = grid.node(i);
        let (u, du) = (run.u_full(i), run.du_full(i));
        for (j, &x) in xs.iter().enumerate() {
            traj.row(&[], &[t, x, u[j], du[j]]).map_err(io)?;
        }
    }
    let header = fracspl_core::rothe::LedgerRow::HEADER;
    let mut ledger = CsvTable::create(&out, "ledger.csv", &header, p).map_err(io)?;
    for row in run.ledger().rows() {
        ledger.row(&[row.j], &row.values()).map_err(io)?;
    }
    println!("wrote {}", traj.finish().map_err(io)?.display());
    println!("wrote {}", ledger.finish().map_err(io)?.display());
    let l = run.ledger();
    println!(
        "n={n} M={m} max_weak_form_residual={:e} young_bound={} energy_bound={}",
        l.max_vfi_residual(),
        if l.young_holds(1e-12) { "ok" } else { "violated" },
        if l.energy_bound_holds(1e-12) { "ok" } else { "violated" },
    );
    Ok(0)
}

fn cross_validate_cmd(common: &Common) -> Outcome {
    let (cfg, out) = load(common)?;
    let report = cross_validate(&cfg)?;
    let mut table =
        CsvTable::create(&out, "error_table.csv", &["n", "M", "max_l2_error"], cfg.output.precision).map_err(io)?;
    for r in &report.rows {
        table.row(&[r.steps, r.elements], &[r.max_l2_error]).map_err(io)?;
        println!("n={:<6} M={:<6} max_l2_error={:e}", r.steps, r.elements, r.max_l2_error);
    }
    println!("wrote {}", table.finish().map_err(io)?.display());
    if report.is_monotone() {
        Ok(0)
    } else {
        eprintln!("fracspl: errors do not decrease monotonically under refinement");
        Ok(EXIT_REGRESSION)
    }
}

fn verify_cmd(common: &Common, suite: &str, fault: &str) -> Outcome {
    let suite: Suite = suite.parse().map_err(|e: Error| Failure::usage(usage_text(&e)))?;
    let fault: Fault = fault.parse().map_err(|e: Error| Failure::usage(usage_text(&e)))?;
    let report = verify::run(suite, common.seed, fault);
    print!("{report}");
    Ok(if report.all_passed() { 0 } else { EXIT_PROPERTY })
}

fn usage_text(e: &Error) -> String {
    format!(
        "{e}\nusage: fracspl verify [{}] [--seed N] [--inject-fault none|increasing-kernel]",
        Suite::NAMES.join("|")
    )
}
