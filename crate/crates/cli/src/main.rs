use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracvolterra_cli::config::{GronwallProfile, Identity, TestFunction};
use fracvolterra_cli::pipeline::{self, parse_psi, VerifyRequest};
use fracvolterra_cli::{CliError, Command, RunContext, Scenario};

#[derive(Debug, Parser)]
#[command(name = "fracvolterra", version, about = "Picard solutions and explicit bounds for psi-Hilfer Volterra problems")]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true, visible_aliases = ["problem", "profile"])]
    config: Option<PathBuf>,

    /// Directory receiving CSV files and summary.txt.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Seed for randomized scenarios.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Print E_alpha(z) with 15 significant digits.
    MlEval {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// Check a closed-form or composition identity of the discrete operators.
    Verify {
        #[arg(long, value_enum)]
        check: Option<Identity>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        xi: Option<f64>,
        /// identity, logarithm, power:<rho> or exponential:<sigma>
        #[arg(long)]
        psi: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        grading_q: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, value_enum)]
        function: Option<TestFunction>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Randomized enclosure of extremal solutions by the Gronwall-type bounds.
    Gronwall {
        #[arg(long, value_enum)]
        mode: Option<GronwallProfile>,
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Picard iteration for the configured problem.
    Solve {
        #[command(flatten)]
        solver: SolverFlags,
        /// Trace file name inside the output directory.
        #[arg(long)]
        out: Option<String>,
    },
    /// Compare a solved trace with one of the explicit estimates.
    Bounds {
        /// 3 or 4: a-priori; 7 or 8: perturbation; 9 or 10: parameter.
        #[arg(long)]
        theorem: u8,
        #[arg(long)]
        perturb: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<f64>,
        #[command(flatten)]
        solver: SolverFlags,
        #[arg(long)]
        out: Option<String>,
    },
    /// Two-solve perturbation experiment for each epsilon.
    Depend {
        #[arg(long)]
        perturb: Vec<f64>,
        #[command(flatten)]
        solver: SolverFlags,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run several scenarios concurrently, each into its own subdirectory.
    Batch {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
struct SolverFlags {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

fn load(path: &Option<PathBuf>) -> Result<Scenario, CliError> {
    match path {
        Some(p) => Scenario::load(p),
        None => Err(CliError::Config { path: "--config".into(), message: "a scenario file is required".into() }),
    }
}

fn with_solver(mut s: Scenario, flags: &SolverFlags) -> Result<Scenario, CliError> {
    if let Some(tol) = flags.tol {
        s.config.solver.tol = tol;
    }
    if let Some(max_iter) = flags.max_iter {
        s.config.solver.max_iter = max_iter;
    }
    s.config.validate()?;
    Ok(s)
}

fn verify_request(cli: &Cli, s: Option<&Scenario>) -> Result<VerifyRequest, CliError> {
    let Sub::Verify { check, alpha, beta, xi, psi, n, grading_q, a, b, function, tolerance } = &cli.command else {
        unreachable!()
    };
    let flag = |field: &str, msg: String| CliError::Config { path: format!("--{field}"), message: msg };
    let psi = psi.as_deref().map(parse_psi).transpose().map_err(|m| flag("psi", m))?;
    let mut req = match s {
        Some(s) if s.config.verify.is_some() => VerifyRequest::from_scenario(s)?,
        _ => {
            let check = check.ok_or_else(|| flag("check", "required without a [verify] scenario".into()))?;
            VerifyRequest::defaults(check, psi.clone().unwrap_or(fracvolterra::PsiFunction::Identity))
        }
    };
    let overridden = check.is_some() || alpha.is_some() || beta.is_some() || xi.is_some() || psi.is_some();
    let overridden = overridden || n.is_some() || grading_q.is_some() || a.is_some() || b.is_some() || function.is_some();
    if let Some(v) = *check {
        req.identity = v;
    }
    if let Some(p) = psi {
        req.psi = p;
    }
    macro_rules! set {
        ($($f:ident),*) => { $(if let Some(v) = *$f { req.$f = v; })* };
    }
    set!(alpha, beta, xi, n, grading_q, a, b, function);
    if tolerance.is_some() {
        req.tolerance = *tolerance;
    }
    if overridden {
        req.config_hash = None;
    }
    Ok(req)
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let ctx = RunContext { out_dir: cli.out_dir.clone(), seed: cli.seed };
    let outcome = match &cli.command {
        Sub::MlEval { alpha, z } => {
            println!("{}", pipeline::ml_eval(*alpha, *z)?);
            return Ok(pipeline::EXIT_OK);
        }
        Sub::Batch { configs } => {
            let items = pipeline::run_batch(configs, &ctx);
            let mut worst = pipeline::EXIT_OK;
            for item in &items {
                match &item.result {
                    Ok(o) => println!("{}: exit {}", item.name, o.code),
                    Err(e) => println!("{}: exit {} ({e})", item.name, e.exit_code()),
                }
                worst = worst.max(item.code());
            }
            return Ok(worst);
        }
        Sub::Verify { .. } => {
            let s = cli.config.as_deref().map(Scenario::load).transpose()?;
            let req = verify_request(cli, s.as_ref())?;
            let file = s.as_ref().map_or("verify.csv", |s| s.config.outputs.verify.as_str()).to_string();
            let mut o = pipeline::run_verify(&req, &file, &ctx)?;
            o.summary.line("exit_code", o.code);
            fracvolterra_cli::output::write_file(&ctx.out_dir, "summary.txt", &o.summary.text())?;
            o
        }
        Sub::Gronwall { mode, instances } => {
            let s = load(&cli.config)?;
            let cfg = s.config.gronwall;
            let mode = mode.or(cfg.and_then(|g| g.mode)).unwrap_or(GronwallProfile::Corollary1);
            let instances = instances.or(cfg.map(|g| g.instances)).unwrap_or(100);
            pipeline::run(&s, &Command::Gronwall { mode, instances }, &ctx)?
        }
        Sub::Solve { solver, out } => {
            let mut s = with_solver(load(&cli.config)?, solver)?;
            if let Some(out) = out {
                s.config.outputs.trace = out.clone();
            }
            pipeline::run(&s, &Command::Solve, &ctx)?
        }
        Sub::Bounds { theorem, perturb, offset, solver, out } => {
            let mut s = with_solver(load(&cli.config)?, solver)?;
            if let Some(out) = out {
                s.config.outputs.bounds = out.clone();
            }
            pipeline::run(&s, &Command::Bounds { theorem: *theorem, perturb: *perturb, offset: *offset }, &ctx)?
        }
        Sub::Depend { perturb, solver, out } => {
            let mut s = with_solver(load(&cli.config)?, solver)?;
            if let Some(out) = out {
                s.config.outputs.depend = out.clone();
            }
            pipeline::run(&s, &Command::Depend { perturb: perturb.clone() }, &ctx)?
        }
    };
    print!("{}", outcome.summary.text());
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
