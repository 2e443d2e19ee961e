//! The subcommand pipelines. Each writes its CSV files into the run directory
//! and returns a summary together with the exit code it implies.

use std::path::{Path, PathBuf};

use fracvolterra::analysis::{
    apriori_bound_integral, apriori_bound_ivp, c1_constant, c2_constant, check_bound, dependence_bound_integral,
    dependence_bound_ivp, integrated_sup, parameter_dependence_integral, parameter_dependence_ivp, BoundCheck,
    EstimateInputs,
};
use fracvolterra::bound::BoundCurve;
use fracvolterra::frac::{verify_composition, verify_lemma1, OperatorParams};
use fracvolterra::gronwall::{extremal_solve, ml_bound, nested_ml_bound, series_bound, GronwallData, GronwallMode};
use fracvolterra::registry::{shifted, Forcing};
use fracvolterra::solver::{
    contraction_certificate, solve, ContractionCertificate, IntegralProblem, IvpProblem,
    Problem, SolutionTrace,
};
use fracvolterra::special::mittag_leffler_detailed;
use fracvolterra::{Grid, GridFunction, Mesh, PsiFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{
    sha256_hex, GronwallProfile, Identity, ProblemKind, RunCommand, Scenario, TestFunction,
};
use crate::error::CliError;
use crate::output::{num, Cell, CsvTable, RunMeta, Summary};

/// Exit code of a run whose checks all hold.
pub const EXIT_OK: i32 = 0;
/// A requested check failed or a hypothesis is not met.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
/// Picard iteration did not converge.
pub const EXIT_DIVERGED: i32 = 3;

/// Relative slack of the Gronwall enclosure checks.
const GRONWALL_SLACK: f64 = 1e-9;
const LEMMA1_TOLERANCE: f64 = 1e-4;
const COMPOSITION_TOLERANCE: f64 = 1e-2;
/// Allowed spread of `sup|x - y|/ε` across the perturbation sizes.
const LINEARITY_FACTOR: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct RunContext {
    pub out_dir: PathBuf,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Summary,
    pub code: i32,
}

impl Outcome {
    fn new(summary: Summary, passed: bool) -> Self {
        Self { summary, code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED } }
    }
}

/// What to run for a scenario.
#[derive(Debug, Clone)]
pub enum Command {
    Verify(VerifyRequest),
    Gronwall { mode: GronwallProfile, instances: usize },
    Solve,
    Bounds { theorem: u8, perturb: Option<f64>, offset: Option<f64> },
    Depend { perturb: Vec<f64> },
}

impl Command {
    /// The pipeline named in `[run]`, or the one implied by the sections present.
    pub fn for_scenario(s: &Scenario) -> Result<Self, CliError> {
        let c = &s.config;
        let run = c.run.map(|r| (r.command, r.theorem));
        let command = match run {
            Some((cmd, _)) => cmd,
            None if c.verify.is_some() => RunCommand::Verify,
            None if c.gronwall.is_some() => RunCommand::Gronwall,
            None => RunCommand::Solve,
        };
        Ok(match command {
            RunCommand::Verify => Command::Verify(VerifyRequest::from_scenario(s)?),
            RunCommand::Gronwall => {
                let g = c.gronwall.as_ref();
                Command::Gronwall {
                    mode: g.and_then(|g| g.mode).unwrap_or(GronwallProfile::Corollary1),
                    instances: g.map_or(100, |g| g.instances),
                }
            }
            RunCommand::Solve => Command::Solve,
            RunCommand::Bounds => Command::Bounds {
                theorem: run.and_then(|r| r.1).unwrap_or(match c.problem.kind {
                    ProblemKind::Integral => 3,
                    ProblemKind::Ivp => 4,
                }),
                perturb: None,
                offset: None,
            },
            RunCommand::Depend => Command::Depend { perturb: Vec::new() },
        })
    }
}

/// Runs `command` for scenario `s` and saves the summary next to the CSV files.
pub fn run(s: &Scenario, command: &Command, ctx: &RunContext) -> Result<Outcome, CliError> {
    let mut outcome = match command {
        Command::Verify(req) => run_verify(req, &s.config.outputs.verify, ctx)?,
        Command::Gronwall { mode, instances } => run_gronwall(s, *mode, *instances, ctx)?,
        Command::Solve => run_solve(s, ctx)?,
        Command::Bounds { theorem, perturb, offset } => run_bounds(s, *theorem, *perturb, *offset, ctx)?,
        Command::Depend { perturb } => run_depend(s, perturb, ctx)?,
    };
    outcome.summary.line("exit_code", outcome.code);
    crate::output::write_file(&ctx.out_dir, &s.config.outputs.summary, &outcome.summary.text())?;
    Ok(outcome)
}

/// `identity`, `logarithm`, `power:<rho>` or `exponential:<sigma>`.
pub fn parse_psi(text: &str) -> Result<PsiFunction, String> {
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a.parse::<f64>().map_err(|e| format!("bad psi parameter `{a}`: {e}"))?)),
        None => (text, None),
    };
    match (name, arg) {
        ("identity", None) => Ok(PsiFunction::Identity),
        ("logarithm", None) => Ok(PsiFunction::Logarithm),
        ("power", Some(rho)) => Ok(PsiFunction::Power { rho }),
        ("exponential", Some(sigma)) => Ok(PsiFunction::Exponential { sigma }),
        _ => Err(format!("unknown psi `{text}`; expected identity, logarithm, power:<rho> or exponential:<sigma>")),
    }
}

fn psi_label(psi: &PsiFunction) -> String {
    psi.name().replace(' ', "")
}

fn scenario_meta(s: &Scenario, xi: Option<f64>, delta: Option<f64>) -> RunMeta {
    let c = &s.config;
    let ivp = c.problem.kind == ProblemKind::Ivp;
    RunMeta {
        config_hash: s.hash.clone(),
        alpha: c.problem.alpha,
        beta: if ivp { c.problem.beta } else { None },
        gamma: ivp.then(|| c.gamma()),
        xi,
        delta,
        psi: psi_label(&c.psi()),
    }
}

// ---------------------------------------------------------------- verify

/// Parameters of an identity check, from a scenario or from flags.
#[derive(Debug, Clone)]
pub struct VerifyRequest {
    pub identity: Identity,
    pub alpha: f64,
    pub beta: f64,
    pub xi: f64,
    pub psi: PsiFunction,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub grading_q: f64,
    pub function: TestFunction,
    pub tolerance: Option<f64>,
    pub config_hash: Option<String>,
}

impl VerifyRequest {
    /// Defaults for flag-driven runs: graded `N = 2048` grids, `q = 4` for the
    /// closed-form check and `q = 2` for the composition identities.
    pub fn defaults(identity: Identity, psi: PsiFunction) -> Self {
        let (a, b) = match psi {
            PsiFunction::Logarithm => (1.0, std::f64::consts::E),
            _ => (0.0, 1.0),
        };
        Self {
            identity,
            alpha: 0.5,
            beta: 0.0,
            xi: 1.0,
            psi,
            a,
            b,
            n: 2048,
            grading_q: if identity == Identity::Lemma1 { 4.0 } else { 2.0 },
            function: TestFunction::Square,
            tolerance: None,
            config_hash: None,
        }
    }

    pub fn from_scenario(s: &Scenario) -> Result<Self, CliError> {
        let c = &s.config;
        let Some(v) = c.verify else {
            return Err(CliError::Config { path: "verify".into(), message: "section required by this pipeline".into() });
        };
        Ok(Self {
            identity: v.identity,
            alpha: c.problem.alpha,
            beta: c.problem.beta.unwrap_or(0.0),
            xi: v.xi,
            psi: c.psi(),
            a: c.interval.a,
            b: c.interval.b,
            n: c.grid.n,
            grading_q: c.grid.grading_q,
            function: v.function,
            tolerance: v.tolerance,
            config_hash: Some(s.hash.clone()),
        })
    }

    pub fn mesh(&self) -> Result<Mesh, CliError> {
        let grid = if self.grading_q == 1.0 {
            Grid::uniform(self.a, self.b, self.n)
        } else {
            Grid::graded(self.a, self.b, self.n, self.grading_q)
        };
        Ok(Mesh::new(grid?, self.psi.clone())?)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(match self.identity {
            Identity::Lemma1 => LEMMA1_TOLERANCE,
            Identity::Composition => COMPOSITION_TOLERANCE,
        })
    }

    /// Residuals labelled by check name.
    pub fn residuals(&self) -> Result<Vec<(&'static str, f64)>, CliError> {
        let mesh = self.mesh()?;
        Ok(match self.identity {
            Identity::Lemma1 => vec![("lemma1", verify_lemma1(self.alpha, self.xi, &mesh)?)],
            Identity::Composition => {
                let params = OperatorParams::new(self.alpha, self.beta)?;
                let alpha = self.alpha;
                let x = match self.function {
                    TestFunction::Square => GridFunction::scalar(&mesh, |_, u| u * u),
                    TestFunction::MittagLeffler => {
                        let mut err = None;
                        let x = GridFunction::scalar(&mesh, |_, u| {
                            fracvolterra::mittag_leffler(alpha, u.powf(alpha)).unwrap_or_else(|e| {
                                err = Some(e);
                                f64::NAN
                            })
                        });
                        if let Some(e) = err {
                            return Err(e.into());
                        }
                        x
                    }
                };
                let (left, right) = verify_composition(&mesh, params, &x)?;
                vec![("composition_left", left), ("composition_right", right)]
            }
        })
    }

    fn meta(&self) -> RunMeta {
        let gamma = self.alpha + self.beta * (1.0 - self.alpha);
        RunMeta {
            config_hash: self.config_hash.clone().unwrap_or_else(|| sha256_hex(&format!("{self:?}"))),
            alpha: self.alpha,
            beta: Some(self.beta),
            gamma: Some(gamma),
            xi: Some(self.xi),
            delta: None,
            psi: psi_label(&self.psi),
        }
    }
}

pub fn run_verify(req: &VerifyRequest, file: &str, ctx: &RunContext) -> Result<Outcome, CliError> {
    let residuals = req.residuals()?;
    let tol = req.tolerance();
    let psi = psi_label(&req.psi);
    let mut table = CsvTable::new(&req.meta(), &["check", "alpha", "beta", "xi", "psi", "n", "residual"]);
    let mut summary = Summary::default();
    summary.line("command", "verify");
    summary.line("grid", format!("n={} grading_q={} interval=[{}, {}]", req.n, req.grading_q, req.a, req.b));
    summary.line("tolerance", num(tol));
    let mut passed = true;
    for (check, r) in &residuals {
        table.row(&[(*check).into(), req.alpha.into(), req.beta.into(), req.xi.into(), psi.as_str().into(), req.n.into(), (*r).into()]);
        let ok = *r <= tol;
        passed &= ok;
        summary.line(check, format!("residual={} {}", num(*r), verdict(ok)));
    }
    table.write(&ctx.out_dir, file)?;
    Ok(Outcome::new(summary, passed))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

// ---------------------------------------------------------------- ml-eval

/// `E_α(z)` to 15 significant digits, with the evaluation branch.
pub fn ml_eval(alpha: f64, z: f64) -> Result<String, CliError> {
    let v = mittag_leffler_detailed(alpha, z)?;
    let mut out = format!("{:.14e}", v.value);
    if v.degraded {
        out.push_str(" (degraded accuracy)");
    }
    Ok(out)
}

// ---------------------------------------------------------------- gronwall

/// Per-instance result of a randomized Gronwall run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallInstance {
    /// Largest `u*/bound` over the nodes.
    pub worst_ratio: f64,
    pub violations: usize,
}

struct GronwallCurves {
    t: Vec<f64>,
    u_star: Vec<f64>,
    series: Vec<f64>,
    closed: Vec<f64>,
    checked: Vec<f64>,
}

fn gronwall_curves(mut data: GronwallData, mode: GronwallProfile, terms: usize) -> Result<GronwallCurves, CliError> {
    if mode == GronwallProfile::Lemma4 {
        // the resolvent series is only an upper bound for kernels not exceeding 1
        data.r = data.r.map(|r| r.min(1.0));
    }
    let nan = || vec![f64::NAN; data.mesh.len()];
    let (u_star, series, closed) = match mode {
        GronwallProfile::Lemma4 | GronwallProfile::Corollary1 => {
            let series = match series_bound(&data, terms) {
                Ok(c) => c.values,
                Err(_) if mode == GronwallProfile::Corollary1 => nan(),
                Err(e) => return Err(e.into()),
            };
            (extremal_solve(&data, GronwallMode::Linear)?, series, ml_bound(&data)?.values)
        }
        GronwallProfile::Lemma5 => (extremal_solve(&data, GronwallMode::Nested)?, nan(), nested_ml_bound(&data)?.values),
    };
    let checked = if mode == GronwallProfile::Lemma4 { series.clone() } else { closed.clone() };
    Ok(GronwallCurves { t: data.mesh.t().to_vec(), u_star, series, closed, checked })
}

fn enclosure(u: &[f64], bound: &[f64]) -> GronwallInstance {
    let mut out = GronwallInstance { worst_ratio: 0.0, violations: 0 };
    for (&u, &b) in u.iter().zip(bound) {
        if !(u <= b * (1.0 + GRONWALL_SLACK)) {
            out.violations += 1;
        }
        if b > 0.0 {
            out.worst_ratio = out.worst_ratio.max(u / b);
        } else if u > 0.0 {
            out.worst_ratio = f64::INFINITY;
        }
    }
    out
}

pub fn run_gronwall(s: &Scenario, mode: GronwallProfile, instances: usize, ctx: &RunContext) -> Result<Outcome, CliError> {
    let c = &s.config;
    let terms = c.gronwall.map_or(fracvolterra::gronwall::SERIES_TERMS, |g| g.series_terms);
    let mesh = Mesh::new(c.grid()?, c.psi())?;
    let meta = scenario_meta(s, None, None);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut per_instance = CsvTable::new(&meta, &["instance", "worst_ratio", "violations"]);
    let mut results = Vec::with_capacity(instances);
    for k in 0..instances {
        let data = GronwallData::random(mesh.clone(), c.problem.alpha, &mut rng)?;
        let curves = gronwall_curves(data, mode, terms)?;
        if k == 0 {
            let mut table = CsvTable::new(&meta, &["t", "u_star", "bound_series", "bound_ml"]);
            for i in 0..curves.t.len() {
                table.row(&[curves.t[i].into(), curves.u_star[i].into(), curves.series[i].into(), curves.closed[i].into()]);
            }
            table.write(&ctx.out_dir, &c.outputs.gronwall)?;
        }
        let r = enclosure(&curves.u_star, &curves.checked);
        per_instance.row(&[k.into(), r.worst_ratio.into(), r.violations.into()]);
        results.push(r);
    }
    per_instance.write(&ctx.out_dir, &c.outputs.gronwall_summary)?;
    let violations: usize = results.iter().map(|r| r.violations).sum();
    let failing = results.iter().filter(|r| r.violations > 0).count();
    let worst = results.iter().map(|r| r.worst_ratio).fold(0.0, f64::max);
    let mut summary = Summary::default();
    summary.line("command", "gronwall");
    summary.line("mode", format!("{mode:?}").to_lowercase());
    summary.line("seed", ctx.seed);
    summary.line("instances", instances);
    summary.line("nodes", mesh.len());
    summary.line("failing_instances", failing);
    summary.line("node_violations", violations);
    summary.line("worst_ratio", num(worst));
    summary.line("enclosure", verdict(violations == 0));
    Ok(Outcome::new(summary, violations == 0))
}

// ---------------------------------------------------------------- solve

struct Solved {
    problem: Problem,
    trace: SolutionTrace,
    certificate: Option<ContractionCertificate>,
}

fn solve_scenario(s: &Scenario) -> Result<Solved, CliError> {
    let c = &s.config;
    let problem = c.build_problem()?;
    let trace = solve(&problem, c.grid()?, &c.solve_options())?;
    let delta = c.delta(problem.base().lipschitz.l);
    let certificate = if delta > 1.0 { Some(contraction_certificate(&problem, &trace.mesh, delta)?) } else { None };
    Ok(Solved { problem, trace, certificate })
}

/// The same problem form with another right-hand side.
fn with_base(problem: &Problem, base: IntegralProblem) -> Result<Problem, CliError> {
    Ok(match problem {
        Problem::Integral(_) => Problem::Integral(base),
        Problem::Ivp(p) => Problem::Ivp(IvpProblem::new(base, p.beta, p.x0.clone())?),
    })
}

fn solve_with(s: &Scenario, problem: &Problem) -> Result<SolutionTrace, CliError> {
    Ok(solve(problem, s.config.grid()?, &s.config.solve_options())?)
}

fn describe_solve(summary: &mut Summary, solved: &Solved) {
    let base = solved.problem.base();
    summary.line("form", match solved.problem {
        Problem::Integral(_) => "integral",
        Problem::Ivp(_) => "ivp",
    });
    summary.line("lipschitz", format!("M={} L={}", num(base.lipschitz.m), num(base.lipschitz.l)));
    match &solved.certificate {
        Some(cert) => {
            let q = cert.q_for(&solved.problem);
            summary.line("certificate", format!(
                "delta={} xi={} q={} contractive={} d={} d_finite={}",
                num(cert.delta),
                num(cert.xi),
                num(q),
                q < 1.0,
                num(cert.d),
                cert.d_finite
            ));
        }
        None => summary.line("certificate", "unavailable (xi does not exceed L)"),
    }
    let tr = &solved.trace;
    summary.line("xi", num(tr.xi));
    summary.line("iterations", tr.iterations());
    summary.line("converged", tr.converged);
    summary.line("residual", num(tr.residual));
    let max_ratio = tr.ratios().into_iter().skip(1).fold(0.0, f64::max);
    summary.line("max_ratio_after_first", num(max_ratio));
    if tr.singular_endpoint {
        summary.line("singular_endpoint", "first row holds the weighted limit x0/Gamma(gamma)");
    }
}

fn certificate_meta(s: &Scenario, solved: &Solved) -> RunMeta {
    scenario_meta(s, Some(solved.trace.xi), solved.certificate.map(|c| c.delta))
}

pub fn run_solve(s: &Scenario, ctx: &RunContext) -> Result<Outcome, CliError> {
    let solved = solve_scenario(s)?;
    let c = &s.config;
    let tr = &solved.trace;
    let meta = certificate_meta(s, &solved);
    let dim = tr.values.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|k| format!("x_{k}")));
    header.extend(["weight".to_string(), "weighted_value".to_string()]);
    let mut trace = CsvTable::with_columns(&meta, header);
    let weights = tr.space()?.weights(&tr.mesh)?;
    let norms = tr.values.norms();
    for i in 0..tr.mesh.len() {
        let mut row: Vec<Cell> = vec![tr.mesh.t()[i].into()];
        row.extend(tr.values.node(i).iter().map(|&v| Cell::Num(v)));
        row.extend([Cell::Num(weights[i]), Cell::Num(norms[i] / weights[i])]);
        trace.row(&row);
    }
    trace.write(&ctx.out_dir, &c.outputs.trace)?;
    let mut conv = CsvTable::new(&meta, &["iter", "d_xi_inf", "ratio"]);
    for (k, &d) in tr.history.iter().enumerate() {
        let ratio = if k == 0 { f64::NAN } else { d / tr.history[k - 1] };
        conv.row(&[(k + 1).into(), d.into(), ratio.into()]);
    }
    conv.write(&ctx.out_dir, &c.outputs.convergence)?;
    let mut summary = Summary::default();
    summary.line("command", "solve");
    describe_solve(&mut summary, &solved);
    let code = if tr.converged { EXIT_OK } else { EXIT_DIVERGED };
    Ok(Outcome { summary, code })
}

// ---------------------------------------------------------------- bounds

fn require_form(problem: &Problem, theorem: u8) -> Result<(), CliError> {
    let want_ivp = matches!(theorem, 4 | 8 | 10);
    if want_ivp != matches!(problem, Problem::Ivp(_)) {
        return Err(CliError::Config {
            path: "problem.kind".into(),
            message: format!("theorem {theorem} needs kind = \"{}\"", if want_ivp { "ivp" } else { "integral" }),
        });
    }
    Ok(())
}

fn contraction_constant(m: f64) -> Result<(), CliError> {
    if !(0.0..1.0).contains(&m) {
        return Err(CliError::Hypothesis(format!("the integral-form estimates need M < 1, got {m}")));
    }
    Ok(())
}

fn sup_abs(mesh: &Mesh, w: Forcing, alpha: f64) -> f64 {
    mesh.u().iter().map(|&u| w.eval(u, alpha).abs()).fold(0.0, f64::max)
}

fn sample(mesh: &Mesh, w: Forcing, alpha: f64) -> GridFunction {
    GridFunction::scalar(mesh, |_, u| w.eval(u, alpha))
}

fn difference(x: &SolutionTrace, y: &SolutionTrace) -> Result<GridFunction, CliError> {
    Ok(x.values.sub(&y.values)?)
}

struct BoundRun {
    value: GridFunction,
    curve: BoundCurve,
    check: BoundCheck,
    notes: Vec<(String, String)>,
    /// Every solve involved converged.
    converged: bool,
}

fn all_converged(traces: &[&SolutionTrace]) -> bool {
    traces.iter().all(|t| t.converged)
}

fn perturbation_run(s: &Scenario, solved: &Solved, eps: f64) -> Result<BoundRun, CliError> {
    let base = solved.problem.base();
    let alpha = base.alpha;
    let mesh = &solved.trace.mesh;
    let w: Forcing = s.config.depend.clone().unwrap_or_default().perturbation.into();
    let perturbed = with_base(&solved.problem, shifted(base, eps, w)?)?;
    let y = solve_with(s, &perturbed)?;
    let mut inputs = EstimateInputs::constant(mesh, base.lipschitz.m, base.lipschitz.l);
    let mut notes = vec![("epsilon".to_string(), num(eps))];
    let curve = match solved.problem {
        Problem::Integral(_) => {
            contraction_constant(base.lipschitz.m)?;
            inputs.epsilon1 = eps * sup_abs(mesh, w, alpha);
            notes.push(("epsilon1".into(), num(inputs.epsilon1)));
            notes.push(("note".into(), "Mittag-Leffler argument uses psi(t) - psi(a)".into()));
            dependence_bound_integral(&inputs, mesh, alpha)?
        }
        Problem::Ivp(_) => {
            let iw = integrated_sup(mesh, alpha, &sample(mesh, w, alpha))?;
            inputs.epsilon2 = eps * iw.value;
            notes.push(("epsilon2".into(), format!("{} (attained at t={})", num(inputs.epsilon2), num(iw.t))));
            dependence_bound_ivp(&inputs, mesh, alpha)?
        }
    };
    let value = difference(&solved.trace, &y)?;
    let check = check_bound(&value, &curve)?;
    Ok(BoundRun { value, curve, check, notes, converged: all_converged(&[&solved.trace, &y]) })
}

fn parameter_run(s: &Scenario, solved: &Solved, offset: f64) -> Result<BoundRun, CliError> {
    let Some(param) = s.config.parameter.clone() else {
        return Err(CliError::Config { path: "parameter".into(), message: "section required by this pipeline".into() });
    };
    let base = solved.problem.base();
    let alpha = base.alpha;
    let mesh = &solved.trace.mesh;
    let (mu0, mu) = (param.mu0, param.mu0 + offset);
    let at = |mu: f64| -> Result<SolutionTrace, CliError> {
        solve_with(s, &with_base(&solved.problem, shifted(base, mu, Forcing::Const(param.q0))?)?)
    };
    let (z1, z2) = (at(mu)?, at(mu0)?);
    let mut inputs = EstimateInputs::constant(mesh, base.lipschitz.m, base.lipschitz.l);
    inputs.q = param.q0.abs();
    inputs.mu = mu;
    inputs.mu0 = mu0;
    let mut notes = vec![("mu".to_string(), num(mu)), ("mu0".to_string(), num(mu0)), ("Q".to_string(), num(inputs.q))];
    let curve = match solved.problem {
        Problem::Integral(_) => {
            contraction_constant(base.lipschitz.m)?;
            parameter_dependence_integral(&inputs, mesh, alpha)?
        }
        Problem::Ivp(_) => {
            let q_bar = integrated_sup(mesh, alpha, &sample(mesh, Forcing::Const(param.q0), alpha))?;
            inputs.q_bar = q_bar.value;
            inputs.ivp_uses_q_bar = true;
            notes.push(("Q_bar".into(), num(q_bar.value)));
            notes.push(("note".into(), "curve uses Q_bar = sup I^alpha |q0|; Q is reported alongside".into()));
            parameter_dependence_ivp(&inputs, mesh, alpha)?
        }
    };
    let value = difference(&z1, &z2)?;
    let check = check_bound(&value, &curve)?;
    Ok(BoundRun { value, curve, check, notes, converged: all_converged(&[&solved.trace, &z1, &z2]) })
}

fn apriori_run(solved: &Solved) -> Result<BoundRun, CliError> {
    let base = solved.problem.base();
    let mesh = &solved.trace.mesh;
    let mut inputs = EstimateInputs::constant(mesh, base.lipschitz.m, base.lipschitz.l);
    let mut notes = Vec::new();
    let curve = match &solved.problem {
        Problem::Integral(p) => {
            contraction_constant(base.lipschitz.m)?;
            let c1 = c1_constant(p, mesh)?;
            inputs.c1 = c1.value;
            notes.push(("C1".into(), format!("{} (attained at t={})", num(c1.value), num(c1.t))));
            apriori_bound_integral(&inputs, mesh, base.alpha)?
        }
        Problem::Ivp(p) => {
            if p.is_singular() && p.x0.iter().any(|&v| v != 0.0) {
                return Err(CliError::Hypothesis(
                    "C2 is infinite: the endpoint weight is unbounded for gamma < 1 and x0 != 0".into(),
                ));
            }
            let c2 = c2_constant(p, mesh)?;
            inputs.c2 = c2.value;
            notes.push(("C2".into(), format!("{} (attained at t={})", num(c2.value), num(c2.t))));
            apriori_bound_ivp(&inputs, mesh, base.alpha)?
        }
    };
    let check = check_bound(&solved.trace.values, &curve)?;
    Ok(BoundRun { value: solved.trace.values.clone(), curve, check, notes, converged: solved.trace.converged })
}

fn bound_table(meta: &RunMeta, run: &BoundRun) -> CsvTable {
    let mut table = CsvTable::new(meta, &["t", "value", "bound", "margin"]);
    let norms = run.value.norms();
    for i in run.value.first_regular_node()..norms.len() {
        let (x, b) = (norms[i], run.curve.values[i]);
        let margin = if b > 0.0 { x / b } else if x == 0.0 { 0.0 } else { f64::INFINITY };
        table.row(&[run.curve.t[i].into(), x.into(), b.into(), margin.into()]);
    }
    table
}

fn describe_check(summary: &mut Summary, run: &BoundRun) {
    for (k, v) in &run.notes {
        summary.line(k, v);
    }
    summary.line("worst_margin", format!("{} at t={}", num(run.check.worst_margin), num(run.check.worst_node)));
    summary.line("bound_check", verdict(run.check.holds));
}

fn outcome_code(run: &BoundRun, extra_ok: bool) -> i32 {
    if !run.converged {
        EXIT_DIVERGED
    } else if run.check.holds && extra_ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

pub fn run_bounds(
    s: &Scenario,
    theorem: u8,
    perturb: Option<f64>,
    offset: Option<f64>,
    ctx: &RunContext,
) -> Result<Outcome, CliError> {
    let solved = solve_scenario(s)?;
    require_form(&solved.problem, theorem)?;
    let run = match theorem {
        3 | 4 => apriori_run(&solved)?,
        7 | 8 => {
            let eps = perturb.or_else(|| s.config.depend.as_ref().and_then(|d| d.epsilon.first().copied())).unwrap_or(1e-2);
            perturbation_run(s, &solved, eps)?
        }
        9 | 10 => {
            let off = offset.or_else(|| s.config.parameter.as_ref().and_then(|p| p.offsets.first().copied()));
            let Some(off) = off else {
                return Err(CliError::Config { path: "parameter.offsets".into(), message: "needs an offset".into() });
            };
            parameter_run(s, &solved, off)?
        }
        other => {
            return Err(CliError::Config {
                path: "theorem".into(),
                message: format!("{other} is not one of 3, 4, 7, 8, 9, 10"),
            })
        }
    };
    bound_table(&certificate_meta(s, &solved), &run).write(&ctx.out_dir, &s.config.outputs.bounds)?;
    let mut summary = Summary::default();
    summary.line("command", "bounds");
    summary.line("theorem", theorem);
    summary.line("curve", run.curve.kind);
    describe_solve(&mut summary, &solved);
    describe_check(&mut summary, &run);
    let code = outcome_code(&run, true);
    Ok(Outcome { summary, code })
}

// ---------------------------------------------------------------- depend

/// Perturbation experiment over every `ε`: enclosure by the dependence curve,
/// and `sup|x - y|/ε` constant up to a factor of 2.
pub fn run_depend(s: &Scenario, perturb: &[f64], ctx: &RunContext) -> Result<Outcome, CliError> {
    let eps: Vec<f64> = if perturb.is_empty() {
        s.config.depend.clone().unwrap_or_default().epsilon
    } else {
        perturb.to_vec()
    };
    if let Some(bad) = eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(CliError::Config { path: "depend.epsilon".into(), message: format!("{bad} is not positive") });
    }
    let solved = solve_scenario(s)?;
    let meta = certificate_meta(s, &solved);
    let mut table = CsvTable::new(&meta, &["epsilon", "t", "diff", "bound", "margin"]);
    let mut summary = Summary::default();
    summary.line("command", "depend");
    describe_solve(&mut summary, &solved);
    let mut all_hold = true;
    let mut converged = true;
    let mut scaled = Vec::new();
    for &e in &eps {
        let run = perturbation_run(s, &solved, e)?;
        let norms = run.value.norms();
        for i in run.value.first_regular_node()..norms.len() {
            let (x, b) = (norms[i], run.curve.values[i]);
            let margin = if b > 0.0 { x / b } else if x == 0.0 { 0.0 } else { f64::INFINITY };
            table.row(&[e.into(), run.curve.t[i].into(), x.into(), b.into(), margin.into()]);
        }
        let sup = norms[run.value.first_regular_node()..].iter().copied().fold(0.0, f64::max);
        scaled.push(sup / e);
        all_hold &= run.check.holds;
        converged &= run.converged;
        summary.line(&format!("epsilon={}", num(e)), format!(
            "sup_diff={} sup_diff/epsilon={} worst_margin={} {}",
            num(sup),
            num(sup / e),
            num(run.check.worst_margin),
            verdict(run.check.holds)
        ));
    }
    table.write(&ctx.out_dir, &s.config.outputs.depend)?;
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let linear = hi <= LINEARITY_FACTOR * lo;
    summary.line("linearity", format!("max/min of sup_diff/epsilon = {} {}", num(hi / lo), verdict(linear)));
    summary.line("bound_check", verdict(all_hold));
    let code = if !converged {
        EXIT_DIVERGED
    } else if all_hold && linear {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    Ok(Outcome { summary, code })
}

// ---------------------------------------------------------------- batch

/// Result of one scenario inside a batch.
#[derive(Debug)]
pub struct BatchItem {
    pub name: String,
    pub result: Result<Outcome, CliError>,
}

impl BatchItem {
    pub fn code(&self) -> i32 {
        match &self.result {
            Ok(o) => o.code,
            Err(e) => e.exit_code(),
        }
    }
}

/// Runs every scenario concurrently, each in `out_dir/<file stem>`.
pub fn run_batch(paths: &[PathBuf], ctx: &RunContext) -> Vec<BatchItem> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = paths
            .iter()
            .map(|path| {
                let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
                let ctx = RunContext { out_dir: ctx.out_dir.join(&name), seed: ctx.seed };
                let handle = scope.spawn(move || run_path(path, &ctx));
                (name, handle)
            })
            .collect();
        handles
            .into_iter()
            .map(|(name, h)| BatchItem {
                name,
                result: h.join().unwrap_or_else(|_| Err(CliError::Hypothesis("scenario thread panicked".into()))),
            })
            .collect()
    })
}

fn run_path(path: &Path, ctx: &RunContext) -> Result<Outcome, CliError> {
    let s = Scenario::load(path)?;
    let command = Command::for_scenario(&s)?;
    run(&s, &command, ctx)
}
