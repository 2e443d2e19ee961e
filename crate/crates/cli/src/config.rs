//! Scenario files: TOML with nested sections, validated with field paths.

use std::path::Path;

use fracvolterra::registry::{integral_problem, Forcing, KernelSpec, OuterSpec};
use fracvolterra::solver::{IntegralProblem, IvpProblem, Lipschitz, Problem, SolveOptions, SpaceChoice};
use fracvolterra::{Grid, PsiFunction};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub psi: PsiConfig,
    pub interval: IntervalConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub space: SpaceConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    pub verify: Option<VerifyConfig>,
    pub gronwall: Option<GronwallConfig>,
    pub depend: Option<DependConfig>,
    pub parameter: Option<ParameterConfig>,
    /// Pipeline used by `batch`.
    pub run: Option<RunConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunCommand {
    Verify,
    Gronwall,
    Solve,
    Bounds,
    Depend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: RunCommand,
    pub theorem: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Integral,
    Ivp,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    #[serde(default = "one")]
    pub dimension: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub x0: Option<Vec<f64>>,
    pub f: Option<OuterConfig>,
    pub k: Option<KernelConfig>,
    pub lipschitz: Option<LipschitzConfig>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingConfig {
    Const { value: f64 },
    Power { coef: f64, nu: f64 },
    MlWeight { coef: f64, rate: f64 },
    Cosine { coef: f64, freq: f64 },
}

impl Default for ForcingConfig {
    fn default() -> Self {
        ForcingConfig::Const { value: 0.0 }
    }
}

impl From<ForcingConfig> for Forcing {
    fn from(f: ForcingConfig) -> Self {
        match f {
            ForcingConfig::Const { value } => Forcing::Const(value),
            ForcingConfig::Power { coef, nu } => Forcing::Power { coef, nu },
            ForcingConfig::MlWeight { coef, rate } => Forcing::MlWeight { coef, rate },
            ForcingConfig::Cosine { coef, freq } => Forcing::Cosine { coef, freq },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum OuterConfig {
    Affine {
        lambda: f64,
        c: f64,
        #[serde(default)]
        forcing: ForcingConfig,
    },
    Bounded {
        m: f64,
        c: f64,
        #[serde(default)]
        forcing: ForcingConfig,
    },
}

impl From<OuterConfig> for OuterSpec {
    fn from(o: OuterConfig) -> Self {
        match o {
            OuterConfig::Affine { lambda, c, forcing } => OuterSpec::Affine { lambda, c, forcing: forcing.into() },
            OuterConfig::Bounded { m, c, forcing } => OuterSpec::Bounded { m, c, forcing: forcing.into() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Linear { l: f64 },
    Bounded { l: f64 },
}

impl From<KernelConfig> for KernelSpec {
    fn from(k: KernelConfig) -> Self {
        match k {
            KernelConfig::Linear { l } => KernelSpec::Linear { l },
            KernelConfig::Bounded { l } => KernelSpec::Bounded { l },
        }
    }
}

/// Declared constants; they may only loosen the family's own constants.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipschitzConfig {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiConfig {
    #[default]
    Identity,
    Power {
        rho: f64,
    },
    Logarithm,
    Exponential {
        sigma: f64,
    },
}

impl From<PsiConfig> for PsiFunction {
    fn from(p: PsiConfig) -> Self {
        match p {
            PsiConfig::Identity => PsiFunction::Identity,
            PsiConfig::Power { rho } => PsiFunction::Power { rho },
            PsiConfig::Logarithm => PsiFunction::Logarithm,
            PsiConfig::Exponential { sigma } => PsiFunction::Exponential { sigma },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalConfig {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(default = "unit")]
    pub grading_q: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub delta: Option<f64>,
    pub xi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    200
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: default_tol(), max_iter: default_max_iter() }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsConfig {
    pub trace: String,
    pub convergence: String,
    pub bounds: String,
    pub verify: String,
    pub gronwall: String,
    pub gronwall_summary: String,
    pub depend: String,
    pub summary: String,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            trace: "trace.csv".into(),
            convergence: "convergence.csv".into(),
            bounds: "bounds.csv".into(),
            verify: "verify.csv".into(),
            gronwall: "gronwall.csv".into(),
            gronwall_summary: "gronwall_instances.csv".into(),
            depend: "depend.csv".into(),
            summary: "summary.txt".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `I^α E_α(ξu^α) = (E_α(ξu^α) - 1)/ξ`
    Lemma1,
    /// Left and right inverse relations of `I^α` and the Hilfer derivative.
    Composition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// `u²`
    Square,
    /// `E_α(u^α)`
    MittagLeffler,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub identity: Identity,
    #[serde(default = "unit")]
    pub xi: f64,
    #[serde(default = "default_function")]
    pub function: TestFunction,
    pub tolerance: Option<f64>,
}

fn default_function() -> TestFunction {
    TestFunction::Square
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GronwallConfig {
    pub mode: Option<GronwallProfile>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_terms")]
    pub series_terms: usize,
}

/// Which inequality a randomized gronwall run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GronwallProfile {
    /// Linear inequality against the resolvent series (kernel capped at 1).
    Lemma4,
    /// Linear inequality against the Mittag-Leffler closed form.
    Corollary1,
    /// Integrodifferential inequality against the nested closed form.
    Lemma5,
}

fn default_instances() -> usize {
    100
}

fn default_terms() -> usize {
    fracvolterra::gronwall::SERIES_TERMS
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependConfig {
    #[serde(default = "default_epsilons")]
    pub epsilon: Vec<f64>,
    #[serde(default = "default_perturbation")]
    pub perturbation: ForcingConfig,
}

fn default_epsilons() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3]
}

fn default_perturbation() -> ForcingConfig {
    ForcingConfig::Cosine { coef: 1.0, freq: 3.0 }
}

impl Default for DependConfig {
    fn default() -> Self {
        Self { epsilon: default_epsilons(), perturbation: default_perturbation() }
    }
}

/// `h = f + μ·q₀`, solved at `μ₀` and at `μ₀ + offset` for each offset.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterConfig {
    pub q0: f64,
    #[serde(default)]
    pub mu0: f64,
    #[serde(default = "default_offsets")]
    pub offsets: Vec<f64>,
}

fn default_offsets() -> Vec<f64> {
    vec![0.1, 0.01]
}

fn invalid<T>(path: &str, msg: impl std::fmt::Display) -> Result<T, CliError> {
    Err(CliError::Config { path: path.into(), message: msg.to_string() })
}

/// A parsed scenario together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub hash: String,
    pub source: String,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Config {
            path: "<toml>".into(),
            message: e.to_string().trim_end().to_string(),
        })?;
        config.validate()?;
        Ok(Self { config, hash: sha256_hex(text), source: text.into() })
    }
}

impl ScenarioConfig {
    /// Cross-field checks of every section, reported with the offending path.
    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.problem;
        if !(p.alpha > 0.0 && p.alpha <= 1.0) {
            return invalid("problem.alpha", format!("must lie in (0, 1], got {}", p.alpha));
        }
        if p.dimension == 0 {
            return invalid("problem.dimension", "must be at least 1");
        }
        match p.kind {
            ProblemKind::Ivp => {
                let Some(beta) = p.beta else {
                    return invalid("problem.beta", "required for kind = \"ivp\"");
                };
                if !(0.0..=1.0).contains(&beta) {
                    return invalid("problem.beta", format!("must lie in [0, 1], got {beta}"));
                }
                match &p.x0 {
                    None => return invalid("problem.x0", "required for kind = \"ivp\""),
                    Some(x0) if x0.len() != p.dimension => {
                        return invalid("problem.x0", format!("has {} entries, dimension is {}", x0.len(), p.dimension))
                    }
                    Some(x0) if x0.iter().any(|v| !v.is_finite()) => return invalid("problem.x0", "entries must be finite"),
                    _ => {}
                }
            }
            ProblemKind::Integral => {
                if p.beta.is_some() && self.verify.is_none() {
                    return invalid("problem.beta", "only meaningful for kind = \"ivp\" or a [verify] section");
                }
                if p.x0.is_some() {
                    return invalid("problem.x0", "only meaningful for kind = \"ivp\"");
                }
            }
        }
        if let Some(l) = p.lipschitz {
            let (m0, l0) = self.family_constants();
            if !(l.m >= m0) {
                return invalid("problem.lipschitz.M", format!("{} is below the family constant {m0}", l.m));
            }
            if !(l.l >= l0 && l.l > 0.0) {
                return invalid("problem.lipschitz.L", format!("{} is below the family constant {l0} or not positive", l.l));
            }
        }
        let Interval { a, b } = self.interval();
        if !(a.is_finite() && b.is_finite() && a < b) {
            return invalid("interval", format!("needs finite a < b, got [{a}, {b}]"));
        }
        let psi: PsiFunction = self.psi.into();
        if let Err(e) = psi.validate_on(a, b) {
            return invalid("psi", e);
        }
        if self.grid.n < 2 {
            return invalid("grid.n", format!("needs at least 2 intervals, got {}", self.grid.n));
        }
        if !(self.grid.grading_q >= 1.0 && self.grid.grading_q <= 64.0) {
            return invalid("grid.grading_q", format!("must lie in [1, 64], got {}", self.grid.grading_q));
        }
        match (self.space.delta, self.space.xi) {
            (Some(_), Some(_)) => return invalid("space", "give either delta or xi, not both"),
            (Some(d), None) if !(d > 1.0 && d.is_finite()) => {
                return invalid("space.delta", format!("must exceed 1, got {d}"));
            }
            (None, Some(x)) if !(x > 0.0 && x.is_finite()) => {
                return invalid("space.xi", format!("must be positive, got {x}"));
            }
            _ => {}
        }
        if !(self.solver.tol > 0.0) {
            return invalid("solver.tol", format!("must be positive, got {}", self.solver.tol));
        }
        if self.solver.max_iter == 0 {
            return invalid("solver.max_iter", "must be at least 1");
        }
        if let Some(v) = &self.verify {
            if !(v.xi > 0.0 && v.xi.is_finite()) {
                return invalid("verify.xi", format!("must be positive, got {}", v.xi));
            }
            if v.identity == Identity::Composition && !p.beta.is_some_and(|b| (0.0..=1.0).contains(&b)) {
                return invalid("problem.beta", "the composition identities need a type beta in [0, 1]");
            }
        }
        if let Some(g) = &self.gronwall {
            if g.instances == 0 {
                return invalid("gronwall.instances", "must be at least 1");
            }
            if g.series_terms == 0 {
                return invalid("gronwall.series_terms", "must be at least 1");
            }
        }
        if let Some(d) = &self.depend {
            if d.epsilon.is_empty() || d.epsilon.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return invalid("depend.epsilon", "needs positive finite entries");
            }
        }
        if let Some(RunConfig { command: RunCommand::Bounds, theorem }) = self.run {
            if !matches!(theorem, Some(3 | 4 | 7 | 8 | 9 | 10)) {
                return invalid("run.theorem", "bounds needs one of 3, 4, 7, 8, 9, 10");
            }
        }
        if let Some(q) = &self.parameter {
            if !q.q0.is_finite() || !q.mu0.is_finite() {
                return invalid("parameter", "q0 and mu0 must be finite");
            }
            if q.offsets.is_empty() || q.offsets.iter().any(|o| !o.is_finite()) {
                return invalid("parameter.offsets", "needs finite entries");
            }
        }
        self.build_problem_opt()?;
        Ok(())
    }

    fn family_constants(&self) -> (f64, f64) {
        let m = self.problem.f.map(|f| OuterSpec::from(f).lipschitz()).unwrap_or(0.0);
        let l = self.problem.k.map(|k| KernelSpec::from(k).lipschitz()).unwrap_or(0.0);
        (m, l)
    }

    pub fn interval(&self) -> Interval {
        Interval { a: self.interval.a, b: self.interval.b }
    }

    pub fn psi(&self) -> PsiFunction {
        self.psi.into()
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        let Interval { a, b } = self.interval();
        let g = if self.grid.grading_q == 1.0 {
            Grid::uniform(a, b, self.grid.n)
        } else {
            Grid::graded(a, b, self.grid.n, self.grid.grading_q)
        };
        g.or_else(|e| invalid("grid", e))
    }

    pub fn solve_options(&self) -> SolveOptions {
        let space = match (self.space.delta, self.space.xi) {
            (_, Some(xi)) => SpaceChoice::Xi(xi),
            (Some(d), None) => SpaceChoice::Delta(d),
            (None, None) => SpaceChoice::Delta(2.0),
        };
        SolveOptions { tol: self.solver.tol, max_iter: self.solver.max_iter, space }
    }

    /// `δ` used for the contraction certificate; an explicit `ξ` is converted via `δ = ξ/L`.
    pub fn delta(&self, l: f64) -> f64 {
        match (self.space.delta, self.space.xi) {
            (_, Some(xi)) => xi / l,
            (Some(d), None) => d,
            (None, None) => 2.0,
        }
    }

    fn build_problem_opt(&self) -> Result<Option<Problem>, CliError> {
        let p = &self.problem;
        let (Some(f), Some(k)) = (p.f, p.k) else {
            return Ok(None);
        };
        let Interval { a, b } = self.interval();
        let mut base = integral_problem(p.alpha, self.psi(), (a, b), p.dimension, f.into(), k.into())
            .or_else(|e| invalid("problem", e))?;
        if let Some(l) = p.lipschitz {
            base.lipschitz = Lipschitz { m: l.m, l: l.l };
        }
        Ok(Some(match p.kind {
            ProblemKind::Integral => Problem::Integral(base),
            ProblemKind::Ivp => {
                let ivp = IvpProblem::new(base, p.beta.unwrap_or(1.0), p.x0.clone().unwrap_or_default())
                    .or_else(|e| invalid("problem", e))?;
                Problem::Ivp(ivp)
            }
        }))
    }

    /// The problem described by `[problem]`; `f` and `k` must be present.
    pub fn build_problem(&self) -> Result<Problem, CliError> {
        match self.build_problem_opt()? {
            Some(p) => Ok(p),
            None if self.problem.f.is_none() => invalid("problem.f", "required by this pipeline"),
            None => invalid("problem.k", "required by this pipeline"),
        }
    }

    pub fn integral_problem(&self) -> Result<IntegralProblem, CliError> {
        Ok(self.build_problem()?.base().clone())
    }

    pub fn gamma(&self) -> f64 {
        let a = self.problem.alpha;
        a + self.problem.beta.unwrap_or(1.0) * (1.0 - a)
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[problem]
kind = "integral"
alpha = 0.5
f = { family = "affine", lambda = 0.0, c = 1.0, forcing = { kind = "const", value = 1.0 } }
k = { family = "linear", l = 0.5 }

[interval]
a = 0.0
b = 1.0

[grid]
n = 64
grading_q = 2.0
"#;

    fn path_of(err: CliError) -> String {
        match err {
            CliError::Config { path, .. } => path,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_minimal_scenario() {
        let s = Scenario::parse(BASE).unwrap();
        assert_eq!(s.hash.len(), 64);
        assert!(matches!(s.config.build_problem().unwrap(), Problem::Integral(_)));
        assert_eq!(s.config.solve_options().space, SpaceChoice::Delta(2.0));
    }

    #[test]
    fn delta_one_names_the_field() {
        let err = Scenario::parse(&format!("{BASE}\n[space]\ndelta = 1.0\n")).unwrap_err();
        assert_eq!(path_of(err), "space.delta");
    }

    #[test]
    fn field_paths_for_cross_checks() {
        let ivp = BASE.replace("kind = \"integral\"", "kind = \"ivp\"");
        assert_eq!(path_of(Scenario::parse(&ivp).unwrap_err()), "problem.beta");
        let ivp = ivp.replace("alpha = 0.5", "alpha = 0.5\nbeta = 0.5\nx0 = [1.0, 2.0]");
        assert_eq!(path_of(Scenario::parse(&ivp).unwrap_err()), "problem.x0");
        let low = format!("{}\nlipschitz = {{ M = 0.5, L = 0.5 }}\n", BASE.split("\n[interval]").next().unwrap())
            + "\n[interval]"
            + BASE.split("\n[interval]").nth(1).unwrap();
        assert_eq!(path_of(Scenario::parse(&low).unwrap_err()), "problem.lipschitz.M");
        let bad_grid = BASE.replace("grading_q = 2.0", "grading_q = 0.5");
        assert_eq!(path_of(Scenario::parse(&bad_grid).unwrap_err()), "grid.grading_q");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = Scenario::parse(&BASE.replace("n = 64", "n = 64\nsize = 3")).unwrap_err();
        assert!(err.to_string().contains("size"), "{err}");
    }
}
