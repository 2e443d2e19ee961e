//! Picard iteration for the ψ-fractional Volterra integral equation
//! `x(t) = f(t, x(t), (1/Γ(α)) ∫_a^t N^α(t,s) k(t,s,x(s)) ds)`
//! and for the ψ-Hilfer initial value problem in its integral form
//! `x(t) = Ψ^γ(t,a) x_0 + I^α f(·, x, z)(t)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::frac::{frac_integral_with, OperatorParams};
use crate::grid::{Grid, GridFunction, Mesh};
use crate::psi::{gamma_weight_at_offset, PsiFunction};
use crate::quadrature::ProductRule;
use crate::space::WeightedSpace;
use crate::special::rgamma;

/// Outer nonlinearity `f(t, x, z)`.
pub trait OuterFn: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, x: &[f64], z: &[f64], out: &mut [f64]);
}

/// Kernel `k(t, s, x)`.
pub trait KernelFn: fmt::Debug + Send + Sync {
    fn eval(&self, t: f64, s: f64, x: &[f64], out: &mut [f64]);

    /// Kernels independent of `t` are evaluated once per sweep instead of once per row.
    fn depends_on_t(&self) -> bool {
        true
    }
}

/// Global Lipschitz constants: `M` for `f` in both slots, `L` for `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub m: f64,
    pub l: f64,
}

#[derive(Debug, Clone)]
pub struct IntegralProblem {
    pub alpha: f64,
    pub psi: PsiFunction,
    pub a: f64,
    pub b: f64,
    pub f: Arc<dyn OuterFn>,
    pub k: Arc<dyn KernelFn>,
    pub lipschitz: Lipschitz,
}

impl IntegralProblem {
    pub fn new(
        alpha: f64,
        psi: PsiFunction,
        (a, b): (f64, f64),
        f: Arc<dyn OuterFn>,
        k: Arc<dyn KernelFn>,
        lipschitz: Lipschitz,
    ) -> Result<Self> {
        let p = Self { alpha, psi, a, b, f, k, lipschitz };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        OperatorParams::new(self.alpha, 0.0)?;
        if !(self.a.is_finite() && self.b.is_finite() && self.a < self.b) {
            return domain(format!("interval needs finite a < b, got [{}, {}]", self.a, self.b));
        }
        self.psi.validate_on(self.a, self.b)?;
        if self.f.dim() == 0 {
            return domain("problem dimension must be at least 1");
        }
        let Lipschitz { m, l } = self.lipschitz;
        if !(m >= 0.0 && m.is_finite()) {
            return domain(format!("Lipschitz constant M must be nonnegative, got {m}"));
        }
        if !(l > 0.0 && l.is_finite()) {
            return domain(format!("Lipschitz constant L must be positive, got {l}"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn mesh(&self, grid: Grid) -> Result<Mesh> {
        if grid.a() != self.a || grid.b() != self.b {
            return Err(Error::GridMismatch(format!(
                "grid covers [{}, {}], problem lives on [{}, {}]",
                grid.a(),
                grid.b(),
                self.a,
                self.b
            )));
        }
        Mesh::new(grid, self.psi.clone())
    }
}

/// Integral problem data plus the type `β` and the weighted initial value
/// `I^{1-γ} x(a) = x_0`.
#[derive(Debug, Clone)]
pub struct IvpProblem {
    pub base: IntegralProblem,
    pub beta: f64,
    pub x0: Vec<f64>,
}

impl IvpProblem {
    pub fn new(base: IntegralProblem, beta: f64, x0: Vec<f64>) -> Result<Self> {
        let p = Self { base, beta, x0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.params()?;
        if self.x0.len() != self.base.dim() {
            return domain(format!("x0 has {} components, problem has {}", self.x0.len(), self.base.dim()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<OperatorParams> {
        OperatorParams::new(self.base.alpha, self.beta)
    }

    pub fn gamma(&self) -> f64 {
        self.base.alpha + self.beta * (1.0 - self.base.alpha)
    }

    /// Whether solutions blow up like `(ψ(t) - ψ(a))^{γ-1}` at `a`.
    pub fn is_singular(&self) -> bool {
        self.gamma() < 1.0
    }
}

#[derive(Debug, Clone)]
pub enum Problem {
    Integral(IntegralProblem),
    Ivp(IvpProblem),
}

impl Problem {
    pub fn base(&self) -> &IntegralProblem {
        match self {
            Problem::Integral(p) => p,
            Problem::Ivp(p) => &p.base,
        }
    }
}

impl From<IntegralProblem> for Problem {
    fn from(p: IntegralProblem) -> Self {
        Problem::Integral(p)
    }
}

impl From<IvpProblem> for Problem {
    fn from(p: IvpProblem) -> Self {
        Problem::Ivp(p)
    }
}

/// How the weight rate `ξ` of the solution space is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceChoice {
    /// `ξ = L·δ`, `δ > 1`
    Delta(f64),
    Xi(f64),
}

impl Default for SpaceChoice {
    fn default() -> Self {
        SpaceChoice::Delta(2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub space: SpaceChoice,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200, space: SpaceChoice::default() }
    }
}

impl SolveOptions {
    fn xi(&self, lipschitz: Lipschitz) -> Result<f64> {
        match self.space {
            SpaceChoice::Delta(d) if d > 1.0 && d.is_finite() => Ok(lipschitz.l * d),
            SpaceChoice::Delta(d) => domain(format!("delta must exceed 1, got {d}")),
            SpaceChoice::Xi(xi) if xi > 0.0 && xi.is_finite() => Ok(xi),
            SpaceChoice::Xi(xi) => domain(format!("xi must be positive, got {xi}")),
        }
    }
}

/// Converged (or abandoned) Picard iterate with its convergence record.
#[derive(Debug, Clone)]
pub struct SolutionTrace {
    pub mesh: Mesh,
    pub values: GridFunction,
    /// Node 0 holds the weighted limit `x_0/Γ(γ)` instead of a point value.
    pub singular_endpoint: bool,
    /// `d_ξ(x_{k+1}, x_k)` per sweep.
    pub history: Vec<f64>,
    /// `d_ξ(x, Tx)` of the returned iterate.
    pub residual: f64,
    pub xi: f64,
    pub alpha: f64,
    pub converged: bool,
}

impl SolutionTrace {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    /// `history[k+1] / history[k]`
    pub fn ratios(&self) -> Vec<f64> {
        self.history.windows(2).map(|w| w[1] / w[0]).collect()
    }

    pub fn space(&self) -> Result<WeightedSpace> {
        WeightedSpace::new(self.xi, self.alpha)
    }
}

/// The discrete operator `T` (integral problem) or `S` (initial value problem).
pub struct Operator<'a> {
    mesh: &'a Mesh,
    problem: &'a IntegralProblem,
    rule: ProductRule,
    /// Leading power `γ - 1` of singular iterates.
    singular: Option<f64>,
    /// `Ψ^γ x_0` for the initial value problem.
    base: Option<GridFunction>,
}

impl fmt::Debug for Operator<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator").field("nodes", &self.mesh.len()).field("singular", &self.singular).finish()
    }
}

fn extrapolate_to_zero(u: &[f64], g1: f64, g2: Option<f64>) -> f64 {
    match g2 {
        Some(g2) => g1 - u[1] * (g2 - g1) / (u[2] - u[1]),
        None => g1,
    }
}

impl<'a> Operator<'a> {
    pub fn integral(problem: &'a IntegralProblem, mesh: &'a Mesh) -> Result<Self> {
        problem.validate()?;
        check_mesh(problem, mesh)?;
        Ok(Self { mesh, problem, rule: ProductRule::trapezoid(mesh, problem.alpha)?, singular: None, base: None })
    }

    pub fn ivp(problem: &'a IvpProblem, mesh: &'a Mesh) -> Result<Self> {
        problem.validate()?;
        check_mesh(&problem.base, mesh)?;
        let gamma = problem.gamma();
        let dim = problem.base.dim();
        let singular = problem.is_singular().then_some(gamma - 1.0);
        let rule = match singular {
            Some(e) => ProductRule::weighted(mesh, problem.base.alpha, e)?,
            None => ProductRule::trapezoid(mesh, problem.base.alpha)?,
        };
        let mut base = GridFunction::from_fn(mesh, dim, |_, u, out| {
            let w = gamma_weight_at_offset(u, gamma);
            out.iter_mut().zip(&problem.x0).for_each(|(o, x)| *o = w * x);
        });
        if let Some(e) = singular {
            let limit = rgamma(gamma);
            base.node_mut(0).iter_mut().zip(&problem.x0).for_each(|(o, x)| *o = limit * x);
            base = base.with_power(e);
        }
        Ok(Self { mesh, problem: &problem.base, rule, singular, base: Some(base) })
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    pub fn is_singular(&self) -> bool {
        self.singular.is_some()
    }

    fn first(&self) -> usize {
        usize::from(self.is_singular())
    }

    fn check_input(&self, x: &GridFunction) -> Result<()> {
        x.check_on(self.mesh)?;
        if x.dim() != self.problem.dim() {
            return Err(Error::GridMismatch(format!("trace has dimension {}, problem has {}", x.dim(), self.problem.dim())));
        }
        Ok(())
    }

    /// `z_i = (1/Γ(α)) Σ_j W_ij k(t_i, t_j, x_j)`, node-major. For singular
    /// iterates the kernel values are reduced by `u^{-(γ-1)}` and the value at
    /// `a` extrapolated, matching the weighted product rule.
    pub fn kernel_integral(&self, x: &GridFunction) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let (t, u) = (self.mesh.t(), self.mesh.u());
        let n = self.mesh.len();
        let dim = x.dim();
        let k = &self.problem.k;
        let scale = self.rule.scale();
        let reduce: Vec<f64> = match self.singular {
            Some(e) => u.iter().map(|&v| if v > 0.0 { v.powf(-e) } else { 0.0 }).collect(),
            None => vec![1.0; n],
        };
        let first = self.first();
        let mut g = vec![0.0; n * dim];
        let fill = |g: &mut [f64], row_t: f64, upto: usize| {
            for j in first..=upto {
                k.eval(row_t, t[j], x.node(j), &mut g[j * dim..(j + 1) * dim]);
                g[j * dim..(j + 1) * dim].iter_mut().for_each(|v| *v *= reduce[j]);
            }
            if first == 1 {
                for c in 0..dim {
                    let g2 = (upto >= 2).then(|| g[2 * dim + c]);
                    g[c] = extrapolate_to_zero(u, g[dim + c], g2);
                }
            }
        };
        let cached = !k.depends_on_t();
        if cached && n > 1 {
            fill(&mut g, t[0], n - 1);
        }
        let mut z = vec![0.0; n * dim];
        for i in 1..n {
            if !cached {
                fill(&mut g, t[i], i.max(2).min(n - 1));
            }
            let row = self.rule.row(i);
            let zi = &mut z[i * dim..(i + 1) * dim];
            for (j, w) in row.iter().enumerate() {
                for c in 0..dim {
                    zi[c] += w * g[j * dim + c];
                }
            }
            zi.iter_mut().for_each(|v| *v *= scale);
        }
        Ok(z)
    }

    /// `f(t_i, x_i, z_i)` at every node carrying a point value.
    fn outer(&self, x: &GridFunction, z: &[f64]) -> GridFunction {
        let dim = x.dim();
        let mut out = GridFunction::zeros(x.len(), dim);
        for i in self.first()..x.len() {
            self.problem.f.eval(self.mesh.t()[i], x.node(i), &z[i * dim..(i + 1) * dim], out.node_mut(i));
        }
        out
    }

    /// One application of `T` or `S`.
    pub fn apply(&self, x: &GridFunction) -> Result<GridFunction> {
        let z = self.kernel_integral(x)?;
        let mut fx = self.outer(x, &z);
        let Some(base) = &self.base else {
            return Ok(fx);
        };
        if let Some(e) = self.singular {
            let u = self.mesh.u();
            for c in 0..fx.dim() {
                let g1 = fx.node(1)[c] * u[1].powf(-e);
                let g2 = (fx.len() > 2).then(|| fx.node(2)[c] * u[2].powf(-e));
                fx.node_mut(0)[c] = extrapolate_to_zero(u, g1, g2);
            }
            fx = fx.with_power(e);
        }
        let integral = frac_integral_with(self.mesh, &self.rule, &fx)?;
        base.combine(1.0, &integral, 1.0)
    }

    /// Picard start: `f(t, 0, 0)` for the integral equation, `Ψ^γ x_0` for the IVP.
    pub fn start(&self) -> GridFunction {
        match &self.base {
            Some(b) => b.clone(),
            None => {
                let dim = self.problem.dim();
                let zero = vec![0.0; dim];
                GridFunction::from_fn(self.mesh, dim, |t, _, out| self.problem.f.eval(t, &zero, &zero, out))
            }
        }
    }

    /// Image of the zero trace.
    pub fn zero_image(&self) -> Result<GridFunction> {
        let mut zero = GridFunction::zeros(self.mesh.len(), self.problem.dim());
        if let Some(e) = self.singular {
            zero = zero.with_power(e);
        }
        self.apply(&zero)
    }
}

fn check_mesh(problem: &IntegralProblem, mesh: &Mesh) -> Result<()> {
    if mesh.a() != problem.a || mesh.grid().b() != problem.b || mesh.psi().name() != problem.psi.name() {
        return Err(Error::GridMismatch("mesh does not match the problem's interval and psi".into()));
    }
    Ok(())
}

/// `(Tx)(t_i)` for the integral equation.
pub fn apply_t(problem: &IntegralProblem, mesh: &Mesh, x: &GridFunction) -> Result<GridFunction> {
    Operator::integral(problem, mesh)?.apply(x)
}

/// `(Sx)(t_i)` for the initial value problem.
pub fn apply_s(problem: &IvpProblem, mesh: &Mesh, x: &GridFunction) -> Result<GridFunction> {
    Operator::ivp(problem, mesh)?.apply(x)
}

fn iterate(op: &Operator, alpha: f64, lipschitz: Lipschitz, opts: &SolveOptions) -> Result<SolutionTrace> {
    if !(opts.tol > 0.0) {
        return domain(format!("tolerance must be positive, got {}", opts.tol));
    }
    if opts.max_iter == 0 {
        return domain("max_iter must be at least 1");
    }
    let xi = opts.xi(lipschitz)?;
    let space = WeightedSpace::new(xi, alpha)?;
    let weights = space.weights(op.mesh())?;
    let mut x = op.start();
    let mut history = Vec::new();
    let mut converged = false;
    for iteration in 1..=opts.max_iter {
        let next = op.apply(&x)?;
        if !next.all_finite() {
            return Err(Error::Divergence { iteration, detail: "non-finite iterate".into() });
        }
        let d = space.metric_with(&next, &x, &weights)?;
        if !d.is_finite() {
            return Err(Error::Divergence { iteration, detail: format!("metric {d}") });
        }
        history.push(d);
        x = next;
        if d < opts.tol {
            converged = true;
            break;
        }
    }
    let residual = space.metric_with(&x, &op.apply(&x)?, &weights)?;
    Ok(SolutionTrace {
        mesh: op.mesh().clone(),
        singular_endpoint: op.is_singular(),
        values: x,
        history,
        residual,
        xi,
        converged,
        alpha,
    })
}

pub fn picard_solve_integral(problem: &IntegralProblem, grid: Grid, opts: &SolveOptions) -> Result<SolutionTrace> {
    let mesh = problem.mesh(grid)?;
    let op = Operator::integral(problem, &mesh)?;
    iterate(&op, problem.alpha, problem.lipschitz, opts)
}

pub fn picard_solve_ivp(problem: &IvpProblem, grid: Grid, opts: &SolveOptions) -> Result<SolutionTrace> {
    let mesh = problem.base.mesh(grid)?;
    let op = Operator::ivp(problem, &mesh)?;
    iterate(&op, problem.base.alpha, problem.base.lipschitz, opts)
}

pub fn solve(problem: &Problem, grid: Grid, opts: &SolveOptions) -> Result<SolutionTrace> {
    match problem {
        Problem::Integral(p) => picard_solve_integral(p, grid, opts),
        Problem::Ivp(p) => picard_solve_ivp(p, grid, opts),
    }
}

/// `d_ξ(x, Tx)` (or `S`) at the trace's own `ξ`.
pub fn residual(problem: &Problem, x: &SolutionTrace) -> Result<f64> {
    let op = match problem {
        Problem::Integral(p) => Operator::integral(p, &x.mesh)?,
        Problem::Ivp(p) => Operator::ivp(p, &x.mesh)?,
    };
    x.space()?.metric(&x.values, &op.apply(&x.values)?, &x.mesh)
}

/// Constants making `T` (or `S`) a contraction in `‖·‖_ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionCertificate {
    pub m: f64,
    pub l: f64,
    pub delta: f64,
    pub xi: f64,
    /// `M(1 + 1/δ)`
    pub q_integral: f64,
    /// `(M/ξ)(1 + 1/δ)`
    pub q_ivp: f64,
    pub contractive_integral: bool,
    pub contractive_ivp: bool,
    /// `‖T0‖_ξ` (integral) or `‖Ψ^γ x_0 + I^α f(·,0,z_0)‖_ξ` (IVP) on the grid.
    pub d: f64,
    /// `d` is finite on the grid and the endpoint term is bounded.
    pub d_finite: bool,
}

impl ContractionCertificate {
    /// The ratio that applies to the given problem form.
    pub fn q_for(&self, problem: &Problem) -> f64 {
        match problem {
            Problem::Integral(_) => self.q_integral,
            Problem::Ivp(_) => self.q_ivp,
        }
    }
}

/// Certificate constants from `(M, L, δ)`; `ξ = L·δ`.
pub fn certificate_constants(lipschitz: Lipschitz, delta: f64) -> Result<ContractionCertificate> {
    if !(delta > 1.0 && delta.is_finite()) {
        return domain(format!("delta must exceed 1, got {delta}"));
    }
    let Lipschitz { m, l } = lipschitz;
    let xi = l * delta;
    let q_integral = m * (1.0 + 1.0 / delta);
    let q_ivp = m / xi * (1.0 + 1.0 / delta);
    Ok(ContractionCertificate {
        m,
        l,
        delta,
        xi,
        q_integral,
        q_ivp,
        contractive_integral: q_integral < 1.0,
        contractive_ivp: q_ivp < 1.0,
        d: f64::NAN,
        d_finite: false,
    })
}

pub fn contraction_certificate(problem: &Problem, mesh: &Mesh, delta: f64) -> Result<ContractionCertificate> {
    let mut cert = certificate_constants(problem.base().lipschitz, delta)?;
    let (op, bounded_endpoint) = match problem {
        Problem::Integral(p) => (Operator::integral(p, mesh)?, true),
        Problem::Ivp(p) => (Operator::ivp(p, mesh)?, !p.is_singular() || p.x0.iter().all(|&v| v == 0.0)),
    };
    let space = WeightedSpace::new(cert.xi, problem.base().alpha)?;
    cert.d = space.norm(&op.zero_image()?, mesh)?;
    cert.d_finite = cert.d.is_finite() && bounded_endpoint;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{Forcing, KernelSpec, OuterSpec};
    use crate::special::mittag_leffler;

    fn problem(alpha: f64, outer: OuterSpec, kernel: KernelSpec) -> IntegralProblem {
        crate::registry::integral_problem(alpha, PsiFunction::Identity, (0.0, 1.0), 1, outer, kernel).unwrap()
    }

    fn grid(n: usize) -> Grid {
        Grid::graded(0.0, 1.0, n, 2.0).unwrap()
    }

    fn one_plus_z() -> OuterSpec {
        OuterSpec::Affine { lambda: 0.0, c: 1.0, forcing: Forcing::Const(1.0) }
    }

    #[test]
    fn operator_trivial_images() {
        let p = problem(0.5, OuterSpec::Affine { lambda: 0.0, c: 1.0, forcing: Forcing::Const(0.0) }, KernelSpec::Linear { l: 0.0 });
        let mesh = p.mesh(grid(16)).unwrap();
        let x = GridFunction::scalar(&mesh, |t, _| t.sin());
        assert!(apply_t(&p, &mesh, &x).unwrap().values().iter().all(|&v| v == 0.0));
        let p = problem(0.5, one_plus_z(), KernelSpec::Linear { l: 0.5 });
        let tx = apply_t(&p, &mesh, &GridFunction::zeros(mesh.len(), 1)).unwrap();
        assert!(tx.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn exact_fixed_point_is_nearly_invariant() {
        let p = problem(0.5, one_plus_z(), KernelSpec::Linear { l: 0.5 });
        let mesh = p.mesh(grid(256)).unwrap();
        let x = GridFunction::scalar(&mesh, |_, u| mittag_leffler(0.5, 0.5 * u.sqrt()).unwrap());
        let tx = apply_t(&p, &mesh, &x).unwrap();
        let err = x.sub(&tx).unwrap().norms().into_iter().fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn forcing_only_converges_immediately() {
        let p = problem(0.5, OuterSpec::Affine { lambda: 0.0, c: 0.0, forcing: Forcing::Const(2.5) }, KernelSpec::Linear { l: 1.0 });
        let tr = picard_solve_integral(&p, grid(32), &SolveOptions::default()).unwrap();
        assert!(tr.converged);
        assert_eq!(tr.iterations(), 1);
        assert_eq!(tr.residual, 0.0);
    }

    #[test]
    fn ml_fixed_point() {
        let p = problem(0.5, one_plus_z(), KernelSpec::Linear { l: 0.5 });
        let tr = picard_solve_integral(&p, grid(512), &SolveOptions::default()).unwrap();
        assert!(tr.converged && tr.iterations() <= 60);
        for (i, &u) in tr.mesh.u().iter().enumerate() {
            let exact = mittag_leffler(0.5, 0.5 * u.sqrt()).unwrap();
            assert!((tr.values.node(i)[0] - exact).abs() < 1e-3 * exact);
        }
    }

    #[test]
    fn zero_forcing_ivp_is_endpoint_term() {
        let base = problem(0.5, OuterSpec::Affine { lambda: 0.0, c: 0.0, forcing: Forcing::Const(0.0) }, KernelSpec::Linear { l: 1.0 });
        let ivp = IvpProblem::new(base, 0.4, vec![1.5]).unwrap();
        let tr = picard_solve_ivp(&ivp, grid(64), &SolveOptions::default()).unwrap();
        let g = ivp.gamma();
        assert!(tr.singular_endpoint);
        for (i, &u) in tr.mesh.u().iter().enumerate().skip(1) {
            assert!((tr.values.node(i)[0] - 1.5 * gamma_weight_at_offset(u, g)).abs() < 1e-12);
        }
    }

    #[test]
    fn caputo_linear_ivp() {
        let base = problem(0.5, OuterSpec::Affine { lambda: -0.8, c: 0.0, forcing: Forcing::Const(0.0) }, KernelSpec::Linear { l: 1.0 });
        let ivp = IvpProblem::new(base, 1.0, vec![2.0]).unwrap();
        let tr = picard_solve_ivp(&ivp, grid(512), &SolveOptions { space: SpaceChoice::Xi(4.0), ..Default::default() }).unwrap();
        assert!(tr.converged);
        for (i, &u) in tr.mesh.u().iter().enumerate() {
            let exact = 2.0 * mittag_leffler(0.5, -0.8 * u.sqrt()).unwrap();
            assert!((tr.values.node(i)[0] - exact).abs() < 2e-4, "{i}");
        }
    }

    #[test]
    fn singular_ivp_matches_two_parameter_ml() {
        // x = Ψ^γ x0 + λ I^α x  ⇒  x = x0 u^{γ-1} E_{α,γ}(λ u^α)
        let (alpha, beta, lambda) = (0.6, 0.5, 0.7);
        let base = problem(alpha, OuterSpec::Affine { lambda, c: 0.0, forcing: Forcing::Const(0.0) }, KernelSpec::Linear { l: 1.0 });
        let ivp = IvpProblem::new(base, beta, vec![1.0]).unwrap();
        let g = ivp.gamma();
        let tr = picard_solve_ivp(&ivp, Grid::graded(0.0, 1.0, 512, 3.0).unwrap(), &SolveOptions::default()).unwrap();
        let e2 = |z: f64| (0..80).map(|k| z.powi(k) * rgamma(alpha * k as f64 + g)).sum::<f64>();
        for (i, &u) in tr.mesh.u().iter().enumerate().skip(1) {
            let exact = u.powf(g - 1.0) * e2(lambda * u.powf(alpha));
            assert!((tr.values.node(i)[0] - exact).abs() < 1e-3 * exact, "{i}");
        }
    }

    #[test]
    fn certificate_arithmetic() {
        let c = certificate_constants(Lipschitz { m: 0.4, l: 1.0 }, 2.0).unwrap();
        assert!((c.q_integral - 0.6).abs() < 1e-15 && c.contractive_integral);
        assert!((c.q_ivp - 0.3).abs() < 1e-15 && c.xi == 2.0);
        let c = certificate_constants(Lipschitz { m: 0.8, l: 1.0 }, 1.25).unwrap();
        assert!((c.q_integral - 1.44).abs() < 1e-12 && !c.contractive_integral);
        assert!(certificate_constants(Lipschitz { m: 0.4, l: 1.0 }, 1.0).is_err());
    }

    #[test]
    fn rejects_mismatched_grid() {
        let p = problem(0.5, one_plus_z(), KernelSpec::Linear { l: 0.5 });
        assert!(matches!(
            picard_solve_integral(&p, Grid::uniform(0.0, 2.0, 8).unwrap(), &SolveOptions::default()),
            Err(Error::GridMismatch(_))
        ));
    }
}
