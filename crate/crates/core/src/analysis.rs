//! A-priori, perturbation and parameter-dependence bounds for solutions, and
//! the check of a solved trace against them.

use crate::bound::{BoundCurve, BoundKind};
use crate::error::{domain, Error, Result};
use crate::frac::frac_integral;
use crate::grid::{GridFunction, Mesh};
use crate::gronwall::{nested_values, TriangleKernel};
use crate::solver::{IntegralProblem, IvpProblem, Operator};
use crate::special::mittag_leffler;

/// Constants and sampled data feeding the estimates.
///
/// `r` and `r_bar` only enter through their diagonals; `p` and `p_bar` are
/// sampled on the mesh.
#[derive(Debug, Clone)]
pub struct EstimateInputs {
    /// Lipschitz constant of `f` in the integral form, `0 ≤ N < 1`.
    pub n_const: f64,
    pub c1: f64,
    pub c2: f64,
    pub p: Vec<f64>,
    pub r: TriangleKernel,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub q: f64,
    pub q_bar: f64,
    pub mu: f64,
    pub mu0: f64,
    pub n_bar: f64,
    pub p_bar: Vec<f64>,
    pub r_bar: TriangleKernel,
    /// Use `Q̄ = sup I^α q` instead of `Q` in the IVP parameter bound.
    pub ivp_uses_q_bar: bool,
}

impl EstimateInputs {
    /// Inputs with every coefficient zero and constant `p = p̄ = M`, `r = r̄ = L`
    /// as for the registry families.
    pub fn constant(mesh: &Mesh, m: f64, l: f64) -> Self {
        Self {
            n_const: m,
            c1: 0.0,
            c2: 0.0,
            p: vec![m; mesh.len()],
            r: TriangleKernel::constant(mesh, l),
            epsilon1: 0.0,
            epsilon2: 0.0,
            q: 0.0,
            q_bar: 0.0,
            mu: 0.0,
            mu0: 0.0,
            n_bar: m,
            p_bar: vec![m; mesh.len()],
            r_bar: TriangleKernel::constant(mesh, l),
            ivp_uses_q_bar: true,
        }
    }
}

fn check_contraction_const(name: &str, n: f64) -> Result<()> {
    if !(0.0..1.0).contains(&n) {
        return domain(format!("{name} must lie in [0, 1), got {n}"));
    }
    Ok(())
}

fn check_len(name: &str, x: &[f64], mesh: &Mesh) -> Result<()> {
    if x.len() != mesh.len() {
        return Err(Error::GridMismatch(format!("{name} has {} samples, mesh has {}", x.len(), mesh.len())));
    }
    Ok(())
}

/// `(c/(1-N)) E_α[(N/(1-N)) r(t,t) (ψ(t) - ψ(a))^α]`
fn integral_shape(kind: BoundKind, mesh: &Mesh, alpha: f64, c: f64, n: f64, r: &TriangleKernel) -> Result<BoundCurve> {
    check_contraction_const("N", n)?;
    if !(c >= 0.0) {
        return domain(format!("leading constant must be nonnegative, got {c}"));
    }
    let diag = r.diagonal();
    check_len("r", &diag, mesh)?;
    let ratio = n / (1.0 - n);
    let values = mesh
        .u()
        .iter()
        .zip(&diag)
        .map(|(&u, &r)| Ok(c / (1.0 - n) * mittag_leffler(alpha, ratio * r * u.powf(alpha))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve::new(kind, mesh.t().to_vec(), values))
}

/// `c · E_α{p Γ(α) E_α[r(t,t) Γ(α) (ψ(t) - ψ(a))^α] (ψ(t) - ψ(a))^α}`
fn nested_shape(kind: BoundKind, mesh: &Mesh, alpha: f64, c: f64, p: &[f64], r: &TriangleKernel) -> Result<BoundCurve> {
    if !(c >= 0.0) {
        return domain(format!("leading constant must be nonnegative, got {c}"));
    }
    check_len("p", p, mesh)?;
    let diag = r.diagonal();
    check_len("r", &diag, mesh)?;
    let values = nested_values(mesh, alpha, &vec![c; mesh.len()], p, &diag)?;
    Ok(BoundCurve::new(kind, mesh.t().to_vec(), values))
}

/// Bound on `|x|` for the integral equation.
pub fn apriori_bound_integral(inputs: &EstimateInputs, mesh: &Mesh, alpha: f64) -> Result<BoundCurve> {
    integral_shape(BoundKind::AprioriIntegral, mesh, alpha, inputs.c1, inputs.n_const, &inputs.r)
}

/// Bound on `|x|` for the initial value problem.
pub fn apriori_bound_ivp(inputs: &EstimateInputs, mesh: &Mesh, alpha: f64) -> Result<BoundCurve> {
    nested_shape(BoundKind::AprioriIvp, mesh, alpha, inputs.c2, &inputs.p, &inputs.r)
}

/// Bound on `|x - y|` when the right-hand sides differ by at most `ε₁`.
pub fn dependence_bound_integral(inputs: &EstimateInputs, mesh: &Mesh, alpha: f64) -> Result<BoundCurve> {
    integral_shape(BoundKind::PerturbationIntegral, mesh, alpha, inputs.epsilon1, inputs.n_const, &inputs.r)
}

/// Bound on `|x - y|` for initial value problems whose data differ by at most `ε₂`.
pub fn dependence_bound_ivp(inputs: &EstimateInputs, mesh: &Mesh, alpha: f64) -> Result<BoundCurve> {
    nested_shape(BoundKind::PerturbationIvp, mesh, alpha, inputs.epsilon2, &inputs.p, &inputs.r)
}

/// Bound on `|z₁ - z₂|` for solutions at parameters `μ` and `μ₀`, built on `r̄`.
pub fn parameter_dependence_integral(inputs: &EstimateInputs, mesh: &Mesh, alpha: f64) -> Result<BoundCurve> {
    let c = inputs.q * (inputs.mu - inputs.mu0).abs();
    integral_shape(BoundKind::ParameterIntegral, mesh, alpha, c, inputs.n_bar, &inputs.r_bar)
}

/// IVP analogue of [`parameter_dependence_integral`], with `p̄, r̄`.
pub fn parameter_dependence_ivp(inputs: &EstimateInputs, mesh: &Mesh, alpha: f64) -> Result<BoundCurve> {
    let q = if inputs.ivp_uses_q_bar { inputs.q_bar } else { inputs.q };
    let c = q * (inputs.mu - inputs.mu0).abs();
    nested_shape(BoundKind::ParameterIvp, mesh, alpha, c, &inputs.p_bar, &inputs.r_bar)
}

/// A grid supremum and the node attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSup {
    pub value: f64,
    pub t: f64,
}

fn grid_sup(mesh: &Mesh, x: &GridFunction) -> GridSup {
    let norms = x.norms();
    (x.first_regular_node()..x.len())
        .map(|i| GridSup { value: norms[i], t: mesh.t()[i] })
        .fold(GridSup { value: 0.0, t: mesh.a() }, |acc, s| if s.value > acc.value { s } else { acc })
}

/// `C₁ = sup |f(t, 0, (1/Γ(α)) ∫ N^α k(t,σ,0) dσ)|` over the grid.
pub fn c1_constant(problem: &IntegralProblem, mesh: &Mesh) -> Result<GridSup> {
    Ok(grid_sup(mesh, &Operator::integral(problem, mesh)?.zero_image()?))
}

/// `C₂ = sup |Ψ^γ x_0 + I^α f(·, 0, z_0)|` over the grid nodes with `t > a` when
/// the endpoint is singular.
pub fn c2_constant(problem: &IvpProblem, mesh: &Mesh) -> Result<GridSup> {
    Ok(grid_sup(mesh, &Operator::ivp(problem, mesh)?.zero_image()?))
}

/// `sup I^α |w|` for samples `w`.
pub fn integrated_sup(mesh: &Mesh, alpha: f64, w: &GridFunction) -> Result<GridSup> {
    let abs = GridFunction::from_values(1, w.norms())?;
    Ok(grid_sup(mesh, &frac_integral(mesh, alpha, &abs)?))
}

/// Outcome of comparing a trace with a bound curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub holds: bool,
    /// Largest `‖trace‖ / bound` over the compared nodes.
    pub worst_margin: f64,
    /// Node attaining `worst_margin`.
    pub worst_node: f64,
}

const CHECK_REL: f64 = 1e-9;
const CHECK_ABS: f64 = 1e-12;

/// `‖trace(t_i)‖ ≤ bound(t_i)(1 + 1e-9) + 1e-12` at every node carrying a point value.
pub fn check_bound(trace: &GridFunction, bound: &BoundCurve) -> Result<BoundCheck> {
    if trace.len() != bound.len() {
        return Err(Error::GridMismatch(format!("trace has {} nodes, bound has {}", trace.len(), bound.len())));
    }
    let norms = trace.norms();
    let mut out = BoundCheck { holds: true, worst_margin: 0.0, worst_node: bound.t.first().copied().unwrap_or(0.0) };
    for i in trace.first_regular_node()..trace.len() {
        let (x, b) = (norms[i], bound.values[i]);
        if !(x <= b * (1.0 + CHECK_REL) + CHECK_ABS) {
            out.holds = false;
        }
        let margin = if b > 0.0 {
            x / b
        } else if x == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if margin > out.worst_margin || margin.is_nan() {
            out.worst_margin = margin;
            out.worst_node = bound.t[i];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::psi::PsiFunction;

    fn mesh() -> Mesh {
        Mesh::new(Grid::graded(0.0, 1.0, 32, 2.0).unwrap(), PsiFunction::Identity).unwrap()
    }

    #[test]
    fn trivial_shapes() {
        let m = mesh();
        let mut inp = EstimateInputs::constant(&m, 0.0, 1.0);
        inp.c1 = 1.7;
        assert!(apriori_bound_integral(&inp, &m, 0.5).unwrap().values.iter().all(|&v| v == 1.7));
        inp.c2 = 0.4;
        assert!(apriori_bound_ivp(&inp, &m, 0.5).unwrap().values.iter().all(|&v| v == 0.4));
        inp.mu = 1.0;
        inp.mu0 = 1.0;
        inp.q = 3.0;
        assert!(parameter_dependence_integral(&inp, &m, 0.5).unwrap().values.iter().all(|&v| v == 0.0));
        inp.n_const = 1.0;
        assert!(apriori_bound_integral(&inp, &m, 0.5).is_err());
    }

    #[test]
    fn classical_exponential_shapes() {
        let m = mesh();
        let mut inp = EstimateInputs::constant(&m, 0.25, 2.0);
        inp.c1 = 1.0;
        let b = apriori_bound_integral(&inp, &m, 1.0).unwrap();
        for (t, v) in b.t.iter().zip(&b.values) {
            assert!((v - (1.0 / 0.75) * (0.25 / 0.75 * 2.0 * t).exp()).abs() < 1e-12);
        }
        let mut inp = EstimateInputs::constant(&m, 0.6, 0.0);
        inp.epsilon2 = 0.1;
        let b = dependence_bound_ivp(&inp, &m, 1.0).unwrap();
        for (t, v) in b.t.iter().zip(&b.values) {
            assert!((v - 0.1 * (0.6 * t).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn perturbation_bound_is_linear_in_epsilon() {
        let m = mesh();
        let mut inp = EstimateInputs::constant(&m, 0.25, 1.0);
        inp.epsilon1 = 0.1;
        let b1 = dependence_bound_integral(&inp, &m, 0.5).unwrap();
        inp.epsilon1 = 0.2;
        let b2 = dependence_bound_integral(&inp, &m, 0.5).unwrap();
        assert!(b1.values.iter().zip(&b2.values).all(|(a, b)| (2.0 * a - b).abs() <= 1e-15 * b));
        assert!(b1.is_nondecreasing());
    }

    #[test]
    fn check_bound_margins() {
        let m = mesh();
        let inp = EstimateInputs { c1: 1.0, ..EstimateInputs::constant(&m, 0.5, 1.0) };
        let b = apriori_bound_integral(&inp, &m, 0.5).unwrap();
        let zero = GridFunction::zeros(m.len(), 2);
        let c = check_bound(&zero, &b).unwrap();
        assert!(c.holds && c.worst_margin == 0.0);
        let same = GridFunction::from_values(1, b.values.clone()).unwrap();
        let c = check_bound(&same, &b).unwrap();
        assert!(c.holds && (c.worst_margin - 1.0).abs() < 1e-15);
        let over = same.scaled(1.01);
        assert!(!check_bound(&over, &b).unwrap().holds);
        assert!(check_bound(&GridFunction::zeros(3, 1), &b).is_err());
    }
}
