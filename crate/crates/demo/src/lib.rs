//! Browser bindings: Mittag-Leffler evaluation, the closed-form check of the
//! discrete fractional integral, and a Picard solve with a known solution.

use fracvolterra::frac::verify_lemma1;
use fracvolterra::registry::{integral_problem, Forcing, KernelSpec, OuterSpec};
use fracvolterra::solver::{picard_solve_integral, SolveOptions};
use fracvolterra::{mittag_leffler, Grid, Mesh, PsiFunction};
use wasm_bindgen::prelude::*;

fn js(e: fracvolterra::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn psi_from(name: &str, param: f64) -> Result<PsiFunction, JsError> {
    match name {
        "identity" => Ok(PsiFunction::Identity),
        "power" => Ok(PsiFunction::Power { rho: param }),
        "exponential" => Ok(PsiFunction::Exponential { sigma: param }),
        other => Err(JsError::new(&format!("unknown psi '{other}'"))),
    }
}

/// `E_α(z)`.
#[wasm_bindgen(js_name = mlEval)]
pub fn ml_eval(alpha: f64, z: f64) -> Result<f64, JsError> {
    mittag_leffler(alpha, z).map_err(js)
}

/// Largest relative error of the discrete `I^α E_α(ξ u^α)` against
/// `(E_α(ξ u^α) - 1)/ξ` on `[0, 1]` with an `n`-interval graded grid.
#[wasm_bindgen(js_name = closedFormResidual)]
pub fn closed_form_residual(alpha: f64, xi: f64, psi: &str, psi_param: f64, n: usize) -> Result<f64, JsError> {
    let mesh = Mesh::new(Grid::graded(0.0, 1.0, n, 4.0).map_err(js)?, psi_from(psi, psi_param)?).map_err(js)?;
    verify_lemma1(alpha, xi, &mesh).map_err(js)
}

#[wasm_bindgen]
pub struct FixedPoint {
    t: Vec<f64>,
    x: Vec<f64>,
    exact: Vec<f64>,
    iterations: usize,
    converged: bool,
}

#[wasm_bindgen]
impl FixedPoint {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// `max |x - exact| / exact`
    #[wasm_bindgen(js_name = maxRelError)]
    pub fn max_rel_error(&self) -> f64 {
        self.x.iter().zip(&self.exact).map(|(x, e)| ((x - e) / e).abs()).fold(0.0, f64::max)
    }
}

/// Picard solve of `x = 1 + I^α(λx)` on `[0, 1]`; the solution is `E_α(λ t^α)`.
#[wasm_bindgen(js_name = solveLinear)]
pub fn solve_linear(alpha: f64, lambda: f64, n: usize) -> Result<FixedPoint, JsError> {
    let outer = OuterSpec::Affine { lambda: 0.0, c: 1.0, forcing: Forcing::Const(1.0) };
    let problem = integral_problem(alpha, PsiFunction::Identity, (0.0, 1.0), 1, outer, KernelSpec::Linear { l: lambda })
        .map_err(js)?;
    let trace = picard_solve_integral(&problem, Grid::graded(0.0, 1.0, n, 2.0).map_err(js)?, &SolveOptions::default())
        .map_err(js)?;
    let t = trace.mesh.t().to_vec();
    let exact = t.iter().map(|&t| mittag_leffler(alpha, lambda * t.powf(alpha))).collect::<Result<_, _>>().map_err(js)?;
    Ok(FixedPoint {
        x: trace.values.component(0),
        exact,
        t,
        iterations: trace.iterations(),
        converged: trace.converged,
    })
}
