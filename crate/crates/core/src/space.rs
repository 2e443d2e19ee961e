//! The weighted sup-norm `‖x‖_ξ = sup ‖x(t)‖ / E_α[ξ(ψ(t) - ψ(a))^α]` and its metric.

use crate::error::{domain, Error, Result};
use crate::grid::{GridFunction, Mesh};
use crate::special::mittag_leffler;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSpace {
    pub xi: f64,
    pub alpha: f64,
}

impl WeightedSpace {
    pub fn new(xi: f64, alpha: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return domain(format!("weight rate xi must be positive, got {xi}"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(format!("order must lie in (0, 1], got {alpha}"));
        }
        Ok(Self { xi, alpha })
    }

    /// `E_α(ξ u^α)` at ψ-offset `u`.
    pub fn weight(&self, u: f64) -> Result<f64> {
        mittag_leffler(self.alpha, self.xi * u.powf(self.alpha))
    }

    pub fn weights(&self, mesh: &Mesh) -> Result<Vec<f64>> {
        mesh.u().iter().map(|&u| self.weight(u)).collect()
    }

    pub fn norm(&self, x: &GridFunction, mesh: &Mesh) -> Result<f64> {
        self.norm_with(x, &self.weights(mesh)?)
    }

    /// Norm against precomputed weights; node 0 is skipped for singular samples.
    pub fn norm_with(&self, x: &GridFunction, weights: &[f64]) -> Result<f64> {
        if x.is_empty() {
            return domain("weighted norm of an empty trace");
        }
        if x.len() != weights.len() {
            return Err(Error::GridMismatch(format!(
                "trace has {} nodes, weights cover {}",
                x.len(),
                weights.len()
            )));
        }
        let norms = x.norms();
        Ok((x.first_regular_node()..x.len()).map(|i| norms[i] / weights[i]).fold(0.0, f64::max))
    }

    pub fn metric(&self, x: &GridFunction, y: &GridFunction, mesh: &Mesh) -> Result<f64> {
        self.norm(&x.sub(y)?, mesh)
    }

    pub fn metric_with(&self, x: &GridFunction, y: &GridFunction, weights: &[f64]) -> Result<f64> {
        self.norm_with(&x.sub(y)?, weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::psi::PsiFunction;

    fn mesh() -> Mesh {
        Mesh::new(Grid::graded(0.0, 1.0, 64, 2.0).unwrap(), PsiFunction::Identity).unwrap()
    }

    #[test]
    fn zero_and_weight_traces() {
        let m = mesh();
        let w = WeightedSpace::new(1.5, 0.6).unwrap();
        assert_eq!(w.norm(&GridFunction::zeros(m.len(), 2), &m).unwrap(), 0.0);
        let x = GridFunction::scalar(&m, |_, u| w.weight(u).unwrap());
        assert!((w.norm(&x, &m).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bielecki_example() {
        let m = mesh();
        let w = WeightedSpace::new(2.0, 1.0).unwrap();
        let x = GridFunction::scalar(&m, |t, _| t.exp());
        assert!((w.norm(&x, &m).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters_and_shapes() {
        assert!(WeightedSpace::new(0.0, 0.5).is_err());
        assert!(WeightedSpace::new(1.0, 1.5).is_err());
        let m = mesh();
        let w = WeightedSpace::new(1.0, 0.5).unwrap();
        assert!(matches!(w.norm(&GridFunction::zeros(3, 1), &m), Err(Error::GridMismatch(_))));
        assert!(matches!(w.norm_with(&GridFunction::zeros(0, 1), &[]), Err(Error::Domain(_))));
    }

    #[test]
    fn singular_node_is_skipped() {
        let m = mesh();
        let w = WeightedSpace::new(1.0, 0.5).unwrap();
        let mut x = GridFunction::zeros(m.len(), 1);
        x.node_mut(0)[0] = 1e300;
        let x = x.with_power(-0.5);
        assert_eq!(w.norm(&x, &m).unwrap(), 0.0);
    }
}
