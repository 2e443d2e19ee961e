//! Meshes on `[a, b]` and vector-valued samples living on them.

use crate::error::{domain, Error, Result};
use crate::psi::PsiFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grading {
    Uniform,
    /// `t_i = a + (b - a)(i/N)^q`, `q ≥ 1`
    Graded(f64),
}

/// Nodes `a = t_0 < t_1 < … < t_N = b`.
///
/// Offsets `t_i - a` are stored exactly as generated; for strongly graded
/// meshes far from the origin several leading `t_i` may round to the same
/// `f64`, but the offsets stay strictly increasing and are what the discrete
/// operators consume.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    grading: Grading,
    offsets: Vec<f64>,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::build(a, b, n, Grading::Uniform)
    }

    pub fn graded(a: f64, b: f64, n: usize, q: f64) -> Result<Self> {
        if !(1.0..=64.0).contains(&q) {
            return domain(format!("grading exponent must lie in [1, 64], got {q}"));
        }
        Self::build(a, b, n, Grading::Graded(q))
    }

    fn build(a: f64, b: f64, n: usize, grading: Grading) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return domain(format!("grid needs finite a < b, got [{a}, {b}]"));
        }
        if n < 1 {
            return domain("grid needs at least one interval");
        }
        let len = b - a;
        let q = match grading {
            Grading::Uniform => 1.0,
            Grading::Graded(q) => q,
        };
        let offsets: Vec<f64> = (0..=n)
            .map(|i| {
                if i == n {
                    len
                } else {
                    len * (i as f64 / n as f64).powf(q)
                }
            })
            .collect();
        if offsets.windows(2).any(|w| !(w[1] > w[0])) {
            return domain(format!("grid offsets underflow for n = {n}, q = {q}"));
        }
        let mut nodes: Vec<f64> = offsets.iter().map(|d| a + d).collect();
        nodes[n] = b;
        Ok(Self { a, b, grading, offsets, nodes })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }
}

/// A grid paired with ψ; caches the ψ-offsets `u_i = ψ(t_i) - ψ(a)`.
#[derive(Debug, Clone)]
pub struct Mesh {
    grid: Grid,
    psi: PsiFunction,
    u: Vec<f64>,
}

impl Mesh {
    pub fn new(grid: Grid, psi: PsiFunction) -> Result<Self> {
        psi.validate_on(grid.a(), grid.b())?;
        let a = grid.a();
        let u: Vec<f64> = grid.offsets().iter().map(|&d| if d == 0.0 { 0.0 } else { psi.increment(a, d) }).collect();
        if u.windows(2).any(|w| !(w[1] > w[0])) || u.iter().any(|x| !x.is_finite()) {
            return domain(format!("psi = {} does not separate the grid nodes", psi.name()));
        }
        Ok(Self { grid, psi, u })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn psi(&self) -> &PsiFunction {
        &self.psi
    }

    pub fn a(&self) -> f64 {
        self.grid.a()
    }

    pub fn t(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Whether two meshes carry the same nodes and ψ-offsets.
    pub fn same_as(&self, other: &Mesh) -> bool {
        self.grid == other.grid && self.u == other.u
    }
}

/// Vector samples `x(t_i) ∈ ℝ^dim` on a mesh, stored node-major.
///
/// `power = Some(e)` records that the samples behave like `u^e G(u)` near `a`
/// with `G` smooth, `u = ψ(t) - ψ(a)`; integration uses this to stay accurate on
/// the first intervals. For `e < 0` the samples are singular at `a`: node 0 then
/// holds the weighted limit `G(0)` instead of a point value, and norms and bound
/// checks skip it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    dim: usize,
    values: Vec<f64>,
    pub power: Option<f64>,
}

impl GridFunction {
    pub fn zeros(nodes: usize, dim: usize) -> Self {
        Self { dim, values: vec![0.0; nodes * dim], power: None }
    }

    pub fn from_values(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || !values.len().is_multiple_of(dim) {
            return domain(format!("{} values cannot be split into {dim}-vectors", values.len()));
        }
        Ok(Self { dim, values, power: None })
    }

    pub fn with_power(mut self, exponent: f64) -> Self {
        self.power = if exponent == 0.0 { None } else { Some(exponent) };
        self
    }

    /// Whether node 0 stores a weighted limit rather than a point value.
    pub fn is_singular(&self) -> bool {
        self.power.is_some_and(|e| e < 0.0)
    }

    /// Samples `f(t_i, u_i, out)` at every node.
    pub fn from_fn(mesh: &Mesh, dim: usize, mut f: impl FnMut(f64, f64, &mut [f64])) -> Self {
        let mut out = Self::zeros(mesh.len(), dim);
        for i in 0..mesh.len() {
            f(mesh.t()[i], mesh.u()[i], out.node_mut(i));
        }
        out
    }

    /// Scalar samples of `f(t_i, u_i)`.
    pub fn scalar(mesh: &Mesh, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        Self::from_fn(mesh, 1, |t, u, out| out[0] = f(t, u))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn node_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Component `c` as a flat vector.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().skip(c).step_by(self.dim).copied().collect()
    }

    /// First node that carries a point value.
    pub fn first_regular_node(&self) -> usize {
        usize::from(self.is_singular())
    }

    /// Euclidean norm at each node.
    pub fn norms(&self) -> Vec<f64> {
        self.values.chunks(self.dim).map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).collect()
    }

    pub fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.dim != other.dim || self.values.len() != other.values.len() {
            return Err(Error::GridMismatch(format!(
                "{} nodes x {} vs {} nodes x {}",
                self.len(),
                self.dim,
                other.len(),
                other.dim
            )));
        }
        Ok(())
    }

    pub fn check_on(&self, mesh: &Mesh) -> Result<()> {
        if self.len() != mesh.len() {
            return Err(Error::GridMismatch(format!(
                "samples have {} nodes, mesh has {}",
                self.len(),
                mesh.len()
            )));
        }
        Ok(())
    }

    /// `self - other`
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.combine(1.0, other, -1.0)
    }

    /// `c·self`
    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction { dim: self.dim, values: self.values.iter().map(|v| c * v).collect(), power: self.power }
    }

    /// `c1·self + c2·other`. The result keeps the lower leading power; at a
    /// singular endpoint only the terms carrying that power contribute to the
    /// weighted limit at node 0.
    pub fn combine(&self, c1: f64, other: &GridFunction, c2: f64) -> Result<GridFunction> {
        self.check_compatible(other)?;
        let mut values: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| c1 * a + c2 * b).collect();
        let (pa, pb) = (self.power.unwrap_or(0.0), other.power.unwrap_or(0.0));
        let low = pa.min(pb);
        if low < 0.0 {
            for d in 0..self.dim {
                let a = if pa == low { self.values[d] } else { 0.0 };
                let b = if pb == low { other.values[d] } else { 0.0 };
                values[d] = c1 * a + c2 * b;
            }
        }
        Ok(GridFunction { dim: self.dim, values, power: Some(low).filter(|&e| e != 0.0) })
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_nodes_follow_power_law() {
        let g = Grid::graded(0.0, 2.0, 4, 2.0).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.125, 0.5, 1.125, 2.0]);
        assert_eq!(g.intervals(), 4);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(Grid::uniform(1.0, 1.0, 4).is_err());
        assert!(Grid::uniform(0.0, 1.0, 0).is_err());
        assert!(Grid::graded(0.0, 1.0, 4, 0.5).is_err());
    }

    #[test]
    fn strongly_graded_offsets_stay_increasing() {
        let g = Grid::graded(1.0, std::f64::consts::E, 2048, 6.0).unwrap();
        let mesh = Mesh::new(g, PsiFunction::Logarithm).unwrap();
        assert!(mesh.u()[1] > 0.0 && mesh.u()[1] < 1e-18);
        assert!((mesh.u()[2048] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mesh_validates_psi() {
        let g = Grid::uniform(0.0, 1.0, 8).unwrap();
        assert!(Mesh::new(g, PsiFunction::Logarithm).is_err());
    }

    #[test]
    fn grid_function_shapes() {
        assert!(GridFunction::from_values(2, vec![1.0, 2.0, 3.0]).is_err());
        let f = GridFunction::from_values(2, vec![3.0, 4.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.norms(), vec![5.0, 1.0]);
        assert_eq!(f.component(1), vec![4.0, 1.0]);
        let g = GridFunction::zeros(3, 2);
        assert!(matches!(f.sub(&g), Err(Error::GridMismatch(_))));
    }
}
