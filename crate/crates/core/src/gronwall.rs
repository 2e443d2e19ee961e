//! ψ-fractional Gronwall inequalities: explicit bounds and brute-force
//! extremal solutions of the corresponding equalities.

use rand::Rng;

use crate::bound::{BoundCurve, BoundKind};
use crate::error::{domain, Error, Result};
use crate::grid::Mesh;
use crate::quadrature::ProductRule;
use crate::special::{gamma, ln_gamma, mittag_leffler};

/// `r(t, σ)` sampled on the grid triangle `a ≤ σ ≤ t ≤ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleKernel {
    t: Vec<f64>,
    values: Vec<f64>,
}

impl TriangleKernel {
    pub fn from_fn(mesh: &Mesh, f: impl Fn(f64, f64) -> f64) -> Self {
        let t = mesh.t().to_vec();
        let mut values = Vec::with_capacity(t.len() * (t.len() + 1) / 2);
        for i in 0..t.len() {
            for j in 0..=i {
                values.push(f(t[i], t[j]));
            }
        }
        Self { t, values }
    }

    pub fn constant(mesh: &Mesh, c: f64) -> Self {
        Self::from_fn(mesh, |_, _| c)
    }

    /// `r(t_i, t_j)`, `j ≤ i`
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(j <= i);
        self.values[i * (i + 1) / 2 + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.t.len()).map(|i| self.at(i, i)).collect()
    }

    /// Bilinear interpolation at `(t, s)` with `a ≤ s ≤ t ≤ b`; corners above the
    /// diagonal are replaced by the diagonal value of their row.
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        let (i, wt) = self.locate(t);
        let (j, ws) = self.locate(s.min(t));
        let corner = |i: usize, j: usize| self.at(i, j.min(i));
        let i1 = (i + 1).min(self.t.len() - 1);
        let j1 = (j + 1).min(self.t.len() - 1);
        let lo = corner(i, j) * (1.0 - ws) + corner(i, j1) * ws;
        let hi = corner(i1, j) * (1.0 - ws) + corner(i1, j1) * ws;
        lo * (1.0 - wt) + hi * wt
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.t.len();
        if n == 1 || x <= self.t[0] {
            return (0, 0.0);
        }
        if x >= self.t[n - 1] {
            return (n - 2, 1.0);
        }
        let k = self.t.partition_point(|&v| v <= x) - 1;
        (k, (x - self.t[k]) / (self.t[k + 1] - self.t[k]))
    }

    fn all(&self, pred: impl Fn(f64) -> bool) -> bool {
        self.values.iter().all(|&v| pred(v))
    }

    /// Nondecreasing in both arguments over the sampled triangle.
    pub fn is_nondecreasing(&self) -> bool {
        let n = self.t.len();
        (0..n).all(|i| {
            (0..=i).all(|j| {
                (j == 0 || self.at(i, j) >= self.at(i, j - 1)) && (i + 1 == n || self.at(i, j) <= self.at(i + 1, j))
            })
        })
    }

    /// The kernel with `f` applied to every sample.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { t: self.t.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Nodewise `self ≤ other`.
    pub fn dominated_by(&self, other: &TriangleKernel) -> bool {
        self.values.len() == other.values.len() && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// Which implicit inequality the extremal solve targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GronwallMode {
    /// `u ≤ v + g ∫ N^α(t,τ) r(t,τ) u(τ) dτ`
    Linear,
    /// `u ≤ g̃ + ∫ N^α(t,τ) p(τ)[u(τ) + ∫ N^α(τ,σ) r(τ,σ) u(σ) dσ] dτ`
    Nested,
}

/// Data of the two Gronwall-type inequalities, sampled on a mesh.
#[derive(Debug, Clone)]
pub struct GronwallData {
    pub mesh: Mesh,
    pub alpha: f64,
    pub v: Vec<f64>,
    pub g: Vec<f64>,
    pub p: Vec<f64>,
    pub g_tilde: Vec<f64>,
    pub r: TriangleKernel,
}

fn nondecreasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] >= w[0])
}

impl GronwallData {
    /// Samples `v, g, p, g̃` and `r` from closures of `t` (and `σ`).
    pub fn from_fns(
        mesh: Mesh,
        alpha: f64,
        v: impl Fn(f64) -> f64,
        g: impl Fn(f64) -> f64,
        p: impl Fn(f64) -> f64,
        g_tilde: impl Fn(f64) -> f64,
        r: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let sample = |f: &dyn Fn(f64) -> f64| mesh.t().iter().map(|&t| f(t)).collect::<Vec<_>>();
        let data = Self {
            alpha,
            v: sample(&v),
            g: sample(&g),
            p: sample(&p),
            g_tilde: sample(&g_tilde),
            r: TriangleKernel::from_fn(&mesh, r),
            mesh,
        };
        data.validate()?;
        Ok(data)
    }

    /// Nonnegativity, shapes, order, and monotone `g`, `g̃`.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return domain(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        let n = self.mesh.len();
        for (name, x) in [("v", &self.v), ("g", &self.g), ("p", &self.p), ("g_tilde", &self.g_tilde)] {
            if x.len() != n {
                return Err(Error::GridMismatch(format!("{name} has {} samples, mesh has {n}", x.len())));
            }
            if !x.iter().all(|&y| y >= 0.0 && y.is_finite()) {
                return Err(Error::Hypothesis(format!("{name} must be nonnegative and finite")));
            }
        }
        if self.r.t.len() != n {
            return Err(Error::GridMismatch(format!("r is sampled on {} nodes, mesh has {n}", self.r.t.len())));
        }
        if !self.r.all(|y| y >= 0.0 && y.is_finite()) {
            return Err(Error::Hypothesis("r must be nonnegative and finite".into()));
        }
        if !nondecreasing(&self.g) {
            return Err(Error::Hypothesis("g must be nondecreasing".into()));
        }
        if !nondecreasing(&self.g_tilde) {
            return Err(Error::Hypothesis("g_tilde must be nondecreasing".into()));
        }
        Ok(())
    }

    fn check_monotone_data(&self) -> Result<()> {
        if !nondecreasing(&self.v) {
            return Err(Error::Hypothesis("the closed-form bound needs v nondecreasing".into()));
        }
        if !nondecreasing(&self.r.diagonal()) {
            return Err(Error::Hypothesis("the closed-form bound needs r nondecreasing".into()));
        }
        Ok(())
    }

    /// Random data satisfying every hypothesis of both inequalities: nonnegative
    /// piecewise-linear nondecreasing `v, g, p, g̃`, and `r(t,σ) = c·A(t)·B(σ)` with
    /// `A, B` nondecreasing. `g`, `p` and `c` are rescaled so that every
    /// Mittag-Leffler argument of the closed-form bounds stays below 2 at `b`,
    /// keeping the bounds finite for small orders.
    pub fn random(mesh: Mesh, alpha: f64, rng: &mut impl Rng) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(format!("alpha must lie in (0, 1], got {alpha}"));
        }
        let (a, b) = (mesh.grid().a(), mesh.grid().b());
        let mut ramp = |scale: f64| RandomRamp::new(a, b, scale, rng);
        let (v, g, p, gt) = (ramp(2.0), ramp(1.0), ramp(1.0), ramp(2.0));
        let (ra, rb) = (ramp(1.0), ramp(1.0));
        let (ta, tb, tc) = (rng.random_range(0.05..2.0), rng.random_range(0.05..2.0), rng.random_range(0.05..2.0));
        let ua = mesh.u()[mesh.len() - 1].powf(alpha) * gamma(alpha);
        let r_max = ra.eval(b) * rb.eval(b);
        let c = if r_max > 0.0 { ta / (r_max * ua) } else { 1.0 };
        let g_scale = if g.eval(b) * r_max > 0.0 { tb / (g.eval(b) * c * r_max * ua) } else { 1.0 };
        let inner = mittag_leffler(alpha, c * r_max * ua)?;
        let p_scale = if p.eval(b) > 0.0 { tc / (p.eval(b) * inner * ua) } else { 1.0 };
        Self::from_fns(
            mesh,
            alpha,
            |t| v.eval(t),
            |t| g_scale * g.eval(t),
            |t| p_scale * p.eval(t),
            |t| gt.eval(t),
            |t, s| c * ra.eval(t) * rb.eval(s),
        )
    }

    fn ml_arg_scale(&self) -> f64 {
        gamma(self.alpha)
    }
}

/// Nonnegative, nondecreasing piecewise-linear function with random knots.
struct RandomRamp {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl RandomRamp {
    fn new(a: f64, b: f64, scale: f64, rng: &mut impl Rng) -> Self {
        const K: usize = 6;
        let mut knots: Vec<f64> = (0..K).map(|_| rng.random_range(a..b)).collect();
        knots.push(a);
        knots.push(b);
        knots.sort_by(f64::total_cmp);
        let mut level = rng.random_range(0.0..scale);
        let values = knots
            .iter()
            .map(|_| {
                let out = level;
                // occasional flat pieces keep the generator off the strictly increasing case
                if rng.random_bool(0.7) {
                    level += rng.random_range(0.0..scale / K as f64);
                }
                out
            })
            .collect();
        Self { knots, values }
    }

    fn eval(&self, t: f64) -> f64 {
        let k = self.knots.partition_point(|&x| x <= t).clamp(1, self.knots.len() - 1);
        let (x0, x1) = (self.knots[k - 1], self.knots[k]);
        if x1 <= x0 {
            return self.values[k];
        }
        let w = ((t - x0) / (x1 - x0)).clamp(0.0, 1.0);
        self.values[k - 1] + (self.values[k] - self.values[k - 1]) * w
    }
}

/// Default number of series terms.
pub const SERIES_TERMS: usize = 40;

/// Relative size below which further series terms are dropped.
const SERIES_CUTOFF: f64 = 1e-14;

/// `v + Σ_{k=1}^{k_max} (gΓ(α))^k/Γ(αk) ∫ N^{αk}(t,τ) r(t,τ) v(τ) dτ` at every node,
/// the kernel integral taken by product trapezoid weights of order `αk`.
/// Stops early once every node's term drops below `1e-14` of its partial sum.
pub fn series_bound(data: &GronwallData, k_max: usize) -> Result<BoundCurve> {
    data.validate()?;
    if k_max == 0 {
        return domain("series bound needs at least one term");
    }
    let n = data.mesh.len();
    let alpha = data.alpha;
    let ln_gg: Vec<f64> = data.g.iter().map(|&g| (g * data.ml_arg_scale()).ln()).collect();
    let mut sum = data.v.clone();
    let mut last = 0.0;
    for k in 1..=k_max {
        let order = alpha * k as f64;
        let rule = ProductRule::trapezoid(&data.mesh, order)?;
        let lg = ln_gamma(order);
        let mut worst_ratio: f64 = 0.0;
        last = 0.0;
        for i in 1..n {
            if data.g[i] == 0.0 {
                continue;
            }
            let quad: f64 = rule.row(i).iter().enumerate().map(|(j, w)| w * data.r.at(i, j) * data.v[j]).sum();
            let term = (k as f64 * ln_gg[i] - lg).exp() * quad;
            if !term.is_finite() {
                return Err(Error::Overflow(format!("series term {k} at node {i}")));
            }
            sum[i] += term;
            last = f64::max(last, term);
            if sum[i] > 0.0 {
                worst_ratio = worst_ratio.max(term / sum[i]);
            }
        }
        if worst_ratio < SERIES_CUTOFF {
            break;
        }
    }
    let mut curve = BoundCurve::new(BoundKind::GronwallSeries, data.mesh.t().to_vec(), sum);
    curve.truncation = Some(last);
    Ok(curve)
}

/// `v(t) E_α[g(t) r(t,t) Γ(α) (ψ(t) - ψ(a))^α]`
pub fn ml_bound(data: &GronwallData) -> Result<BoundCurve> {
    data.validate()?;
    data.check_monotone_data()?;
    let c = data.ml_arg_scale();
    let values = (0..data.mesh.len())
        .map(|i| {
            let u = data.mesh.u()[i];
            Ok(data.v[i] * mittag_leffler(data.alpha, data.g[i] * data.r.at(i, i) * c * u.powf(data.alpha))?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve::new(BoundKind::GronwallMittagLeffler, data.mesh.t().to_vec(), values))
}

/// `g̃(t) E_α[p(t) Γ(α) E_α(r(t,t) Γ(α) (ψ(t) - ψ(a))^α) (ψ(t) - ψ(a))^α]`
pub fn nested_ml_bound(data: &GronwallData) -> Result<BoundCurve> {
    data.validate()?;
    let values = nested_values(&data.mesh, data.alpha, &data.g_tilde, &data.p, &data.r.diagonal())?;
    Ok(BoundCurve::new(BoundKind::GronwallNested, data.mesh.t().to_vec(), values))
}

/// Nodewise nested Mittag-Leffler shape from diagonal samples `r(t_i, t_i)`.
pub(crate) fn nested_values(mesh: &Mesh, alpha: f64, g_tilde: &[f64], p: &[f64], r_diag: &[f64]) -> Result<Vec<f64>> {
    let c = gamma(alpha);
    (0..mesh.len())
        .map(|i| {
            let ua = mesh.u()[i].powf(alpha);
            let inner = mittag_leffler(alpha, r_diag[i] * c * ua)?;
            Ok(g_tilde[i] * mittag_leffler(alpha, p[i] * c * inner * ua)?)
        })
        .collect()
}

/// Discrete extremal solution of the equality version of the inequality.
///
/// Uses the explicit left-rectangle product rule: kernel moments are exact and
/// the integrand is frozen at the left node of each interval. For the
/// nondecreasing data the hypotheses require, this underestimates every kernel
/// integral, so the result never exceeds the continuous extremal solution.
pub fn extremal_solve(data: &GronwallData, mode: GronwallMode) -> Result<Vec<f64>> {
    data.validate()?;
    let n = data.mesh.len();
    let rule = ProductRule::left_rectangle(&data.mesh, data.alpha)?;
    let mut u = vec![0.0; n];
    match mode {
        GronwallMode::Linear => {
            for i in 0..n {
                let acc: f64 = rule.row(i)[..i].iter().enumerate().map(|(j, w)| w * data.r.at(i, j) * u[j]).sum();
                u[i] = data.v[i] + data.g[i] * acc;
            }
        }
        GronwallMode::Nested => {
            let mut z = vec![0.0; n];
            for i in 0..n {
                z[i] = rule.row(i)[..i].iter().enumerate().map(|(m, w)| w * data.r.at(i, m) * u[m]).sum();
                let acc: f64 = rule.row(i)[..i].iter().enumerate().map(|(j, w)| w * data.p[j] * (u[j] + z[j])).sum();
                u[i] = data.g_tilde[i] + acc;
            }
        }
    }
    if let Some(i) = u.iter().position(|x| !x.is_finite()) {
        return Err(Error::Overflow(format!("extremal solution overflows at node {i}")));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::psi::PsiFunction;

    fn mesh(n: usize) -> Mesh {
        Mesh::new(Grid::graded(0.0, 1.0, n, 2.0).unwrap(), PsiFunction::Identity).unwrap()
    }

    fn data(alpha: f64, v: f64, g: f64, r: f64) -> GronwallData {
        GronwallData::from_fns(mesh(64), alpha, |_| v, |_| g, |_| 0.0, |_| 1.0, |_, _| r).unwrap()
    }

    #[test]
    fn zero_kernel_or_coefficient_gives_v() {
        for d in [data(0.5, 1.5, 1.0, 0.0), data(0.5, 1.5, 0.0, 2.0)] {
            assert!(series_bound(&d, 10).unwrap().values.iter().all(|&b| b == 1.5));
            assert!(ml_bound(&d).unwrap().values.iter().all(|&b| b == 1.5));
        }
        let d = data(0.5, 1.5, 1.0, 0.0);
        assert!(extremal_solve(&d, GronwallMode::Linear).unwrap().iter().all(|&u| u == 1.5));
    }

    #[test]
    fn classical_gronwall() {
        let d = data(1.0, 1.0, 1.0, 0.7);
        let b = ml_bound(&d).unwrap();
        for (t, v) in b.t.iter().zip(&b.values) {
            assert!((v - (0.7 * t).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn nested_degenerate_cases() {
        let m = mesh(32);
        let d = GronwallData::from_fns(m.clone(), 0.5, |_| 0.0, |_| 0.0, |_| 0.0, |t| 1.0 + t, |_, _| 1.0).unwrap();
        let b = nested_ml_bound(&d).unwrap();
        assert!(b.values.iter().zip(m.t()).all(|(v, t)| *v == 1.0 + t));
        let d = GronwallData::from_fns(m, 1.0, |_| 0.0, |_| 0.0, |_| 0.8, |_| 1.0, |_, _| 0.0).unwrap();
        let b = nested_ml_bound(&d).unwrap();
        assert!(b.values.iter().zip(&b.t).all(|(v, t)| (v - (0.8 * t).exp()).abs() < 1e-13));
    }

    #[test]
    fn rejects_invalid_data() {
        let m = mesh(8);
        assert!(matches!(
            GronwallData::from_fns(m.clone(), 0.5, |_| -1.0, |_| 1.0, |_| 0.0, |_| 0.0, |_, _| 1.0),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            GronwallData::from_fns(m.clone(), 0.5, |_| 1.0, |t| 1.0 - t, |_| 0.0, |_| 0.0, |_, _| 1.0),
            Err(Error::Hypothesis(_))
        ));
        let d = GronwallData::from_fns(m, 0.5, |t| 1.0 - t, |_| 1.0, |_| 0.0, |_| 0.0, |_, _| 1.0).unwrap();
        assert!(matches!(ml_bound(&d), Err(Error::Hypothesis(_))));
        assert!(series_bound(&d, 0).is_err());
    }

    #[test]
    fn kernel_interpolation() {
        let m = mesh(16);
        let r = TriangleKernel::from_fn(&m, |t, s| 1.0 + 2.0 * t + 3.0 * s);
        assert!((r.eval(0.5, 0.25) - 2.75).abs() < 1e-12);
        assert_eq!(r.eval(m.t()[5], m.t()[3]), r.at(5, 3));
        assert!(r.is_nondecreasing());
    }

    #[test]
    fn random_data_respects_hypotheses() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let d = GronwallData::random(mesh(32), 0.5, &mut rng).unwrap();
            assert!(nondecreasing(&d.v), "v");
            assert!(nondecreasing(&d.p), "p");
            assert!(d.r.is_nondecreasing(), "r");
        }
    }

    #[test]
    fn extremal_solutions_stay_below_bounds() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for k in 0..40 {
            let alpha = [0.3, 0.5, 0.8, 1.0][k % 4];
            let d = GronwallData::random(mesh(96), alpha, &mut rng).unwrap();
            let lin = extremal_solve(&d, GronwallMode::Linear).unwrap();
            let ml = ml_bound(&d).unwrap();
            let nest = extremal_solve(&d, GronwallMode::Nested).unwrap();
            let nb = nested_ml_bound(&d).unwrap();
            for i in 0..lin.len() {
                assert!(lin[i] <= ml.values[i] * (1.0 + 1e-9), "linear k={k} i={i}");
                assert!(nest[i] <= nb.values[i] * (1.0 + 1e-9), "nested k={k} i={i}");
            }
        }
    }
}
