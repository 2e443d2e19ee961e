//! Product-integration weights for `∫_0^{U_i} (U_i - u)^{μ-1} g(u) du` on a mesh
//! expressed in ψ-offsets `u = ψ(s) - ψ(a)`.
//!
//! The smooth factor is interpolated piecewise linearly and the kernel is
//! integrated exactly, so weights stay finite for every `μ > 0`.

use crate::error::{domain, Result};
use crate::grid::Mesh;
use crate::special::{incomplete_beta_pair, rgamma};

/// Intervals whose left end satisfies `U_j < SINGULAR_REACH · h_j` use incomplete
/// beta moments of `u^e (U_i - u)^{μ-1}`; further out `u^e` is expanded in
/// powers of `h_j/U_j ≤ 1/SINGULAR_REACH` around the left node instead.
const SINGULAR_REACH: f64 = 32.0;

/// Lower-triangular table of raw weights `w_ij`, `0 ≤ j ≤ i`, such that
/// `Σ_j w_ij g_j ≈ ∫_0^{U_i} (U_i - u)^{μ-1} g(u) du`.
///
/// The table does not include the `1/Γ(μ)` factor; `scale()` returns it.
#[derive(Debug, Clone)]
pub struct ProductRule {
    mu: f64,
    nodes: usize,
    power: Option<f64>,
    w: Vec<f64>,
}

#[inline]
fn row_offset(i: usize) -> usize {
    i * (i + 1) / 2
}

/// `1 - (1 - ρ)^b`
#[inline]
fn one_minus_pow(b: f64, rho: f64) -> f64 {
    -(b * (-rho).ln_1p()).exp_m1()
}

/// `∫_0^ρ s (1 - s)^{μ-1} ds`, stable for small `ρ`.
fn first_moment(mu: f64, rho: f64) -> f64 {
    if rho < 0.1 {
        let b = mu - 1.0;
        let mut coef = 1.0;
        let mut pow = rho * rho;
        let mut sum = 0.0;
        for n in 0..60 {
            let term = coef * pow / (n as f64 + 2.0);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            coef *= (n as f64 - b) / (n as f64 + 1.0);
            pow *= rho;
        }
        sum
    } else {
        one_minus_pow(mu, rho) / mu - one_minus_pow(mu + 1.0, rho) / (mu + 1.0)
    }
}

/// Kernel moments over one interval `[U_j, U_j + h]` seen from `U_i = U_j + A`:
/// `(∫ (A - s)^{μ-1} ds, ∫ s (A - s)^{μ-1} ds)` for `s ∈ [0, h]`.
#[inline]
fn interval_moments(mu: f64, big_a: f64, h: f64) -> (f64, f64) {
    let rho = (h / big_a).min(1.0);
    let am = big_a.powf(mu);
    (am * one_minus_pow(mu, rho) / mu, am * big_a * first_moment(mu, rho))
}

/// `P_k = ∫_0^h s^k (A - s)^{μ-1} ds` for `k = 0..out.len()`.
fn power_moments(mu: f64, big_a: f64, h: f64, out: &mut [f64]) {
    let rho = (h / big_a).min(1.0);
    if rho < 0.1 {
        // Σ_n d_n A^{μ-1-n} h^{n+k+1}/(n+k+1), d_n the coefficients of (1-y)^{μ-1}
        let b = mu - 1.0;
        let base = big_a.powf(mu - 1.0) * h;
        for (k, o) in out.iter_mut().enumerate() {
            let mut coef = 1.0;
            let mut pow = base * h.powi(k as i32);
            let mut sum = 0.0;
            for n in 0..40 {
                let term = coef * pow / (n + k + 1) as f64;
                sum += term;
                if term.abs() <= 1e-18 * sum.abs() {
                    break;
                }
                coef *= (n as f64 - b) / (n as f64 + 1.0);
                pow *= rho;
            }
            *o = sum;
        }
    } else {
        for (k, o) in out.iter_mut().enumerate() {
            let p = k as f64 + 1.0;
            *o = big_a.powf(mu + k as f64) * incomplete_beta_pair(p, mu, rho).0;
        }
    }
}

/// Weights on `(G_j, G_{j+1})` for `∫_{U_j}^{U_j+h} u^e (U_i - u)^{μ-1} ℓ(u) du`, `ℓ` the
/// linear interpolant of `G`, using `u^e = U_j^e Σ_k C(e,k) (s/U_j)^k` with `s = u - U_j`.
fn expanded_weights(mu: f64, e: f64, uj: f64, h: f64, big_a: f64) -> (f64, f64) {
    const TERMS: usize = 14;
    let mut p = [0.0; TERMS + 1];
    let x = h / uj;
    let mut used = TERMS;
    let mut c = 1.0;
    for k in 1..TERMS {
        c *= (e - (k as f64 - 1.0)) / k as f64;
        if (c * x.powi(k as i32)).abs() < 1e-17 {
            used = k;
            break;
        }
    }
    power_moments(mu, big_a, h, &mut p[..used + 1]);
    let (mut wl, mut wr) = (0.0, 0.0);
    let mut c = 1.0;
    let mut scale = uj.powf(e);
    for k in 0..used {
        wl += c * scale * (p[k] - p[k + 1] / h);
        wr += c * scale * p[k + 1] / h;
        c *= (e - k as f64) / (k as f64 + 1.0);
        scale /= uj;
    }
    (wl, wr)
}

/// `∫_{x1}^{x2} s^{p-1}(1-s)^{q-1} ds`
fn beta_segment(p: f64, q: f64, x1: f64, x2: f64) -> f64 {
    let (l1, u1) = incomplete_beta_pair(p, q, x1);
    let (l2, u2) = incomplete_beta_pair(p, q, x2);
    if x1 >= 0.5 {
        u1 - u2
    } else {
        l2 - l1
    }
}

impl ProductRule {
    /// Product-trapezoid weights for a smooth integrand.
    pub fn trapezoid(mesh: &Mesh, mu: f64) -> Result<Self> {
        Self::build(mesh, mu, None)
    }

    /// Weights acting on `G = u^{-e} g` for an integrand `g = u^e G(u)`, `e > -1`:
    /// `G` is interpolated linearly and `u^e (U_i - u)^{μ-1}` integrated exactly.
    pub fn weighted(mesh: &Mesh, mu: f64, e: f64) -> Result<Self> {
        if !(e > -1.0 && e.is_finite()) {
            return domain(format!("endpoint exponent must exceed -1, got {e}"));
        }
        Self::build(mesh, mu, Some(e))
    }

    fn build(mesh: &Mesh, mu: f64, power: Option<f64>) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return domain(format!("integration order must be positive, got {mu}"));
        }
        let u = mesh.u();
        let n = u.len();
        let mut w = vec![0.0; row_offset(n)];
        let reach = match power {
            Some(_) => (0..n - 1).find(|&j| u[j] >= SINGULAR_REACH * (u[j + 1] - u[j])).unwrap_or(n - 1),
            None => 0,
        };
        for i in 1..n {
            let row = &mut w[row_offset(i)..row_offset(i) + i + 1];
            let ui = u[i];
            for j in 0..i {
                let h = u[j + 1] - u[j];
                let (wl, wr) = match power {
                    Some(e) if j < reach => {
                        let (x1, x2) = (u[j] / ui, if j + 1 == i { 1.0 } else { u[j + 1] / ui });
                        let m0 = ui.powf(e + mu) * beta_segment(e + 1.0, mu, x1, x2);
                        let m1 = ui.powf(e + mu + 1.0) * beta_segment(e + 2.0, mu, x1, x2);
                        ((u[j + 1] * m0 - m1) / h, (m1 - u[j] * m0) / h)
                    }
                    Some(e) => expanded_weights(mu, e, u[j], h, ui - u[j]),
                    None => {
                        let (i0, i1) = interval_moments(mu, ui - u[j], h);
                        (i0 - i1 / h, i1 / h)
                    }
                };
                row[j] += wl;
                row[j + 1] += wr;
            }
        }
        Ok(Self { mu, nodes: n, power, w })
    }

    /// Left-rectangle weights `w_ij = ∫_{U_j}^{U_{j+1}} (U_i - u)^{μ-1} du` for `j < i`
    /// and `w_ii = 0`: an explicit rule that never looks at the current node.
    pub fn left_rectangle(mesh: &Mesh, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return domain(format!("integration order must be positive, got {mu}"));
        }
        let u = mesh.u();
        let n = u.len();
        let mut w = vec![0.0; row_offset(n)];
        for i in 1..n {
            let row = &mut w[row_offset(i)..row_offset(i) + i + 1];
            for j in 0..i {
                let big_a = u[i] - u[j];
                let rho = ((u[j + 1] - u[j]) / big_a).min(1.0);
                row[j] = big_a.powf(mu) * one_minus_pow(mu, rho) / mu;
            }
        }
        Ok(Self { mu, nodes: n, power: None, w })
    }

    pub fn order(&self) -> f64 {
        self.mu
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Endpoint exponent the weights were built for.
    pub fn endpoint_power(&self) -> Option<f64> {
        self.power
    }

    /// `1/Γ(μ)`
    pub fn scale(&self) -> f64 {
        rgamma(self.mu)
    }

    /// Raw weights for node `i`, indexed by `j = 0..=i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[row_offset(i)..row_offset(i) + i + 1]
    }

    /// `(1/Γ(μ)) Σ_j w_ij g_j` at every node (node 0 gets 0).
    pub fn integrate(&self, g: &[f64]) -> Vec<f64> {
        debug_assert_eq!(g.len(), self.nodes);
        let s = self.scale();
        (0..self.nodes).map(|i| s * self.row(i).iter().zip(g).map(|(w, x)| w * x).sum::<f64>()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::psi::PsiFunction;
    use crate::special::{beta, gamma};

    fn mesh(n: usize, q: f64) -> Mesh {
        Mesh::new(Grid::graded(0.0, 1.0, n, q).unwrap(), PsiFunction::Identity).unwrap()
    }

    #[test]
    fn linear_integrands_are_exact() {
        let m = mesh(40, 2.0);
        for &mu in &[0.3, 0.5, 1.0, 2.7] {
            let r = ProductRule::trapezoid(&m, mu).unwrap();
            let g: Vec<f64> = m.u().iter().map(|u| 2.0 + 3.0 * u).collect();
            let got = r.integrate(&g);
            for (i, &u) in m.u().iter().enumerate() {
                // I^μ (2 + 3u) = 2u^μ/Γ(μ+1) + 3u^{μ+1}/Γ(μ+2)
                let exact = 2.0 * u.powf(mu) / gamma(mu + 1.0) + 3.0 * u.powf(mu + 1.0) / gamma(mu + 2.0);
                assert!((got[i] - exact).abs() <= 1e-13 * exact.max(1e-300), "mu={mu} i={i}");
            }
        }
    }

    #[test]
    fn singular_weights_are_exact_for_weighted_linears() {
        let m = mesh(200, 1.5);
        let (mu, e) = (0.6, -0.4);
        let r = ProductRule::weighted(&m, mu, e).unwrap();
        // g = u^e (1 + u): I^μ g = Γ(e+1)/Γ(e+μ+1) u^{e+μ} + Γ(e+2)/Γ(e+μ+2) u^{e+μ+1}
        let big_g: Vec<f64> = m.u().iter().map(|u| 1.0 + u).collect();
        let got = r.integrate(&big_g);
        for (i, &u) in m.u().iter().enumerate().skip(1) {
            let exact = gamma(e + 1.0) / gamma(e + mu + 1.0) * u.powf(e + mu)
                + gamma(e + 2.0) / gamma(e + mu + 2.0) * u.powf(e + mu + 1.0);
            assert!((got[i] - exact).abs() <= 1e-12 * exact, "i={i}: {} vs {exact}", got[i]);
        }
    }

    #[test]
    fn small_ratio_moment_matches_closed_form() {
        let (mu, rho) = (0.4, 0.09);
        let closed = one_minus_pow(mu, rho) / mu - one_minus_pow(mu + 1.0, rho) / (mu + 1.0);
        assert!((first_moment(mu, rho) - closed).abs() < 1e-15);
        assert!((beta_segment(0.5, 0.5, 0.0, 1.0) - beta(0.5, 0.5)).abs() < 1e-14);
    }

    #[test]
    fn rectangle_weights_sum_to_kernel_mass() {
        let m = mesh(30, 2.0);
        let r = ProductRule::left_rectangle(&m, 0.5).unwrap();
        for i in 1..m.len() {
            let s: f64 = r.row(i).iter().sum();
            assert!((s - m.u()[i].sqrt() / 0.5).abs() < 1e-13);
            assert_eq!(r.row(i)[i], 0.0);
        }
    }

    #[test]
    fn weights_are_nonnegative() {
        let m = mesh(64, 3.0);
        for rule in [ProductRule::trapezoid(&m, 0.3).unwrap(), ProductRule::weighted(&m, 0.3, -0.7).unwrap()] {
            assert!(rule.w.iter().all(|&w| w >= 0.0));
        }
    }
}
