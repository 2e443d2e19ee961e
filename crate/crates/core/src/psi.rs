//! Admissible ψ functions and the pointwise kernels built from them.

use crate::error::{domain, Result};
use crate::special::rgamma;
use std::fmt;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user supplied ψ given by its value and derivative.
#[derive(Clone)]
pub struct CustomPsi {
    pub name: String,
    eval: ScalarFn,
    deriv: ScalarFn,
}

impl CustomPsi {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), eval: Arc::new(eval), deriv: Arc::new(deriv) }
    }
}

impl fmt::Debug for CustomPsi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPsi").field("name", &self.name).finish_non_exhaustive()
    }
}

/// An increasing ψ with continuous, positive derivative on the problem interval.
#[derive(Debug, Clone)]
pub enum PsiFunction {
    /// ψ(t) = t
    Identity,
    /// ψ(t) = t^ρ, ρ > 0, requires a ≥ 0
    Power { rho: f64 },
    /// ψ(t) = ln t, requires a > 0
    Logarithm,
    /// ψ(t) = e^{σt}, σ > 0
    Exponential { sigma: f64 },
    Custom(CustomPsi),
}

impl PsiFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            PsiFunction::Identity => t,
            PsiFunction::Power { rho } => t.powf(*rho),
            PsiFunction::Logarithm => t.ln(),
            PsiFunction::Exponential { sigma } => (sigma * t).exp(),
            PsiFunction::Custom(c) => (c.eval)(t),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            PsiFunction::Identity => 1.0,
            PsiFunction::Power { rho } => rho * t.powf(rho - 1.0),
            PsiFunction::Logarithm => 1.0 / t,
            PsiFunction::Exponential { sigma } => sigma * (sigma * t).exp(),
            PsiFunction::Custom(c) => (c.deriv)(t),
        }
    }

    /// `ψ(a + δ) - ψ(a)` without cancellation for small `δ`.
    pub fn increment(&self, a: f64, delta: f64) -> f64 {
        match self {
            PsiFunction::Identity => delta,
            PsiFunction::Power { rho } => {
                if a == 0.0 {
                    delta.powf(*rho)
                } else {
                    a.powf(*rho) * (rho * (delta / a).ln_1p()).exp_m1()
                }
            }
            PsiFunction::Logarithm => (delta / a).ln_1p(),
            PsiFunction::Exponential { sigma } => (sigma * a).exp() * (sigma * delta).exp_m1(),
            PsiFunction::Custom(c) => (c.eval)(a + delta) - (c.eval)(a),
        }
    }

    pub fn name(&self) -> String {
        match self {
            PsiFunction::Identity => "identity".into(),
            PsiFunction::Power { rho } => format!("power({rho})"),
            PsiFunction::Logarithm => "logarithm".into(),
            PsiFunction::Exponential { sigma } => format!("exponential({sigma})"),
            PsiFunction::Custom(c) => c.name.clone(),
        }
    }

    /// Checks the family constraints and strict monotonicity on `[a, b]`.
    pub fn validate_on(&self, a: f64, b: f64) -> Result<()> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return domain(format!("interval [{a}, {b}] is not a proper finite interval"));
        }
        match self {
            PsiFunction::Power { rho } => {
                if !(*rho > 0.0) {
                    return domain(format!("power psi needs rho > 0, got {rho}"));
                }
                if a < 0.0 {
                    return domain(format!("power psi needs a >= 0, got a = {a}"));
                }
            }
            PsiFunction::Logarithm if a <= 0.0 => {
                return domain(format!("logarithm psi needs a > 0, got a = {a}"));
            }
            PsiFunction::Exponential { sigma } if !(*sigma > 0.0) => {
                return domain(format!("exponential psi needs sigma > 0, got {sigma}"));
            }
            _ => {}
        }
        const SAMPLES: usize = 64;
        for i in 1..=SAMPLES {
            let t = a + (b - a) * i as f64 / SAMPLES as f64;
            let d = self.deriv(t);
            if !(d > 0.0 && d.is_finite()) {
                return domain(format!("psi'({t}) = {d} is not positive and finite on [{a}, {b}]"));
            }
        }
        Ok(())
    }

    /// Largest discrepancy between `deriv` and a centered difference with step `h`
    /// over interior sample points of `[a, b]`.
    pub fn derivative_discrepancy(&self, a: f64, b: f64, h: f64) -> f64 {
        (1..16)
            .map(|i| {
                let t = a + (b - a) * i as f64 / 16.0;
                let fd = (self.eval(t + h) - self.eval(t - h)) / (2.0 * h);
                (fd - self.deriv(t)).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("order must lie in (0, 1], got {alpha}"));
    }
    Ok(())
}

/// `N_ψ^α(t, s) = ψ'(s)(ψ(t) - ψ(s))^{α-1}` for `s < t`.
pub fn kernel_n(psi: &PsiFunction, alpha: f64, t: f64, s: f64) -> Result<f64> {
    check_order(alpha)?;
    if !(s < t) {
        return domain(format!("kernel needs s < t, got s = {s}, t = {t}"));
    }
    Ok(psi.deriv(s) * psi.increment(s, t - s).powf(alpha - 1.0))
}

/// `Ψ^γ(t, a) = (ψ(t) - ψ(a))^{γ-1} / Γ(γ)` for `t > a`.
pub fn psi_gamma_weight(psi: &PsiFunction, gamma: f64, t: f64, a: f64) -> Result<f64> {
    check_order(gamma)?;
    if !(t > a) {
        return domain(format!("endpoint weight needs t > a, got t = {t}, a = {a}"));
    }
    Ok(gamma_weight_at_offset(psi.increment(a, t - a), gamma))
}

/// `Ψ^γ` expressed through the ψ-offset `u = ψ(t) - ψ(a)`.
pub fn gamma_weight_at_offset(u: f64, gamma: f64) -> f64 {
    if gamma == 1.0 {
        1.0
    } else {
        u.powf(gamma - 1.0) * rgamma(gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_n(&PsiFunction::Identity, 1.0, 2.0, 1.0).unwrap(), 1.0);
        assert_eq!(kernel_n(&PsiFunction::Identity, 0.5, 1.0, 0.0).unwrap(), 1.0);
        let v = kernel_n(&PsiFunction::Logarithm, 0.5, E, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_domain_errors() {
        assert!(kernel_n(&PsiFunction::Identity, 0.5, 1.0, 1.0).is_err());
        assert!(kernel_n(&PsiFunction::Identity, 0.5, 1.0, 2.0).is_err());
        assert!(kernel_n(&PsiFunction::Identity, 1.5, 2.0, 1.0).is_err());
        assert!(kernel_n(&PsiFunction::Identity, 0.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn gamma_weight_examples() {
        assert_eq!(psi_gamma_weight(&PsiFunction::Identity, 1.0, 5.0, 0.0).unwrap(), 1.0);
        let v = psi_gamma_weight(&PsiFunction::Identity, 0.5, 1.25, 0.25).unwrap();
        assert!((v - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert!(psi_gamma_weight(&PsiFunction::Identity, 0.5, 0.25, 0.25).is_err());
    }

    #[test]
    fn increments_are_stable() {
        let cases = [
            PsiFunction::Identity,
            PsiFunction::Power { rho: 2.0 },
            PsiFunction::Logarithm,
            PsiFunction::Exponential { sigma: 0.7 },
        ];
        for psi in &cases {
            let (a, d) = (1.5, 0.25);
            let direct = psi.eval(a + d) - psi.eval(a);
            assert!((psi.increment(a, d) - direct).abs() < 1e-14, "{}", psi.name());
            // tiny increments keep their relative accuracy
            let tiny = 1e-20;
            let inc = psi.increment(a, tiny);
            assert!(((inc / tiny) - psi.deriv(a)).abs() < 1e-12 * psi.deriv(a), "{}", psi.name());
        }
    }

    #[test]
    fn family_constraints() {
        assert!(PsiFunction::Logarithm.validate_on(0.0, 1.0).is_err());
        assert!(PsiFunction::Logarithm.validate_on(1.0, E).is_ok());
        assert!(PsiFunction::Power { rho: 2.0 }.validate_on(-1.0, 1.0).is_err());
        assert!(PsiFunction::Power { rho: 2.0 }.validate_on(0.0, 1.0).is_ok());
        assert!(PsiFunction::Exponential { sigma: -1.0 }.validate_on(0.0, 1.0).is_err());
        let decreasing = PsiFunction::Custom(CustomPsi::new("neg", |t| -t, |_| -1.0));
        assert!(decreasing.validate_on(0.0, 1.0).is_err());
    }

    #[test]
    fn derivatives_match_centered_differences() {
        let cases = [
            (PsiFunction::Identity, 0.0, 1.0),
            (PsiFunction::Power { rho: 1.7 }, 0.5, 2.0),
            (PsiFunction::Logarithm, 1.0, E),
            (PsiFunction::Exponential { sigma: 1.3 }, 0.0, 1.0),
        ];
        for (psi, a, b) in &cases {
            let e1 = psi.derivative_discrepancy(*a, *b, 1e-3);
            let e2 = psi.derivative_discrepancy(*a, *b, 5e-4);
            // O(h^2): halving h quarters the error (or both are at rounding level)
            assert!(e1 < 1e-5 && (e2 < 1e-9 || e1 / e2 > 3.0), "{}: {e1} {e2}", psi.name());
        }
    }
}
