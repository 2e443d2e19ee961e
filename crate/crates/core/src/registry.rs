//! Right-hand-side families with known global Lipschitz constants.

use std::sync::Arc;

use crate::error::{domain, Result};
use crate::psi::PsiFunction;
use crate::solver::{IntegralProblem, KernelFn, Lipschitz, OuterFn};
use crate::special::mittag_leffler;

/// Forcing term `g` as a function of `u = ψ(t) - ψ(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Forcing {
    Const(f64),
    /// `coef · u^nu`
    Power { coef: f64, nu: f64 },
    /// `coef · E_α(rate · u^α)`
    MlWeight { coef: f64, rate: f64 },
    /// `coef · cos(freq · u)`
    Cosine { coef: f64, freq: f64 },
}

impl Forcing {
    pub fn eval(&self, u: f64, alpha: f64) -> f64 {
        match *self {
            Forcing::Const(c) => c,
            Forcing::Power { coef, nu } => coef * u.powf(nu),
            Forcing::MlWeight { coef, rate } => coef * mittag_leffler(alpha, rate * u.powf(alpha)).unwrap_or(f64::INFINITY),
            Forcing::Cosine { coef, freq } => coef * (freq * u).cos(),
        }
    }

    fn validate(&self, alpha: f64) -> Result<()> {
        let ok = match *self {
            Forcing::Const(c) => c.is_finite(),
            Forcing::Power { coef, nu } => coef.is_finite() && nu >= 0.0 && nu.is_finite(),
            Forcing::MlWeight { coef, rate } => coef.is_finite() && rate.is_finite() && mittag_leffler(alpha, 0.0).is_ok(),
            Forcing::Cosine { coef, freq } => coef.is_finite() && freq.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            domain(format!("invalid forcing {self:?}"))
        }
    }
}

/// Outer families, applied componentwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterSpec {
    /// `λx + c·z + g(t)`
    Affine { lambda: f64, c: f64, forcing: Forcing },
    /// `M sin x + c·z + g(t)`
    Bounded { m: f64, c: f64, forcing: Forcing },
}

impl OuterSpec {
    /// Lipschitz constant in both slots.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            OuterSpec::Affine { lambda, c, .. } => lambda.abs().max(c.abs()),
            OuterSpec::Bounded { m, c, .. } => m.abs().max(c.abs()),
        }
    }

    fn forcing(&self) -> Forcing {
        match *self {
            OuterSpec::Affine { forcing, .. } | OuterSpec::Bounded { forcing, .. } => forcing,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            OuterSpec::Affine { .. } => "affine",
            OuterSpec::Bounded { .. } => "bounded",
        }
    }
}

/// Kernel families, applied componentwise and independent of `t, s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `l·x`
    Linear { l: f64 },
    /// `l·sin x`
    Bounded { l: f64 },
}

impl KernelSpec {
    pub fn lipschitz(&self) -> f64 {
        match *self {
            KernelSpec::Linear { l } | KernelSpec::Bounded { l } => l.abs(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            KernelSpec::Linear { .. } => "linear",
            KernelSpec::Bounded { .. } => "bounded",
        }
    }
}

/// Maps `t` to the ψ-offset `u`.
#[derive(Debug, Clone)]
struct Offset {
    psi: PsiFunction,
    a: f64,
}

impl Offset {
    fn at(&self, t: f64) -> f64 {
        if t <= self.a {
            0.0
        } else {
            self.psi.increment(self.a, t - self.a)
        }
    }
}

#[derive(Debug, Clone)]
pub struct RegistryOuter {
    spec: OuterSpec,
    dim: usize,
    alpha: f64,
    offset: Offset,
}

impl RegistryOuter {
    pub fn new(spec: OuterSpec, dim: usize, alpha: f64, psi: PsiFunction, a: f64) -> Result<Self> {
        spec.forcing().validate(alpha)?;
        let coefs = match spec {
            OuterSpec::Affine { lambda, c, .. } => [lambda, c],
            OuterSpec::Bounded { m, c, .. } => [m, c],
        };
        if coefs.iter().any(|v| !v.is_finite()) {
            return domain(format!("non-finite coefficient in {spec:?}"));
        }
        Ok(Self { spec, dim, alpha, offset: Offset { psi, a } })
    }
}

impl OuterFn for RegistryOuter {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, x: &[f64], z: &[f64], out: &mut [f64]) {
        let g = self.spec.forcing().eval(self.offset.at(t), self.alpha);
        for ((o, &x), &z) in out.iter_mut().zip(x).zip(z) {
            *o = match self.spec {
                OuterSpec::Affine { lambda, c, .. } => lambda * x + c * z + g,
                OuterSpec::Bounded { m, c, .. } => m * x.sin() + c * z + g,
            };
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RegistryKernel(pub KernelSpec);

impl KernelFn for RegistryKernel {
    fn eval(&self, _t: f64, _s: f64, x: &[f64], out: &mut [f64]) {
        for (o, &x) in out.iter_mut().zip(x) {
            *o = match self.0 {
                KernelSpec::Linear { l } => l * x,
                KernelSpec::Bounded { l } => l * x.sin(),
            };
        }
    }

    fn depends_on_t(&self) -> bool {
        false
    }
}

/// `f(t, x, z) + scale · w(t)` in every component; `w` depends on `t` only,
/// so the Lipschitz constants of `f` carry over.
#[derive(Debug, Clone)]
pub struct ForcingShift {
    base: Arc<dyn OuterFn>,
    scale: f64,
    w: Forcing,
    alpha: f64,
    offset: Offset,
}

impl ForcingShift {
    pub fn new(base: Arc<dyn OuterFn>, scale: f64, w: Forcing, alpha: f64, psi: PsiFunction, a: f64) -> Result<Self> {
        w.validate(alpha)?;
        if !scale.is_finite() {
            return domain(format!("shift scale must be finite, got {scale}"));
        }
        Ok(Self { base, scale, w, alpha, offset: Offset { psi, a } })
    }
}

impl OuterFn for ForcingShift {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, t: f64, x: &[f64], z: &[f64], out: &mut [f64]) {
        self.base.eval(t, x, z, out);
        let s = self.scale * self.w.eval(self.offset.at(t), self.alpha);
        out.iter_mut().for_each(|o| *o += s);
    }
}

/// Integral problem built from registry families, with `M` and `L` taken from them.
/// A kernel with `l = 0` is given `L = 1` so that the solution space stays defined.
pub fn integral_problem(
    alpha: f64,
    psi: PsiFunction,
    interval: (f64, f64),
    dim: usize,
    outer: OuterSpec,
    kernel: KernelSpec,
) -> Result<IntegralProblem> {
    let f = RegistryOuter::new(outer, dim, alpha, psi.clone(), interval.0)?;
    let l = kernel.lipschitz();
    let lipschitz = Lipschitz { m: outer.lipschitz(), l: if l > 0.0 { l } else { 1.0 } };
    IntegralProblem::new(alpha, psi, interval, Arc::new(f), Arc::new(RegistryKernel(kernel)), lipschitz)
}

/// The same problem with `f` replaced by `f + scale · w`.
pub fn shifted(problem: &IntegralProblem, scale: f64, w: Forcing) -> Result<IntegralProblem> {
    let f = ForcingShift::new(problem.f.clone(), scale, w, problem.alpha, problem.psi.clone(), problem.a)?;
    IntegralProblem::new(problem.alpha, problem.psi.clone(), (problem.a, problem.b), Arc::new(f), problem.k.clone(), problem.lipschitz)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lipschitz_constants_hold_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let specs = [
            OuterSpec::Affine { lambda: -0.7, c: 0.3, forcing: Forcing::Power { coef: 1.0, nu: 0.5 } },
            OuterSpec::Bounded { m: 0.4, c: -0.9, forcing: Forcing::MlWeight { coef: 1.0, rate: 1.0 } },
        ];
        for spec in specs {
            let f = RegistryOuter::new(spec, 2, 0.5, PsiFunction::Identity, 0.0).unwrap();
            let m = spec.lipschitz();
            for _ in 0..200 {
                let mut draw = || -> [f64; 2] { [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)] };
                let (x, y, z, w) = (draw(), draw(), draw(), draw());
                let t = 0.37;
                let (mut o1, mut o2) = ([0.0; 2], [0.0; 2]);
                f.eval(t, &x, &z, &mut o1);
                f.eval(t, &y, &w, &mut o2);
                let norm = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                assert!(norm(o1, o2) <= m * (norm(x, y) + norm(z, w)) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn shift_adds_scaled_forcing() {
        let p = integral_problem(
            0.5,
            PsiFunction::Identity,
            (0.0, 1.0),
            1,
            OuterSpec::Affine { lambda: 0.0, c: 0.0, forcing: Forcing::Const(1.0) },
            KernelSpec::Linear { l: 1.0 },
        )
        .unwrap();
        let s = shifted(&p, 0.1, Forcing::Cosine { coef: 1.0, freq: 0.0 }).unwrap();
        let mut out = [0.0];
        s.f.eval(0.5, &[0.0], &[0.0], &mut out);
        assert!((out[0] - 1.1).abs() < 1e-15);
        assert_eq!(s.lipschitz, p.lipschitz);
    }
}
