//! Pointwise upper-bound curves and their provenance.

use std::fmt;

/// Which estimate produced a [`BoundCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// Resolvent series of the linear fractional Gronwall inequality.
    GronwallSeries,
    /// Mittag-Leffler closed form of the linear inequality (nondecreasing data).
    GronwallMittagLeffler,
    /// Nested Mittag-Leffler bound of the integrodifferential inequality.
    GronwallNested,
    /// A-priori estimate for the integral equation.
    AprioriIntegral,
    /// A-priori estimate for the ψ-Hilfer initial value problem.
    AprioriIvp,
    /// Continuous dependence on the data, integral equation.
    PerturbationIntegral,
    /// Continuous dependence on the data, initial value problem.
    PerturbationIvp,
    /// Dependence on a scalar parameter, integral equation.
    ParameterIntegral,
    /// Dependence on a scalar parameter, initial value problem.
    ParameterIvp,
}

impl BoundKind {
    pub fn label(&self) -> &'static str {
        match self {
            BoundKind::GronwallSeries => "gronwall-series",
            BoundKind::GronwallMittagLeffler => "gronwall-ml",
            BoundKind::GronwallNested => "gronwall-nested",
            BoundKind::AprioriIntegral => "apriori-integral",
            BoundKind::AprioriIvp => "apriori-ivp",
            BoundKind::PerturbationIntegral => "perturbation-integral",
            BoundKind::PerturbationIvp => "perturbation-ivp",
            BoundKind::ParameterIntegral => "parameter-integral",
            BoundKind::ParameterIvp => "parameter-ivp",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Upper bound `values[i]` at node `t[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// Size of the last retained series term, for truncated bounds.
    pub truncation: Option<f64>,
}

impl BoundCurve {
    pub fn new(kind: BoundKind, t: Vec<f64>, values: Vec<f64>) -> Self {
        Self { kind, t, values, truncation: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}
