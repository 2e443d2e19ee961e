//! Discrete ψ-fractional calculus, Picard solvers for ψ-Hilfer Volterra
//! equations, and the Gronwall-type bounds that control their solutions.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod bound;
pub mod error;
pub mod frac;
pub mod grid;
pub mod gronwall;
pub mod psi;
pub mod quadrature;
pub mod registry;
pub mod solver;
pub mod space;
pub mod special;

pub use error::{Error, Result};
pub use grid::{Grading, Grid, GridFunction, Mesh};
pub use psi::{kernel_n, psi_gamma_weight, CustomPsi, PsiFunction};
pub use space::WeightedSpace;
pub use special::{mittag_leffler, MlMethod, MlValue};
