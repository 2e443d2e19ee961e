use fracvolterra::analysis::check_bound;
use fracvolterra::bound::{BoundCurve, BoundKind};
use fracvolterra::frac::frac_integral;
use fracvolterra::gronwall::{ml_bound, GronwallData};
use fracvolterra::special::gamma;
use fracvolterra::{mittag_leffler, Grid, GridFunction, Mesh, PsiFunction, WeightedSpace};
use proptest::prelude::*;

fn mesh(n: usize) -> Mesh {
    Mesh::new(Grid::graded(0.0, 1.0, n, 2.0).unwrap(), PsiFunction::Identity).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ml_is_increasing_on_the_positive_axis(alpha in 0.1f64..1.0, root in 0.0f64..600.0, step in 1e-3f64..1.0) {
        // sampled through z^{1/α} to stay inside the f64 range
        let (z, z2) = (root.powf(alpha), (root + step).powf(alpha));
        let (a, b) = (mittag_leffler(alpha, z).unwrap(), mittag_leffler(alpha, z2).unwrap());
        prop_assert!(b > a);
    }

    #[test]
    fn integral_of_a_power_is_a_power(mu in 0.2f64..1.5, nu in 0.0f64..2.0) {
        // I^μ u^ν = Γ(ν+1)/Γ(ν+μ+1) u^{ν+μ}
        let m = mesh(128);
        let x = GridFunction::scalar(&m, |_, u| u.powf(nu));
        let ix = frac_integral(&m, mu, &x).unwrap();
        let exact = gamma(nu + 1.0) / gamma(nu + mu + 1.0);
        let got = ix.node(m.len() - 1)[0];
        prop_assert!(((got - exact) / exact).abs() < 1e-3, "{} vs {}", got, exact);
    }

    #[test]
    fn weighted_norm_is_a_norm(xi in 0.1f64..5.0, alpha in 0.4f64..1.0, s in -3.0f64..3.0, k in 0.5f64..4.0) {
        let m = mesh(32);
        let space = WeightedSpace::new(xi, alpha).unwrap();
        let x = GridFunction::scalar(&m, |t, _| (k * t).sin() + s);
        let y = GridFunction::scalar(&m, |t, _| t * t - s);
        let nx = space.norm(&x, &m).unwrap();
        let sum = x.combine(1.0, &y, 1.0).unwrap();
        prop_assert!((space.norm(&x.scaled(s), &m).unwrap() - s.abs() * nx).abs() <= 1e-12 * (1.0 + nx));
        prop_assert!(space.norm(&sum, &m).unwrap() <= nx + space.norm(&y, &m).unwrap() + 1e-12);
    }

    #[test]
    fn enlarging_the_kernel_never_lowers_the_bound(alpha in 0.4f64..1.0, r in 0.0f64..1.5, extra in 0.0f64..1.0) {
        let m = mesh(24);
        let make = |r: f64| GronwallData::from_fns(m.clone(), alpha, |t| 1.0 + t, |_| 0.5, |_| 0.0, |_| 0.0, move |t, _| r * (1.0 + t)).unwrap();
        let lo = ml_bound(&make(r)).unwrap();
        let hi = ml_bound(&make(r + extra)).unwrap();
        prop_assert!(lo.values.iter().zip(&hi.values).all(|(a, b)| a <= b));
        prop_assert!(hi.is_nondecreasing());
    }

    #[test]
    fn trace_equal_to_bound_has_unit_margin(c in 0.1f64..10.0) {
        let m = mesh(16);
        let x = GridFunction::scalar(&m, |t, _| c * (1.0 + t));
        let bound = BoundCurve::new(BoundKind::AprioriIntegral, m.t().to_vec(), x.values().to_vec());
        let check = check_bound(&x, &bound).unwrap();
        prop_assert!(check.holds);
        prop_assert!((check.worst_margin - 1.0).abs() < 1e-15);
        let zero = check_bound(&GridFunction::zeros(m.len(), 1), &bound).unwrap();
        prop_assert!(zero.holds && zero.worst_margin == 0.0);
    }
}
