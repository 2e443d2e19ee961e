// Native checks of the happy paths; error paths construct JS values and only work in wasm.

use fracvolterra_demo::{closed_form_residual, ml_eval, solve_linear};

#[test]
fn ml_eval_reduces_to_exp() {
    let v = ml_eval(1.0, 2.0).ok().unwrap();
    assert!((v - 2f64.exp()).abs() < 1e-14 * v);
}

#[test]
fn closed_form_residual_is_small_on_graded_grid() {
    for psi in [("identity", 0.0), ("power", 2.0), ("exponential", 1.0)] {
        let r = closed_form_residual(0.5, 1.0, psi.0, psi.1, 512).ok().unwrap();
        assert!(r < 1e-4, "{psi:?}: {r}");
    }
}

#[test]
fn solve_linear_tracks_mittag_leffler() {
    let s = solve_linear(0.5, 0.5, 256).ok().unwrap();
    assert!(s.converged());
    assert_eq!(s.t().len(), 257);
    assert!(s.max_rel_error() < 1e-3, "{}", s.max_rel_error());
}
