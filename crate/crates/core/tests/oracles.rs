//! Reference values computed with mpmath at 40 digits.

#![allow(clippy::excessive_precision)]

use fracvolterra::frac::frac_integral;
use fracvolterra::gronwall::{ml_bound, nested_ml_bound, series_bound, GronwallData, SERIES_TERMS};
use fracvolterra::special::gamma;
use fracvolterra::{mittag_leffler, Grid, GridFunction, Mesh, PsiFunction};

fn rel(x: f64, e: f64) -> f64 {
    ((x - e) / e).abs()
}

#[test]
fn mittag_leffler_reference_values() {
    let cases = [
        (0.5, 1.0, 5.008_980_080_762_283_5),
        (0.5, -2.0, 0.255_395_676_310_505_74),
        (0.3, 0.7, 3.174_820_125_365_424),
        (0.8, 5.0, 2_208.064_357_586_445),
        (0.75, 20.0, 5.035_824_494_957_03e23),
        (1.5, 3.0, 5.404_610_715_901_030_2),
        (0.5, 10.0, 5.376_234_283_632_271e43),
        (0.9, -5.0, 0.034_431_324_804_098_418),
        (0.25, 1.5, 631.114_489_559_989_1),
    ];
    for (alpha, z, expected) in cases {
        let v = mittag_leffler(alpha, z).unwrap();
        assert!(rel(v, expected) < 1e-10, "E_{alpha}({z}) = {v}, expected {expected}");
    }
}

#[test]
fn gamma_reference_values() {
    let cases = [
        (0.1, 9.513_507_698_668_731),
        (0.5, 1.772_453_850_905_516),
        (3.7, 4.170_651_783_796_604),
        (10.25, 639_232.598_779_576_8),
        (-2.5, -0.945_308_720_482_941_9),
        (171.3, 3.391_673_609_972_721e307),
    ];
    for (x, expected) in cases {
        // the power term amplifies rounding near the overflow threshold
        let tol = if x > 100.0 { 1e-12 } else { 1e-13 };
        assert!(rel(gamma(x), expected) < tol, "gamma({x}) = {}", gamma(x));
    }
}

fn unit_mesh(n: usize) -> Mesh {
    Mesh::new(Grid::graded(0.0, 1.0, n, 2.0).unwrap(), PsiFunction::Identity).unwrap()
}

#[test]
fn fractional_integral_of_square() {
    // I^0.4 u² at u = 1 equals Γ(3)/Γ(3.4)
    let mesh = unit_mesh(1024);
    let x = GridFunction::scalar(&mesh, |_, u| u * u);
    let ix = frac_integral(&mesh, 0.4, &x).unwrap();
    let last = ix.node(mesh.len() - 1)[0];
    assert!(rel(last, 0.670_869_344_039_302_2) < 2e-6, "{last}");
}

#[test]
fn unit_data_series_equals_closed_form() {
    // v = g = r = 1: the resolvent series sums to E_α(Γ(α) u^α)
    let d = GronwallData::from_fns(unit_mesh(128), 0.5, |_| 1.0, |_| 1.0, |_| 0.0, |_| 1.0, |_, _| 1.0).unwrap();
    let s = series_bound(&d, SERIES_TERMS).unwrap();
    let m = ml_bound(&d).unwrap();
    let expected = 45.999_326_089_382_855;
    assert!(rel(*s.values.last().unwrap(), expected) < 1e-8, "{}", s.values.last().unwrap());
    assert!(rel(*m.values.last().unwrap(), expected) < 1e-12);
}

#[test]
fn nested_bound_reference_value() {
    let d = GronwallData::from_fns(unit_mesh(16), 0.5, |_| 0.0, |_| 0.0, |_| 0.3, |_| 1.0, |_, _| 0.7).unwrap();
    let b = nested_ml_bound(&d).unwrap();
    assert!(rel(*b.values.last().unwrap(), 13_967_212_427.499_71) < 1e-10);
}
