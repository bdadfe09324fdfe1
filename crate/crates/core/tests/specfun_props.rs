use mfh::specfun::{
    integrate_finite, integrate_semi_infinite, log_gamma, regularized_lower_gamma,
    regularized_upper_gamma, QuadratureSpec,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn incomplete_gamma_complements(a in 0.05f64..60.0, b in 0.0f64..150.0) {
        let p = regularized_lower_gamma(a, b).unwrap();
        let q = regularized_upper_gamma(a, b).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert!((p + q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_gamma_monotone_in_b(a in 0.05f64..40.0, b in 0.0f64..80.0, db in 0.0f64..5.0) {
        let lo = regularized_lower_gamma(a, b).unwrap();
        let hi = regularized_lower_gamma(a, b + db).unwrap();
        prop_assert!(hi >= lo - 1e-14);
    }

    #[test]
    fn lower_gamma_decreasing_in_a(a in 0.1f64..40.0, b in 0.01f64..60.0) {
        let p1 = regularized_lower_gamma(a, b).unwrap();
        let p2 = regularized_lower_gamma(a + 1.0, b).unwrap();
        prop_assert!(p2 <= p1 + 1e-14);
    }

    #[test]
    fn log_gamma_recurrence(a in 0.01f64..100.0) {
        let lhs = log_gamma(a + 1.0).unwrap();
        let rhs = log_gamma(a).unwrap() + a.ln();
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn quadrature_matches_lower_gamma(a in 0.5f64..8.0, b in 0.1f64..20.0) {
        let spec = QuadratureSpec::default();
        let g = log_gamma(a).unwrap().exp();
        let v = integrate_finite(|z: f64| z.powf(a - 1.0) * (-z).exp(), 0.0, b, &spec).unwrap() / g;
        let expect = regularized_lower_gamma(a, b).unwrap();
        prop_assert!((v - expect).abs() < 1e-7, "{} vs {}", v, expect);
    }
}

#[test]
fn semi_infinite_gamma_moments() {
    let spec = QuadratureSpec::default();
    for k in 0..6 {
        let v = integrate_semi_infinite(|z: f64| z.powi(k) * (-z).exp(), 0.0, &spec).unwrap();
        let fact: f64 = (1..=k).map(f64::from).product();
        assert!((v - fact).abs() < 1e-7 * fact, "k = {k}: {v}");
    }
}
