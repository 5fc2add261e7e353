use kummer::expansion::convergence_profile;
use kummer::oracle::{oracle_u_with, Route};
use kummer::regimes::{Function, ParameterSet};
use rug::Float;

fn params(a: f64, b: f64, z: f64) -> ParameterSet {
    ParameterSet::new(a, b, z).unwrap()
}

#[test]
fn kummer_transformation_by_quadrature() {
    // U(12, 4, 2) = 2^-3 U(9, -2, 2); both through the Laplace integral.
    let lhs = oracle_u_with(12.0, 3.0, 2.0, 40, Route::Quadrature).unwrap().value;
    let rhs = oracle_u_with(9.0, -3.0, 2.0, 40, Route::Quadrature).unwrap().value;
    let scaled = Float::with_val(200, rhs.as_float() / 8u32);
    let rhs = kummer::oracle::BigReal::new(scaled, 40);
    assert!(lhs.relative_error(&rhs) < 1e-35, "{lhs} vs {rhs}");
}

#[test]
fn routes_agree_off_the_integer_grid() {
    for &(a, b, z) in &[(20.0, 19.5, 1.5), (30.0, 22.25, 2.0), (8.0, 7.999, 0.5)] {
        let q = oracle_u_with(a, b, z, 40, Route::Quadrature).unwrap();
        let c = oracle_u_with(a, b, z, 40, Route::Connection).unwrap();
        assert!(q.value.relative_error(&c.value) < 1e-35, "({a}, {b}, {z}): {} vs {}", q.value, c.value);
    }
}

#[test]
fn equal_parameters_are_exact_for_every_truncation() {
    for function in [Function::M, Function::U] {
        for (n, err) in convergence_profile(&params(150.0, 150.0, 2.0), function, 6, 40).unwrap() {
            assert!(err <= 1e-13, "{function} N={n}: {err:e}");
        }
    }
}

#[test]
fn errors_decrease_with_more_terms() {
    let profile = convergence_profile(&params(200.0, 260.0, 1.0), Function::M, 3, 40).unwrap();
    assert!(profile[0].1 > profile[1].1 && profile[1].1 > profile[2].1, "{profile:?}");
}

#[test]
fn doubling_a_scales_errors_by_the_truncation_order() {
    for function in [Function::M, Function::U] {
        let (mu, z) = (0.3, 1.0);
        let small = convergence_profile(&params(100.0, 100.0 * (1.0 + mu), z), function, 3, 40).unwrap();
        let large = convergence_profile(&params(200.0, 200.0 * (1.0 + mu), z), function, 3, 40).unwrap();
        for ((n, e1), (_, e2)) in small.iter().zip(&large) {
            let ratio = e1 / e2;
            let expected = 2f64.powi(*n as i32);
            assert!(ratio >= expected / 4.0 && ratio <= expected * 4.0, "{function} N={n}: ratio {ratio}");
        }
    }
}
