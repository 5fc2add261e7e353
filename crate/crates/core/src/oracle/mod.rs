//! Multi-precision reference values for `M(a, b, z)` and `U(a, b + 1, z)`.
//!
//! `M` comes from its defining power series. `U` comes either from
//! quadrature of its Laplace integral (needs `b < a`) or from the connection
//! formula through two `M` values (any `b`), evaluated at raised precision to
//! absorb the cancellation between the two terms.

mod bigreal;
mod quad;
mod series;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bigreal::{bits_for_digits, BigReal};

pub const DEFAULT_DIGITS: u32 = 60;
pub const MIN_DIGITS: u32 = 30;
pub const MAX_DIGITS: u32 = 4000;

/// How an oracle `U` value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Quadrature,
    Connection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleU {
    pub value: BigReal,
    pub route: Route,
    /// Shift applied to an integer `b + 1` before using the connection
    /// formula; zero otherwise.
    pub perturbation: f64,
}

fn check_digits(digits: u32) -> Result<()> {
    if (MIN_DIGITS..=MAX_DIGITS).contains(&digits) {
        Ok(())
    } else {
        Err(Error::domain(format!("precision must be between {MIN_DIGITS} and {MAX_DIGITS} digits, got {digits}")))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite and positive, got {x}")))
    }
}

/// `M(a, b, z)` for positive arguments, to about `digits` decimal digits.
pub fn oracle_m(a: f64, b: f64, z: f64, digits: u32) -> Result<BigReal> {
    check_digits(digits)?;
    check_positive("a", a)?;
    check_positive("b", b)?;
    check_positive("z", z)?;
    let prec = bits_for_digits(digits + 10);
    let (sum, _) =
        series::hyp1f1(&Float::with_val(prec, a), &Float::with_val(prec, b), &Float::with_val(prec, z), digits)?;
    Ok(BigReal::new(sum, digits))
}

/// `U(a, b + 1, z)`, by quadrature when `b < a` and by the connection
/// formula otherwise.
pub fn oracle_u(a: f64, b: f64, z: f64, digits: u32) -> Result<OracleU> {
    let route = if b < a { Route::Quadrature } else { Route::Connection };
    oracle_u_with(a, b, z, digits, route)
}

pub fn oracle_u_with(a: f64, b: f64, z: f64, digits: u32, route: Route) -> Result<OracleU> {
    check_digits(digits)?;
    check_positive("z", z)?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("a and b must be finite"));
    }
    match route {
        Route::Quadrature => {
            if a <= b {
                return Err(Error::domain(format!("the quadrature route needs b < a, got a = {a}, b = {b}")));
            }
            let value = u_by_quadrature(a, b, z, digits)?;
            Ok(OracleU { value, route, perturbation: 0.0 })
        }
        Route::Connection => {
            check_positive("a", a)?;
            let (value, perturbation) = u_by_connection(a, b, z, digits)?;
            Ok(OracleU { value, route, perturbation })
        }
    }
}

/// `z^-b / Gamma(a - b) * integral_0^inf e^(-zs) s^(a-b-1) (1+s)^(-a) ds`.
/// For `a - b < 1` the integral is first integrated by parts, which trades
/// the endpoint singularity for `s^(a-b) (z + a/(1+s))` and `1/Gamma(a-b+1)`.
fn u_by_quadrature(a: f64, b: f64, z: f64, digits: u32) -> Result<BigReal> {
    let prec = bits_for_digits(digits + 20);
    let af = Float::with_val(prec, a);
    let zf = Float::with_val(prec, z);
    let lam = Float::with_val(prec, &af - b);
    let by_parts = lam < 1u32;
    let power = if by_parts { lam.clone() } else { Float::with_val(prec, &lam - 1u32) };
    // Scale the variable so the integrand peaks near x = 1.
    let c = {
        let l = lam.to_f64();
        if l > 1.0 {
            let bq = z + a - l + 1.0;
            (-bq + (bq * bq + 4.0 * z * (l - 1.0)).sqrt()) / (2.0 * z)
        } else {
            1.0
        }
    };
    let cf = Float::with_val(prec, c);
    let log_integrand = |s: &Float| -> Float {
        let mut v = -Float::with_val(prec, &zf * s);
        v += Float::with_val(prec, s.ln_ref()) * &power;
        v -= Float::with_val(prec, s.ln_1p_ref()) * &af;
        if by_parts {
            let inv = Float::with_val(prec, s + 1u32).recip();
            v += (inv * &af + &zf).ln();
        }
        v
    };
    let peak = log_integrand(&cf);
    let integral = quad::exp_sinh(
        |x| {
            let s = Float::with_val(prec, x * &cf);
            if s.is_zero() {
                return Float::new(prec);
            }
            (log_integrand(&s) - &peak).exp() * &cf
        },
        prec,
        digits + 10,
    )?;
    let mut log_value = Float::with_val(prec, zf.ln_ref()) * (-b);
    log_value -= if by_parts { Float::with_val(prec, &lam + 1u32).ln_gamma() } else { lam.ln_gamma() };
    log_value += &peak;
    log_value += integral.ln();
    Ok(BigReal::new(log_value.exp(), digits))
}

fn recip_gamma(x: &Float) -> Float {
    if x.is_integer() && *x <= 0 {
        Float::new(x.prec())
    } else {
        Float::with_val(x.prec(), x.gamma_ref()).recip()
    }
}

fn gamma(x: &Float) -> Result<Float> {
    if x.is_integer() && *x <= 0 {
        return Err(Error::Oracle(format!("gamma pole at {x}")));
    }
    Ok(Float::with_val(x.prec(), x.gamma_ref()))
}

/// `U(a, c, z) = Gamma(1-c)/Gamma(a-c+1) M(a, c, z)
///             + Gamma(c-1)/Gamma(a) z^(1-c) M(a-c+1, 2-c, z)` with `c = b + 1`.
fn u_by_connection(a: f64, b: f64, z: f64, digits: u32) -> Result<(BigReal, f64)> {
    let perturb = b.fract() == 0.0;
    let exponent = -(digits as i32) - 5;
    let mut internal = 2 * digits + 20;
    for _ in 0..4 {
        let prec = bits_for_digits(internal);
        let mut cf = Float::with_val(prec, b) + 1u32;
        if perturb {
            cf += Float::with_val(prec, rug::ops::Pow::pow(Float::with_val(prec, 10u32), exponent));
        }
        let af = Float::with_val(prec, a);
        let zf = Float::with_val(prec, z);
        let (m1, lost1) = series::hyp1f1(&af, &cf, &zf, internal)?;
        let a2 = Float::with_val(prec, &af - &cf) + 1u32;
        let b2 = Float::with_val(prec, 2u32 - &cf);
        let (m2, lost2) = series::hyp1f1(&a2, &b2, &zf, internal)?;

        let one_minus_c = Float::with_val(prec, 1u32 - &cf);
        let t1 = gamma(&one_minus_c)? * recip_gamma(&a2) * m1;
        let c_minus_one = Float::with_val(prec, &cf - 1u32);
        let zpow = (Float::with_val(prec, zf.ln_ref()) * &one_minus_c).exp();
        let t2 = gamma(&c_minus_one)? / gamma(&af)? * zpow * m2;
        let largest = Float::with_val(prec, t1.abs_ref()).max(&Float::with_val(prec, t2.abs_ref()));
        let u = t1 + t2;
        if u.is_zero() {
            internal *= 2;
            continue;
        }
        let combined = Float::with_val(prec, largest / Float::with_val(prec, u.abs_ref())).log10().to_f64();
        let lost = lost1.max(lost2) + combined.max(0.0);
        if f64::from(internal) - lost >= f64::from(digits + 10) {
            let shift = if perturb { format!("1e{exponent}").parse().unwrap_or(0.0) } else { 0.0 };
            return Ok((BigReal::new(u, digits), shift));
        }
        internal += lost.ceil() as u32 + 20;
        if internal > 8 * MAX_DIGITS {
            break;
        }
    }
    Err(Error::Oracle(format!("cancellation in the connection formula at a = {a}, b = {b}, z = {z}")))
}
