//! Exp-sinh quadrature on `(0, inf)`: `x = exp((pi/2) sinh tau)`, trapezoid
//! rule in `tau` with step halving.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

const MAX_LEVEL: u32 = 12;
const TAU_CAP: f64 = 12.0;

/// `integral_0^inf g(x) dx` to about `digits` decimal digits, at the
/// precision `prec` (bits). `g` must decay at both ends; integrable endpoint
/// singularities at 0 are fine.
pub fn exp_sinh<G>(g: G, prec: u32, digits: u32) -> Result<Float>
where
    G: Fn(&Float) -> Float,
{
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    let eval = |tau: f64| -> Float {
        let t = Float::with_val(prec, tau);
        let (sh, ch) = t.sinh_cosh(Float::new(prec));
        let x = Float::with_val(prec, &half_pi * &sh).exp();
        let w = Float::with_val(prec, &half_pi * &ch) * &x;
        let v = g(&x);
        if v.is_zero() || w.is_zero() {
            Float::new(prec)
        } else {
            v * w
        }
    };
    let tiny = Float::with_val(prec, 10u32).pow(-(digits as i32) - 10);
    let small = |v: &Float, scale: &Float| {
        let bound = Float::with_val(prec, scale.abs_ref()) * &tiny;
        Float::with_val(prec, v.abs_ref()) <= bound
    };

    // Coarse pass at h = 1/2 fixes the truncation range.
    let h0 = 0.5;
    let mut sum = eval(0.0);
    let mut range = [0.0f64; 2];
    for (side, dir) in [(0usize, -1.0f64), (1, 1.0)] {
        let mut quiet = 0;
        let mut k = 1;
        loop {
            let tau = dir * h0 * f64::from(k);
            if tau.abs() > TAU_CAP {
                return Err(Error::Oracle(format!("quadrature tail has not decayed at tau = {tau}")));
            }
            let v = eval(tau);
            let negligible = small(&v, &sum);
            sum += &v;
            quiet = if negligible { quiet + 1 } else { 0 };
            if quiet >= 3 && tau.abs() > 1.0 {
                range[side] = tau;
                break;
            }
            k += 1;
        }
    }
    let mut estimate = Float::with_val(prec, &sum * h0);
    let mut h = h0;
    for _ in 1..=MAX_LEVEL {
        h /= 2.0;
        let mut tau = range[0] + h;
        while tau < range[1] {
            sum += eval(tau);
            tau += 2.0 * h;
        }
        let next = Float::with_val(prec, &sum * h);
        let diff = Float::with_val(prec, &next - &estimate);
        estimate = next;
        if small(&diff, &estimate) || diff.is_zero() {
            return Ok(estimate);
        }
    }
    Err(Error::Oracle(format!("quadrature did not converge within {MAX_LEVEL} levels")))
}
