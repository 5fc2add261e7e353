use rug::ops::Pow;
use rug::{Assign, Float};

use crate::error::{Error, Result};

const MAX_TERMS: usize = 2_000_000;

/// Sum of the defining series `sum (a)_n / (b)_n z^n / n!` at the precision
/// of `a`, together with the number of decimal digits lost to cancellation
/// (`log10(max |term| / |sum|)`, zero when all terms share a sign).
pub fn hyp1f1(a: &Float, b: &Float, z: &Float, target_digits: u32) -> Result<(Float, f64)> {
    let prec = a.prec();
    if b.is_integer() && *b <= 0 {
        return Err(Error::Oracle(format!("second parameter {b} is a nonpositive integer")));
    }
    let tol = Float::with_val(prec, 10u32).pow(-(target_digits as i32) - 10);
    // Beyond this index every ratio (a+n) z / ((b+n)(n+1)) keeps a fixed sign.
    let settle = (f64::max(0.0, -a.to_f64()) + f64::max(0.0, -b.to_f64())).ceil() as usize + 1;
    let mut term = Float::with_val(prec, 1u32);
    let mut sum = Float::with_val(prec, 1u32);
    let mut max_term = Float::with_val(prec, 1u32);
    for n in 0..MAX_TERMS {
        let nf = n as u32;
        term *= Float::with_val(prec, a + nf);
        term /= Float::with_val(prec, b + nf);
        term *= z;
        term /= nf + 1;
        if term.is_zero() {
            return Ok(finish(sum, max_term));
        }
        sum += &term;
        let abs_term = Float::with_val(prec, term.abs_ref());
        if abs_term > max_term {
            max_term.assign(&abs_term);
        }
        if n >= settle {
            let ratio = Float::with_val(prec, a + (nf + 1)) * z / Float::with_val(prec, b + (nf + 1)) / (nf + 2);
            let bound = Float::with_val(prec, sum.abs_ref()) * &tol;
            if ratio.abs() < 0.5 && abs_term < bound {
                return Ok(finish(sum, max_term));
            }
        }
    }
    Err(Error::Oracle(format!("series did not converge within {MAX_TERMS} terms")))
}

fn finish(sum: Float, max_term: Float) -> (Float, f64) {
    let prec = sum.prec();
    let lost = if sum.is_zero() {
        f64::INFINITY
    } else {
        let r = max_term / Float::with_val(prec, sum.abs_ref());
        r.log10().to_f64().max(0.0)
    };
    (sum, lost)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> Float {
        Float::with_val(256, x)
    }

    #[test]
    fn elementary_cases() {
        let (v, lost) = hyp1f1(&f(1.0), &f(2.0), &f(1.0), 60).unwrap();
        let e = Float::with_val(256, 1u32).exp();
        assert!((v - (e - 1u32)).abs() < 1e-70);
        assert_eq!(lost, 0.0);
        // Terminating series: M(-2, b, z) = 1 - 2z/b + z^2/(b(b+1)).
        let (v, _) = hyp1f1(&f(-2.0), &f(-2.5), &f(3.0), 60).unwrap();
        let expected = 1.0 - 2.0 * 3.0 / -2.5 + 9.0 / (-2.5 * -1.5);
        assert!((v.to_f64() - expected).abs() < 1e-13);
        assert!(hyp1f1(&f(1.0), &f(-3.0), &f(1.0), 60).is_err());
    }
}
