//! Reals stored as `mantissa * 2^exponent`, for results that leave the
//! double-precision exponent range while keeping full relative accuracy.

use serde::{Deserialize, Serialize};

// ln 2 split for Cody-Waite reduction: `k * LN2_HI` is exact for |k| < 2^20.
const LN2_HI: f64 = 6.931_471_803_691_238e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;

/// A finite real `mantissa * 2^exp2` with `0.5 <= |mantissa| < 1` (or zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaled {
    pub mantissa: f64,
    pub exp2: i64,
}

/// Split a finite double into a mantissa in `[0.5, 1)` and a binary exponent.
fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let (x, bias) = if x.abs() < f64::MIN_POSITIVE { (x * 2f64.powi(64), -64) } else { (x, 0) };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1022;
    let mant = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (mant, exp + bias)
}

fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
    }
    m * 2f64.powi(e as i32)
}

impl Scaled {
    pub const ONE: Scaled = Scaled { mantissa: 0.5, exp2: 1 };

    pub fn from_f64(x: f64) -> Self {
        let (mantissa, exp2) = frexp(x);
        Scaled { mantissa, exp2 }
    }

    fn normalized(mantissa: f64, exp2: i64) -> Self {
        let (m, e) = frexp(mantissa);
        Scaled { mantissa: m, exp2: exp2 + e }
    }

    pub fn mul_f64(self, x: f64) -> Scaled {
        self * Scaled::from_f64(x)
    }

    pub fn recip(self) -> Scaled {
        Scaled::normalized(1.0 / self.mantissa, -self.exp2)
    }

    /// `e^x` for any finite `x`.
    pub fn exp(x: f64) -> Scaled {
        let k = (x / std::f64::consts::LN_2).round();
        let r = (x - k * LN2_HI) - k * LN2_LO;
        Scaled::normalized(r.exp(), k as i64)
    }

    /// `e^(hi + lo)` where `lo` is a small correction to `hi`.
    pub fn exp_sum(hi: f64, lo: f64) -> Scaled {
        Scaled::exp(hi).mul_f64(lo.exp())
    }

    /// `base^exponent` for `base > 0`, with the integer part of the exponent
    /// taken by repeated squaring so the relative error stays near
    /// `2 log2|exponent|` ulps.
    pub fn powf(base: f64, exponent: f64) -> Scaled {
        debug_assert!(base > 0.0);
        if exponent.abs() > 1e15 {
            return Scaled::exp(exponent * base.ln());
        }
        let whole = exponent.trunc();
        let frac = exponent - whole;
        let mut n = whole.abs() as u64;
        let mut acc = Scaled::ONE;
        let mut sq = Scaled::from_f64(base);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * sq;
            }
            n >>= 1;
            if n > 0 {
                sq = sq * sq;
            }
        }
        if whole < 0.0 {
            acc = acc.recip();
        }
        acc.mul_f64(base.powf(frac))
    }

    /// The value as a double when it is a normal finite number.
    pub fn to_f64(self) -> Option<f64> {
        if self.mantissa == 0.0 {
            return Some(0.0);
        }
        let v = ldexp(self.mantissa, self.exp2);
        (v.is_finite() && v.abs() >= f64::MIN_POSITIVE).then_some(v)
    }

    /// Natural logarithm of the absolute value.
    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }

    pub fn is_negative(self) -> bool {
        self.mantissa < 0.0
    }
}

impl std::ops::Mul for Scaled {
    type Output = Scaled;

    fn mul(self, other: Scaled) -> Scaled {
        Scaled::normalized(self.mantissa * other.mantissa, self.exp2 + other.exp2)
    }
}
