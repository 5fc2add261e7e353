use std::fmt;

use rug::Float;

use crate::scaled::Scaled;

/// Binary precision carrying `digits` decimal digits plus a guard margin.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

/// A multi-precision real tagged with the decimal precision it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct BigReal {
    value: Float,
    digits: u32,
}

impl BigReal {
    pub fn new(value: Float, digits: u32) -> Self {
        BigReal { value, digits }
    }

    pub fn from_f64(x: f64, digits: u32) -> Self {
        BigReal { value: Float::with_val(bits_for_digits(digits), x), digits }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn as_float(&self) -> &Float {
        &self.value
    }

    pub fn into_float(self) -> Float {
        self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// `ln |x|` rounded to double precision; finite even when `x` itself is not
    /// representable as a double.
    pub fn ln_abs(&self) -> f64 {
        Float::with_val(self.value.prec(), self.value.abs_ref()).ln().to_f64()
    }

    /// Decimal scientific notation with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        self.value.to_string_radix(10, Some(digits))
    }

    /// `|self / reference - 1|`.
    pub fn relative_error(&self, reference: &BigReal) -> f64 {
        let prec = self.value.prec().max(reference.value.prec());
        let q = Float::with_val(prec, &self.value / &reference.value) - 1u32;
        q.abs().to_f64()
    }

    /// `|approx / self - 1|` for a double-range-free approximation.
    pub fn relative_error_of(&self, approx: Scaled) -> f64 {
        let mut x = Float::with_val(self.value.prec(), approx.mantissa);
        x <<= approx.exp2 as i32;
        let q = Float::with_val(self.value.prec(), &x / &self.value) - 1u32;
        q.abs().to_f64()
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(self.digits as usize))
    }
}
