//! Scalar special functions: log-gamma, the scaled gamma function and the
//! two real branches of the Lambert W function.

use std::f64::consts::E;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `zeta(k) - 1` for `k = 2, 3, ..., 41`.
const ZETA_MINUS_ONE: [f64; 40] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    0.000_994_575_127_818_085_3,
    0.000_494_188_604_119_464_6,
    0.000_246_086_553_308_048_3,
    0.000_122_713_347_578_489_1,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_762e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_96e-7,
    4.769_329_867_878_065e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_111e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504e-8,
    7.450_711_789_835_429e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
    4.656_629_065_033_784e-10,
    2.328_311_833_676_505e-10,
    1.164_155_017_270_052e-10,
    5.820_772_087_902_701e-11,
    2.910_385_044_497_1e-11,
    1.455_192_189_104_198e-11,
    7.275_959_835_057_481e-12,
    3.637_979_547_378_651e-12,
    1.818_989_650_307_066e-12,
    9.094_947_840_263_889e-13,
    4.547_473_783_042_154e-13,
];

/// `B_{2k} / (2k (2k - 1))`, the Stirling series coefficients for `ln Gamma*`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Below this argument `ln Gamma*` is obtained from `ln Gamma` instead of the
/// Stirling series.
const STIRLING_MIN: f64 = 10.0;

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} requires a finite positive argument, got {x}")))
    }
}

/// `ln(1 + x) - x` without cancellation for small `|x|`.
pub fn ln_1p_minus_x(x: f64) -> f64 {
    if x.abs() > 0.5 {
        return x.ln_1p() - x;
    }
    // With y = x / (2 + x): ln(1 + x) = 2 atanh(y) and x - 2y = x y.
    let y = x / (2.0 + x);
    let y2 = y * y;
    let mut sum = 0.0f64;
    let mut pow = 1.0;
    let mut k = 3.0;
    loop {
        let term = pow / k;
        sum += term;
        if term < 1e-18 * sum.abs() || k > 80.0 {
            break;
        }
        pow *= y2;
        k += 2.0;
    }
    2.0 * y * y2 * sum - x * y
}

/// `ln Gamma(2 + eps)` for `|eps| <= 0.5` from the zeta series.
fn ln_gamma_near_two(eps: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = -eps;
    for (i, zm1) in ZETA_MINUS_ONE.iter().enumerate() {
        pow *= -eps;
        let k = (i + 2) as f64;
        let term = zm1 * pow / k;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    (1.0 - EULER_GAMMA) * eps + sum
}

fn ln_gamma_star_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    Ok(log_gamma_unchecked(x))
}

fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        log_gamma_unchecked(x + 1.0) - x.ln()
    } else if x < 1.5 {
        let eps = x - 1.0;
        ln_gamma_near_two(eps) - eps.ln_1p()
    } else if x < 2.5 {
        ln_gamma_near_two(x - 2.0)
    } else if x < STIRLING_MIN {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        ln_gamma_near_two(y - 2.0) + prod.ln()
    } else {
        (x - 0.5) * x.ln() - x + LN_SQRT_2PI + ln_gamma_star_stirling(x)
    }
}

/// `ln Gamma*(x)` where `Gamma*(x) = e^x x^(-x) sqrt(x / (2 pi)) Gamma(x)`.
pub fn ln_gamma_star(x: f64) -> Result<f64> {
    check_positive("gamma_star", x)?;
    if x >= STIRLING_MIN {
        return Ok(ln_gamma_star_stirling(x));
    }
    // Shift up into the Stirling range: Gamma(x) = Gamma(x + n) / (x)_n.
    let mut y = x;
    let mut poch = 1.0;
    while y < STIRLING_MIN {
        poch *= y;
        y += 1.0;
    }
    let elementary = |v: f64| v - (v - 0.5) * v.ln();
    Ok(ln_gamma_star_stirling(y) + elementary(x) - elementary(y) - poch.ln())
}

/// The scaled gamma function `Gamma*(x)`, which tends to 1 as `x -> inf`.
pub fn gamma_star(x: f64) -> Result<f64> {
    ln_gamma_star(x).map(f64::exp)
}

/// Real branches of the Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `W_0`, defined on `[-1/e, inf)` with values `>= -1`.
    Principal,
    /// `W_{-1}`, defined on `[-1/e, 0)` with values `<= -1`.
    Lower,
}

/// Coefficients of `W` in powers of `p = sqrt(2 (1 + e x))` about the branch point.
const BRANCH_SERIES: [f64; 12] = [
    -1.0,
    1.0,
    -1.0 / 3.0,
    11.0 / 72.0,
    -43.0 / 540.0,
    769.0 / 17280.0,
    -221.0 / 8505.0,
    680_863.0 / 43_545_600.0,
    -1963.0 / 204_120.0,
    226_287_557.0 / 37_623_398_400.0,
    -5_776_369.0 / 1_515_591_000.0,
    169_709_463_197.0 / 69_528_040_243_200.0,
];

/// Below this distance `1 + e x` from the branch point the series is used as is.
const BRANCH_SERIES_ONLY: f64 = 1e-4;

// e split so that `E_HI * x` is exact in an fma.
const E_HI: f64 = E;
const E_LO: f64 = 1.445_646_891_729_250_2e-16;

fn branch_series(p: f64) -> f64 {
    BRANCH_SERIES.iter().rev().fold(0.0, |acc, c| acc * p + c)
}

/// `W(x)` on the selected real branch.
pub fn lambert_w(branch: Branch, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("lambert_w requires a finite argument, got {x}")));
    }
    let offset = E_HI.mul_add(x, 1.0) + E_LO * x;
    if branch == Branch::Lower && x >= 0.0 {
        return Err(Error::domain(format!("lower Lambert W branch requires x < 0, got {x}")));
    }
    solve_w(branch, x, offset)
}

/// `W` on the selected branch, with the argument given through its offset
/// `q = 1 + e x >= 0` from the branch point. Passing `q` directly keeps full
/// relative accuracy close to `x = -1/e`.
pub fn lambert_w_from_offset(branch: Branch, q: f64) -> Result<f64> {
    if !q.is_finite() {
        return Err(Error::domain(format!("lambert_w offset must be finite, got {q}")));
    }
    if branch == Branch::Lower && q >= 1.0 {
        return Err(Error::domain(format!("lower Lambert W branch requires offset < 1, got {q}")));
    }
    solve_w(branch, (q - 1.0) / E, q)
}

fn solve_w(branch: Branch, x: f64, offset: f64) -> Result<f64> {
    let q = if offset < 0.0 && offset > -4.0 * f64::EPSILON { 0.0 } else { offset };
    if q < 0.0 {
        return Err(Error::domain(format!("lambert_w argument {x} is below -1/e")));
    }
    let sign = match branch {
        Branch::Principal => 1.0,
        Branch::Lower => -1.0,
    };
    let p = sign * (2.0 * q).sqrt();
    if q < BRANCH_SERIES_ONLY {
        return Ok(branch_series(p));
    }

    let guess = if q < 0.5 {
        branch_series(p)
    } else {
        match branch {
            Branch::Principal if x < 3.0 => {
                let l = x.ln_1p();
                l * (1.0 - l.ln_1p() / (2.0 + l))
            }
            Branch::Principal => {
                let l1 = x.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
            Branch::Lower => {
                let l1 = (-x).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            }
        }
    };

    let w = if branch == Branch::Principal && x > 1e100 { log_newton(x.ln(), guess)? } else { halley(x, guess)? };
    Ok(match branch {
        Branch::Principal => w.max(-1.0),
        Branch::Lower => w.min(-1.0),
    })
}

fn halley(x: f64, mut w: f64) -> Result<f64> {
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::Convergence(format!("Halley iteration for W({x}) diverged")))
    }
}

/// Newton on `w + ln w = ln x`, used where `w e^w` would overflow.
fn log_newton(ln_x: f64, mut w: f64) -> Result<f64> {
    for _ in 0..64 {
        let step = (w + w.ln() - ln_x) / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * w.abs() {
            return Ok(w);
        }
    }
    Err(Error::Convergence(format!("Lambert W iteration for ln x = {ln_x} did not settle")))
}
