//! Case selection and saddle-point geometry.
//!
//! Every case writes its integrand as `exp(+-a phi(t))` and is mapped onto
//! the canonical phase `psi(s) = s - mu ln s` with saddle `s0 = mu`. The
//! phases `phi` are all of the form `c1 ln(x1 + y1 t) + c2 ln(x2 + y2 t)`,
//! which lets the mapping and coefficient code treat the four cases alike.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalarfun::ln_1p_minus_x;

/// Default upper bound on `mu = (b - a) / a` for the `b >= a` expansions.
pub const DEFAULT_MU_CAP: f64 = 10.0;

/// Validated arguments `(a, b, z)`, all finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    a: f64,
    b: f64,
    z: f64,
}

impl ParameterSet {
    pub fn new(a: f64, b: f64, z: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("z", z)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(ParameterSet { a, b, z })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn z(&self) -> f64 {
        self.z
    }
}

/// Which Kummer function is evaluated. `U` always means `U(a, b + 1, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Function {
    M,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    #[serde(rename = "b_ge_a")]
    BGeA,
    #[serde(rename = "b_le_a")]
    BLeA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Regime {
    pub function: Function,
    pub order: Order,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::new(Function::M, Order::BGeA),
        Regime::new(Function::M, Order::BLeA),
        Regime::new(Function::U, Order::BGeA),
        Regime::new(Function::U, Order::BLeA),
    ];

    pub const fn new(function: Function, order: Order) -> Self {
        Regime { function, order }
    }

    /// `+1` for the Laplace-integral cases, `-1` for the loop-integral cases
    /// whose expansions alternate in sign.
    pub fn series_sign(&self) -> f64 {
        match (self.function, self.order) {
            (Function::M, Order::BGeA) | (Function::U, Order::BLeA) => 1.0,
            (Function::M, Order::BLeA) | (Function::U, Order::BGeA) => -1.0,
        }
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Function::M => "M",
            Function::U => "U",
        })
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::BGeA => "b_ge_a",
            Order::BLeA => "b_le_a",
        })
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.function, self.order)
    }
}

impl FromStr for Function {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" | "m" => Ok(Function::M),
            "U" | "u" => Ok(Function::U),
            _ => Err(Error::domain(format!("unknown function '{s}', expected M or U"))),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b_ge_a" | "ge" => Ok(Order::BGeA),
            "b_le_a" | "le" => Ok(Order::BLeA),
            _ => Err(Error::domain(format!("unknown order '{s}', expected b_ge_a or b_le_a"))),
        }
    }
}

/// The term `coef * ln(shift + slope * t)`, with `base = shift + slope * t0`
/// computed without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogTerm {
    pub coef: f64,
    pub shift: f64,
    pub slope: f64,
    pub base: f64,
}

impl LogTerm {
    fn arg(&self, t: f64) -> f64 {
        self.shift + self.slope * t
    }

    /// `shift + slope * (t0 + delta)`.
    pub fn arg_at_offset(&self, delta: f64) -> f64 {
        self.base + self.slope * delta
    }
}

/// Saddle geometry of one case at one value of `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleContext {
    pub regime: Regime,
    /// `|b - a|`. Contexts built from `mu` alone take `a = 1`.
    pub lambda: f64,
    pub mu: f64,
    pub t0: f64,
    pub s0: f64,
    /// `A = phi(t0) - psi(s0)`.
    pub a_const: f64,
}

/// Pick the case for `(a, b)` and compute its geometry. At `a = b` the
/// `b >= a` branch is used.
pub fn classify(p: &ParameterSet, function: Function) -> Result<SaddleContext> {
    classify_with_cap(p, function, DEFAULT_MU_CAP)
}

pub fn classify_with_cap(p: &ParameterSet, function: Function, mu_cap: f64) -> Result<SaddleContext> {
    let (a, b) = (p.a(), p.b());
    let (order, lambda) = if b >= a { (Order::BGeA, b - a) } else { (Order::BLeA, a - b) };
    let mu = lambda / a;
    if order == Order::BGeA && mu > mu_cap {
        return Err(Error::domain(format!("mu = (b - a)/a = {mu} exceeds the cap {mu_cap} for the b >= a expansions")));
    }
    let mut ctx = SaddleContext::for_mu(Regime::new(function, order), mu)?;
    ctx.lambda = lambda;
    Ok(ctx)
}

/// The closed form of `A(mu)` for the case.
pub fn constant_a(ctx: &SaddleContext) -> f64 {
    let mu = ctx.mu;
    match ctx.regime.order {
        Order::BGeA => (1.0 + mu) * mu.ln_1p() - mu,
        Order::BLeA => {
            if mu == 0.0 {
                0.0
            } else {
                -(1.0 - mu) * (-mu).ln_1p() - mu
            }
        }
    }
}

impl SaddleContext {
    pub fn for_mu(regime: Regime, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::domain(format!("mu must be finite and nonnegative, got {mu}")));
        }
        if regime.order == Order::BLeA && mu >= 1.0 {
            return Err(Error::domain(format!("mu must be below 1 when b <= a, got {mu}")));
        }
        let t0 = match (regime.function, regime.order) {
            (_, Order::BGeA) => mu / (1.0 + mu),
            (Function::M, Order::BLeA) => 1.0 / (1.0 - mu),
            (Function::U, Order::BLeA) => mu / (1.0 - mu),
        };
        let mut ctx = SaddleContext { regime, lambda: mu, mu, t0, s0: mu, a_const: 0.0 };
        ctx.a_const = constant_a(&ctx);
        Ok(ctx)
    }

    /// The two logarithmic terms making up `phi`.
    pub fn phase_terms(&self) -> [LogTerm; 2] {
        let mu = self.mu;
        let t = |coef, shift, slope, base| LogTerm { coef, shift, slope, base };
        match (self.regime.function, self.regime.order) {
            // -ln(1 - t) - mu ln t
            (_, Order::BGeA) => [t(-1.0, 1.0, -1.0, 1.0 / (1.0 + mu)), t(-mu, 0.0, 1.0, self.t0)],
            // ln t - mu ln(t - 1)
            (Function::M, Order::BLeA) => [t(1.0, 0.0, 1.0, self.t0), t(-mu, -1.0, 1.0, mu / (1.0 - mu))],
            // ln(1 + t) - mu ln t
            (Function::U, Order::BLeA) => [t(1.0, 1.0, 1.0, 1.0 / (1.0 - mu)), t(-mu, 0.0, 1.0, self.t0)],
        }
    }

    /// Open interval of real `t` on which `phi` is defined.
    pub fn t_domain(&self) -> (f64, f64) {
        match (self.regime.function, self.regime.order) {
            (_, Order::BGeA) => (0.0, 1.0),
            (Function::M, Order::BLeA) => (1.0, f64::INFINITY),
            (Function::U, Order::BLeA) => (0.0, f64::INFINITY),
        }
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.t_domain();
        if t > lo && t < hi {
            Ok(())
        } else {
            Err(Error::domain(format!("t = {t} outside ({lo}, {hi}) for {}", self.regime)))
        }
    }

    fn check_s(s: f64) -> Result<()> {
        if s > 0.0 && s.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("s must be positive, got {s}")))
        }
    }

    pub fn phi(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.phase_terms().iter().filter(|term| term.coef != 0.0).map(|term| term.coef * term.arg(t).ln()).sum())
    }

    pub fn phi_prime(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.phase_terms().iter().map(|term| term.coef * term.slope / term.arg(t)).sum())
    }

    pub fn psi(&self, s: f64) -> Result<f64> {
        Self::check_s(s)?;
        Ok(if self.mu == 0.0 { s } else { s - self.mu * s.ln() })
    }

    pub fn psi_prime(&self, s: f64) -> Result<f64> {
        Self::check_s(s)?;
        Ok((s - self.mu) / s)
    }

    /// `phi(t0 + delta) - phi(t0)`. The linear parts of the logarithms cancel
    /// since `phi'(t0) = 0`, so the excess is both `sum c ln(1 + x)` and
    /// `sum c (ln(1 + x) - x)`; the better conditioned sum is returned.
    pub fn phi_excess(&self, delta: f64) -> f64 {
        let (mut near, mut near_mag, mut far, mut far_mag) = (0.0, 0.0, 0.0, 0.0);
        for term in self.phase_terms().iter().filter(|term| term.coef != 0.0) {
            let x = term.slope * delta / term.base;
            let a = term.coef * ln_1p_minus_x(x);
            let b = term.coef * x.ln_1p();
            near += a;
            near_mag += a.abs();
            far += b;
            far_mag += b.abs();
        }
        if near_mag <= far_mag {
            near
        } else {
            far
        }
    }

    /// `phi'(t0 + delta)`, either summed directly or with `phi'(t0) = 0`
    /// used to factor out `delta`, whichever cancels less.
    pub fn phi_prime_at_offset(&self, delta: f64) -> f64 {
        let (mut near, mut near_mag, mut far, mut far_mag) = (0.0, 0.0, 0.0, 0.0);
        for term in self.phase_terms().iter().filter(|term| term.coef != 0.0) {
            let arg = term.arg_at_offset(delta);
            let a = -delta * term.coef * term.slope * term.slope / (arg * term.base);
            let b = term.coef * term.slope / arg;
            near += a;
            near_mag += a.abs();
            far += b;
            far_mag += b.abs();
        }
        if near_mag <= far_mag {
            near
        } else {
            far
        }
    }

    /// `psi(s0 + u) - psi(s0)`.
    pub fn psi_excess(&self, u: f64) -> f64 {
        if self.mu == 0.0 {
            u
        } else {
            -self.mu * ln_1p_minus_x(u / self.mu)
        }
    }

    /// Taylor coefficient `phi^(j)(t0) / j!` for `j >= 2`.
    pub fn phi_taylor(&self, j: usize) -> f64 {
        let sign = if j.is_multiple_of(2) { -1.0 } else { 1.0 };
        let jf = j as f64;
        self.phase_terms().iter().map(|term| sign * term.coef * (term.slope / term.base).powi(j as i32) / jf).sum()
    }

    /// Taylor coefficient `psi^(j)(s0) / j! = (-1)^j / (j mu^(j-1))` for `j >= 2`.
    pub fn psi_taylor(&self, j: usize) -> f64 {
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign / (j as f64 * self.mu.powi(j as i32 - 1))
    }

    /// `phi''(t0)`, which equals `(1 + mu)^3 / mu` or `(1 - mu)^3 / mu`.
    pub fn phi_second_at_saddle(&self) -> f64 {
        2.0 * self.phi_taylor(2)
    }

    /// `dt/ds` at the saddle: `sqrt(psi''(s0) / phi''(t0))`.
    pub fn saddle_slope(&self) -> f64 {
        match self.regime.order {
            Order::BGeA => (1.0 + self.mu).powf(-1.5),
            Order::BLeA => (1.0 - self.mu).powf(-1.5),
        }
    }
}

/// A point `r e^(i theta)` on the steepest-descent path through `t0 = 1/(1 - mu)`
/// of the `M, b <= a` phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub theta: f64,
    pub r: f64,
}

/// Radius of the steepest-descent path, `sin(theta/mu) / sin((1 - mu) theta / mu)`,
/// for `|theta| <= mu pi`.
pub fn steepest_descent_radius(mu: f64, theta: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::domain(format!("path requires 0 < mu < 1, got {mu}")));
    }
    let bound = mu * std::f64::consts::PI;
    if theta.is_nan() || theta.abs() > bound * (1.0 + 1e-15) {
        return Err(Error::domain(format!("theta = {theta} outside [-{bound}, {bound}]")));
    }
    if theta.abs() < 1e-300 {
        return Ok(1.0 / (1.0 - mu));
    }
    Ok((theta / mu).sin() / ((1.0 - mu) * theta / mu).sin())
}

/// `samples` equally spaced points over `theta in [-mu pi, mu pi]`.
pub fn steepest_descent_path(mu: f64, samples: usize) -> Result<Vec<PathPoint>> {
    if samples < 2 {
        return Err(Error::domain("path needs at least 2 samples"));
    }
    let bound = mu * std::f64::consts::PI;
    (0..samples)
        .map(|k| {
            let theta = if 2 * k + 1 == samples { 0.0 } else { -bound + 2.0 * bound * k as f64 / (samples - 1) as f64 };
            steepest_descent_radius(mu, theta).map(|r| PathPoint { theta, r })
        })
        .collect()
}
