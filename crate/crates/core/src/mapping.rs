//! The variable change `phi(t) - phi(t0) = psi(s) - psi(s0)` with
//! `sign(t - t0) = sign(s - s0)`, and the transformed amplitudes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regimes::{Function, Order, SaddleContext};
use crate::scalarfun::{lambert_w, lambert_w_from_offset, Branch};

const MAX_ITER: usize = 200;

/// A solved point of the transformation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapPoint {
    pub s: f64,
    pub t: f64,
    pub dtds: f64,
    /// `t - t0`, kept separately since `t` itself may lose the low digits.
    pub delta: f64,
}

/// Second-order coefficient of `t(s) = t0 + d1 u + d2 u^2 + ...`, `u = s - s0`.
pub fn saddle_curvature(ctx: &SaddleContext) -> f64 {
    let d1 = ctx.saddle_slope();
    (ctx.psi_taylor(3) - ctx.phi_taylor(3) * d1.powi(3)) / (2.0 * ctx.phi_taylor(2) * d1)
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("s must be positive, got {s}")))
    }
}

/// At `mu = 0` the saddle sits on the endpoint and the map is explicit.
fn map_degenerate(ctx: &SaddleContext, s: f64) -> MapPoint {
    let (t, dtds) = match (ctx.regime.function, ctx.regime.order) {
        (_, Order::BGeA) => (-(-s).exp_m1(), (-s).exp()),
        (Function::M, Order::BLeA) => (s.exp(), s.exp()),
        (Function::U, Order::BLeA) => (s.exp_m1(), s.exp()),
    };
    MapPoint { s, t, dtds, delta: t - ctx.t0 }
}

/// Solve the transformation for `t` by safeguarded Newton iteration.
pub fn map_t_of_s(ctx: &SaddleContext, s: f64) -> Result<MapPoint> {
    check_s(s)?;
    if ctx.mu == 0.0 {
        return Ok(map_degenerate(ctx, s));
    }
    let u = s - ctx.s0;
    let d1 = ctx.saddle_slope();
    if u.abs() < 1e-6 * ctx.s0.max(1.0) {
        let d2 = saddle_curvature(ctx);
        let delta = u * (d1 + d2 * u);
        return Ok(MapPoint { s, t: ctx.t0 + delta, dtds: d1 + 2.0 * d2 * u, delta });
    }

    let target = ctx.psi_excess(u);
    let f = |delta: f64| ctx.phi_excess(delta) - target;
    let (lo_t, hi_t) = ctx.t_domain();
    // Bracket on the side of t0 selected by the sign condition.
    let (mut lo, mut hi) = if u > 0.0 {
        let mut hi = if hi_t.is_finite() { hi_t - ctx.t0 } else { (2.0 * d1 * u).max(ctx.t0) };
        if !hi_t.is_finite() {
            let mut grow = 0;
            while f(hi) < 0.0 {
                hi *= 2.0;
                grow += 1;
                if grow > 2000 {
                    return Err(Error::Convergence(format!("no bracket for s = {s}")));
                }
            }
        }
        (0.0, hi)
    } else {
        (lo_t - ctx.t0, 0.0)
    };
    let mut delta = (d1 * u).clamp(lo, hi);
    if delta == lo || delta == hi {
        delta = 0.5 * (lo + hi);
    }
    let done = |delta: f64| {
        let dtds = (u / s) / ctx.phi_prime_at_offset(delta);
        Ok(MapPoint { s, t: ctx.t0 + delta, dtds, delta })
    };
    for _ in 0..MAX_ITER {
        let r = f(delta);
        if r == 0.0 {
            return done(delta);
        }
        // phi_excess increases away from the saddle on each side.
        if (r > 0.0) == (u > 0.0) {
            hi = delta;
        } else {
            lo = delta;
        }
        let step = r / ctx.phi_prime_at_offset(delta);
        let next = delta - step;
        if step.abs() <= 4.0 * f64::EPSILON * delta.abs() {
            return done(next);
        }
        delta = if next > lo && next < hi && step.is_finite() { next } else { 0.5 * (lo + hi) };
        if hi - lo <= 4.0 * f64::EPSILON * delta.abs() {
            return done(delta);
        }
    }
    Err(Error::Convergence(format!("transformation solver did not converge at s = {s}, mu = {}", ctx.mu)))
}

/// `-(t/mu) (1 - t)^(1/mu) e^(A/mu)`, the right-hand side of the Lambert form
/// `sigma e^sigma` with `sigma = -s/mu` for the `b >= a` phase.
pub fn lambert_rhs(ctx: &SaddleContext, t: f64) -> f64 {
    let mu = ctx.mu;
    -(t / mu) * ((1.0 - t).ln() / mu + ctx.a_const / mu).exp()
}

/// Inverse direction through the Lambert W function: given `t`, the `s` with
/// `phi(t) - phi(t0) = psi(s) - psi(s0)`. Only the `b >= a` phase has this form.
pub fn lambert_s_of_t(ctx: &SaddleContext, t: f64) -> Result<f64> {
    if ctx.regime.order != Order::BGeA || ctx.mu <= 0.0 {
        return Err(Error::domain("the Lambert form needs the b >= a phase with mu > 0"));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::domain(format!("t = {t} outside (0, 1)")));
    }
    let excess = ctx.phi_excess(t - ctx.t0);
    // sigma e^sigma = -exp(-1 - excess/mu); q = 1 + e * (that) in offset form.
    let q = -(-excess / ctx.mu).exp_m1();
    let branch = if t < ctx.t0 { Branch::Principal } else { Branch::Lower };
    let sigma =
        if q < 0.5 { lambert_w_from_offset(branch, q)? } else { lambert_w(branch, -(-1.0 - excess / ctx.mu).exp())? };
    Ok(-ctx.mu * sigma)
}

/// Exponent sign `kappa` in `exp(kappa z t)` and the linear factors
/// `(value at t0, slope)` dividing the amplitude.
pub(crate) fn amplitude_factors(ctx: &SaddleContext) -> (f64, Vec<(f64, f64)>) {
    let t = (ctx.t0, 1.0);
    match (ctx.regime.function, ctx.regime.order) {
        // e^{-zt} s / (t (1 - t)) dt/ds
        (Function::M, Order::BGeA) => (-1.0, vec![t, (1.0 / (1.0 + ctx.mu), -1.0)]),
        // e^{zt} s / (t (t - 1)) dt/ds
        (Function::M, Order::BLeA) => (1.0, vec![t, (ctx.mu / (1.0 - ctx.mu), 1.0)]),
        // e^{zt} (s / t) dt/ds
        (Function::U, Order::BGeA) => (1.0, vec![t]),
        // e^{-zt} (s / t) dt/ds
        (Function::U, Order::BLeA) => (-1.0, vec![t]),
    }
}

/// The transformed amplitude at `s`.
pub fn amplitude(ctx: &SaddleContext, z: f64, s: f64) -> Result<f64> {
    let point = map_t_of_s(ctx, s)?;
    let (kappa, factors) = amplitude_factors(ctx);
    let denom: f64 = factors.iter().map(|&(base, slope)| base + slope * point.delta).product();
    Ok((kappa * z * point.t).exp() * s / denom * point.dtds)
}

/// Closed form of the amplitude at the saddle.
pub fn amplitude_at_saddle(ctx: &SaddleContext, z: f64) -> f64 {
    let mu = ctx.mu;
    match (ctx.regime.function, ctx.regime.order) {
        (Function::M, Order::BGeA) => (-z * ctx.t0).exp() * (1.0 + mu).sqrt(),
        (Function::M, Order::BLeA) => (z * ctx.t0).exp() * (1.0 - mu).sqrt(),
        (Function::U, Order::BGeA) => (z * mu / (1.0 + mu)).exp() / (1.0 + mu).sqrt(),
        (Function::U, Order::BLeA) => (-z * mu / (1.0 - mu)).exp() / (1.0 - mu).sqrt(),
    }
}
