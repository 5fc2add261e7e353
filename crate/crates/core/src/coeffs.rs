//! Expansion coefficients: Taylor coefficients of the transformed amplitude
//! about `s0 = mu`, the integration-by-parts recursion that turns them into
//! expansion coefficients, and the known closed forms for `n <= 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::{amplitude_at_saddle, amplitude_factors};
use crate::regimes::{Function, Order, Regime, SaddleContext};

/// Largest supported Taylor order.
pub const MAX_ORDER: usize = 12;

/// Below this `mu` the direct pipeline loses accuracy for `n >= 3` and the
/// coefficients are rebuilt from a polynomial fit (see [`normalized`]).
pub const SMALL_MU: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub regime: Regime,
    pub mu: f64,
    pub z: f64,
    pub a_m: Vec<f64>,
    pub f_n: Vec<f64>,
    pub normalized: Vec<f64>,
}

fn check_order(requested: usize) -> Result<()> {
    if requested > MAX_ORDER {
        Err(Error::OrderOverflow { requested, max: MAX_ORDER })
    } else {
        Ok(())
    }
}

/// Truncated power-series product.
fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let len = p.len().min(q.len());
    let mut r = vec![0.0; len];
    for (i, &pi) in p.iter().enumerate().take(len) {
        if pi == 0.0 {
            continue;
        }
        for (j, &qj) in q.iter().enumerate().take(len - i) {
            r[i + j] += pi * qj;
        }
    }
    r
}

/// Coefficients `d_k` of `t(s) - t0 = sum d_k u^k`, `k < len`, by matching
/// powers of `u` in `sum phi_j (t - t0)^j = sum psi_j u^j`.
fn inverse_series(ctx: &SaddleContext, len: usize) -> Vec<f64> {
    let phi: Vec<f64> = (0..=len + 1).map(|j| if j < 2 { 0.0 } else { ctx.phi_taylor(j) }).collect();
    let psi: Vec<f64> = (0..=len + 1).map(|j| if j < 2 { 0.0 } else { ctx.psi_taylor(j) }).collect();
    let work = len + 2;
    let mut d = vec![0.0; work];
    d[1] = ctx.saddle_slope();
    for n in 2..len {
        // u^(n+1) coefficient of sum_{j>=2} phi_j D^j with d_n still zero;
        // d_n enters only through 2 phi_2 d_1 d_n.
        let mut pw = d.clone();
        let mut tot = 0.0;
        for &ph in phi.iter().take(n + 2).skip(2) {
            pw = mul(&pw, &d);
            tot += ph * pw[n + 1];
        }
        d[n] = (psi[n + 1] - tot) / (2.0 * phi[2] * d[1]);
    }
    d.truncate(len);
    d
}

/// Taylor coefficients `a_0..a_M` of the amplitude about `s0`.
pub fn taylor_amplitude(ctx: &SaddleContext, z: f64, order: usize) -> Result<Vec<f64>> {
    check_order(order)?;
    if ctx.mu.is_nan() || ctx.mu <= 0.0 {
        return Err(Error::domain("Taylor coefficients need mu > 0"));
    }
    let len = order + 2;
    let d = inverse_series(ctx, len);
    let dprime: Vec<f64> = (0..len).map(|k| if k + 1 < len { (k + 1) as f64 * d[k + 1] } else { 0.0 }).collect();

    let (kappa, factors) = amplitude_factors(ctx);
    // exp(kappa z D) by e_k = (kappa z / k) sum_j j d_j e_{k-j}.
    let mut e = vec![0.0; len];
    e[0] = 1.0;
    for k in 1..len {
        let acc: f64 = (1..=k).map(|j| j as f64 * d[j] * e[k - j]).sum();
        e[k] = kappa * z * acc / k as f64;
    }
    let mut s = vec![0.0; len];
    s[0] = ctx.mu;
    s[1] = 1.0;
    let mut amp = mul(&mul(&e, &s), &dprime);
    for (base, slope) in factors {
        // 1 / (base + slope D) = (1/base) sum (-slope D / base)^k
        let q: Vec<f64> = d.iter().map(|x| -slope * x / base).collect();
        let mut inv = vec![0.0; len];
        let mut pw = vec![0.0; len];
        pw[0] = 1.0;
        for _ in 0..len {
            for (i, p) in inv.iter_mut().zip(&pw) {
                *i += p;
            }
            pw = mul(&pw, &q);
        }
        let inv: Vec<f64> = inv.iter().map(|x| x / base).collect();
        amp = mul(&amp, &inv);
    }
    let e0 = (kappa * z * ctx.t0).exp();
    Ok(amp.into_iter().take(order + 1).map(|x| x * e0).collect())
}

/// `f_0..f_N` from `c^(n+1)_m = m c^(n)_(m+1) + mu (m+1) c^(n)_(m+2)`,
/// starting from `c^(0) = a` and reading `f_n = c^(n)_0`.
pub fn push_recursion(a_m: &[f64], mu: f64, n: usize) -> Result<Vec<f64>> {
    if a_m.is_empty() {
        return Err(Error::domain("empty Taylor coefficient list"));
    }
    let max = (a_m.len() - 1) / 2;
    if n > max {
        return Err(Error::OrderOverflow { requested: n, max });
    }
    let mut c = a_m.to_vec();
    let mut f = vec![c[0]];
    for _ in 0..n {
        c = (0..c.len() - 2).map(|m| m as f64 * c[m + 1] + mu * (m + 1) as f64 * c[m + 2]).collect();
        f.push(c[0]);
    }
    Ok(f)
}

/// Taylor coefficients to order `2N`, the recursion, and `f_n / f_0`.
pub fn coefficient_table(ctx: &SaddleContext, z: f64, n: usize) -> Result<CoefficientTable> {
    let order = 2 * n;
    check_order(order)?;
    let a_m = taylor_amplitude(ctx, z, order)?;
    let f_n = push_recursion(&a_m, ctx.mu, n)?;
    let normalized = f_n.iter().map(|f| f / f_n[0]).collect();
    Ok(CoefficientTable { regime: ctx.regime, mu: ctx.mu, z, a_m, f_n, normalized })
}

/// The known closed forms of the normalized coefficients for `n <= 2`. Any
/// real `mu` is accepted so the formal substitution `mu -> -mu` can be tested.
pub fn closed_form(regime: Regime, n: usize, mu: f64, z: f64) -> Result<f64> {
    if n > 2 {
        return Err(Error::OrderOverflow { requested: n, max: 2 });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let (z2, z3, z4) = (z * z, z * z * z, z * z * z * z);
    let v = match (regime.function, regime.order, n) {
        (Function::M, Order::BGeA, 1) => mu * ((mu + 1.0).powi(2) + 6.0 * z2) / (12.0 * (mu + 1.0).powi(3)),
        (Function::M, Order::BGeA, _) => {
            let p = 1.0 + mu;
            mu * (mu * p.powi(4) + 12.0 * (mu - 12.0) * p.powi(2) * z2 + 96.0 * (mu * mu - 1.0) * z3 + 36.0 * mu * z4)
                / (288.0 * p.powi(6))
        }
        (Function::M, Order::BLeA, 1) => mu * ((1.0 - mu).powi(2) + 6.0 * z2) / (12.0 * (1.0 - mu).powi(3)),
        (Function::M, Order::BLeA, _) => {
            let p = 1.0 - mu;
            mu * (mu * p.powi(4) + 12.0 * (mu + 12.0) * p.powi(2) * z2 + 96.0 * (1.0 - mu * mu) * z3 + 36.0 * mu * z4)
                / (288.0 * p.powi(6))
        }
        (Function::U, Order::BGeA, 1) => {
            let p = 1.0 + mu;
            mu / (12.0 * p.powi(3)) * (p * p + 6.0 * z * (z - 2.0 - 2.0 * mu))
        }
        (Function::U, Order::BGeA, _) => {
            let p = 1.0 + mu;
            mu / (288.0 * p.powi(6))
                * (mu * p.powi(4) - 24.0 * (mu - 12.0) * p.powi(3) * z + 12.0 * (25.0 * mu - 36.0) * p * p * z2
                    - 48.0 * (5.0 * mu - 2.0) * p * z3
                    + 36.0 * mu * z4)
        }
        (Function::U, Order::BLeA, 1) => {
            let p = 1.0 - mu;
            mu / (12.0 * p.powi(3)) * (p * p + 6.0 * z * (z - 2.0 + 2.0 * mu))
        }
        (Function::U, Order::BLeA, _) => {
            let p = 1.0 - mu;
            mu / (288.0 * p.powi(6))
                * (mu * p.powi(4) - 24.0 * (mu + 12.0) * p.powi(3) * z + 12.0 * (25.0 * mu + 36.0) * p * p * z2
                    - 48.0 * (5.0 * mu + 2.0) * p * z3
                    + 36.0 * mu * z4)
        }
    };
    Ok(v)
}

fn pipeline_coefficient(regime: Regime, n: usize, mu: f64, z: f64) -> Result<f64> {
    let ctx = SaddleContext::for_mu(regime, mu)?;
    Ok(coefficient_table(&ctx, z, n)?.normalized[n])
}

/// `f_n(mu) (1 +- mu)^(3n)` is a polynomial of degree `3n` in `mu` vanishing
/// at `mu = 0`. For small `mu` it is rebuilt by barycentric interpolation on
/// Chebyshev nodes where the direct pipeline is well conditioned.
fn small_mu_coefficient(regime: Regime, n: usize, mu: f64, z: f64) -> Result<f64> {
    if mu == 0.0 {
        return Ok(0.0);
    }
    let sign = match regime.order {
        Order::BGeA => 1.0,
        Order::BLeA => -1.0,
    };
    let (lo, hi) = match regime.order {
        Order::BGeA => (SMALL_MU, 1.5),
        Order::BLeA => (SMALL_MU, 0.6),
    };
    let deg = 3 * n;
    let weight = |x: f64| (1.0 + sign * x).powi(deg as i32);
    let mut xs = vec![0.0];
    let mut ys = vec![0.0];
    for k in 0..deg {
        let x =
            0.5 * (lo + hi) + 0.5 * (hi - lo) * ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * deg) as f64).cos();
        xs.push(x);
        ys.push(pipeline_coefficient(regime, n, x, z)? * weight(x));
    }
    let w: Vec<f64> = (0..xs.len())
        .map(|i| 1.0 / (0..xs.len()).filter(|&j| j != i).map(|j| xs[i] - xs[j]).product::<f64>())
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..xs.len() {
        let c = w[i] / (mu - xs[i]);
        num += c * ys[i];
        den += c;
    }
    Ok(num / den / weight(mu))
}

/// Normalized coefficients `f~_0..f~_N` used by the expansions: closed forms
/// for `n <= 2`, the numeric pipeline beyond.
pub fn normalized(ctx: &SaddleContext, z: f64, n: usize) -> Result<Vec<f64>> {
    check_order(2 * n)?;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n.min(2) {
        out.push(closed_form(ctx.regime, k, ctx.mu, z)?);
    }
    if n >= 3 {
        if ctx.mu < SMALL_MU {
            for k in 3..=n {
                out.push(small_mu_coefficient(ctx.regime, k, ctx.mu, z)?);
            }
        } else {
            let table = coefficient_table(ctx, z, n)?;
            out.extend_from_slice(&table.normalized[3..=n]);
        }
    }
    Ok(out)
}

/// `f_0`, the amplitude at the saddle.
pub fn leading(ctx: &SaddleContext, z: f64) -> f64 {
    amplitude_at_saddle(ctx, z)
}
