//! The four large-parameter expansions, with truncation and a heuristic
//! error estimate from the first omitted term.

use serde::{Deserialize, Serialize};

use crate::coeffs;
use crate::error::{Error, Result};
use crate::mapping::amplitude_at_saddle;
use crate::oracle::{oracle_m, oracle_u};
use crate::regimes::{classify_with_cap, Function, Order, ParameterSet, Regime, SaddleContext, DEFAULT_MU_CAP};
use crate::scalarfun::ln_gamma_star;
use crate::scaled::Scaled;

pub const DEFAULT_TERMS: usize = 3;
pub const MAX_TERMS: usize = 6;
pub const DEFAULT_SAFETY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub terms: usize,
    pub safety: f64,
    pub mu_cap: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { terms: DEFAULT_TERMS, safety: DEFAULT_SAFETY, mu_cap: DEFAULT_MU_CAP }
    }
}

impl EvalOptions {
    pub fn with_terms(terms: usize) -> Self {
        EvalOptions { terms, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub regime: Regime,
    /// The estimate as a double, or `None` when it over- or underflows.
    pub value: Option<f64>,
    pub log_value: f64,
    /// The estimate as `mantissa * 2^exp2`, always available.
    pub scaled: Scaled,
    pub terms_used: usize,
    /// `|c_n / a^n|` for the summed terms, relative to the leading term.
    pub term_magnitudes: Vec<f64>,
    /// `|first omitted term / sum|`.
    pub first_omitted: f64,
    /// Relative error estimate: safety factor times the first omitted term.
    pub error_estimate: f64,
}

fn check_options(opts: &EvalOptions) -> Result<()> {
    if opts.terms == 0 {
        return Err(Error::domain("at least one term is required"));
    }
    if opts.terms > MAX_TERMS {
        return Err(Error::OrderOverflow { requested: opts.terms, max: MAX_TERMS });
    }
    if !(opts.safety.is_finite() && opts.safety >= 0.0) {
        return Err(Error::domain(format!("safety factor must be nonnegative, got {}", opts.safety)));
    }
    Ok(())
}

/// `ln` of the front factor `e^(z/(1 +- mu)) Gamma*(b) / Gamma*(a)` of `M`.
pub fn ln_front_m(ctx: &SaddleContext, p: &ParameterSet) -> Result<f64> {
    let shift = match ctx.regime.order {
        Order::BGeA => p.z() / (1.0 + ctx.mu),
        Order::BLeA => p.z() / (1.0 - ctx.mu),
    };
    if p.a() == p.b() {
        return Ok(shift);
    }
    Ok(shift + ln_gamma_star(p.b())? - ln_gamma_star(p.a())?)
}

/// Front factor `z^-b a^-a b^b e^(a-b) p0` (or `q0`) of `U`, kept in scaled
/// form since it routinely leaves the double range.
pub fn front_u(ctx: &SaddleContext, p: &ParameterSet) -> Scaled {
    let (a, b, z) = (p.a(), p.b(), p.z());
    let amp0 = amplitude_at_saddle(ctx, z);
    let zpow = Scaled::powf(z, -b);
    if a == b {
        return zpow.mul_f64(amp0);
    }
    // a - b split exactly into hi + lo.
    let hi = a - b;
    let bv = hi - a;
    let lo = (a - (hi - bv)) + (-b - bv);
    (zpow * Scaled::powf(a, -a) * Scaled::powf(b, b) * Scaled::exp_sum(hi, lo)).mul_f64(amp0)
}

fn assemble(regime: Regime, front: Scaled, a: f64, coeffs: &[f64], opts: &EvalOptions) -> EvalResult {
    let n = opts.terms;
    let sign = regime.series_sign();
    let terms: Vec<f64> = coeffs.iter().enumerate().map(|(k, c)| sign.powi(k as i32) * c / a.powi(k as i32)).collect();
    let sum: f64 = terms[..n].iter().sum();
    let scaled = front.mul_f64(sum);
    let first_omitted = (terms[n] / sum).abs();
    EvalResult {
        regime,
        value: scaled.to_f64(),
        log_value: scaled.ln_abs(),
        scaled,
        terms_used: n,
        term_magnitudes: terms[..n].iter().map(|t| t.abs()).collect(),
        first_omitted,
        error_estimate: opts.safety * first_omitted,
    }
}

/// `M(a, b, z)` from the expansion matching the ordering of `a` and `b`.
pub fn evaluate_m(p: &ParameterSet, opts: &EvalOptions) -> Result<EvalResult> {
    check_options(opts)?;
    let ctx = classify_with_cap(p, Function::M, opts.mu_cap)?;
    let c = coeffs::normalized(&ctx, p.z(), opts.terms)?;
    let front = Scaled::exp(ln_front_m(&ctx, p)?);
    Ok(assemble(ctx.regime, front, p.a(), &c, opts))
}

/// `U(a, b + 1, z)` from the expansion matching the ordering of `a` and `b`.
pub fn evaluate_u(p: &ParameterSet, opts: &EvalOptions) -> Result<EvalResult> {
    check_options(opts)?;
    let ctx = classify_with_cap(p, Function::U, opts.mu_cap)?;
    let c = coeffs::normalized(&ctx, p.z(), opts.terms)?;
    Ok(assemble(ctx.regime, front_u(&ctx, p), p.a(), &c, opts))
}

pub fn evaluate(function: Function, p: &ParameterSet, opts: &EvalOptions) -> Result<EvalResult> {
    match function {
        Function::M => evaluate_m(p, opts),
        Function::U => evaluate_u(p, opts),
    }
}

/// Relative error against the oracle for `1..=n_max` terms.
pub fn convergence_profile(
    p: &ParameterSet,
    function: Function,
    n_max: usize,
    digits: u32,
) -> Result<Vec<(usize, f64)>> {
    let reference = match function {
        Function::M => oracle_m(p.a(), p.b(), p.z(), digits)?,
        Function::U => oracle_u(p.a(), p.b(), p.z(), digits)?.value,
    };
    (1..=n_max)
        .map(|n| {
            let r = evaluate(function, p, &EvalOptions::with_terms(n))?;
            Ok((n, reference.relative_error_of(r.scaled)))
        })
        .collect()
}
