//! Large-parameter evaluation of the Kummer confluent hypergeometric functions
//! `M(a, b, z)` and `U(a, b + 1, z)` for positive `a`, `b` and fixed `z > 0`.
//!
//! The expansions are uniform in the ratio `b / a`, including the transition
//! `a = b`. Each of the four cases (`M` or `U`, with `b >= a` or `b <= a`) maps
//! its integral representation onto the canonical phase `psi(s) = s - mu ln s`
//! whose saddle point `s0 = mu` is allowed to vanish. Expansion coefficients
//! come from an integration-by-parts recursion applied to the Taylor
//! coefficients of the transformed amplitude.
//!
//! Modules, bottom up:
//!
//! * [`scalarfun`]: log-gamma, scaled gamma, real Lambert W branches.
//! * [`regimes`]: parameter validation, case selection and saddle geometry.
//! * [`mapping`]: the saddle-to-saddle variable change and the amplitudes.
//! * [`coeffs`]: Taylor coefficients, the recursion and the low-order closed forms.
//! * [`expansion`]: the final expansions with truncation and error estimates.
//! * [`oracle`]: multi-precision reference values used for verification.
//! * [`cli`]: the `kummer` command-line front end.

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod expansion;
pub mod mapping;
pub mod oracle;
pub mod regimes;
pub mod scalarfun;
pub mod scaled;

pub use error::{Error, Result};
pub use expansion::{evaluate_m, evaluate_u, EvalOptions, EvalResult};
pub use regimes::{classify, Function, Order, ParameterSet, Regime, SaddleContext};
