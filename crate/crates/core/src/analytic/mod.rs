//! Closed-form SINR and secrecy-rate bounds and the optimal power split.

mod bounds;
mod special;

pub use bounds::{
    alpha_opt, alpha_opt_detailed, secrecy_rate_bound, sinr_bob_bound, sinr_eve_bound, sr_curve,
    AlphaOpt, AlphaOptMethod, BoundInputs, SrCurvePoint, SrTerms,
};
pub use special::{
    bessel_k_approx, const_a, const_a_series, lah, ln_factorial, ln_gamma_half, ln_lah, psi,
    psi_table, MAX_EXACT_LAH,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("Lah number L({l}, {q}) exceeds exact integer range")]
    LahOverflow { l: u32, q: u32 },
    #[error("Bessel order {0} is outside the expansion's domain (needs >= 1)")]
    InvalidOrder(u32),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("secrecy-rate log argument {0} is not positive")]
    NonPositiveArgument(f64),
    #[error("truncated Bessel series gives A = {value} for U = {bor}; the bound is undefined")]
    UnusableSeries { bor: u32, value: f64 },
}
