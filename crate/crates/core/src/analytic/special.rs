//! Lah numbers, half-integer Gamma values and the finite double-series
//! approximation of the modified Bessel function of the second kind.
//!
//! Every magnitude in the series is assembled in log space with its sign
//! tracked separately; `Gamma(1/2 - U)` alternates in sign and the
//! factorials involved overflow `f64` long before `D = 20` terms.

use std::f64::consts::{LN_2, PI};

use super::AnalyticError;

/// Largest `l` for which [`lah`] returns an exact integer.
pub const MAX_EXACT_LAH: u32 = 20;

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn binomial(n: u32, k: u32) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Unsigned Lah number `L(l, q) = C(l-1, q-1) l! / q!`, with
/// `L(0, 0) = 1` and `L(l, 0) = L(0, q) = 0` otherwise.
pub fn lah(l: u32, q: u32) -> Result<u128, AnalyticError> {
    if l > MAX_EXACT_LAH {
        return Err(AnalyticError::LahOverflow { l, q });
    }
    match (l, q) {
        (0, 0) => return Ok(1),
        (0, _) | (_, 0) => return Ok(0),
        _ if q > l => return Ok(0),
        _ => {}
    }
    let rising: u128 = (q + 1..=l).map(u128::from).product();
    binomial(l - 1, q - 1)
        .and_then(|c| c.checked_mul(rising))
        .ok_or(AnalyticError::LahOverflow { l, q })
}

/// `ln L(l, q)`, or `None` when the Lah number is zero. Valid for any `l`.
pub fn ln_lah(l: u32, q: u32) -> Option<f64> {
    match (l, q) {
        (0, 0) => Some(0.0),
        (0, _) | (_, 0) => None,
        _ if q > l => None,
        _ => Some(ln_binomial(l - 1, q - 1) + ln_factorial(l) - ln_factorial(q)),
    }
}

/// `(ln |Gamma(m + 1/2)|, sign)` for any integer `m`.
///
/// Non-negative `m` uses `Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)`;
/// negative `m` goes through the reflection
/// `Gamma(1/2 - k) Gamma(1/2 + k) = (-1)^k pi`.
pub fn ln_gamma_half(m: i64) -> (f64, f64) {
    let ln_positive =
        |k: u32| ln_factorial(2 * k) - 2.0 * f64::from(k) * LN_2 - ln_factorial(k) + 0.5 * PI.ln();
    if m >= 0 {
        (ln_positive(m as u32), 1.0)
    } else {
        let k = m.unsigned_abs() as u32;
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        (PI.ln() - ln_positive(k), sign)
    }
}

/// Expansion coefficient `psi(nu, l, q)` of the Bessel-K series:
///
/// ```text
/// (-1)^q sqrt(pi) Gamma(2 nu) Gamma(1/2 + l - nu) L(l, q)
/// -------------------------------------------------------
///   2^(nu - q) Gamma(1/2 - nu) Gamma(1/2 + l + nu) l!
/// ```
///
/// `nu` is the Bessel order and must be at least 1 (`Gamma(2 nu)` has a
/// pole at `nu = 0`).
pub fn psi(nu: u32, l: u32, q: u32) -> Result<f64, AnalyticError> {
    if nu == 0 {
        return Err(AnalyticError::InvalidOrder(nu));
    }
    let Some(ln_l) = ln_lah(l, q) else {
        return Ok(0.0);
    };
    let (nu_i, l_i) = (i64::from(nu), i64::from(l));
    let (ln_g_num, s_num) = ln_gamma_half(l_i - nu_i);
    let (ln_g_den, s_den) = ln_gamma_half(-nu_i);
    let (ln_g_top, _) = ln_gamma_half(l_i + nu_i);
    let ln_mag = 0.5 * PI.ln() + ln_factorial(2 * nu - 1) + ln_g_num + ln_l
        - (f64::from(nu) - f64::from(q)) * LN_2
        - ln_g_den
        - ln_g_top
        - ln_factorial(l);
    let sign = if q.is_multiple_of(2) { 1.0 } else { -1.0 } * s_num * s_den;
    Ok(sign * ln_mag.exp())
}

/// Table of `psi(nu, l, q)` indexed `[q][l]` for `0 <= l, q <= d`.
pub fn psi_table(nu: u32, d: u32) -> Result<Vec<Vec<f64>>, AnalyticError> {
    (0..=d)
        .map(|q| (0..=d).map(|l| psi(nu, l, q)).collect())
        .collect()
}

/// `K_nu(x) ~ sum_{q,l <= d} psi(nu, l, q) e^-x x^(q - nu)`.
///
/// Accurate for moderate `x`; the truncated series grows like `x^(d - nu)`
/// and diverges from `K_nu` for large arguments, fastest at `nu = 1`.
pub fn bessel_k_approx(nu: u32, x: f64, d: u32) -> Result<f64, AnalyticError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(AnalyticError::InvalidInput(format!(
            "bessel argument x = {x} must be > 0"
        )));
    }
    let table = psi_table(nu, d)?;
    let mut sum = 0.0;
    for (q, row) in table.iter().enumerate() {
        let coeff: f64 = row.iter().sum();
        sum += coeff * x.powi(q as i32 - nu as i32);
    }
    Ok(sum * (-x).exp())
}

/// Constant `A` of the Eve SINR bound:
/// `A = sum_{q,l} psi(U-1, l, q) (q+3)! / (U^2 (U-1)! 2^(U+3))`,
/// so that the mean useful power at Eve is `4 alpha A`.
///
/// Fails with [`AnalyticError::UnusableSeries`] when the truncated series
/// does not give a positive constant (it does not for `U = 2`).
pub fn const_a(bor: u32, d: u32) -> Result<f64, AnalyticError> {
    let a = const_a_series(bor, d)?;
    if a.is_finite() && a > 0.0 {
        Ok(a)
    } else {
        Err(AnalyticError::UnusableSeries { bor, value: a })
    }
}

/// Raw truncated series behind [`const_a`], without the sign check.
pub fn const_a_series(bor: u32, d: u32) -> Result<f64, AnalyticError> {
    if bor < 2 {
        return Err(AnalyticError::InvalidInput(format!(
            "bor = {bor} must be >= 2"
        )));
    }
    let table = psi_table(bor - 1, d)?;
    let u = f64::from(bor);
    let mut sum = 0.0;
    for (q, row) in table.iter().enumerate() {
        let coeff: f64 = row.iter().sum();
        sum += coeff * (ln_factorial(q as u32 + 3)).exp();
    }
    let ln_den = 2.0 * u.ln() + ln_factorial(bor - 1) + f64::from(bor + 3) * LN_2;
    Ok(sum * (-ln_den).exp())
}
