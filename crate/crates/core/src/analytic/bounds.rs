use std::f64::consts::LN_2;

use super::{special::const_a, AnalyticError};
use crate::model::SystemParams;

/// Inputs of the SINR and secrecy-rate bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub bor: u32,
    pub alpha: f64,
    pub sigma2_vb: f64,
    pub sigma2_ve: f64,
    pub sigma2_an: f64,
    pub bessel_terms: u32,
}

impl BoundInputs {
    pub fn new(
        bor: u32,
        alpha: f64,
        sigma2_vb: f64,
        sigma2_ve: f64,
        sigma2_an: f64,
        bessel_terms: u32,
    ) -> Result<Self, AnalyticError> {
        let inputs = Self {
            bor,
            alpha,
            sigma2_vb,
            sigma2_ve,
            sigma2_an,
            bessel_terms,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn from_params(params: &SystemParams) -> Result<Self, AnalyticError> {
        Self::new(
            params.bor as u32,
            params.alpha,
            params.sigma2_vb,
            params.sigma2_ve,
            params.sigma2_an,
            params.bessel_terms as u32,
        )
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn validate(&self) -> Result<(), AnalyticError> {
        let bad = |what: String| Err(AnalyticError::InvalidInput(what));
        if self.bor < 2 {
            return bad(format!("bor = {} must be >= 2", self.bor));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha = {} not in [0, 1]", self.alpha));
        }
        for (name, v) in [
            ("sigma2_vb", self.sigma2_vb),
            ("sigma2_ve", self.sigma2_ve),
            ("sigma2_an", self.sigma2_an),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} = {v} must be finite and > 0"));
            }
        }
        if self.bessel_terms == 0 {
            return bad("bessel_terms must be >= 1".into());
        }
        Ok(())
    }

    fn a(&self) -> Result<f64, AnalyticError> {
        self.validate()?;
        const_a(self.bor, self.bessel_terms)
    }
}

/// One point of the analytic secrecy-rate curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrCurvePoint {
    pub alpha: f64,
    /// `None` when the bound's log argument is not positive.
    pub sr_bound: Option<f64>,
    pub sinr_bob_bound: f64,
    pub sinr_eve_bound: f64,
}

/// `alpha (U + 1) / (U sigma2_vb)`.
pub fn sinr_bob_bound(inputs: &BoundInputs) -> Result<f64, AnalyticError> {
    inputs.validate()?;
    let u = f64::from(inputs.bor);
    Ok(inputs.alpha * (u + 1.0) / (u * inputs.sigma2_vb))
}

fn eve_bound_with(inputs: &BoundInputs, a: f64) -> f64 {
    4.0 * inputs.alpha * a / (inputs.sigma2_ve + (1.0 - inputs.alpha) * inputs.sigma2_an)
}

/// `4 alpha A / (sigma2_ve + (1 - alpha) sigma2_an)`.
pub fn sinr_eve_bound(inputs: &BoundInputs) -> Result<f64, AnalyticError> {
    Ok(eve_bound_with(inputs, inputs.a()?))
}

/// Grouped coefficients of the secrecy-rate bound
/// `log2((-alpha^2 T1 + alpha T2 + T3) / (alpha T4 + T3))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrTerms {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
}

impl SrTerms {
    pub fn new(inputs: &BoundInputs) -> Result<Self, AnalyticError> {
        let a = inputs.a()?;
        Ok(Self::with_a(inputs, a))
    }

    fn with_a(inputs: &BoundInputs, a: f64) -> Self {
        let u = f64::from(inputs.bor);
        let (vb, ve, an) = (inputs.sigma2_vb, inputs.sigma2_ve, inputs.sigma2_an);
        Self {
            t1: an * (u + 1.0),
            t2: ve * (u + 1.0) - u * vb * an + an * (u + 1.0),
            t3: u * vb * (ve + an),
            // U sigma2_vb (4A - sigma2_an); the factor U multiplies both terms.
            t4: u * vb * (4.0 * a - an),
        }
    }

    /// Bound in bits/s/Hz at `alpha`.
    ///
    /// The ratio is evaluated as `1 + (numerator - denominator) / denominator`
    /// with the difference `alpha (T2 - T4 - alpha T1)` formed exactly, so
    /// small rates keep full relative precision.
    pub fn secrecy_rate(&self, alpha: f64) -> Result<f64, AnalyticError> {
        let den = alpha * self.t4 + self.t3;
        let diff = alpha * (self.t2 - self.t4 - alpha * self.t1);
        let ratio_minus_one = diff / den;
        // Written so that NaN inputs also fail.
        let valid = den > 0.0 && ratio_minus_one > -1.0;
        if !valid {
            return Err(AnalyticError::NonPositiveArgument((den + diff) / den));
        }
        Ok(ratio_minus_one.ln_1p() / LN_2)
    }

    /// Real roots of `dC/dalpha = 0`, i.e. of
    /// `T1 T4 a^2 + 2 T1 T3 a - T3 (T2 - T4) = 0`, or `None` when the
    /// discriminant is negative. Uses the cancellation-free form of the
    /// quadratic formula since `T4` is close to zero when `sigma2_an = 1/U`.
    pub fn stationary_points(&self) -> Option<Vec<f64>> {
        let a = self.t1 * self.t4;
        let b = 2.0 * self.t1 * self.t3;
        let c = -self.t3 * (self.t2 - self.t4);
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        if b == 0.0 && a == 0.0 {
            return Some(Vec::new());
        }
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let roots = [q / a, c / q];
        Some(roots.into_iter().filter(|r| r.is_finite()).collect())
    }
}

/// Closed-form secrecy-rate bound in bits/s/Hz.
pub fn secrecy_rate_bound(inputs: &BoundInputs) -> Result<f64, AnalyticError> {
    SrTerms::new(inputs)?.secrecy_rate(inputs.alpha)
}

/// Bounds at each `alpha` in `alphas`, other inputs held fixed.
pub fn sr_curve(inputs: &BoundInputs, alphas: &[f64]) -> Result<Vec<SrCurvePoint>, AnalyticError> {
    let a = inputs.a()?;
    let terms = SrTerms::with_a(inputs, a);
    alphas
        .iter()
        .map(|&alpha| {
            let at = inputs.with_alpha(alpha);
            at.validate()?;
            Ok(SrCurvePoint {
                alpha,
                sr_bound: terms.secrecy_rate(alpha).ok(),
                sinr_bob_bound: sinr_bob_bound(&at)?,
                sinr_eve_bound: eve_bound_with(&at, a),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaOptMethod {
    /// An interior stationary point of the bound.
    StationaryPoint,
    /// An endpoint of `[0, 1]` beat every stationary point.
    Boundary,
    /// Negative discriminant; golden-section search on the bound.
    GoldenSection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaOpt {
    pub alpha: f64,
    pub sr_bound: f64,
    pub method: AlphaOptMethod,
}

fn score(terms: &SrTerms, alpha: f64) -> f64 {
    terms.secrecy_rate(alpha).unwrap_or(f64::NEG_INFINITY)
}

fn golden_section(terms: &SrTerms) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (score(terms, x1), score(terms, x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = score(terms, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = score(terms, x1);
        }
    }
    0.5 * (lo + hi)
}

/// Power split maximizing the closed-form secrecy-rate bound.
///
/// Candidates are the stationary points inside `[0, 1]` together with both
/// endpoints; the one with the largest bound wins (ties go to the earlier
/// candidate, stationary points first). A negative discriminant falls back
/// to golden-section search over `[0, 1]`, compared against the endpoints.
pub fn alpha_opt_detailed(inputs: &BoundInputs) -> Result<AlphaOpt, AnalyticError> {
    let terms = SrTerms::new(inputs)?;
    let (mut candidates, interior_method) = match terms.stationary_points() {
        Some(roots) => (
            roots
                .into_iter()
                .filter(|r| (0.0..=1.0).contains(r))
                .collect::<Vec<_>>(),
            AlphaOptMethod::StationaryPoint,
        ),
        None => (vec![golden_section(&terms)], AlphaOptMethod::GoldenSection),
    };
    let n_interior = candidates.len();
    candidates.extend([0.0, 1.0]);
    let mut best = AlphaOpt {
        alpha: candidates[0],
        sr_bound: score(&terms, candidates[0]),
        method: if n_interior > 0 {
            interior_method
        } else {
            AlphaOptMethod::Boundary
        },
    };
    for (i, &alpha) in candidates.iter().enumerate().skip(1) {
        let sr = score(&terms, alpha);
        if sr > best.sr_bound {
            best = AlphaOpt {
                alpha,
                sr_bound: sr,
                method: if i < n_interior {
                    interior_method
                } else {
                    AlphaOptMethod::Boundary
                },
            };
        }
    }
    Ok(best)
}

/// Optimal `alpha` in `[0, 1]`; see [`alpha_opt_detailed`].
pub fn alpha_opt(inputs: &BoundInputs) -> Result<f64, AnalyticError> {
    alpha_opt_detailed(inputs).map(|o| o.alpha)
}
