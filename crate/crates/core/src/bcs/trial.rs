use serde::{Deserialize, Serialize};

use super::singular::{top_singular_value, SectorConfig, TopSingular};
use super::PairKernel;
use crate::{Error, Exec, Result};

/// Default admissibility margin `δ`.
pub const DEFAULT_MARGIN: f64 = 1e-9;

/// Largest `λ` accepted before the state is declared inadmissible.
pub const LAMBDA_CAP: f64 = 1e6;

/// `p(s²) = λh − (1+λh)² s⁴ − 2(1+λh) s²`; the trial state with parameter
/// `λ` is admissible iff `p ≥ 0` on `[0, s₁²]`.
pub fn admissibility_polynomial(lambda: f64, h: f64, s_sq: f64) -> f64 {
    let t = 1.0 + lambda * h;
    lambda * h - t * t * s_sq * s_sq - 2.0 * t * s_sq
}

/// Smallest `λ ≥ 0` with `p(s₁²) ≥ δ`.
///
/// With `x = λh` and `σ = s₁²`, `p = −σ²x² + (1 − 2σ² − 2σ)x − σ² − 2σ` is a
/// concave quadratic in `x`; the answer is its smaller root shifted by `δ`,
/// which exists iff the discriminant is nonnegative and the vertex lies at
/// `x > 0`.
pub fn admissible_lambda(s1: f64, h: f64, margin: f64) -> Result<f64> {
    let sigma = s1 * s1;
    if sigma == 0.0 {
        return if margin <= 0.0 {
            Ok(0.0)
        } else {
            Ok(margin / h)
        };
    }
    let b = 1.0 - 2.0 * sigma * sigma - 2.0 * sigma;
    let c = sigma * sigma + 2.0 * sigma + margin;
    let disc = b * b - 4.0 * sigma * sigma * c;
    if b <= 0.0 || disc < 0.0 {
        return Err(Error::Inadmissible { s1_sq: sigma, h });
    }
    // Smaller root written without cancellation.
    let x = 2.0 * c / (b + disc.sqrt());
    let lambda = x / h;
    if lambda > LAMBDA_CAP {
        return Err(Error::Inadmissible { s1_sq: sigma, h });
    }
    Ok(lambda)
}

/// `Γ_ψ` with `γ = αᾱ + (1+λh)(αᾱ)²`.
#[derive(Debug, Clone)]
pub struct TrialState {
    pub kernel: PairKernel,
    pub lambda: f64,
    pub top_singular: TopSingular,
    pub margin: f64,
    pub admissible: bool,
}

/// Serializable summary of a trial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub h: f64,
    pub lambda: f64,
    pub s1: f64,
    pub s1_residual: f64,
    pub s1_converged: bool,
    pub margin: f64,
    pub polynomial_at_s1: f64,
    pub admissible: bool,
}

impl TrialState {
    /// `p(s₁²)` at the chosen `λ`.
    pub fn polynomial_at_top(&self) -> f64 {
        admissibility_polynomial(self.lambda, self.kernel.h, self.top_singular.value.powi(2))
    }

    /// Prefactor `1 + λh` of the quartic part of `γ`.
    pub fn quartic_weight(&self) -> f64 {
        1.0 + self.lambda * self.kernel.h
    }

    pub fn summary(&self) -> TrialSummary {
        TrialSummary {
            h: self.kernel.h,
            lambda: self.lambda,
            s1: self.top_singular.value,
            s1_residual: self.top_singular.residual,
            s1_converged: self.top_singular.converged,
            margin: self.margin,
            polynomial_at_s1: self.polynomial_at_top(),
            admissible: self.admissible,
        }
    }
}

/// Admissible trial state for the kernel with the smallest `λ` at margin `δ`.
pub fn make_trial_state(kernel: PairKernel, margin: f64, config: &SectorConfig, exec: Exec) -> Result<TrialState> {
    let top = top_singular_value(&kernel, config, exec)?;
    trial_state_from(kernel, top, margin)
}

/// As [`make_trial_state`] with a precomputed `s₁`.
pub fn trial_state_from(kernel: PairKernel, top: TopSingular, margin: f64) -> Result<TrialState> {
    if !(margin >= 0.0) {
        return Err(Error::Config(format!("admissibility margin must be nonnegative, got {margin}")));
    }
    let lambda = if kernel.is_zero() {
        0.0
    } else {
        admissible_lambda(top.value, kernel.h, margin)?
    };
    Ok(TrialState {
        kernel,
        lambda,
        top_singular: top,
        margin,
        admissible: true,
    })
}
