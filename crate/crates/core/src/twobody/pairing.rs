use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::TwoBodySolution;
use crate::numerics::RadialFunction;

/// Relative truncation-error level above which a momentum-tail warning is set.
pub const TAIL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingCoefficients {
    pub g_bcs: f64,
    pub e0: f64,
    /// Estimated relative truncation error of the momentum integral.
    pub tail_estimate: f64,
    pub tail_warning: bool,
}

/// `g_BCS` of a solved two-body problem.
pub fn compute_g_bcs(sol: &TwoBodySolution) -> PairingCoefficients {
    g_bcs_from_transform(&sol.alpha0_hat, sol.e0)
}

/// `g_BCS = (2π)³ · 4π ∫₀^{p_max} p² (p² + E₀) |α̂₀(p)|⁴ dp`.
pub fn g_bcs_from_transform(alpha_hat: &RadialFunction, e0: f64) -> PairingCoefficients {
    let grid = alpha_hat.grid();
    let integral = 4.0
        * PI
        * grid
            .nodes()
            .iter()
            .zip(grid.weights())
            .zip(alpha_hat.values())
            .map(|((p, w), a)| w * (p * p + e0) * a.powi(4))
            .sum::<f64>();
    let g_bcs = (2.0 * PI).powi(3) * integral;
    let p_max = alpha_hat.grid().r_max();
    let last = alpha_hat.values().last().copied().unwrap_or(0.0);
    let tail = (2.0 * PI).powi(3) * 4.0 * PI * p_max.powi(3) * (p_max * p_max + e0) * last.powi(4);
    let tail_estimate = if g_bcs != 0.0 { (tail / g_bcs).abs() } else { 0.0 };
    let tail_warning = tail_estimate > TAIL_TOLERANCE;
    if tail_warning {
        log::warn!("g_BCS momentum tail estimate {tail_estimate:.2e} exceeds {TAIL_TOLERANCE:.0e}");
    }
    PairingCoefficients {
        g_bcs,
        e0,
        tail_estimate,
        tail_warning,
    }
}
