//! Closed-form references: the spherical square well, the isotropic
//! harmonic oscillator and all-Gaussian trial configurations.
//!
//! Nothing in the solvers depends on this module; it exists so that every
//! numerical pathway can be compared with an answer obtained by different
//! means. Each formula is cross-checked against direct quadrature in the
//! module tests.

mod gaussian;
mod table;

#[cfg(test)]
mod tests;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use gaussian::{gaussian_calculus_oracle, GaussianCase, GaussianPiece};
pub use table::{oracle_table, reference_gaussian, OracleCase, OracleTable, ORACLE_TABLE_VERSION};

/// Binding energy `E₀` of `−Δ − V₀·1{r < R}`, or `None` below the threshold
/// `V₀R² = π²/4`.
///
/// The ground state satisfies `k cot(kR) = −κ` with `k² = V₀ − E₀` and
/// `κ² = E₀`, and has `kR ∈ (π/2, π)`; the root is bisected to `1e-12`.
pub fn square_well_oracle(v0: f64, radius: f64) -> Option<f64> {
    if !(v0 > 0.0 && radius > 0.0) || v0 * radius * radius <= PI * PI / 4.0 {
        return None;
    }
    let f = |k: f64| k / (k * radius).tan() + (v0 - k * k).max(0.0).sqrt();
    let mut lo = PI / (2.0 * radius);
    let mut hi = (PI / radius).min(v0.sqrt());
    // Stay off the pole of cot at kR = π.
    if hi * radius >= PI {
        hi = (PI - 1e-15) / radius;
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    Some(v0 - k * k)
}

/// Ground state of `−aΔ + b|x|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicOracle {
    /// `3√(ab)`.
    pub energy: f64,
    /// `γ = ½√(b/a)` of the ground state `e^{−γr²}`.
    pub gamma: f64,
}

pub fn harmonic_oracle(a: f64, b: f64) -> HarmonicOracle {
    HarmonicOracle {
        energy: 3.0 * (a * b).sqrt(),
        gamma: 0.5 * (b / a).sqrt(),
    }
}

/// `g_BCS = (2π)³ ∫ (p² + E₀) α̂₀⁴` for the normalized `α̂₀ ∝ e^{−γp²}`.
pub fn gaussian_g_bcs(gamma: f64, e0: f64) -> f64 {
    (2.0 * PI).powi(3) * (gamma / PI).powf(1.5) * (e0 + 3.0 / (8.0 * gamma))
}
