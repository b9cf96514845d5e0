use serde::{Deserialize, Serialize};

use super::kernel::separable_norm_sq;
use super::PairKernel;
use crate::numerics::RadialFunction;
use crate::Result;

/// `α = α_ψ + r` with `ψ(η) = h⁻¹ ⟨α₀(·/h), α̃(η, ·)⟩` and the identities the
/// split must satisfy.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub psi: RadialFunction,
    /// Separable terms `(a_k(η), b_k(ζ))` of `r̃ = Σ a_k(η) b_k(ξ/h)`.
    pub remainder: Vec<(RadialFunction, RadialFunction)>,
    pub identities: DecompositionIdentities,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionIdentities {
    /// `h² ⟨α₀, ρ⟩`: the recovered field is `ψ‖α₀‖² + h²⟨α₀, ρ⟩ χ`.
    pub scaling: f64,
    /// `sup_η |⟨α₀(·/h), r(η, ·)⟩|` of the input remainder.
    pub input_defect: f64,
    /// `sup_η |⟨α₀(·/h), r̃(η, ·)⟩|` after the split.
    pub orthogonality_defect: f64,
    /// `max |ψ_recovered − ψ|`.
    pub psi_deviation: f64,
    pub alpha_norm_sq: f64,
    /// `h⁻¹ ‖ψ_recovered‖² ‖α₀‖²`.
    pub psi_norm_sq: f64,
    pub remainder_norm_sq: f64,
    /// `|‖α‖² − h⁻¹‖ψ‖²‖α₀‖² − ‖r̃‖²| / ‖α‖²`.
    pub pythagoras_residual: f64,
}

/// Projects the pair kernel onto `α₀` in the relative coordinate.
///
/// A remainder that is not orthogonal to `α₀` is not rejected: its
/// projection is absorbed into the recovered field and the defect reported.
pub fn decompose_alpha(kernel: &PairKernel) -> Result<Decomposition> {
    let h = kernel.h;
    let h3 = h.powi(3);
    let a0 = &kernel.profile.alpha0;
    let n0 = a0.norm_sq();
    let (psi, remainder, scaling, input_defect) = match &kernel.remainder {
        None => {
            let psi = kernel.psi.scaled(n0);
            let rest = vec![(kernel.psi.scaled((1.0 - n0) / (h * h)), a0.clone())];
            (psi, rest, 0.0, 0.0)
        }
        Some(r) => {
            let c = a0.inner(&r.rho)?;
            let scaling = h * h * c;
            let psi = kernel.psi.scaled(n0).add(&r.chi.scaled(scaling))?;
            let rho_perp = r.rho.add(&a0.scaled(-c))?;
            let rest = vec![
                (r.chi.clone(), rho_perp),
                (kernel.psi.scaled((1.0 - n0) / (h * h)), a0.clone()),
            ];
            (psi, rest, scaling, h3 * c.abs() * r.chi.max_abs())
        }
    };
    let proj: Vec<f64> = remainder
        .iter()
        .map(|(_, b)| a0.inner(b).map(|v| h3 * v))
        .collect::<Result<_>>()?;
    let n = kernel.psi.values().len();
    let orthogonality_defect = (0..n)
        .map(|i| {
            remainder
                .iter()
                .zip(&proj)
                .map(|((a, _), p)| a.values()[i] * p)
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max);
    let psi_deviation = psi
        .values()
        .iter()
        .zip(kernel.psi.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let alpha_norm_sq = kernel.hs_norm_sq()?;
    let psi_norm_sq = psi.norm_sq() * n0 / h;
    let remainder_norm_sq = separable_norm_sq(&remainder, h)?;
    let pythagoras_residual = if alpha_norm_sq > 0.0 {
        (alpha_norm_sq - psi_norm_sq - remainder_norm_sq).abs() / alpha_norm_sq
    } else {
        0.0
    };
    Ok(Decomposition {
        psi,
        remainder,
        identities: DecompositionIdentities {
            scaling,
            input_defect,
            orthogonality_defect,
            psi_deviation,
            alpha_norm_sq,
            psi_norm_sq,
            remainder_norm_sq,
            pythagoras_residual,
        },
    })
}
