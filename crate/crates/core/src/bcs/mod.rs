//! Trial BCS states built from a centre-of-mass field and the pair ground
//! state, and their energy evaluated term by term.
//!
//! The off-diagonal kernel of the trial state is
//! `α_ψ(x, y) = h⁻² ψ((x+y)/2) α₀((x−y)/h)`; its one-body density is
//! `γ = αᾱ + (1+λh)(αᾱ)²` with the smallest `λ` keeping `0 ≤ Γ ≤ 1`. The
//! energy splits into a part quadratic in `α`, reduced to radial quadrature
//! in centre-of-mass coordinates, and quartic traces over four particles,
//! estimated by Monte Carlo.

mod decompose;
mod kernel;
mod profile;
mod quadratic;
mod quartic;
mod singular;
mod trial;

#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

pub use decompose::{decompose_alpha, Decomposition, DecompositionIdentities};
pub use kernel::{build_pair_kernel, separable_norm_sq, PairKernel, Remainder};
pub use profile::PairProfile;
pub use quadratic::{harmonic_trap_term, quadratic_energy, QuadraticEnergy, QuadratureConfig};
pub use quartic::{quartic_trace_mc, McConfig, McEstimate, QuarticTraces, MIN_SAMPLES, VARIANCE_WARNING};
pub use singular::{
    power_iteration, schatten_norms, top_singular_value, RankOneKernel, SchattenNorm, SchattenReport, SectorConfig,
    SectorGrid, SectorKernel, SectorSamples, TopSingular,
};
pub use trial::{
    admissibility_polynomial, admissible_lambda, make_trial_state, trial_state_from, TrialState, TrialSummary,
    DEFAULT_MARGIN, LAMBDA_CAP,
};

use crate::gp;
use crate::model::PhysicsModel;
use crate::{Error, Exec, Result};

/// The BCS energy of a trial state and its reference quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub h: f64,
    pub d: f64,
    pub lambda: f64,
    pub s1: f64,
    pub quad_kinetic_com: f64,
    pub quad_relative_residual: f64,
    pub quad_w: f64,
    pub quad_d: f64,
    pub quadratic: f64,
    /// `tr 𝔥 (αᾱ)²`.
    pub quartic: McEstimate,
    /// `tr (−h²Δ + E₀)(αᾱ)²`.
    pub quartic_shifted: McEstimate,
    /// `tr h²W (αᾱ)²`.
    pub quartic_trap: McEstimate,
    /// `tr (αᾱ)²`.
    pub quartic_plain: McEstimate,
    /// `quadratic + (1+λh) · quartic`.
    pub total_bcs: McEstimate,
    /// `h · E^GP_D(ψ)`.
    pub gp_reference: f64,
    /// `h ⟨ψ, (−¼Δ + W − D) ψ⟩`.
    pub gp_quadratic: f64,
    /// `‖W|ψ|²‖₁ + ‖ψ‖₂²`, the scale of the quadratic error.
    pub a0: f64,
    /// `(tr (−h²Δ+E₀)(αᾱ)² − h g_BCS ‖ψ‖₄⁴) / h²`.
    pub quartic_residual: McEstimate,
    /// `tr 𝔥γ − tr 𝔥αᾱ − tr 𝔥(αᾱ)² = λh · tr 𝔥(αᾱ)²`.
    pub reduction_slack: McEstimate,
    pub g_bcs: f64,
    pub warnings: Vec<String>,
}

/// Energy of an admissible trial state in the model.
pub fn trial_bcs_energy(
    trial: &TrialState,
    model: &PhysicsModel,
    quad: &QuadratureConfig,
    mc: &McConfig,
    exec: Exec,
) -> Result<EnergyBreakdown> {
    if !trial.admissible {
        return Err(Error::Inadmissible {
            s1_sq: trial.top_singular.value.powi(2),
            h: trial.kernel.h,
        });
    }
    let kernel = &trial.kernel;
    let h = kernel.h;
    if (model.h - h).abs() > 1e-12 * h {
        return Err(Error::Config(format!("model h = {} differs from kernel h = {h}", model.h)));
    }
    let q = quadratic_energy(kernel, model, quad, exec)?;
    let traces = quartic_trace_mc(kernel, model, mc, exec)?;
    let weight = trial.quartic_weight();
    let g = kernel.profile.g_bcs;
    let psi = &kernel.psi;
    let w = model.trap.sample(psi.grid());
    let gp_reference = h * gp::gp_energy(psi, &w, model.d, g)?;
    let parts = gp::parts(psi, &w)?;
    let n4 = psi.lp_norm_pow(4.0);
    let mut warnings = q.warnings.clone();
    warnings.extend(traces.warnings.iter().cloned());
    warnings.extend(trial.top_singular.warnings.iter().cloned());
    Ok(EnergyBreakdown {
        h,
        d: model.d,
        lambda: trial.lambda,
        s1: trial.top_singular.value,
        quad_kinetic_com: q.kinetic_com,
        quad_relative_residual: q.relative_residual,
        quad_w: q.w_term,
        quad_d: q.d_term,
        quadratic: q.total,
        quartic: traces.hbar,
        quartic_shifted: traces.shifted,
        quartic_trap: traces.trap,
        quartic_plain: traces.plain,
        total_bcs: traces.hbar.affine(weight, q.total),
        gp_reference,
        gp_quadratic: q.gp_quadratic,
        a0: parts.potential + parts.mass,
        quartic_residual: traces.shifted.affine(1.0 / (h * h), -g * n4 / h),
        reduction_slack: traces.hbar.affine(trial.lambda * h, 0.0),
        g_bcs: g,
        warnings,
    })
}
