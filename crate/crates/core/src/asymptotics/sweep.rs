use serde::{Deserialize, Serialize};

use super::{evaluate_trial, fit_power_law, ModelFamily, PowerLawFit, StudyConfig};
use crate::bcs::{EnergyBreakdown, McEstimate, TrialSummary};
use crate::model::check_h;
use crate::numerics::RadialFunction;
use crate::{Error, Exec, Result};

pub const DEFAULT_H_LIST: [f64; 5] = [0.5, 0.4, 0.3, 0.2, 0.15];

/// Centre-of-mass field of the trial states.
#[derive(Debug, Clone)]
pub enum PsiSource {
    /// The GP minimizer `ψ*` at the sweep offset.
    GpMinimizer,
    /// A given field on the trap grid.
    Fixed(RadialFunction),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub h: f64,
    pub trial: TrialSummary,
    pub energy: EnergyBreakdown,
    /// `E^BCS/h − E^GP_D`.
    pub residual: McEstimate,
    /// `(E^GP_D − E^BCS/h)/h`; the lower bound holds with any `C` above it.
    pub lower_constant: f64,
}

/// An `h` removed from the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedPoint {
    pub h: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub d: f64,
    pub e_w: f64,
    pub g_bcs: f64,
    /// `E^GP_D(ψ)`.
    pub e_gp: f64,
    /// `‖ψ‖₂²`.
    pub psi_mass: f64,
    pub psi_source: String,
    /// Admissible `h`, strictly decreasing.
    pub h_values: Vec<f64>,
    pub entries: Vec<SweepEntry>,
    pub dropped: Vec<DroppedPoint>,
    /// Fit of `|E^BCS/h − E^GP_D|` against `h`.
    pub fit: Option<PowerLawFit>,
    pub fit_error: Option<String>,
    /// Whether `|residual|` decreases strictly with `h`.
    pub monotone: bool,
    /// Largest `lower_constant` over the sweep.
    pub lower_bound_constant: f64,
    pub warnings: Vec<String>,
}

impl SweepRecord {
    /// The fit, or the reason it was refused.
    pub fn require_fit(&self) -> Result<&PowerLawFit> {
        self.fit
            .as_ref()
            .ok_or_else(|| Error::DegenerateFit(self.fit_error.clone().unwrap_or_default()))
    }

    pub fn residuals(&self) -> Vec<(f64, McEstimate)> {
        self.entries.iter().map(|e| (e.h, e.residual)).collect()
    }
}

/// Evaluates the trial energy of one field at every `h` and compares it with
/// `h·E^GP_D`.
///
/// `h` values are processed in decreasing order; those where no admissible
/// `λ` exists are dropped and recorded. The power-law fit is attempted on the
/// remaining points; a refused fit leaves `fit` empty and the rest of the
/// record intact. Point `i` of the sorted list uses seed `seed ⊕ i`.
pub fn h_sweep(
    family: &ModelFamily,
    d: f64,
    source: &PsiSource,
    h_list: &[f64],
    config: &StudyConfig,
    exec: Exec,
) -> Result<SweepRecord> {
    let mut hs = h_list.to_vec();
    for &h in &hs {
        check_h(h)?;
    }
    hs.sort_by(|a, b| b.total_cmp(a));
    if hs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("h list contains duplicates".into()));
    }
    let mut warnings = Vec::new();
    let (psi, psi_source) = match source {
        PsiSource::GpMinimizer => {
            let gp = family.minimize(d, &config.minimizer)?;
            if !gp.converged {
                warnings.push(format!(
                    "GP minimizer stopped with gradient {:.2e} after {} iterations",
                    gp.grad_residual, gp.iterations
                ));
            }
            (gp.psi_star, "gp-minimizer")
        }
        PsiSource::Fixed(psi) => {
            if !psi.grid().same_as(&family.trap_problem.grid) {
                return Err(Error::Config("a fixed ψ must live on the trap grid".into()));
            }
            (psi.clone(), "fixed")
        }
    };
    let e_gp = family.gp_energy(&psi, d)?;
    let results = exec.map_slice(&hs.iter().copied().enumerate().collect::<Vec<_>>(), |&(i, h)| {
        evaluate_trial(family, &psi, h, d, &config.for_index(i), exec)
    });
    let mut entries = Vec::new();
    let mut dropped = Vec::new();
    for (h, r) in hs.iter().copied().zip(results) {
        match r {
            Ok((state, energy)) => {
                let residual = energy.total_bcs.affine(1.0 / h, -e_gp);
                let lower_constant = -residual.mean / h;
                warnings.extend(energy.warnings.iter().map(|w| format!("h = {h}: {w}")));
                entries.push(SweepEntry {
                    h,
                    trial: state.summary(),
                    energy,
                    residual,
                    lower_constant,
                });
            }
            Err(e @ Error::Inadmissible { .. }) => {
                log::warn!("dropping h = {h}: {e}");
                dropped.push(DroppedPoint { h, reason: e.to_string() });
            }
            Err(e) => return Err(e),
        }
    }
    let residuals: Vec<(f64, McEstimate)> = entries.iter().map(|e| (e.h, e.residual)).collect();
    let (fit, fit_error) = match fit_power_law(&residuals) {
        Ok(f) => (Some(f), None),
        Err(e) => {
            log::warn!("sweep fit refused: {e}");
            let reason = match e {
                Error::DegenerateFit(m) => m,
                other => other.to_string(),
            };
            (None, Some(reason))
        }
    };
    let monotone = residuals.windows(2).all(|w| w[1].1.mean.abs() < w[0].1.mean.abs());
    let lower_bound_constant = entries.iter().map(|e| e.lower_constant).fold(f64::NEG_INFINITY, f64::max);
    Ok(SweepRecord {
        d,
        e_w: family.e_w(),
        g_bcs: family.g_bcs(),
        e_gp,
        psi_mass: psi.norm_sq(),
        psi_source: psi_source.into(),
        h_values: entries.iter().map(|e| e.h).collect(),
        entries,
        dropped,
        fit,
        fit_error,
        monotone,
        lower_bound_constant,
        warnings,
    })
}
