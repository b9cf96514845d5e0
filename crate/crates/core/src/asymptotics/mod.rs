//! Semiclassical studies: h-sweeps of the trial energy against `h·E^GP_D`
//! and the trial-family critical offset `D_c(h)`.
//!
//! Every study runs on a [`ModelFamily`], which holds the pair profile and
//! the trap problem shared by all `h` and `D`. Independent points (per `h`,
//! per `D`) run through [`Exec`]; results are merged in input order and each
//! point draws its Monte Carlo stream from a seed derived from its index, so
//! the outcome does not depend on the execution policy.

mod critical;
mod fit;
mod sweep;


use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bcs::{
    build_pair_kernel, make_trial_state, trial_bcs_energy, EnergyBreakdown, McConfig, PairProfile, QuadratureConfig,
    SectorConfig, TrialState, DEFAULT_MARGIN,
};
use crate::gp::{self, minimize_gp_unconstrained, GpGrid, GpResult, MinimizerConfig, TrapProblem};
use crate::model::{Interaction, PhysicsModel, Trap};
use crate::numerics::RadialFunction;
use crate::twobody::{TwoBodyConfig, TwoBodySolution};
use crate::{Exec, Result};

pub use critical::{estimate_mu_c, widen_bracket, CriticalConfig, CriticalPoint, DSample};
pub use fit::{fit_power_law, PowerLawFit, MIN_FIT_POINTS, SIGNIFICANCE};
pub use sweep::{h_sweep, DroppedPoint, PsiSource, SweepEntry, SweepRecord, DEFAULT_H_LIST};

/// Interaction, trap and the `h`-independent objects derived from them.
#[derive(Debug, Clone)]
pub struct ModelFamily {
    pub interaction: Interaction,
    pub trap: Trap,
    pub profile: Arc<PairProfile>,
    pub trap_problem: TrapProblem,
}

impl ModelFamily {
    /// Solves the two-body problem and the trap ground state.
    pub fn new(interaction: Interaction, trap: Trap, twobody: &TwoBodyConfig, grid: &GpGrid) -> Result<Self> {
        let sol = TwoBodySolution::solve(&interaction, twobody)?;
        let profile = Arc::new(PairProfile::from_solution(&sol)?);
        Self::with_profile(interaction, trap, profile, grid)
    }

    /// Family with a precomputed pair profile.
    pub fn with_profile(interaction: Interaction, trap: Trap, profile: Arc<PairProfile>, grid: &GpGrid) -> Result<Self> {
        interaction.validate()?;
        let trap_problem = gp::solve_trap_ground(&trap, &grid.build()?)?;
        Ok(Self {
            interaction,
            trap,
            profile,
            trap_problem,
        })
    }

    pub fn e_w(&self) -> f64 {
        self.trap_problem.e_w
    }

    pub fn e0(&self) -> f64 {
        self.profile.e0
    }

    pub fn g_bcs(&self) -> f64 {
        self.profile.g_bcs
    }

    pub fn model(&self, h: f64, d: f64) -> Result<PhysicsModel> {
        PhysicsModel::new(self.interaction.clone(), self.trap.clone(), h, d)
    }

    /// GP minimizer `ψ*` at offset `D`.
    pub fn minimize(&self, d: f64, config: &MinimizerConfig) -> Result<GpResult> {
        minimize_gp_unconstrained(&self.trap_problem, d, self.g_bcs(), None, config)
    }

    /// `E^GP_D(ψ)` of an arbitrary field on the trap grid.
    pub fn gp_energy(&self, psi: &RadialFunction, d: f64) -> Result<f64> {
        gp::gp_energy(psi, &self.trap_problem.w, d, self.g_bcs())
    }
}

/// Numerical controls shared by the sweep and the critical-offset search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub sectors: SectorConfig,
    pub quadrature: QuadratureConfig,
    pub mc: McConfig,
    pub minimizer: MinimizerConfig,
    /// Admissibility margin `δ`.
    pub margin: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            sectors: SectorConfig::default(),
            quadrature: QuadratureConfig::default(),
            mc: McConfig::default(),
            minimizer: MinimizerConfig::default(),
            margin: DEFAULT_MARGIN,
        }
    }
}

impl StudyConfig {
    /// Copy whose Monte Carlo seed is `seed ⊕ index`.
    pub fn for_index(&self, index: usize) -> Self {
        let mut c = *self;
        c.mc.seed ^= index as u64;
        c
    }
}

/// Trial state of `ψ` at scale `h` and its energy at offset `d`.
pub fn evaluate_trial(
    family: &ModelFamily,
    psi: &RadialFunction,
    h: f64,
    d: f64,
    config: &StudyConfig,
    exec: Exec,
) -> Result<(TrialState, EnergyBreakdown)> {
    let kernel = build_pair_kernel(psi, &family.profile, h)?;
    let state = make_trial_state(kernel, config.margin, &config.sectors, exec)?;
    let model = family.model(h, d)?;
    let energy = trial_bcs_energy(&state, &model, &config.quadrature, &config.mc, exec)?;
    Ok((state, energy))
}
