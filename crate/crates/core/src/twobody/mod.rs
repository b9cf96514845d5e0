//! The microscopic two-body problem: ground state `α₀` of `−Δ + V` at energy
//! `−E₀`, its spectral gap, decay rate and moments, and the pairing
//! coefficient `g_BCS = (2π)³ ∫ (p² + E₀) |α̂₀(p)|⁴ dp`.

mod gap;
mod pairing;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::model::Interaction;
use crate::numerics::{
    find_root_scalar, radial_eigensolve, radial_fourier, tol, RadialFunction, RadialGrid,
    TAIL_THRESHOLD,
};
use crate::{Error, Result};

pub use gap::{compute_spectral_gap, GapReport};
pub use pairing::{compute_g_bcs, g_bcs_from_transform, PairingCoefficients};

/// Minimum number of grid nodes per interaction length.
pub const MIN_NODES_PER_WIDTH: f64 = 32.0;

/// Discretization and gap parameters of the two-body solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoBodyConfig {
    /// Nodes per interaction length scale (smooth potentials).
    pub nodes_per_width: f64,
    /// Nodes per interaction length scale for the discontinuous spherical well.
    pub nodes_per_width_sharp: f64,
    /// Fixed outer radius; `None` selects `max(8, 24/b)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    /// Gap parameter `ε ∈ (0, 1)`.
    pub eps: f64,
    /// Highest angular-momentum sector in the gap scan.
    pub l_max: u32,
}

impl Default for TwoBodyConfig {
    fn default() -> Self {
        Self {
            nodes_per_width: 250.0,
            nodes_per_width_sharp: 800.0,
            r_max: None,
            eps: 0.5,
            l_max: 4,
        }
    }
}

/// Ground state of `−Δ + V` in the `ℓ = 0` sector.
#[derive(Debug, Clone)]
pub struct GroundState {
    /// Binding energy (Richardson-extrapolated when available).
    pub e0: f64,
    /// Binding energy of the discrete operator, consistent with `alpha0`.
    pub e0_discrete: f64,
    pub alpha0: RadialFunction,
    /// `‖(−Δ + V + E₀)α₀‖ / ‖α₀‖` in the discrete norm.
    pub residual: f64,
    /// Bottom of the `ℓ = 1` sector (must lie above `−E₀`).
    pub p_wave_bottom: f64,
}

/// Moment table of `α₀` consumed by the semiclassical estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    /// `‖|·|^{1/2} α₀‖₂`.
    pub half: f64,
    /// `‖|·| α₀‖₂`.
    pub first: f64,
    /// `‖|·|^{β/2} α₀‖₂`.
    pub beta_half: f64,
    pub beta: f64,
    /// `‖α₀‖₁`.
    pub l1: f64,
    /// `‖V α₀‖₁`.
    pub v_l1: f64,
    /// `‖α̂₀‖_p` for `p = 2, 4, 6`.
    pub hat_l2: f64,
    pub hat_l4: f64,
    pub hat_l6: f64,
}

/// Exponential decay fit of `α₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Fitted rate `b` in `|r α₀(r)| ≈ C e^{−b r}`.
    pub rate: f64,
    /// Number of nodes in the fit window.
    pub nodes: usize,
    /// True when fewer than 50 tail nodes were available.
    pub short_tail: bool,
}

/// Everything derived from the two-body problem.
#[derive(Debug, Clone)]
pub struct TwoBodySolution {
    pub interaction: Interaction,
    pub e0: f64,
    pub e0_discrete: f64,
    pub alpha0: RadialFunction,
    /// Sampled interaction on the same grid.
    pub potential: RadialFunction,
    pub residual: f64,
    pub p_wave_bottom: f64,
    pub gap: GapReport,
    pub decay: DecayFit,
    pub alpha0_hat: RadialFunction,
    /// Tail ratio reported by the Fourier transform, if above threshold.
    pub fourier_tail_warning: Option<f64>,
}

impl TwoBodySolution {
    /// Solves the two-body problem on an automatically sized uniform grid.
    pub fn solve(interaction: &Interaction, config: &TwoBodyConfig) -> Result<Self> {
        interaction.validate()?;
        if !(config.eps > 0.0 && config.eps < 1.0) {
            return Err(Error::Config(format!("ε must lie in (0, 1), got {}", config.eps)));
        }
        let density = match interaction {
            Interaction::SphericalWell { .. } => config.nodes_per_width_sharp,
            _ => config.nodes_per_width,
        };
        let scale = interaction.length_scale();
        let dr = scale / density;
        let r_max = match config.r_max {
            Some(r) => r,
            None => {
                // pilot solve for the decay rate b ≈ √E₀
                let pilot_r = (12.0 * scale).max(8.0);
                let pilot = even_grid(pilot_r, (pilot_r / (scale / 64.0)).ceil() as usize)?;
                let gs = solve_ground_state(interaction, &pilot)?;
                (24.0 / gs.e0.sqrt()).max(8.0)
            }
        };
        let grid = even_grid(r_max, (r_max / dr).ceil() as usize)?;
        Self::solve_on(interaction, &grid, config)
    }

    /// Solves on a given uniform grid.
    pub fn solve_on(
        interaction: &Interaction,
        grid: &Arc<RadialGrid>,
        config: &TwoBodyConfig,
    ) -> Result<Self> {
        let gs = solve_ground_state(interaction, grid)?;
        let potential = interaction.sample(grid);
        let gap = compute_spectral_gap(&gs, &potential, config.eps, config.l_max)?;
        let decay = fit_decay(&gs.alpha0);
        let (alpha0_hat, fourier_tail_warning) = momentum_representation(&gs.alpha0, gs.e0_discrete);
        Ok(Self {
            interaction: interaction.clone(),
            e0: gs.e0,
            e0_discrete: gs.e0_discrete,
            alpha0: gs.alpha0,
            potential,
            residual: gs.residual,
            p_wave_bottom: gs.p_wave_bottom,
            gap,
            decay,
            alpha0_hat,
            fourier_tail_warning,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.alpha0.grid()
    }

    /// `(−Δ + E₀) α₀ = −V α₀`.
    pub fn shifted_kinetic_alpha0(&self) -> RadialFunction {
        let v = self.potential.values();
        let g = self.alpha0.grid().clone();
        let values = self.alpha0.values().iter().zip(v).map(|(a, v)| -v * a).collect();
        RadialFunction::new(g, values).expect("same grid")
    }

    /// Moment table with trap exponent `β`.
    pub fn moments(&self, beta: f64) -> Moments {
        alpha0_diagnostics(&self.alpha0, &self.alpha0_hat, &self.potential, beta)
    }
}

fn even_grid(r_max: f64, n: usize) -> Result<Arc<RadialGrid>> {
    let n = n + n % 2;
    Ok(Arc::new(RadialGrid::uniform(r_max, n.max(crate::numerics::grid::MIN_NODES))?))
}

/// Lowest `ℓ = 0` eigenpair of `−Δ + V`.
pub fn solve_ground_state(interaction: &Interaction, grid: &Arc<RadialGrid>) -> Result<GroundState> {
    let dr = grid
        .spacing()
        .ok_or_else(|| Error::Config("two-body solve needs a uniform grid".into()))?;
    let per_width = interaction.length_scale() / dr;
    if per_width < MIN_NODES_PER_WIDTH {
        return Err(Error::Config(format!(
            "grid spacing {dr} resolves the interaction with only {per_width:.1} nodes"
        )));
    }
    let v = interaction.sample(grid);
    let pairs = radial_eigensolve(&v, 1.0, 0, 1)?;
    let ground = &pairs[0];
    if ground.energy >= 0.0 || ground.best_energy() >= 0.0 {
        return Err(Error::NoBoundState {
            lowest: ground.best_energy(),
        });
    }
    let p_wave = radial_eigensolve(&v, 1.0, 1, 1)?;
    let p_wave_bottom = p_wave[0].best_energy();
    if p_wave_bottom <= ground.best_energy() {
        return Err(Error::Domain(format!(
            "p-wave bottom {p_wave_bottom} lies below the s-wave ground state"
        )));
    }
    if ground.residual > tol::EIGEN_RESIDUAL {
        return Err(Error::EigenNonConvergence {
            residual: ground.residual,
        });
    }
    Ok(GroundState {
        e0: -ground.best_energy(),
        e0_discrete: -ground.energy,
        alpha0: ground.function.clone(),
        residual: ground.residual,
        p_wave_bottom,
    })
}

/// Least-squares fit of `log|r α₀|` against `r` over the last third of the
/// nodes where `|α₀| ≥ 10⁻⁸ max|α₀|`.
pub fn fit_decay(alpha0: &RadialFunction) -> DecayFit {
    let cut = TAIL_THRESHOLD * alpha0.max_abs();
    let r = alpha0.grid().nodes();
    let v = alpha0.values();
    let last = v.iter().rposition(|x| x.abs() >= cut && *x != 0.0).unwrap_or(0);
    // the window starts after the last local maximum of |r α₀|
    let peak = (0..=last)
        .max_by(|&a, &b| (r[a] * v[a]).abs().total_cmp(&(r[b] * v[b]).abs()))
        .unwrap_or(0);
    let first = peak + (last - peak) * 2 / 3;
    let xs: Vec<f64> = (first..=last).map(|i| r[i]).collect();
    let ys: Vec<f64> = (first..=last).map(|i| (r[i] * v[i]).abs().ln()).collect();
    let count = xs.len();
    let rate = if count >= 2 {
        let (slope, _, _) = crate::numerics::linear_fit(&xs, &ys);
        -slope
    } else {
        f64::NAN
    };
    if count < 50 {
        log::warn!("decay fit uses only {count} tail nodes");
    }
    DecayFit {
        rate,
        nodes: count,
        short_tail: count < 50,
    }
}

/// Moment table of `α₀` (see [`Moments`]).
pub fn alpha0_diagnostics(
    alpha0: &RadialFunction,
    alpha0_hat: &RadialFunction,
    potential: &RadialFunction,
    beta: f64,
) -> Moments {
    let v_alpha = potential
        .values()
        .iter()
        .zip(alpha0.values())
        .map(|(v, a)| v * a)
        .collect();
    let v_alpha = RadialFunction::new(alpha0.grid().clone(), v_alpha).expect("same grid");
    let m = Moments {
        half: alpha0.moment_norm(0.5),
        first: alpha0.moment_norm(1.0),
        beta_half: alpha0.moment_norm(beta / 2.0),
        beta,
        l1: alpha0.lp_norm(1.0),
        v_l1: v_alpha.lp_norm(1.0),
        hat_l2: alpha0_hat.lp_norm(2.0),
        hat_l4: alpha0_hat.lp_norm(4.0),
        hat_l6: alpha0_hat.lp_norm(6.0),
    };
    debug_assert!([m.half, m.first, m.beta_half, m.l1, m.v_l1, m.hat_l2, m.hat_l4, m.hat_l6]
        .iter()
        .all(|x| x.is_finite()));
    m
}

/// `α̂₀` on the conjugate momentum grid, truncated once `|α̂₀|⁴ p² < 10⁻¹²`
/// and `|α̂₀| < 10⁻⁸ max|α̂₀|` at the cut (at least `p ≥ 10√E₀`).
fn momentum_representation(alpha0: &RadialFunction, e0: f64) -> (RadialFunction, Option<f64>) {
    let grid = alpha0.grid();
    let n = grid.len();
    let dp = std::f64::consts::PI / grid.r_max();
    let mut m = ((16.0 * e0.sqrt().max(1.0)) / dp).ceil() as usize;
    loop {
        m = m.clamp(crate::numerics::grid::MIN_NODES, n);
        let pg = Arc::new(grid.conjugate(m).expect("valid conjugate grid"));
        let ft = radial_fourier(alpha0, &pg);
        let f = &ft.function;
        let p_max = pg.r_max();
        let last = f.values()[m - 1].abs();
        let done = last.powi(4) * p_max * p_max < 1e-12 && last <= TAIL_THRESHOLD * f.max_abs();
        if done || m == n {
            return (ft.function, ft.tail_warning);
        }
        m *= 2;
    }
}

/// Depth `V₀` of `−V₀ e^{−r²/w²}` giving binding energy `target`.
pub fn tune_gaussian_depth(width: f64, target: f64, config: &TwoBodyConfig) -> Result<f64> {
    let scale = width;
    let r_max = config.r_max.unwrap_or((24.0 / target.sqrt()).max(8.0) * scale.max(1.0));
    let grid = even_grid(r_max, (r_max / (scale / config.nodes_per_width)).ceil() as usize)?;
    let e0 = |depth: f64| -> f64 {
        let i = Interaction::GaussianWell { depth, width };
        match solve_ground_state(&i, &grid) {
            Ok(gs) => gs.e0 - target,
            Err(_) => -target,
        }
    };
    // threshold for binding is V₀w² ≈ 2.68; E₀ grows roughly linearly above it
    let lo = 2.0 / (width * width);
    let mut hi = (lo + 4.0 * target).max(2.0 * lo);
    while e0(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Domain("no depth reaches the target binding energy".into()));
        }
    }
    find_root_scalar(e0, lo, hi, 1e-13)
}

#[cfg(test)]
mod tests;
