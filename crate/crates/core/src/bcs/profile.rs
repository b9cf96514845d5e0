use std::f64::consts::PI;
use std::sync::Arc;

use crate::numerics::{radial_fourier, RadialFunction, RadialGrid};
use crate::twobody::{g_bcs_from_transform, TwoBodySolution};
use crate::{Error, Result};

/// Relative-coordinate data of a pair: `α₀`, the interaction `V` it solves,
/// `κ = (−Δ + E₀)α₀ = −Vα₀`, and the momentum-space constants built from them.
#[derive(Debug, Clone)]
pub struct PairProfile {
    pub alpha0: RadialFunction,
    pub potential: RadialFunction,
    pub kinetic: RadialFunction,
    pub e0: f64,
    pub alpha0_hat: RadialFunction,
    /// `(2π)³ ∫ (p² + E₀) |α̂₀|⁴`.
    pub g_bcs: f64,
    /// `(2π)³ ∫ κ̂ α̂₀³ = ∫ κ(ζ₁) α₀(ζ₂) α₀(ζ₃) α₀(−ζ₁−ζ₂−ζ₃)`; equals `g_bcs`
    /// up to the discretization of `−Δ`.
    pub g_kinetic: f64,
    /// `(2π)³ ∫ α̂₀⁴`, the bare four-cycle of `α₀`.
    pub g_quartic: f64,
    /// `‖α₀‖₁`.
    pub l1: f64,
    pub norm_sq: f64,
    /// `⟨α₀, (−Δ + V + E₀) α₀⟩` with the discrete Laplacian.
    pub eigen_residual: f64,
    /// `‖|·| α₀‖₂²`.
    pub second_moment: f64,
    /// Radius beyond which `|α₀| < 1e-12 max|α₀|`.
    pub support: f64,
}

impl PairProfile {
    /// Builds the profile from `α₀` and the potential it is an eigenfunction
    /// of; `α₀` is renormalized on its grid.
    pub fn new(alpha0: &RadialFunction, potential: &RadialFunction, e0: f64) -> Result<Self> {
        let grid = alpha0.grid().clone();
        if grid.spacing().is_none() {
            return Err(Error::Config("pair profile needs a uniform grid".into()));
        }
        if !potential.grid().same_as(&grid) {
            return Err(Error::Config("α₀ and V must share a grid".into()));
        }
        let n = alpha0.norm();
        if !(n > 0.0) {
            return Err(Error::Domain("α₀ vanishes".into()));
        }
        let alpha0 = alpha0.scaled(1.0 / n);
        let kinetic = RadialFunction::new(
            grid.clone(),
            alpha0.values().iter().zip(potential.values()).map(|(a, v)| -v * a).collect(),
        )?;
        let p_grid = Arc::new(grid.conjugate(grid.len())?);
        let a_hat = radial_fourier(&alpha0, &p_grid);
        if let Some(t) = a_hat.tail_warning {
            log::warn!("pair profile: α₀ tail ratio {t:.2e}");
        }
        let alpha0_hat = a_hat.function;
        let k_hat = radial_fourier(&kinetic, &p_grid).function;
        let cyc = (2.0 * PI).powi(3) * 4.0 * PI;
        let g_kinetic = cyc
            * p_grid.integrate_values(
                &k_hat.values().iter().zip(alpha0_hat.values()).map(|(k, a)| k * a.powi(3)).collect::<Vec<_>>(),
            );
        let g_quartic =
            cyc * p_grid.integrate_values(&alpha0_hat.values().iter().map(|a| a.powi(4)).collect::<Vec<_>>());
        let g_bcs = g_bcs_from_transform(&alpha0_hat, e0).g_bcs;
        let lap = alpha0.laplacian()?;
        let h_alpha = RadialFunction::new(
            grid.clone(),
            alpha0
                .values()
                .iter()
                .zip(lap.values())
                .zip(potential.values())
                .map(|((a, l), v)| -l + (v + e0) * a)
                .collect(),
        )?;
        let eigen_residual = alpha0.inner(&h_alpha)?;
        Ok(Self {
            l1: alpha0.lp_norm(1.0),
            norm_sq: alpha0.norm_sq(),
            second_moment: alpha0.moment_norm(1.0).powi(2),
            support: alpha0.support_radius(1e-12),
            alpha0,
            potential: potential.clone(),
            kinetic,
            e0,
            alpha0_hat,
            g_bcs,
            g_kinetic,
            g_quartic,
            eigen_residual,
        })
    }

    /// Profile of a solved two-body problem, at the discrete eigenvalue so the
    /// relative-sector residual vanishes to rounding.
    pub fn from_solution(sol: &TwoBodySolution) -> Result<Self> {
        Self::new(&sol.alpha0, &sol.potential, sol.e0_discrete)
    }

    /// `α₀ = (2c/π)^{3/4} e^{−c r²}`, the ground state of the harmonic
    /// interaction `V = 4c² r² − 6c − E₀` at energy `−E₀`.
    pub fn gaussian(c: f64, e0: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Config(format!("Gaussian width parameter must be positive, got {c}")));
        }
        let grid = Arc::new(RadialGrid::uniform(r_max, n)?);
        let a = RadialFunction::from_fn(grid.clone(), |r| (2.0 * c / PI).powf(0.75) * (-c * r * r).exp());
        let v = RadialFunction::from_fn(grid, |r| 4.0 * c * c * r * r - 6.0 * c - e0);
        Self::new(&a, &v, e0)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.alpha0.grid()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.alpha0.values().iter().all(|&v| v >= 0.0)
    }
}
