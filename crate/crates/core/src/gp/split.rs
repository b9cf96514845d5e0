use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::minimize::{minimize_gp_constrained, GpResult, MinimizerConfig};
use super::{parts, spacing, TrapProblem};
use crate::numerics::RadialFunction;
use crate::{Error, Result};

/// Mass-constrained / weighted Ginzburg-Landau decomposition of a GP minimizer.
#[derive(Debug, Clone)]
pub struct GlSplit {
    /// `N = ‖ψ*‖₂²`.
    pub mass: f64,
    pub f0: RadialFunction,
    pub mu0: f64,
    /// `φ* = ψ*/(√N f₀)` (set to 1 where `f₀` vanishes numerically).
    pub phi: RadialFunction,
    /// `Ẽ^GP`.
    pub e_tilde: f64,
    /// `Ẽ^GL[φ*]`.
    pub e_gl: f64,
    /// `|E^GP_D − N(Ẽ^GP − D + Ẽ^GL[φ*])|`.
    pub identity_residual: f64,
    /// `identity_residual / max(1, |E^GP_D|)`.
    pub identity_relative: f64,
    /// Residual of the constrained variational equation.
    pub f0_residual: f64,
}

/// Splits `ψ* = √N f₀ φ*` with `f₀` computed independently by the
/// constrained minimizer, and evaluates both sides of
/// `E^GP_D = N (Ẽ^GP − D + Ẽ^GL[φ*])`.
pub fn gl_split(result: &GpResult, trap: &TrapProblem, config: &MinimizerConfig) -> Result<GlSplit> {
    let mass = result.mass();
    if !(mass > 0.0) {
        return Err(Error::Config("GL splitting needs a nontrivial minimizer (N > 0)".into()));
    }
    let g = result.g_bcs;
    let constrained = minimize_gp_constrained(trap, g, mass, config)?;
    let f0 = constrained.f0.clone();
    let grid = f0.grid().clone();
    let dr = spacing(&grid)?;
    let r = grid.nodes();
    let fmax = f0.max_abs();
    let pmax = result.psi_star.max_abs();
    let sqrt_n = mass.sqrt();
    let mut phi = Vec::with_capacity(r.len());
    for (i, (&f, &p)) in f0.values().iter().zip(result.psi_star.values()).enumerate() {
        if f > 1e-12 * fmax {
            phi.push(p / (sqrt_n * f));
        } else if p.abs() > 1e-8 * pmax {
            return Err(Error::DivisionRegion { r: r[i] });
        } else {
            phi.push(1.0);
        }
    }
    // a = r f₀; ∫ ¼ f₀² |∇φ|² ≈ ¼ Σ a_i a_{i+1} (φ_{i+1} − φ_i)² / dr
    let a: Vec<f64> = r.iter().zip(f0.values()).map(|(r, f)| r * f).collect();
    let mut kin = 0.0;
    let mut quartic = 0.0;
    for i in 0..a.len() {
        if i + 1 < a.len() {
            kin += a[i] * a[i + 1] * (phi[i + 1] - phi[i]).powi(2);
        }
        quartic += a[i].powi(4) / (r[i] * r[i]) * (1.0 - phi[i] * phi[i]).powi(2);
    }
    let e_gl = 4.0 * PI * (0.25 * kin / dr + g * mass * quartic * dr);
    let e_tilde = constrained.energy;
    let rhs = mass * (e_tilde - result.d + e_gl);
    let identity_residual = (result.energy - rhs).abs();
    Ok(GlSplit {
        mass,
        f0,
        mu0: constrained.mu0,
        phi: RadialFunction::new(grid, phi)?,
        e_tilde,
        e_gl,
        identity_residual,
        identity_relative: identity_residual / result.energy.abs().max(1.0),
        f0_residual: constrained.residual,
    })
}

/// Terms of the a priori bound
/// `‖∇ψ‖² + ⟨ψ|W|ψ⟩ + ‖ψ‖₄⁴ + ‖ψ‖₂² ≤ C [1 + max{E_D(ψ), 0}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AprioriReport {
    pub left: f64,
    pub energy: f64,
    /// `1 + max{E_D(ψ), 0}`.
    pub driver: f64,
    /// `left / driver`, the observed constant.
    pub ratio: f64,
    /// For `D < 0`: `max{|D|⁻¹, g⁻¹, 4}` and whether `left ≤ C₀·E_D(ψ)`.
    pub trivial_constant: Option<f64>,
    pub trivial_bound_holds: Option<bool>,
}

pub fn apriori_bounds_check(
    psi: &RadialFunction,
    d: f64,
    g: f64,
    w: &RadialFunction,
) -> Result<AprioriReport> {
    let p = parts(psi, w)?;
    let left = 4.0 * p.kinetic + p.potential + p.quartic + p.mass;
    let energy = p.energy(d, g);
    let driver = 1.0 + energy.max(0.0);
    let (trivial_constant, trivial_bound_holds) = if d < 0.0 {
        let c0 = (1.0 / d.abs()).max(1.0 / g).max(4.0);
        (Some(c0), Some(left <= c0 * energy * (1.0 + 1e-12) + 1e-300))
    } else {
        (None, None)
    };
    Ok(AprioriReport {
        left,
        energy,
        driver,
        ratio: left / driver,
        trivial_constant,
        trivial_bound_holds,
    })
}
