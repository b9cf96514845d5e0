//! The grand-canonical Gross-Pitaevskii functional
//! `E_D(ψ) = ∫ ¼|∇ψ|² + (W − D)|ψ|² + g|ψ|⁴`, its minimizer, the
//! mass-constrained problem and the weighted Ginzburg-Landau splitting.
//!
//! Fields are radial, real and sampled on a uniform grid. In terms of
//! `u = r ψ` the discrete functional is
//! `4π [¼ Σ (u_{i+1} − u_i)²/dr + Σ (W − D) u_i² dr + g Σ u_i⁴/r_i² dr]`
//! with `u_0 = 0` and the value at `r_max` held at zero, which matches the
//! finite-difference trap operator used for `E_W` and `ψ_W`.

mod minimize;
mod split;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::model::Trap;
use crate::numerics::{radial_eigensolve, RadialFunction, RadialGrid, SymTridiagonal};
use crate::{Error, Result};

pub use minimize::{
    criticality_scan, minimize_gp_constrained, minimize_gp_unconstrained, ConstrainedResult,
    GpResult, MinimizerConfig,
};
pub use split::{apriori_bounds_check, gl_split, AprioriReport, GlSplit};

/// Tail level `|ψ(r_max)| / max|ψ|` above which the functional is rejected.
pub const TAIL_LIMIT: f64 = 1e-6;

/// Grid of the macroscopic problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GpGrid {
    pub r_max: f64,
    pub n: usize,
}

impl Default for GpGrid {
    fn default() -> Self {
        Self { r_max: 10.0, n: 4000 }
    }
}

impl GpGrid {
    pub fn build(&self) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(RadialGrid::uniform(self.r_max, self.n + self.n % 2)?))
    }
}

/// Derived norms of a GP field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldNorms {
    pub l2: f64,
    pub l4: f64,
    pub grad: f64,
    pub w_expectation: f64,
}

/// Trap operator `−¼Δ + W` sampled on a grid.
#[derive(Debug, Clone)]
pub struct TrapProblem {
    pub grid: Arc<RadialGrid>,
    pub w: RadialFunction,
    /// Lowest eigenvalue (Richardson-extrapolated when available).
    pub e_w: f64,
    /// Lowest eigenvalue of the discrete operator, consistent with `psi_w`.
    pub e_w_discrete: f64,
    pub psi_w: RadialFunction,
}

/// Lowest eigenpair of `−¼Δ + W`.
pub fn solve_trap_ground(trap: &Trap, grid: &Arc<RadialGrid>) -> Result<TrapProblem> {
    trap.validate()?;
    let w = trap.sample(grid);
    let pair = radial_eigensolve(&w, 0.25, 0, 1)?.remove(0);
    let psi_w = pair.function.clone();
    let tail = psi_w.tail_ratio();
    if tail > TAIL_LIMIT {
        log::warn!("trap ground state not decayed at r_max (tail ratio {tail:.2e})");
    }
    Ok(TrapProblem {
        grid: grid.clone(),
        w,
        e_w: pair.best_energy(),
        e_w_discrete: pair.energy,
        psi_w,
    })
}

pub(crate) fn spacing(grid: &RadialGrid) -> Result<f64> {
    grid.spacing()
        .ok_or_else(|| Error::Config("GP fields need a uniform grid".into()))
}

/// `4π Σ a_i b_i r_i² dr`, the discrete inner product of the functional.
pub fn dot(a: &RadialFunction, b: &RadialFunction) -> f64 {
    let g = a.grid();
    let dr = g.spacing().unwrap_or(0.0);
    4.0 * PI
        * dr
        * g.nodes()
            .iter()
            .zip(a.values())
            .zip(b.values())
            .map(|((r, a), b)| a * b * r * r)
            .sum::<f64>()
}

fn u_of(psi: &RadialFunction) -> Vec<f64> {
    psi.grid().nodes().iter().zip(psi.values()).map(|(r, p)| r * p).collect()
}

/// `‖ψ‖₂`, `‖ψ‖₄`, `‖∇ψ‖₂`, `⟨ψ|W|ψ⟩` in the discrete norms.
pub fn field_norms(psi: &RadialFunction, w: &RadialFunction) -> Result<FieldNorms> {
    let parts = parts(psi, w)?;
    Ok(FieldNorms {
        l2: parts.mass.sqrt(),
        l4: parts.quartic.powf(0.25),
        grad: (4.0 * parts.kinetic).sqrt(),
        w_expectation: parts.potential,
    })
}

/// Pieces of the functional: `¼‖∇ψ‖²`, `⟨W⟩`, `‖ψ‖₂²`, `‖ψ‖₄⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub potential: f64,
    pub mass: f64,
    pub quartic: f64,
}

impl EnergyParts {
    pub fn energy(&self, d: f64, g: f64) -> f64 {
        self.kinetic + self.potential - d * self.mass + g * self.quartic
    }
}

pub fn parts(psi: &RadialFunction, w: &RadialFunction) -> Result<EnergyParts> {
    let dr = spacing(psi.grid())?;
    if psi.tail_ratio() > TAIL_LIMIT {
        return Err(Error::Domain(format!(
            "field not decayed at r_max (tail ratio {:.2e}); ⟨ψ|W|ψ⟩ unresolved",
            psi.tail_ratio()
        )));
    }
    let u = u_of(psi);
    let r = psi.grid().nodes();
    let wv = w.values();
    let mut kin = u[0] * u[0];
    for i in 1..u.len() {
        kin += (u[i] - u[i - 1]).powi(2);
    }
    let mut pot = 0.0;
    let mut mass = 0.0;
    let mut quartic = 0.0;
    for i in 0..u.len() {
        let u2 = u[i] * u[i];
        pot += wv[i] * u2;
        mass += u2;
        quartic += u2 * u2 / (r[i] * r[i]);
    }
    let c = 4.0 * PI;
    Ok(EnergyParts {
        kinetic: c * 0.25 * kin / dr,
        potential: c * pot * dr,
        mass: c * mass * dr,
        quartic: c * quartic * dr,
    })
}

/// `E_D(ψ)`.
pub fn gp_energy(psi: &RadialFunction, w: &RadialFunction, d: f64, g: f64) -> Result<f64> {
    Ok(parts(psi, w)?.energy(d, g))
}

/// Gradient field `−¼Δψ + (W − D)ψ + 2g|ψ|²ψ` (zero at `r_max`); the real
/// directional derivative of `E_D` is `2⟨grad, φ⟩`.
pub fn gp_gradient(psi: &RadialFunction, w: &RadialFunction, d: f64, g: f64) -> Result<RadialFunction> {
    let dr = spacing(psi.grid())?;
    if psi.tail_ratio() > TAIL_LIMIT {
        return Err(Error::Domain("field not decayed at r_max".into()));
    }
    let u = u_of(psi);
    let r = psi.grid().nodes();
    let gu = gradient_u(&u, r, w.values(), d, g, dr);
    let values = gu.iter().zip(r).map(|(g, r)| g / r).collect();
    RadialFunction::new(psi.grid().clone(), values)
}

/// Gradient in the `u` variable; the last node is pinned (zero).
pub(crate) fn gradient_u(u: &[f64], r: &[f64], w: &[f64], d: f64, g: f64, dr: f64) -> Vec<f64> {
    let n = u.len();
    let inv = 0.25 / (dr * dr);
    let mut out = vec![0.0; n];
    for i in 0..n - 1 {
        let left = if i == 0 { 0.0 } else { u[i - 1] };
        let lap = u[i + 1] - 2.0 * u[i] + left;
        out[i] = -inv * lap + (w[i] - d) * u[i] + 2.0 * g * u[i].powi(3) / (r[i] * r[i]);
    }
    out
}

/// `−¼Δ_h + diag(c)` on the interior nodes.
pub(crate) fn kinetic_plus(c: &[f64], dr: f64) -> Result<SymTridiagonal> {
    let m = c.len();
    let inv = 0.25 / (dr * dr);
    SymTridiagonal::new(
        c.iter().map(|c| 2.0 * inv + c).collect(),
        vec![-inv; m - 1],
    )
}
