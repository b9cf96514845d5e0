use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::PairKernel;
use crate::gp;
use crate::model::{PhysicsModel, Trap};
use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::{RadialFunction, RadialGrid};
use crate::{Error, Exec, Result};

/// Controls of the reduced `(|η|, |ζ|, cos θ)` quadrature of the trap term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub cos_nodes: usize,
    /// Radial nodes per factor after decimation.
    pub radial_nodes: usize,
    /// Relative level below which a factor is treated as zero.
    pub support_threshold: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            cos_nodes: 32,
            radial_nodes: 400,
            support_threshold: 1e-12,
        }
    }
}

/// The part of the BCS energy quadratic in `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticEnergy {
    /// `¼ h² ⟨α, −Δ_η α⟩`, equal to `h · ¼‖∇ψ‖²` for the trial kernel.
    pub kinetic_com: f64,
    /// `⟨α, (−h²Δ_ξ + V(ξ/h) + E₀) α⟩`.
    pub relative_residual: f64,
    /// `h² ⟨α, W(η + ξ/2) α⟩`.
    pub w_term: f64,
    /// `−h² D ‖α‖²_{S²}`.
    pub d_term: f64,
    pub total: f64,
    /// `h ⟨ψ, (−¼Δ + W − D) ψ⟩` in the discrete GP functional.
    pub gp_quadratic: f64,
    pub warnings: Vec<String>,
}

/// `4π [u₀v₀ + Σ (u_i − u_{i−1})(v_i − v_{i−1})] / dr` with `u = r a`, the
/// discrete `⟨∇a, ∇b⟩` of the GP functional.
fn grad_inner(a: &RadialFunction, b: &RadialFunction) -> Result<f64> {
    let dr = a
        .grid()
        .spacing()
        .ok_or_else(|| Error::Config("gradient needs a uniform grid".into()))?;
    let r = a.grid().nodes();
    let u: Vec<f64> = r.iter().zip(a.values()).map(|(r, v)| r * v).collect();
    let v: Vec<f64> = r.iter().zip(b.values()).map(|(r, v)| r * v).collect();
    let mut s = u[0] * v[0];
    for i in 1..u.len() {
        s += (u[i] - u[i - 1]) * (v[i] - v[i - 1]);
    }
    Ok(4.0 * PI * s / dr)
}

/// Decimated uniform grid `r_i = (i+1)·stride·dr` truncated at the common
/// support of a set of functions sharing a uniform grid.
struct Coarse {
    grid: RadialGrid,
    stride: usize,
}

impl Coarse {
    fn new(fs: &[&RadialFunction], max_nodes: usize, threshold: f64) -> Result<Self> {
        let grid = fs[0].grid();
        let dr = grid
            .spacing()
            .ok_or_else(|| Error::Config("trap quadrature needs uniform grids".into()))?;
        let support = fs.iter().map(|f| f.support_radius(threshold)).fold(0.0, f64::max);
        let n_support = ((support / dr).round() as usize + 2).min(grid.len());
        let stride = n_support.div_ceil(max_nodes).max(1);
        let m = n_support.div_ceil(stride).max(crate::numerics::grid::MIN_NODES);
        Ok(Self {
            grid: RadialGrid::uniform((m * stride) as f64 * dr, m)?,
            stride,
        })
    }

    fn sample(&self, f: &RadialFunction) -> Vec<f64> {
        let v = f.values();
        (1..=self.grid.len())
            .map(|i| v.get(i * self.stride - 1).copied().unwrap_or(0.0))
            .collect()
    }
}

/// `h⁵ Σ_kl (4π)(2π) ∫η²dη ∫ζ²dζ ∫dc a_k a_l(η) b_k b_l(ζ) W(|η + hζ/2|)`.
fn trap_term(kernel: &PairKernel, trap: &Trap, cfg: &QuadratureConfig, exec: Exec) -> Result<f64> {
    let terms = kernel.terms();
    let a_refs: Vec<&RadialFunction> = terms.iter().map(|t| &t.0).collect();
    let b_refs: Vec<&RadialFunction> = terms.iter().map(|t| &t.1).collect();
    let ca = Coarse::new(&a_refs, cfg.radial_nodes, cfg.support_threshold)?;
    let cb = Coarse::new(&b_refs, cfg.radial_nodes, cfg.support_threshold)?;
    let av: Vec<Vec<f64>> = a_refs.iter().map(|f| ca.sample(f)).collect();
    let bv: Vec<Vec<f64>> = b_refs.iter().map(|f| cb.sample(f)).collect();
    let (ca, cb) = (&ca.grid, &cb.grid);
    let nt = terms.len();
    let (cx, cw) = gauss_legendre(cfg.cos_nodes);
    let h = kernel.h;
    let rows = exec.map_range(ca.len(), |i| {
        let eta = ca.nodes()[i];
        let mut acc = 0.0;
        for (j, &zeta) in cb.nodes().iter().enumerate() {
            let mut pair = 0.0;
            for k in 0..nt {
                for l in 0..nt {
                    pair += av[k][i] * av[l][i] * bv[k][j] * bv[l][j];
                }
            }
            if pair == 0.0 {
                continue;
            }
            let base = eta * eta + 0.25 * h * h * zeta * zeta;
            let cross = h * eta * zeta;
            let wbar: f64 = cx
                .iter()
                .zip(&cw)
                .map(|(c, w)| w * trap.eval((base + cross * c).max(0.0).sqrt()))
                .sum();
            acc += cb.weights()[j] * pair * wbar;
        }
        ca.weights()[i] * acc
    });
    Ok(h.powi(5) * 8.0 * PI * PI * rows.iter().sum::<f64>())
}

/// Quadratic part of the BCS energy of the pair kernel, term by term in
/// centre-of-mass and relative coordinates.
pub fn quadratic_energy(
    kernel: &PairKernel,
    model: &PhysicsModel,
    cfg: &QuadratureConfig,
    exec: Exec,
) -> Result<QuadraticEnergy> {
    let h = kernel.h;
    let h3 = h.powi(3);
    let profile = &kernel.profile;
    let terms = kernel.terms();
    let mut kinetic_com = 0.0;
    let mut relative_residual = 0.0;
    let shifted: Vec<RadialFunction> = terms
        .iter()
        .map(|(_, b)| {
            let lap = b.laplacian()?;
            let vals = b
                .values()
                .iter()
                .zip(lap.values())
                .zip(profile.potential.values())
                .map(|((b, l), v)| -l + (v + profile.e0) * b)
                .collect();
            RadialFunction::new(b.grid().clone(), vals)
        })
        .collect::<Result<_>>()?;
    for (ak, bk) in &terms {
        for (l, (al, bl)) in terms.iter().enumerate() {
            let bb = bk.inner(bl)?;
            kinetic_com += 0.25 * h * h * h3 * grad_inner(ak, al)? * bb;
            relative_residual += h3 * ak.inner(al)? * bk.inner(&shifted[l])?;
        }
    }
    let hs = kernel.hs_norm_sq()?;
    let d_term = -h * h * model.d * hs;
    let w_term = if kernel.is_zero() {
        0.0
    } else {
        trap_term(kernel, &model.trap, cfg, exec)?
    };
    let w = model.trap.sample(kernel.psi.grid());
    let p = gp::parts(&kernel.psi, &w)?;
    let gp_quadratic = h * (p.kinetic + p.potential - model.d * p.mass);
    Ok(QuadraticEnergy {
        kinetic_com,
        relative_residual,
        w_term,
        d_term,
        total: kinetic_com + relative_residual + w_term + d_term,
        gp_quadratic,
        warnings: kernel.warnings.clone(),
    })
}

/// `h ∫ W |ψ|² + (h³/4) ‖ψ‖² ‖|·|α₀‖²`, the trap term of the trial kernel
/// for a harmonic trap `W = |x|²` (the cross term vanishes by parity).
pub fn harmonic_trap_term(psi: &RadialFunction, profile: &super::PairProfile, coefficient: f64, h: f64) -> f64 {
    let w_psi = psi.weighted_norm_sq(|r| coefficient * r * r);
    h * w_psi + coefficient * 0.25 * h.powi(3) * psi.norm_sq() * profile.second_moment / profile.norm_sq
}
