use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{field_norms, gradient_u, kinetic_plus, parts, spacing, FieldNorms, TrapProblem};
use crate::exec::Exec;
use crate::numerics::RadialFunction;
use crate::{Error, Result};

/// Stopping rules of the GP minimizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizerConfig {
    /// Stop when `‖grad‖₂ ≤ grad_tol · max(1, ‖ψ‖₂)`.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Stop when the energy moved by less than `stagnation_tol` over this many steps.
    pub stagnation_window: usize,
    pub stagnation_tol: f64,
    /// Residual target of the mass-constrained problem.
    pub constrained_tol: f64,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            max_iter: 2000,
            stagnation_window: 50,
            stagnation_tol: 1e-12,
            constrained_tol: 1e-9,
        }
    }
}

/// Minimizer of `E_D`.
#[derive(Debug, Clone)]
pub struct GpResult {
    pub psi_star: RadialFunction,
    pub energy: f64,
    /// `‖grad E_D(ψ*)‖₂`.
    pub grad_residual: f64,
    pub d: f64,
    pub g_bcs: f64,
    pub e_w: f64,
    pub e_w_discrete: f64,
    pub converged: bool,
    pub iterations: usize,
    pub energy_history: Vec<f64>,
    pub norms: FieldNorms,
}

impl GpResult {
    /// `N = ‖ψ*‖₂²`.
    pub fn mass(&self) -> f64 {
        self.norms.l2 * self.norms.l2
    }
}

struct Functional<'a> {
    r: &'a [f64],
    w: &'a [f64],
    d: f64,
    g: f64,
    dr: f64,
}

impl Functional<'_> {
    fn energy(&self, u: &[f64]) -> f64 {
        let mut kin = u[0] * u[0];
        let mut rest = 0.0;
        for i in 0..u.len() {
            if i > 0 {
                kin += (u[i] - u[i - 1]).powi(2);
            }
            let u2 = u[i] * u[i];
            rest += (self.w[i] - self.d) * u2 + self.g * u2 * u2 / (self.r[i] * self.r[i]);
        }
        4.0 * PI * (0.25 * kin / self.dr + rest * self.dr)
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        gradient_u(u, self.r, self.w, self.d, self.g, self.dr)
    }

    /// `L²` norm of the gradient field.
    fn norm(&self, gu: &[f64]) -> f64 {
        (4.0 * PI * self.dr * gu.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }
}

/// Minimizes `E_D` over radial fields by Newton steps (when the Hessian is
/// positive definite) or `(−¼Δ + W + σ)`-preconditioned gradient steps, with
/// Armijo backtracking so the energy never increases.
///
/// Returns `ψ* ≡ 0` when `D ≤ E_W`. Without an initial field the start is
/// `√t* ψ_W` with `t* = (D − E_W)/(2g‖ψ_W‖₄⁴)`.
pub fn minimize_gp_unconstrained(
    trap: &TrapProblem,
    d: f64,
    g: f64,
    init: Option<&RadialFunction>,
    config: &MinimizerConfig,
) -> Result<GpResult> {
    if !(g > 0.0) {
        return Err(Error::Config(format!("g_BCS must be positive, got {g}")));
    }
    let grid = trap.grid.clone();
    let dr = spacing(&grid)?;
    let r = grid.nodes();
    let n = r.len();
    let f = Functional {
        r,
        w: trap.w.values(),
        d,
        g,
        dr,
    };
    let zero = |iterations| -> Result<GpResult> {
        let psi = RadialFunction::zeros(grid.clone());
        let norms = field_norms(&psi, &trap.w)?;
        Ok(GpResult {
            psi_star: psi,
            energy: 0.0,
            grad_residual: 0.0,
            d,
            g_bcs: g,
            e_w: trap.e_w,
            e_w_discrete: trap.e_w_discrete,
            converged: true,
            iterations,
            energy_history: vec![0.0],
            norms,
        })
    };
    if init.is_none() && d <= trap.e_w_discrete {
        return zero(0);
    }
    let mut u: Vec<f64> = match init {
        Some(psi) => r.iter().zip(psi.values()).map(|(r, p)| r * p).collect(),
        None => {
            let q = parts(&trap.psi_w, &trap.w)?.quartic;
            let t = (d - trap.e_w_discrete) / (2.0 * g * q);
            r.iter().zip(trap.psi_w.values()).map(|(r, p)| t.sqrt() * r * p).collect()
        }
    };
    u[n - 1] = 0.0;
    let min_w = trap.w.values().iter().copied().fold(f64::INFINITY, f64::min);
    let sigma = (d - min_w).max(0.0) + 1.0;
    let precond = kinetic_plus(
        &trap.w.values()[..n - 1].iter().map(|w| w + sigma).collect::<Vec<_>>(),
        dr,
    )?
    .factorize(0.0)?;
    let mut energy = f.energy(&u);
    let mut history = vec![energy];
    let mut converged = false;
    let mut iterations = 0;
    let mut grad_residual = f64::INFINITY;
    for it in 0..config.max_iter {
        iterations = it;
        let gu = f.gradient(&u);
        grad_residual = f.norm(&gu);
        let mass = (4.0 * PI * dr * u.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if grad_residual <= config.grad_tol * mass.max(1.0) {
            converged = true;
            break;
        }
        let w = config.stagnation_window;
        if history.len() > w {
            let old = history[history.len() - 1 - w];
            if (old - energy).abs() <= config.stagnation_tol * energy.abs().max(1.0) {
                break;
            }
        }
        let rhs: Vec<f64> = gu[..n - 1].iter().map(|x| -x).collect();
        let hess_diag: Vec<f64> = (0..n - 1)
            .map(|i| f.w[i] - d + 6.0 * g * u[i] * u[i] / (r[i] * r[i]))
            .collect();
        let newton = kinetic_plus(&hess_diag, dr)
            .and_then(|h| h.factorize(0.0))
            .ok()
            .filter(|fac| fac.is_positive_definite());
        let step = match &newton {
            Some(fac) => fac.solve(&rhs),
            None => precond.solve(&rhs),
        };
        let slope: f64 = 2.0 * 4.0 * PI * dr * gu.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>();
        if slope >= 0.0 {
            break;
        }
        let mut t = 1.0;
        let mut accepted = false;
        let mut trial = u.clone();
        for _ in 0..60 {
            for i in 0..n - 1 {
                trial[i] = u[i] + t * step[i];
            }
            let e = f.energy(&trial);
            if e <= energy + 1e-4 * t * slope {
                u.copy_from_slice(&trial);
                energy = e;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        history.push(energy);
        if !accepted {
            break;
        }
    }
    if !converged {
        log::warn!(
            "GP minimization stopped after {iterations} iterations with gradient {grad_residual:.2e}"
        );
    }
    u.iter_mut().for_each(|x| *x = x.abs());
    let values: Vec<f64> = u.iter().zip(r).map(|(u, r)| u / r).collect();
    let psi = RadialFunction::new(grid.clone(), values)?;
    let norms = field_norms(&psi, &trap.w)?;
    let energy = f.energy(&u);
    if norms.l2 == 0.0 {
        return zero(iterations);
    }
    Ok(GpResult {
        psi_star: psi,
        energy,
        grad_residual,
        d,
        g_bcs: g,
        e_w: trap.e_w,
        e_w_discrete: trap.e_w_discrete,
        converged,
        iterations,
        energy_history: history,
        norms,
    })
}

/// Minimizer of `Ẽ(f) = ∫ ¼|∇f|² + W f² + gN f⁴` under `‖f‖₂ = 1`.
#[derive(Debug, Clone)]
pub struct ConstrainedResult {
    pub f0: RadialFunction,
    /// `Ẽ^GP`.
    pub energy: f64,
    /// `μ₀ = Ẽ^GP + gN‖f₀‖₄⁴`.
    pub mu0: f64,
    /// Rayleigh quotient `⟨f₀, (−¼Δ + W + 2gN f₀²) f₀⟩`.
    pub mu_rayleigh: f64,
    /// Lagrange multiplier of the final Newton step.
    pub mu_multiplier: f64,
    /// `‖−¼Δf₀ + W f₀ + 2gN f₀³ − μ₀ f₀‖₂`.
    pub residual: f64,
    pub converged: bool,
}

/// Positive normalized ground state of the nonlinear problem with coupling
/// `gN`: damped self-consistent iterations followed by Newton steps on the
/// bordered system for `(f, μ)`.
pub fn minimize_gp_constrained(
    trap: &TrapProblem,
    g: f64,
    mass: f64,
    config: &MinimizerConfig,
) -> Result<ConstrainedResult> {
    if !(mass > 0.0) {
        return Err(Error::Config(format!("N must be positive, got {mass}")));
    }
    if !(g > 0.0) {
        return Err(Error::Config(format!("g_BCS must be positive, got {g}")));
    }
    let grid = trap.grid.clone();
    let dr = spacing(&grid)?;
    let r = grid.nodes();
    let n = r.len();
    let m = n - 1;
    let w = trap.w.values();
    let gn = g * mass;
    let c = 4.0 * PI * dr;
    let normalize = |u: &mut Vec<f64>| {
        let s = (c * u.iter().map(|x| x * x).sum::<f64>()).sqrt();
        u.iter_mut().for_each(|x| *x /= s);
    };
    let residual_of = |u: &[f64]| -> (f64, f64) {
        let gu = gradient_u(u, r, w, 0.0, gn, dr);
        let mu = c * gu.iter().zip(u).map(|(g, u)| g * u).sum::<f64>();
        let res = (c * gu.iter().zip(u).map(|(g, u)| (g - mu * u).powi(2)).sum::<f64>()).sqrt();
        (mu, res)
    };
    let mut u: Vec<f64> = r.iter().zip(trap.psi_w.values()).map(|(r, p)| r * p).collect();
    u[m] = 0.0;
    normalize(&mut u);
    // self-consistent field with density mixing
    for _ in 0..500 {
        let (_, res) = residual_of(&u);
        if res < 1e-4 {
            break;
        }
        let diag: Vec<f64> = (0..m).map(|i| w[i] + 2.0 * gn * u[i] * u[i] / (r[i] * r[i])).collect();
        let t = kinetic_plus(&diag, dr)?;
        let lambda = t.eigenvalue(0)?;
        let (v, _) = t.eigenvector(lambda)?;
        let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        let mut fresh: Vec<f64> = v.iter().map(|x| sign * x).collect();
        fresh.push(0.0);
        normalize(&mut fresh);
        for i in 0..n {
            u[i] = (0.5 * (u[i] * u[i] + fresh[i] * fresh[i])).sqrt();
        }
        normalize(&mut u);
    }
    // Newton on G(u) − μ u = 0, c‖u‖² = 1
    let (mut mu, mut res) = residual_of(&u);
    let mut converged = res <= config.constrained_tol;
    for _ in 0..50 {
        if converged {
            break;
        }
        let gu = gradient_u(&u, r, w, 0.0, gn, dr);
        let rhs: Vec<f64> = (0..m).map(|i| -(gu[i] - mu * u[i])).collect();
        let diag: Vec<f64> = (0..m)
            .map(|i| w[i] + 6.0 * gn * u[i] * u[i] / (r[i] * r[i]) - mu)
            .collect();
        let fac = kinetic_plus(&diag, dr)?.factorize(0.0)?;
        let a = fac.solve(&rhs);
        let b = fac.solve(&u[..m]);
        let norm_defect = 1.0 - c * u.iter().map(|x| x * x).sum::<f64>();
        let ua: f64 = 2.0 * c * u[..m].iter().zip(&a).map(|(u, a)| u * a).sum::<f64>();
        let ub: f64 = 2.0 * c * u[..m].iter().zip(&b).map(|(u, b)| u * b).sum::<f64>();
        let dmu = (norm_defect - ua) / ub;
        for i in 0..m {
            u[i] += a[i] + dmu * b[i];
        }
        mu += dmu;
        let (mu_r, r_new) = residual_of(&u);
        res = r_new;
        if res <= config.constrained_tol {
            mu = mu_r;
            converged = true;
        }
    }
    normalize(&mut u);
    u.iter_mut().for_each(|x| *x = x.abs());
    let (mu_rayleigh, residual) = residual_of(&u);
    let values: Vec<f64> = u.iter().zip(r).map(|(u, r)| u / r).collect();
    let f0 = RadialFunction::new(grid.clone(), values)?;
    let p = parts(&f0, &trap.w)?;
    let energy = p.kinetic + p.potential + gn * p.quartic;
    let mu0 = energy + gn * p.quartic;
    Ok(ConstrainedResult {
        f0,
        energy,
        mu0,
        mu_rayleigh,
        mu_multiplier: mu,
        residual,
        converged: residual <= config.constrained_tol.max(1e-7),
    })
}

/// `E^GP_D` over a grid of offsets (independent minimizations).
pub fn criticality_scan(
    trap: &TrapProblem,
    g: f64,
    offsets: &[f64],
    config: &MinimizerConfig,
    exec: Exec,
) -> Result<Vec<(f64, f64)>> {
    exec.map_slice(offsets, |&d| {
        minimize_gp_unconstrained(trap, d, g, None, config).map(|r| (d, r.energy))
    })
    .into_iter()
    .collect()
}
