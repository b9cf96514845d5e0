use serde::{Deserialize, Serialize};

use super::GroundState;
use crate::numerics::{find_root_scalar, radial_operator, RadialFunction};
use crate::{Error, Result};

/// Lowest eigenvalue of `P⊥[−(1−ε)Δ + V + E₀]P⊥` per angular-momentum sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub eps: f64,
    /// Minimum over sectors.
    pub gap: f64,
    /// Sector attaining the minimum.
    pub sector: u32,
    /// `(ℓ, lowest eigenvalue)` for `ℓ = 0..=ℓ_max`.
    pub sectors: Vec<(u32, f64)>,
}

/// Spectral gap above the two-body ground state.
///
/// In `ℓ = 0` the projection removes `α₀`; the lowest eigenvalue of the
/// compressed operator is the root of `⟨α₀, (A − λ)⁻¹ α₀⟩ = 0` between the
/// two lowest eigenvalues of `A = −(1−ε)Δ + V + E₀`. Higher sectors are
/// orthogonal to `α₀` and need no projection. Returns
/// [`Error::GapViolated`] when the gap is not positive.
pub fn compute_spectral_gap(
    ground: &GroundState,
    potential: &RadialFunction,
    eps: f64,
    l_max: u32,
) -> Result<GapReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Config(format!("ε must lie in (0, 1), got {eps}")));
    }
    let e0 = ground.e0_discrete;
    let kappa = 1.0 - eps;
    let mut sectors = Vec::with_capacity(l_max as usize + 1);
    let op = radial_operator(potential, kappa, 0)?;
    let grid = potential.grid();
    let n = grid.len();
    let mut a = op.to_symmetric(grid, &ground.alpha0.values()[..n - 1]);
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    a.iter_mut().for_each(|x| *x /= norm);
    let l1 = op.matrix.eigenvalue(0)?;
    let l2 = op.matrix.eigenvalue(1)?;
    let secular = |lambda: f64| -> f64 {
        match op.matrix.solve_shifted(lambda, &a) {
            Ok(x) => x.iter().zip(&a).map(|(x, a)| x * a).sum(),
            Err(_) => f64::NAN,
        }
    };
    let width = l2 - l1;
    let s_wave = find_root_scalar(secular, l1 + 1e-10 * width, l2 - 1e-10 * width, 1e-13)? + e0;
    sectors.push((0, s_wave));
    for l in 1..=l_max {
        let op = radial_operator(potential, kappa, l)?;
        sectors.push((l, op.matrix.eigenvalue(0)? + e0));
    }
    let (sector, gap) = sectors
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one sector");
    if gap <= 0.0 {
        return Err(Error::GapViolated { gap, eps, sector: sector as usize });
    }
    Ok(GapReport {
        eps,
        gap,
        sector,
        sectors,
    })
}
