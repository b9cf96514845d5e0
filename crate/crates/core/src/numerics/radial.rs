use std::f64::consts::PI;
use std::sync::Arc;

use super::function::{Origin, RadialFunction};
use super::grid::{GridScheme, RadialGrid};
use super::tol;
use super::tridiag::SymTridiagonal;
use crate::{Error, Result};

/// Symmetrized second-order finite-difference form of
/// `−κ Δ + V + κ ℓ(ℓ+1)/r²` acting on `u = r f` in the sector `ℓ`.
///
/// Unknowns are the interior nodes `r_1 … r_{n−1}`; `u` vanishes at the
/// origin and at `r_max`. On a graded grid the operator is `M^{-1/2} K M^{-1/2}`
/// with the lumped mass `M`, so the matrix stays symmetric.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    pub matrix: SymTridiagonal,
    /// `√m_i` for the interior nodes (`√dr` on a uniform grid).
    pub sqrt_mass: Vec<f64>,
}

impl RadialOperator {
    /// Symmetric-variable vector `v = M^{1/2} u` from nodal values of `f`.
    pub fn to_symmetric(&self, grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
        self.sqrt_mass
            .iter()
            .zip(grid.nodes())
            .zip(f)
            .map(|((s, r), f)| s * r * f)
            .collect()
    }

    /// Nodal values of `f` from a symmetric-variable vector (zero at `r_max`).
    pub fn from_symmetric(&self, grid: &RadialGrid, v: &[f64]) -> Vec<f64> {
        let mut f: Vec<f64> = v
            .iter()
            .zip(&self.sqrt_mass)
            .zip(grid.nodes())
            .map(|((v, s), r)| v / (s * r))
            .collect();
        f.push(0.0);
        f
    }
}

pub fn radial_operator(
    potential: &RadialFunction,
    kinetic_factor: f64,
    l: u32,
) -> Result<RadialOperator> {
    if !(kinetic_factor > 0.0) {
        return Err(Error::Config(format!(
            "kinetic factor must be positive, got {kinetic_factor}"
        )));
    }
    operator_from_values(potential.grid(), potential.values(), kinetic_factor, l)
}

fn operator_from_values(
    grid: &RadialGrid,
    v: &[f64],
    kappa: f64,
    l: u32,
) -> Result<RadialOperator> {
    let r = grid.nodes();
    let n = r.len();
    let m = n - 1;
    let centrifugal = kappa * (l as f64) * (l as f64 + 1.0);
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    let mut sqrt_mass = Vec::with_capacity(m);
    for i in 0..m {
        let left = if i == 0 { r[0] } else { r[i] - r[i - 1] };
        let right = r[i + 1] - r[i];
        let mass = 0.5 * (left + right);
        sqrt_mass.push(mass.sqrt());
        diag.push(kappa * (1.0 / left + 1.0 / right) / mass + v[i] + centrifugal / (r[i] * r[i]));
    }
    for i in 0..m.saturating_sub(1) {
        let h = r[i + 1] - r[i];
        off.push(-kappa / h / (sqrt_mass[i] * sqrt_mass[i + 1]));
    }
    Ok(RadialOperator {
        matrix: SymTridiagonal::new(diag, off)?,
        sqrt_mass,
    })
}

/// Eigenpair of a radial operator.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    /// Discrete eigenvalue, consistent with `function`.
    pub energy: f64,
    /// Richardson value `(4E_n − E_{n/2})/3` when the half grid is available.
    pub extrapolated: Option<f64>,
    /// Eigenfunction `f` (not `u = r f`), `‖f‖₂ = 1`, positive near the origin.
    pub function: RadialFunction,
    /// `‖(H − E)u‖ / ‖u‖` in the discrete inner product.
    pub residual: f64,
}

impl Eigenpair {
    /// Best available estimate of the continuum eigenvalue.
    pub fn best_energy(&self) -> f64 {
        self.extrapolated.unwrap_or(self.energy)
    }
}

/// The `k` lowest eigenpairs of `−κΔ + V` in the angular-momentum sector `ℓ`.
pub fn radial_eigensolve(
    potential: &RadialFunction,
    kinetic_factor: f64,
    l: u32,
    k: usize,
) -> Result<Vec<Eigenpair>> {
    let grid = potential.grid();
    if grid.scheme() != GridScheme::Uniform {
        return Err(Error::Config(
            "the finite-difference eigensolver needs a uniform grid".into(),
        ));
    }
    let op = radial_operator(potential, kinetic_factor, l)?;
    if k == 0 || k > op.matrix.len() {
        return Err(Error::Config(format!("cannot request {k} eigenpairs")));
    }
    let coarse = coarse_eigenvalues(grid, potential.values(), kinetic_factor, l, k)?;
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let e = op.matrix.eigenvalue(j)?;
        let (v, _) = op.matrix.eigenvector(e)?;
        let mut f = op.from_symmetric(grid, &v);
        let tv = op.matrix.matvec(&v);
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let residual = tv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - e * b).powi(2))
            .sum::<f64>()
            .sqrt()
            / vnorm;
        let norm =
            (4.0 * PI * f.iter().zip(grid.weights()).map(|(f, w)| w * f * f).sum::<f64>()).sqrt();
        let sign = if v.iter().find(|x| x.abs() > 1e-14 * vnorm).copied().unwrap_or(1.0) < 0.0 {
            -1.0
        } else {
            1.0
        };
        f.iter_mut().for_each(|x| *x *= sign / norm);
        if residual > tol::EIGEN_RESIDUAL * e.abs().max(1.0) {
            return Err(Error::EigenNonConvergence { residual });
        }
        let origin = if l.is_multiple_of(2) { Origin::Even } else { Origin::Odd };
        out.push(Eigenpair {
            energy: e,
            extrapolated: coarse.as_ref().map(|c| (4.0 * e - c[j]) / 3.0),
            function: RadialFunction::new(Arc::clone(grid), f)?.with_origin(origin),
            residual,
        });
    }
    Ok(out)
}

/// Eigenvalues on the half grid made of every second node, if it exists.
fn coarse_eigenvalues(
    grid: &RadialGrid,
    v: &[f64],
    kappa: f64,
    l: u32,
    k: usize,
) -> Result<Option<Vec<f64>>> {
    let n = grid.len();
    if !n.is_multiple_of(2) || n / 2 < super::grid::MIN_NODES || k > n / 2 - 1 {
        return Ok(None);
    }
    let half = RadialGrid::new(grid.r_max(), n / 2, grid.scheme())?;
    let vh: Vec<f64> = v.iter().skip(1).step_by(2).copied().collect();
    let op = operator_from_values(&half, &vh, kappa, l)?;
    (0..k).map(|j| op.matrix.eigenvalue(j)).collect::<Result<Vec<_>>>().map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(n: usize) -> Vec<Eigenpair> {
        let g = Arc::new(RadialGrid::uniform(10.0, n).unwrap());
        let v = RadialFunction::from_fn(g, |r| r * r);
        radial_eigensolve(&v, 0.25, 0, 3).unwrap()
    }

    #[test]
    fn harmonic_oscillator_levels() {
        let pairs = harmonic(2000);
        for (j, p) in pairs.iter().enumerate() {
            let exact = 1.5 + 2.0 * j as f64;
            assert!((p.best_energy() - exact).abs() < 1e-6, "{j}: {}", p.best_energy());
            assert!((p.energy - exact).abs() < 1e-4);
            assert!((p.function.norm() - 1.0).abs() < 1e-12);
        }
        for a in 0..3 {
            for b in (a + 1)..3 {
                let o = pairs[a].function.inner(&pairs[b].function).unwrap();
                assert!(o.abs() < 1e-8, "overlap {a},{b}: {o}");
            }
        }
    }

    #[test]
    fn graded_grid_is_rejected() {
        let g = Arc::new(RadialGrid::new(10.0, 200, GridScheme::Graded).unwrap());
        let v = RadialFunction::from_fn(g, |r| r * r);
        assert!(matches!(radial_eigensolve(&v, 0.25, 0, 1), Err(Error::Config(_))));
    }

    #[test]
    fn p_wave_sector() {
        let g = Arc::new(RadialGrid::uniform(10.0, 2000).unwrap());
        let v = RadialFunction::from_fn(g, |r| r * r);
        let p = radial_eigensolve(&v, 0.25, 1, 1).unwrap();
        assert!((p[0].best_energy() - 2.5).abs() < 1e-6);
    }
}
