//! Singular values of rotation-invariant kernels by partial-wave Nyström
//! discretization.
//!
//! A kernel `K(x, y)` depending only on `|x|`, `|y|` and `x̂·ŷ` splits into
//! angular-momentum sectors `K_ℓ(r, r') = 2π ∫ K P_ℓ(cos θ) d cos θ`; the
//! 3D operator has the singular values of each sector operator
//! `f ↦ ∫ K_ℓ(·, r') f(r') r'² dr'` with multiplicity `2ℓ + 1`. Sector
//! operators are sampled on a midpoint grid, which integrates the smooth,
//! even-in-`r` sector integrands spectrally.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::PairKernel;
use crate::numerics::quadrature::{gauss_legendre, legendre_all};
use crate::numerics::RadialFunction;
use crate::{Error, Exec, Result};

/// A radial kernel resolved into angular-momentum sectors.
pub trait SectorKernel: Sync {
    /// `K_ℓ(r, r')` for `ℓ = 0..=lmax`, written into `out[..=lmax]`.
    fn sectors(&self, r: f64, rp: f64, lmax: usize, out: &mut [f64]);
    /// Radius outside of which the kernel vanishes.
    fn radius(&self) -> f64;
    /// Smallest length scale on which the kernel varies.
    fn scale(&self) -> f64;
    fn is_symmetric(&self) -> bool;
    /// Nonnegative kernels attain `s₁` in the `ℓ = 0` sector.
    fn is_nonnegative(&self) -> bool;
}

/// `u(|x|) v(|y|)`, a rank-one kernel living in the `ℓ = 0` sector.
#[derive(Debug, Clone)]
pub struct RankOneKernel {
    pub u: RadialFunction,
    pub v: RadialFunction,
}

impl SectorKernel for RankOneKernel {
    fn sectors(&self, r: f64, rp: f64, lmax: usize, out: &mut [f64]) {
        out[..=lmax].fill(0.0);
        out[0] = 4.0 * PI * self.u.eval(r) * self.v.eval(rp);
    }

    fn radius(&self) -> f64 {
        self.u.support_radius(1e-12).max(self.v.support_radius(1e-12))
    }

    fn scale(&self) -> f64 {
        self.u.grid().max_spacing().max(self.v.grid().max_spacing()) * 4.0
    }

    fn is_symmetric(&self) -> bool {
        self.u.values() == self.v.values() && self.u.grid().same_as(self.v.grid())
    }

    fn is_nonnegative(&self) -> bool {
        let a = self.u.values().iter().all(|&x| x >= 0.0) || self.u.values().iter().all(|&x| x <= 0.0);
        let b = self.v.values().iter().all(|&x| x >= 0.0) || self.v.values().iter().all(|&x| x <= 0.0);
        a && b
    }
}

fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(8))
}

/// Largest number of Gauss panels used for one `s`-integral.
const MAX_PANELS: usize = 256;

impl SectorKernel for PairKernel {
    fn sectors(&self, r: f64, rp: f64, lmax: usize, out: &mut [f64]) {
        out[..=lmax].fill(0.0);
        let lo = (r - rp).abs();
        let hi = (r + rp).min(self.xi_cut());
        if lo >= hi {
            return;
        }
        let rr = 2.0 * r * rp;
        let width = hi - lo;
        let dc = (hi * hi - lo * lo) / rr;
        let panels = ((width / (0.5 * self.h)).ceil() as usize)
            .max((lmax as f64 * dc / 6.0).ceil() as usize)
            .clamp(1, MAX_PANELS);
        let (x, w) = gl8();
        let pw = width / panels as f64;
        let mut p = vec![0.0; lmax + 1];
        let base = 2.0 * r * r + 2.0 * rp * rp;
        let remainder = self.remainder.as_ref();
        let h2 = 1.0 / (self.h * self.h);
        for k in 0..panels {
            let a = lo + k as f64 * pw;
            for (xi, wi) in x.iter().zip(w) {
                let s = a + 0.5 * pw * (xi + 1.0);
                let eta = 0.5 * (base - s * s).max(0.0).sqrt();
                let z = s / self.h;
                let mut val = h2 * self.psi.eval(eta) * self.profile.alpha0.eval(z);
                if let Some(rem) = remainder {
                    val += rem.chi.eval(eta) * rem.rho.eval(z);
                }
                if val == 0.0 {
                    continue;
                }
                let c = ((r * r + rp * rp - s * s) / rr).clamp(-1.0, 1.0);
                legendre_all(lmax, c, &mut p);
                let f = 0.5 * pw * wi * s * val;
                for (o, pl) in out.iter_mut().zip(&p) {
                    *o += f * pl;
                }
            }
        }
        let scale = 2.0 * PI / (r * rp);
        out[..=lmax].iter_mut().for_each(|o| *o *= scale);
    }

    fn radius(&self) -> f64 {
        PairKernel::radius(self)
    }

    fn scale(&self) -> f64 {
        self.h
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn is_nonnegative(&self) -> bool {
        PairKernel::is_nonnegative(self)
    }
}

/// Discretization and iteration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SectorConfig {
    /// Midpoint nodes per kernel length scale.
    pub points_per_scale: f64,
    pub max_points: usize,
    /// Highest sector, as a multiple of `radius / scale`.
    pub l_factor: f64,
    pub l_cap: usize,
    /// Relative residual `‖Bv − σ²v‖ / σ²` of the power iteration on `B = MᵀM`.
    pub power_tol: f64,
    pub power_max_iter: usize,
    /// Sectors inspected for `s₁` when the kernel has no sign.
    pub signed_sectors: usize,
}

impl Default for SectorConfig {
    fn default() -> Self {
        Self {
            points_per_scale: 8.0,
            max_points: 1200,
            l_factor: 3.0,
            l_cap: 300,
            power_tol: 1e-9,
            power_max_iter: 5000,
            signed_sectors: 4,
        }
    }
}

/// Midpoint nodes `(i − ½)Δ` covering the kernel support and their weights
/// `r² Δ`.
#[derive(Debug, Clone)]
pub struct SectorGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub spacing: f64,
    pub warning: Option<String>,
}

impl SectorGrid {
    pub fn new(radius: f64, scale: f64, config: &SectorConfig) -> Result<Self> {
        if !(radius > 0.0 && scale > 0.0) {
            return Err(Error::Domain("kernel has empty support".into()));
        }
        let mut spacing = scale / config.points_per_scale;
        let mut m = (radius / spacing).ceil() as usize;
        let mut warning = None;
        if m > config.max_points {
            m = config.max_points;
            spacing = radius / m as f64;
            let msg = format!(
                "sector grid capped at {m} points: spacing {spacing:.3e} exceeds scale/{}",
                config.points_per_scale
            );
            log::warn!("{msg}");
            warning = Some(msg);
        }
        let m = m.max(8);
        let nodes: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * spacing).collect();
        let weights = nodes.iter().map(|r| r * r * spacing).collect();
        Ok(Self {
            nodes,
            weights,
            spacing,
            warning,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Sector samples `√w_i K_ℓ(r_i, r_j) √w_j` for `ℓ = 0..=lmax`, stored
/// row-major by node pair (upper triangle for symmetric kernels).
#[derive(Debug, Clone)]
pub struct SectorSamples {
    rows: Vec<Vec<f64>>,
    m: usize,
    lmax: usize,
    symmetric: bool,
}

impl SectorSamples {
    pub fn new<K: SectorKernel + ?Sized>(kernel: &K, grid: &SectorGrid, lmax: usize, exec: Exec) -> Self {
        let m = grid.len();
        let symmetric = kernel.is_symmetric();
        let rows = exec.map_range(m, |i| {
            let start = if symmetric { i } else { 0 };
            let mut row = vec![0.0; (m - start) * (lmax + 1)];
            let mut buf = vec![0.0; lmax + 1];
            for j in start..m {
                kernel.sectors(grid.nodes[i], grid.nodes[j], lmax, &mut buf);
                let f = (grid.weights[i] * grid.weights[j]).sqrt();
                let off = (j - start) * (lmax + 1);
                for (dst, v) in row[off..off + lmax + 1].iter_mut().zip(&buf) {
                    *dst = f * v;
                }
            }
            row
        });
        Self {
            rows,
            m,
            lmax,
            symmetric,
        }
    }

    pub fn l_max(&self) -> usize {
        self.lmax
    }

    /// Nyström matrix of sector `l`.
    pub fn matrix(&self, l: usize) -> DMatrix<f64> {
        assert!(l <= self.lmax, "sector {l} not sampled");
        let m = self.m;
        let stride = self.lmax + 1;
        let mut a = DMatrix::zeros(m, m);
        for (i, row) in self.rows.iter().enumerate() {
            let start = if self.symmetric { i } else { 0 };
            for j in start..m {
                let v = row[(j - start) * stride + l];
                a[(i, j)] = v;
                if self.symmetric {
                    a[(j, i)] = v;
                }
            }
        }
        a
    }

    /// Singular values of sector `l`, in no particular order.
    pub fn singular_values(&self, l: usize) -> Vec<f64> {
        let a = self.matrix(l);
        if self.symmetric {
            a.symmetric_eigenvalues().iter().map(|v| v.abs()).collect()
        } else {
            a.singular_values().iter().copied().collect()
        }
    }
}

/// Outcome of the power iteration for the largest singular value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopSingular {
    pub value: f64,
    /// Relative residual of the final iterate.
    pub residual: f64,
    pub iterations: usize,
    /// Sector attaining the maximum.
    pub sector: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl TopSingular {
    fn zero() -> Self {
        Self {
            value: 0.0,
            residual: 0.0,
            iterations: 0,
            sector: 0,
            converged: true,
            warnings: Vec::new(),
        }
    }
}

/// Largest singular value of a matrix by power iteration on `MᵀM`.
pub fn power_iteration(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> (f64, f64, usize, bool) {
    let n = m.ncols();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let bv = m.tr_mul(&(m * &v));
        let theta = v.dot(&bv);
        if theta <= 0.0 {
            return (0.0, 0.0, it, true);
        }
        residual = (&bv - &v * theta).norm() / theta;
        if residual <= tol {
            return (theta.sqrt(), residual, it, true);
        }
        v = &bv / bv.norm();
    }
    let theta = v.dot(&m.tr_mul(&(m * &v)));
    (theta.max(0.0).sqrt(), residual, max_iter, false)
}

/// `s₁ = ‖K‖_∞`, from the `ℓ = 0` sector for nonnegative kernels (Perron)
/// and from the first `signed_sectors + 1` sectors otherwise.
pub fn top_singular_value<K: SectorKernel + ?Sized>(
    kernel: &K,
    config: &SectorConfig,
    exec: Exec,
) -> Result<TopSingular> {
    let radius = kernel.radius();
    if radius <= 0.0 {
        return Ok(TopSingular::zero());
    }
    let grid = SectorGrid::new(radius, kernel.scale(), config)?;
    let lmax = if kernel.is_nonnegative() { 0 } else { config.signed_sectors };
    let samples = SectorSamples::new(kernel, &grid, lmax, exec);
    let mut best = TopSingular::zero();
    best.warnings.extend(grid.warning.clone());
    for l in 0..=lmax {
        let (s, res, it, ok) = power_iteration(&samples.matrix(l), config.power_tol, config.power_max_iter);
        if l == 0 || s > best.value {
            best.value = s;
            best.residual = res;
            best.iterations = it;
            best.sector = l;
            best.converged = ok;
        }
    }
    if !best.converged {
        let msg = format!(
            "power iteration stopped at {} iterations with residual {:.2e}",
            best.iterations, best.residual
        );
        log::warn!("{msg}");
        best.warnings.push(msg);
    }
    Ok(best)
}

/// `‖K‖ⁿ_{Sⁿ}` with its truncation bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchattenNorm {
    pub order: u32,
    /// `‖K‖ⁿ_{Sⁿ}` (the `n`-th power).
    pub value: f64,
    /// Bound on the contribution of unresolved sectors.
    pub tail_bound: f64,
    /// `‖K‖ⁿ_{Sⁿ} / (h^{n−3} ‖ψ‖ₙⁿ ‖α̂₀‖ₙⁿ)`.
    pub ratio: f64,
}

/// Schatten norms of the pair kernel and the sector data behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchattenReport {
    pub norms: Vec<SchattenNorm>,
    /// Highest sector resolved.
    pub l_max: usize,
    /// Fraction of `‖K‖²_{S²}` captured by the resolved sectors.
    pub hs_captured: f64,
    pub s1: f64,
    pub warnings: Vec<String>,
}

/// Schatten norms of even orders: `S²` exactly from the Gram identity,
/// higher orders from the sector spectra with the tail bounded by
/// `(missing S² mass) · s₁^{n−2}`.
pub fn schatten_norms(kernel: &PairKernel, orders: &[u32], config: &SectorConfig, exec: Exec) -> Result<SchattenReport> {
    if let Some(n) = orders.iter().find(|&&n| n < 2 || n % 2 == 1) {
        return Err(Error::Config(format!("Schatten order must be even and ≥ 2, got {n}")));
    }
    let h = kernel.h;
    let psi_hat_scale = |n: u32| {
        let nf = n as f64;
        let a_hat = kernel.profile.alpha0_hat.lp_norm_pow(nf);
        h.powf(nf - 3.0) * kernel.psi.lp_norm_pow(nf) * a_hat
    };
    let exact_s2 = kernel.hs_norm_sq()?;
    let mut warnings = kernel.warnings.clone();
    if kernel.is_zero() {
        let norms = orders
            .iter()
            .map(|&n| SchattenNorm {
                order: n,
                value: 0.0,
                tail_bound: 0.0,
                ratio: f64::NAN,
            })
            .collect();
        return Ok(SchattenReport {
            norms,
            l_max: 0,
            hs_captured: 1.0,
            s1: 0.0,
            warnings,
        });
    }
    let radius = SectorKernel::radius(kernel);
    let grid = SectorGrid::new(radius, h, config)?;
    warnings.extend(grid.warning.clone());
    let lmax = ((config.l_factor * radius / h).ceil() as usize + 10).min(config.l_cap);
    let samples = SectorSamples::new(kernel, &grid, lmax, exec);
    let spectra: Vec<Vec<f64>> = exec.map_range(lmax + 1, |l| samples.singular_values(l));
    let s1 = spectra.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let power_sum = |n: u32| -> f64 {
        spectra
            .iter()
            .enumerate()
            .map(|(l, s)| (2 * l + 1) as f64 * s.iter().map(|v| v.powi(n as i32)).sum::<f64>())
            .sum()
    };
    let captured = power_sum(2);
    let missing = (exact_s2 - captured).max(0.0);
    if missing > 1e-6 * exact_s2 {
        let msg = format!(
            "sectors up to l = {lmax} capture {:.6} of the Hilbert-Schmidt norm",
            captured / exact_s2
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let norms = orders
        .iter()
        .map(|&n| {
            let (value, tail_bound) = if n == 2 {
                (exact_s2, 0.0)
            } else {
                (power_sum(n), missing * s1.powi(n as i32 - 2))
            };
            SchattenNorm {
                order: n,
                value,
                tail_bound,
                ratio: value / psi_hat_scale(n),
            }
        })
        .collect();
    Ok(SchattenReport {
        norms,
        l_max: lmax,
        hs_captured: captured / exact_s2,
        s1,
        warnings,
    })
}
