//! Monte Carlo estimates of the quartic traces `tr 𝔥 (αᾱ)²` of the trial
//! kernel.
//!
//! For `α = h⁻² ψ(η) α₀(ξ/h)` the four-cycle `∫ α(x₁,x₂)α(x₂,x₃)α(x₃,x₄)α(x₄,x₁)`
//! becomes, with `x_{k+1} − x_k = h ζ_k` and centre `X`,
//!
//! ```text
//! h ∫ dX dζ₁ dζ₂ dζ₃ ψ(X−hs) ψ(X−ht) ψ(X+hs) ψ(X+ht) α₀(ζ₁) α₀(ζ₂) α₀(ζ₃) α₀(ζ*)
//! ```
//!
//! with `s = ¼(ζ₁+2ζ₂+ζ₃)`, `t = ¼(ζ₃−ζ₁)`, `ζ* = −ζ₁−ζ₂−ζ₃`. The kinetic
//! trace replaces one `α₀` by `κ = (−Δ+E₀)α₀` and one `ψ` by `−¼h²Δψ`; the
//! trap trace inserts `h² W(x₁)`. Both insertions are averaged over the four
//! equivalent slots.
//!
//! `X` is drawn from a shell-wise constant approximation of `ψ⁴` and each
//! `ζ_k` from one of `|α₀|`; within a shell the radius is drawn exactly
//! proportional to `r²`, so the proposal density is known in closed form and
//! the estimator is unbiased. The leading-order integrands with `ψ(X)⁴` in
//! place of the four-point product have known means and serve as control
//! variates.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PairKernel;
use crate::model::PhysicsModel;
use crate::{Error, Exec, Result};

/// Fewest samples accepted by the estimator.
pub const MIN_SAMPLES: u64 = 100_000;

/// Relative standard error above which an estimate is flagged.
pub const VARIANCE_WARNING: f64 = 0.05;

/// Relative density floor keeping the proposal positive on the whole
/// support of the integrand.
const DENSITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Samples per independently seeded block.
    pub block: u64,
    pub control_variates: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 2_000_000,
            seed: 20240229,
            block: 65_536,
            control_variates: true,
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
}

impl McEstimate {
    pub fn exact(mean: f64) -> Self {
        Self { mean, stderr: 0.0 }
    }

    pub fn relative_error(&self) -> f64 {
        if self.mean == 0.0 {
            if self.stderr == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.stderr / self.mean.abs()
        }
    }

    /// `a·self + b` with the error scaled accordingly.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        Self {
            mean: a * self.mean + b,
            stderr: a.abs() * self.stderr,
        }
    }
}

/// The quartic traces of a trial kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarticTraces {
    /// `tr (αᾱ)²`.
    pub plain: McEstimate,
    /// `tr (−h²Δ + E₀)(αᾱ)²`.
    pub shifted: McEstimate,
    /// `tr h²W (αᾱ)²`.
    pub trap: McEstimate,
    /// `tr 𝔥 (αᾱ)²` with `𝔥 = −h²Δ + h²W − μ`, `μ = −E₀ + Dh²`.
    pub hbar: McEstimate,
    pub samples: u64,
    pub warnings: Vec<String>,
}

impl QuarticTraces {
    fn zero(samples: u64) -> Self {
        Self {
            plain: McEstimate::exact(0.0),
            shifted: McEstimate::exact(0.0),
            trap: McEstimate::exact(0.0),
            hbar: McEstimate::exact(0.0),
            samples,
            warnings: Vec::new(),
        }
    }
}

/// Radial proposal: shells `[r_{i−1}, r_i]` with probability proportional to
/// the shell volume times the mean of the target at its ends.
#[derive(Debug, Clone)]
struct ShellSampler {
    edges: Vec<f64>,
    cdf: Vec<f64>,
    density: Vec<f64>,
}

impl ShellSampler {
    fn new(nodes: &[f64], target: &[f64]) -> Result<Self> {
        let top = target.iter().fold(0.0f64, |m, v| m.max(*v));
        if !(top > 0.0) {
            return Err(Error::Domain("proposal target vanishes".into()));
        }
        let floor = DENSITY_FLOOR * top;
        let mut edges = Vec::with_capacity(nodes.len() + 1);
        edges.push(0.0);
        edges.extend_from_slice(nodes);
        let mut mass = Vec::with_capacity(nodes.len());
        let mut vol = Vec::with_capacity(nodes.len());
        for i in 0..nodes.len() {
            let (a, b) = (edges[i], edges[i + 1]);
            let left = if i == 0 { target[0] } else { target[i - 1] };
            let v = 4.0 * PI / 3.0 * (b.powi(3) - a.powi(3));
            vol.push(v);
            mass.push(v * (0.5 * (left + target[i])).max(floor));
        }
        let total: f64 = mass.iter().sum();
        let mut acc = 0.0;
        let cdf = mass
            .iter()
            .map(|m| {
                acc += m / total;
                acc
            })
            .collect();
        let density = mass.iter().zip(&vol).map(|(m, v)| m / total / v).collect();
        Ok(Self { edges, cdf, density })
    }

    /// A point drawn from the proposal and its density.
    fn sample<R: Rng>(&self, rng: &mut R) -> ([f64; 3], f64) {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        let (a, b) = (self.edges[i], self.edges[i + 1]);
        let (a3, b3) = (a.powi(3), b.powi(3));
        let v: f64 = rng.random();
        let r = (a3 + v * (b3 - a3)).cbrt();
        let z = 2.0 * rng.random::<f64>() - 1.0;
        let phi = 2.0 * PI * rng.random::<f64>();
        let s = (1.0 - z * z).max(0.0).sqrt();
        ([r * s * phi.cos(), r * s * phi.sin(), r * z], self.density[i])
    }
}

#[inline]
fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
fn axpy(x: [f64; 3], a: f64, y: [f64; 3]) -> [f64; 3] {
    [x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]]
}

/// Streaming mean and second central moment of a fixed number of channels.
#[derive(Debug, Clone, Copy)]
struct Moments<const N: usize> {
    n: f64,
    mean: [f64; N],
    m2: [f64; N],
}

impl<const N: usize> Moments<N> {
    fn new() -> Self {
        Self {
            n: 0.0,
            mean: [0.0; N],
            m2: [0.0; N],
        }
    }

    fn push(&mut self, x: [f64; N]) {
        self.n += 1.0;
        for k in 0..N {
            let d = x[k] - self.mean[k];
            self.mean[k] += d / self.n;
            self.m2[k] += d * (x[k] - self.mean[k]);
        }
    }

    /// Pairwise combination of two sample sets.
    fn merge(&mut self, o: &Self) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        for k in 0..N {
            let d = o.mean[k] - self.mean[k];
            self.mean[k] += d * o.n / n;
            self.m2[k] += o.m2[k] + d * d * self.n * o.n / n;
        }
        self.n = n;
    }

    fn estimate(&self, k: usize) -> McEstimate {
        let var = if self.n > 1.0 { self.m2[k] / (self.n - 1.0) } else { 0.0 };
        McEstimate {
            mean: self.mean[k],
            stderr: (var / self.n).sqrt(),
        }
    }
}

/// Deterministic integrals of the control variates.
struct ControlMeans {
    plain: f64,
    shifted: f64,
    trap: f64,
}

/// `tr (αᾱ)²`, `tr (−h²Δ+E₀)(αᾱ)²`, `tr h²W(αᾱ)²` and `tr 𝔥(αᾱ)²` of the trial
/// kernel by importance sampling over `(X, ζ₁, ζ₂, ζ₃)`.
///
/// Blocks of `config.block` samples use the ChaCha8 stream of their index
/// under `config.seed` and are merged in block order, so the result does not
/// depend on the execution policy.
pub fn quartic_trace_mc(kernel: &PairKernel, model: &PhysicsModel, config: &McConfig, exec: Exec) -> Result<QuarticTraces> {
    if config.samples < MIN_SAMPLES {
        return Err(Error::Config(format!(
            "quartic traces need at least {MIN_SAMPLES} samples, got {}",
            config.samples
        )));
    }
    if config.block == 0 {
        return Err(Error::Config("Monte Carlo block size must be positive".into()));
    }
    if kernel.remainder.is_some() {
        return Err(Error::Config("quartic traces are implemented for the trial kernel only".into()));
    }
    if kernel.psi.max_abs() == 0.0 {
        return Ok(QuarticTraces::zero(config.samples));
    }
    let h = kernel.h;
    let psi = &kernel.psi;
    let lap = psi.laplacian()?;
    let alpha = &kernel.profile.alpha0;
    let kappa = &kernel.profile.kinetic;
    let trap = &model.trap;
    let d = model.d;

    let psi4: Vec<f64> = psi.values().iter().map(|v| v.powi(4)).collect();
    let x_prop = ShellSampler::new(psi.grid().nodes(), &psi4)?;
    let a_abs: Vec<f64> = alpha.values().iter().map(|v| v.abs()).collect();
    let z_prop = ShellSampler::new(alpha.grid().nodes(), &a_abs)?;

    let n4 = psi.lp_norm_pow(4.0);
    let nw4 = 4.0 * PI * psi.grid().integrate(|r| trap.eval(r) * psi.eval(r).powi(4));
    let cv = ControlMeans {
        plain: h * n4 * kernel.profile.g_quartic,
        shifted: h * n4 * kernel.profile.g_kinetic,
        trap: h.powi(3) * nw4 * kernel.profile.g_quartic,
    };
    let use_cv = if config.control_variates { 1.0 } else { 0.0 };

    let n_blocks = config.samples.div_ceil(config.block);
    let blocks = exec.map_range(n_blocks as usize, |b| {
        let b = b as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(b);
        let count = config.block.min(config.samples - b * config.block);
        let mut mom = Moments::<4>::new();
        for _ in 0..count {
            let (x, qx) = x_prop.sample(&mut rng);
            let (z1, q1) = z_prop.sample(&mut rng);
            let (z2, q2) = z_prop.sample(&mut rng);
            let (z3, q3) = z_prop.sample(&mut rng);
            let q = qx * q1 * q2 * q3;
            let zs = [-(z1[0] + z2[0] + z3[0]), -(z1[1] + z2[1] + z3[1]), -(z1[2] + z2[2] + z3[2])];
            let s = [
                0.25 * (z1[0] + 2.0 * z2[0] + z3[0]),
                0.25 * (z1[1] + 2.0 * z2[1] + z3[1]),
                0.25 * (z1[2] + 2.0 * z2[2] + z3[2]),
            ];
            let t = [0.25 * (z3[0] - z1[0]), 0.25 * (z3[1] - z1[1]), 0.25 * (z3[2] - z1[2])];
            let p = [
                norm(axpy(x, -h, s)),
                norm(axpy(x, -h, t)),
                norm(axpy(x, h, s)),
                norm(axpy(x, h, t)),
            ];
            let pv = p.map(|r| psi.eval(r));
            let lv = p.map(|r| lap.eval(r));
            let rz = [norm(z1), norm(z2), norm(z3), norm(zs)];
            let av = rz.map(|r| alpha.eval(r));
            let kv = rz.map(|r| kappa.eval(r));

            let big_psi = pv[0] * pv[1] * pv[2] * pv[3];
            let lap_psi = 0.25
                * (lv[0] * pv[1] * pv[2] * pv[3]
                    + pv[0] * lv[1] * pv[2] * pv[3]
                    + pv[0] * pv[1] * lv[2] * pv[3]
                    + pv[0] * pv[1] * pv[2] * lv[3]);
            let z0 = av[0] * av[1] * av[2] * av[3];
            let zk = 0.25
                * (kv[0] * av[1] * av[2] * av[3]
                    + av[0] * kv[1] * av[2] * av[3]
                    + av[0] * av[1] * kv[2] * av[3]
                    + av[0] * av[1] * av[2] * kv[3]);
            // Cycle points x₁..x₄ for the trap insertion.
            let x1 = [
                x[0] - 0.25 * h * (3.0 * z1[0] + 2.0 * z2[0] + z3[0]),
                x[1] - 0.25 * h * (3.0 * z1[1] + 2.0 * z2[1] + z3[1]),
                x[2] - 0.25 * h * (3.0 * z1[2] + 2.0 * z2[2] + z3[2]),
            ];
            let x2 = axpy(x1, h, z1);
            let x3 = axpy(x2, h, z2);
            let x4 = axpy(x3, h, z3);
            let wbar = 0.25 * (trap.eval(norm(x1)) + trap.eval(norm(x2)) + trap.eval(norm(x3)) + trap.eval(norm(x4)));

            let rx = norm(x);
            let lead = use_cv * psi.eval(rx).powi(4);
            let w_lead = lead * trap.eval(rx);
            let inv = 1.0 / q;
            let plain = h * (big_psi - lead) * z0 * inv + use_cv * cv.plain;
            let shifted = h * ((big_psi - lead) * zk - 0.25 * h * h * lap_psi * z0) * inv + use_cv * cv.shifted;
            let trap_v = h.powi(3) * (big_psi * wbar - w_lead) * z0 * inv + use_cv * cv.trap;
            let hbar = shifted + trap_v - d * h * h * plain;
            mom.push([plain, shifted, trap_v, hbar]);
        }
        mom
    });
    let mut total = Moments::<4>::new();
    for b in &blocks {
        total.merge(b);
    }
    let mut out = QuarticTraces {
        plain: total.estimate(0),
        shifted: total.estimate(1),
        trap: total.estimate(2),
        hbar: total.estimate(3),
        samples: config.samples,
        warnings: Vec::new(),
    };
    for (name, e) in [
        ("tr (αᾱ)²", out.plain),
        ("tr (−h²Δ+E₀)(αᾱ)²", out.shifted),
        ("tr 𝔥(αᾱ)²", out.hbar),
    ] {
        if e.relative_error() > VARIANCE_WARNING {
            let msg = format!("{name}: relative standard error {:.3} exceeds {VARIANCE_WARNING}", e.relative_error());
            log::warn!("{msg}");
            out.warnings.push(msg);
        }
    }
    Ok(out)
}

