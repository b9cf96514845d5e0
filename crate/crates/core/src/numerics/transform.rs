use std::f64::consts::PI;
use std::sync::Arc;

use super::function::RadialFunction;
use super::grid::{GridScheme, RadialGrid};

/// Precondition threshold on `|f(r_max)| / max|f|`.
pub const TAIL_THRESHOLD: f64 = 1e-8;

/// Result of [`radial_fourier`].
#[derive(Debug, Clone)]
pub struct FourierTransform {
    pub function: RadialFunction,
    /// Tail ratio of the input when it exceeded [`TAIL_THRESHOLD`].
    pub tail_warning: Option<f64>,
}

/// Unitary 3D Fourier transform of a radial function,
/// `f̂(p) = (2/π)^{1/2} p^{-1} ∫₀^∞ r sin(pr) f(r) dr`, sampled on `p_grid`.
///
/// On a uniform input grid the trapezoid rule is used; together with the
/// conjugate momentum grid (`p_k = kπ/r_max`) this is an orthogonal discrete
/// sine transform, so Plancherel holds to rounding error. Since the transform
/// of a real radial function is real and even, it is its own inverse.
pub fn radial_fourier(f: &RadialFunction, p_grid: &Arc<RadialGrid>) -> FourierTransform {
    let tail = f.tail_ratio();
    let tail_warning = if tail > TAIL_THRESHOLD {
        log::warn!("radial Fourier transform: input tail ratio {tail:.2e} exceeds {TAIL_THRESHOLD:.0e}");
        Some(tail)
    } else {
        None
    };
    let grid = f.grid();
    let r = grid.nodes();
    // weights for ∫ g(r) dr
    let q: Vec<f64> = match grid.scheme() {
        GridScheme::Uniform => {
            let dr = grid.spacing().unwrap_or(0.0);
            let mut q = vec![dr; r.len()];
            if let Some(last) = q.last_mut() {
                *last = 0.5 * dr;
            }
            q
        }
        GridScheme::Graded => grid.weights().iter().zip(r).map(|(w, r)| w / (r * r)).collect(),
    };
    let wu: Vec<f64> = q.iter().zip(r).zip(f.values()).map(|((q, r), f)| q * r * f).collect();
    let r_max = grid.r_max();
    let c = (2.0 / PI).sqrt();
    let values = p_grid
        .nodes()
        .iter()
        .map(|&p| {
            if p * r_max < 1e-2 {
                // sin(pr)/p = r(1 − (pr)²/6 + (pr)⁴/120) + O((pr)^7)
                c * wu
                    .iter()
                    .zip(r)
                    .map(|(wu, r)| {
                        let x2 = (p * r).powi(2);
                        wu * r * (1.0 - x2 / 6.0 + x2 * x2 / 120.0)
                    })
                    .sum::<f64>()
            } else {
                c / p * wu.iter().zip(r).map(|(wu, r)| wu * (p * r).sin()).sum::<f64>()
            }
        })
        .collect();
    FourierTransform {
        function: RadialFunction::new(p_grid.clone(), values).expect("one value per momentum node"),
        tail_warning,
    }
}

/// `f̂(0) = (2/π)^{1/2} ∫₀^∞ r² f(r) dr`.
pub fn radial_fourier_at_zero(f: &RadialFunction) -> f64 {
    (2.0 / PI).sqrt() * f.grid().integrate_values(f.values())
}
