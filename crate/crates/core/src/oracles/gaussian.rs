use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::gaussian_g_bcs;
use crate::model::Trap;
use crate::{Error, Result};

/// All-Gaussian trial configuration: `ψ = s (2a/π)^{3/4} e^{−a r²}`,
/// `α₀ = (2c/π)^{3/4} e^{−c r²}`, `W = b|x|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianCase {
    /// `a`.
    pub psi_width: f64,
    /// `s = ‖ψ‖₂`.
    pub psi_scale: f64,
    /// `c`.
    pub alpha_width: f64,
    pub h: f64,
    /// `b`.
    pub trap: f64,
    pub e0: f64,
    pub d: f64,
}

/// Quantity selected from a [`GaussianCase`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianPiece {
    /// `‖α_ψ‖²_{S²}`.
    HsNorm,
    /// `s₁ = ‖α_ψ‖_{S^∞}`.
    TopSingular,
    /// `‖α_ψ‖ⁿ_{Sⁿ}`.
    Schatten(u32),
    /// `h∫W|ψ|² + (h³/4) b ‖ψ‖₂² ‖|·|α₀‖₂²`.
    WTerm,
    /// `‖ψ‖₄⁴`.
    PsiL4,
    /// `g_BCS` of `α₀`.
    GBcs,
    /// `tr (αᾱ)²`.
    QuarticPlain,
    /// `tr (−h²Δ + E₀)(αᾱ)²`.
    QuarticShifted,
    /// `tr h²W (αᾱ)²`.
    QuarticTrap,
    /// `tr (−h²Δ + E₀ + h²(W − D))(αᾱ)²`.
    QuarticHbar,
}

impl GaussianCase {
    /// Coefficient `b` of a harmonic trap; other traps have no Gaussian oracle.
    pub fn trap_coefficient(trap: &Trap) -> Result<f64> {
        trap.as_harmonic()
            .ok_or_else(|| Error::Domain(format!("no Gaussian oracle for the trap {trap:?}")))
    }

    fn validate(&self) -> Result<()> {
        let pos = [self.psi_width, self.alpha_width, self.trap];
        if pos.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::Domain(format!("Gaussian widths and trap must be positive: {self:?}")));
        }
        if !(self.psi_scale >= 0.0) || !(self.h > 0.0 && self.h < 1.0) || !self.e0.is_finite() || !self.d.is_finite() {
            return Err(Error::Domain(format!("invalid Gaussian case {self:?}")));
        }
        Ok(())
    }

    fn amp(w: f64) -> f64 {
        (2.0 * w / PI).powf(0.75)
    }

    /// `(μ₀, r)`: the singular values of `α_ψ` are `s μ₀ r^{n₁+n₂+n₃}`.
    fn mehler(&self) -> (f64, f64) {
        let (a, c, h) = (self.psi_width, self.alpha_width, self.h);
        let amp = Self::amp(a) * Self::amp(c);
        let p = a / 4.0 + c / (h * h);
        let q = c / (h * h) - a / 4.0;
        let rho = (p * p - q * q).sqrt();
        (amp / (h * h) * (PI / (p + rho)).powf(1.5), q / (p + rho))
    }

    /// Quartic traces at `s = 1`, `b = 1`:
    /// `(tr(αᾱ)², tr(−h²Δ+E₀)(αᾱ)², tr h²|x|²(αᾱ)²)`.
    ///
    /// In the centre-of-mass variables of the four kernels the integrand is a
    /// Gaussian whose relative part couples three displacement vectors
    /// through the 3×3 matrix `M`; the traces are its moments.
    fn quartic_unit(&self) -> (f64, f64, f64) {
        let (a, c, h, e0) = (self.psi_width, self.alpha_width, self.h, self.e0);
        let u = [0.25, 0.5, 0.25];
        let v = [-0.25, 0.0, 0.25];
        let w = [0.75, 0.5, 0.25];
        let mut m = Matrix3::<f64>::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let diag = if i == j { 2.0 } else { 1.0 };
                m[(i, j)] = 2.0 * a * h * h * (u[i] * u[j] + v[i] * v[j]) + c * diag;
            }
        }
        let mi = m.try_inverse().expect("M is positive definite");
        let quad = |x: [f64; 3]| {
            let x = Vector3::from(x);
            (x.transpose() * mi * x)[0]
        };
        let i1d = PI.powf(1.5) / m.determinant().sqrt();
        let base = h * Self::amp(a).powi(4) * Self::amp(c).powi(4) * (PI / (4.0 * a)).powf(1.5) * i1d.powi(3);
        let rel = base * (6.0 * c + e0 - 6.0 * c * c * mi[(0, 0)]);
        let com = -0.25 * h * h * base * (12.0 * a * a * (1.0 / (8.0 * a) + 0.5 * h * h * quad(u)) - 6.0 * a);
        let trap = 3.0 * h * h * base * (1.0 / (8.0 * a) + 0.5 * h * h * quad(w));
        (base, rel + com, trap)
    }
}

/// Exact value of one quantity of an all-Gaussian configuration.
pub fn gaussian_calculus_oracle(case: &GaussianCase, piece: GaussianPiece) -> Result<f64> {
    case.validate()?;
    let GaussianCase {
        psi_width: a,
        psi_scale: s,
        alpha_width: c,
        h,
        trap: b,
        e0,
        d,
    } = *case;
    let s2 = s * s;
    let s4 = s2 * s2;
    Ok(match piece {
        GaussianPiece::HsNorm => s2 / h,
        GaussianPiece::TopSingular => s * case.mehler().0,
        GaussianPiece::Schatten(n) => {
            if n == 0 {
                return Err(Error::Domain("Schatten order must be positive".into()));
            }
            let (mu0, r) = case.mehler();
            let n = n as i32;
            (s * mu0).powi(n) / (1.0 - r.abs().powi(n)).powi(3)
        }
        GaussianPiece::WTerm => b * s2 * (h * 3.0 / (4.0 * a) + h.powi(3) / 4.0 * 3.0 / (4.0 * c)),
        GaussianPiece::PsiL4 => s4 * (2.0 * a / PI).powi(3) * (PI / (4.0 * a)).powf(1.5),
        GaussianPiece::GBcs => gaussian_g_bcs(1.0 / (4.0 * c), e0),
        GaussianPiece::QuarticPlain => s4 * case.quartic_unit().0,
        GaussianPiece::QuarticShifted => s4 * case.quartic_unit().1,
        GaussianPiece::QuarticTrap => s4 * b * case.quartic_unit().2,
        GaussianPiece::QuarticHbar => {
            let (plain, shifted, trap) = case.quartic_unit();
            s4 * (shifted + b * trap - h * h * d * plain)
        }
    })
}
