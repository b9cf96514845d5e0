use std::sync::Arc;

use super::PairProfile;
use crate::model::check_h;
use crate::numerics::RadialFunction;
use crate::{Error, Result};

/// Minimum number of relative-grid spacings per `h` before `α₀(·/h)` is
/// considered resolved.
const RESOLUTION_FACTOR: f64 = 4.0;

/// Separable perturbation `χ(η) ρ(ξ/h)` added to the trial kernel.
#[derive(Debug, Clone)]
pub struct Remainder {
    /// Centre-of-mass factor, on the grid of `ψ`.
    pub chi: RadialFunction,
    /// Relative factor, on the grid of `α₀`.
    pub rho: RadialFunction,
}

impl Remainder {
    /// Remainder with `ρ` projected onto the orthogonal complement of `α₀`.
    pub fn orthogonal(chi: RadialFunction, rho: &RadialFunction, profile: &PairProfile) -> Result<Self> {
        let a = &profile.alpha0;
        let c = rho.inner(a)? / a.norm_sq();
        Ok(Self {
            chi,
            rho: rho.add(&a.scaled(-c))?,
        })
    }
}

/// `α(x, y) = h⁻² ψ((x+y)/2) α₀((x−y)/h) + χ((x+y)/2) ρ((x−y)/h)` for radial
/// `ψ`, `α₀`, `χ`, `ρ`.
#[derive(Debug, Clone)]
pub struct PairKernel {
    pub h: f64,
    pub psi: RadialFunction,
    pub profile: Arc<PairProfile>,
    pub remainder: Option<Remainder>,
    pub warnings: Vec<String>,
}

/// The trial kernel `α_ψ` of a centre-of-mass field `ψ`.
pub fn build_pair_kernel(psi: &RadialFunction, profile: &Arc<PairProfile>, h: f64) -> Result<PairKernel> {
    check_h(h)?;
    if psi.grid().spacing().is_none() {
        return Err(Error::Config("ψ must live on a uniform grid".into()));
    }
    let mut warnings = Vec::new();
    let dr = profile.grid().max_spacing();
    if h < RESOLUTION_FACTOR * dr {
        let msg = format!("h = {h} is below {RESOLUTION_FACTOR}·(relative grid spacing {dr:.3e}); α₀(·/h) is unresolved");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    if psi.tail_ratio() > crate::gp::TAIL_LIMIT {
        let msg = format!("ψ not decayed at r_max (tail ratio {:.2e})", psi.tail_ratio());
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(PairKernel {
        h,
        psi: psi.clone(),
        profile: profile.clone(),
        remainder: None,
        warnings,
    })
}

impl PairKernel {
    pub fn with_remainder(mut self, remainder: Remainder) -> Result<Self> {
        if !remainder.chi.grid().same_as(self.psi.grid()) {
            return Err(Error::Config("χ must share the grid of ψ".into()));
        }
        if !remainder.rho.grid().same_as(self.profile.grid()) {
            return Err(Error::Config("ρ must share the grid of α₀".into()));
        }
        self.remainder = Some(remainder);
        Ok(self)
    }

    /// Separable terms `(a_k(η), b_k(ζ))` with `α = Σ a_k(η) b_k(ξ/h)`.
    pub fn terms(&self) -> Vec<(RadialFunction, RadialFunction)> {
        let mut t = vec![(self.psi.scaled(self.h.powi(-2)), self.profile.alpha0.clone())];
        if let Some(r) = &self.remainder {
            t.push((r.chi.clone(), r.rho.clone()));
        }
        t
    }

    /// Value at radial centre-of-mass and relative distances.
    pub fn eval_com(&self, eta: f64, xi: f64) -> f64 {
        let z = xi / self.h;
        let mut v = self.psi.eval(eta) * self.profile.alpha0.eval(z) / (self.h * self.h);
        if let Some(r) = &self.remainder {
            v += r.chi.eval(eta) * r.rho.eval(z);
        }
        v
    }

    /// `α(x, y)` at arbitrary points.
    pub fn eval(&self, x: [f64; 3], y: [f64; 3]) -> f64 {
        let mut eta = 0.0;
        let mut xi = 0.0;
        for k in 0..3 {
            eta += (0.5 * (x[k] + y[k])).powi(2);
            xi += (x[k] - y[k]).powi(2);
        }
        self.eval_com(eta.sqrt(), xi.sqrt())
    }

    /// `‖α‖²_{S²}`.
    pub fn hs_norm_sq(&self) -> Result<f64> {
        separable_norm_sq(&self.terms(), self.h)
    }

    /// Whether every value of the kernel is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        let nonneg = |f: &RadialFunction| f.values().iter().all(|&v| v >= 0.0);
        nonneg(&self.psi) && self.profile.is_nonnegative() && self.remainder.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.psi.max_abs() == 0.0
            && self
                .remainder
                .as_ref()
                .is_none_or(|r| r.chi.max_abs() == 0.0 || r.rho.max_abs() == 0.0)
    }

    /// Radius outside of which `α(x, ·)` vanishes.
    pub fn radius(&self) -> f64 {
        let mut eta = self.psi.support_radius(1e-12);
        let mut zeta = self.profile.support;
        if let Some(r) = &self.remainder {
            eta = eta.max(r.chi.support_radius(1e-12));
            zeta = zeta.max(r.rho.support_radius(1e-12));
        }
        eta + 0.5 * self.h * zeta
    }

    /// Largest relative distance `|x − y|` with nonzero kernel.
    pub fn xi_cut(&self) -> f64 {
        let mut zeta = self.profile.support;
        if let Some(r) = &self.remainder {
            zeta = zeta.max(r.rho.support_radius(1e-12));
        }
        self.h * zeta
    }

    /// Same kernel with `ψ` replaced.
    pub fn with_psi(&self, psi: &RadialFunction) -> Result<Self> {
        let mut k = build_pair_kernel(psi, &self.profile, self.h)?;
        k.remainder = self.remainder.clone();
        Ok(k)
    }
}

/// `‖Σ a_k(η) b_k(ξ/h)‖²_{S²} = Σ_kl ⟨a_k, a_l⟩ · h³ ⟨b_k, b_l⟩`.
pub fn separable_norm_sq(terms: &[(RadialFunction, RadialFunction)], h: f64) -> Result<f64> {
    let h3 = h.powi(3);
    let mut s = 0.0;
    for (ak, bk) in terms {
        for (al, bl) in terms {
            s += ak.inner(al)? * h3 * bk.inner(bl)?;
        }
    }
    Ok(s)
}
