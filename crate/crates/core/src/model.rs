//! Interaction `V`, trap `W` and the scale parameters `(h, D)`.
//!
//! The one-body operator `−h²Δ + h²W − μ` with `μ = −E₀ + D h²` is not stored
//! explicitly; it is assembled from this record and the two-body energy `E₀`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::numerics::{RadialFunction, RadialGrid};
use crate::{Error, Result};

/// Depth of the default Gaussian well `−V₀ e^{−r²}`; gives `E₀ = 1` with a
/// single bound state (reproduced by `twobody::tune_gaussian_depth`).
pub const DEFAULT_GAUSSIAN_DEPTH: f64 = 6.6784478435664845;

/// Radial two-body interaction in microscopic units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Interaction {
    /// `−V₀ 1{r < a}`.
    SphericalWell { depth: f64, radius: f64 },
    /// `−V₀ e^{−r²/w²}`.
    GaussianWell { depth: f64, width: f64 },
    /// Piecewise-linear table, zero beyond the last node.
    Tabulated { r: Vec<f64>, v: Vec<f64> },
}

impl Default for Interaction {
    fn default() -> Self {
        Interaction::GaussianWell {
            depth: DEFAULT_GAUSSIAN_DEPTH,
            width: 1.0,
        }
    }
}

impl Interaction {
    pub fn validate(&self) -> Result<()> {
        match self {
            Interaction::SphericalWell { depth, radius } => {
                positive("spherical-well depth", *depth)?;
                positive("spherical-well radius", *radius)
            }
            Interaction::GaussianWell { depth, width } => {
                positive("gaussian-well depth", *depth)?;
                positive("gaussian-well width", *width)
            }
            Interaction::Tabulated { r, v } => validate_table("interaction", r, v),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Interaction::SphericalWell { depth, radius } => {
                if r < *radius {
                    -depth
                } else {
                    0.0
                }
            }
            Interaction::GaussianWell { depth, width } => -depth * (-(r / width).powi(2)).exp(),
            Interaction::Tabulated { r: rs, v } => interpolate(rs, v, r, 0.0),
        }
    }

    /// Samples on the grid; a node sitting on the spherical-well edge takes
    /// the mean of the two one-sided values.
    pub fn sample(&self, grid: &Arc<RadialGrid>) -> RadialFunction {
        match self {
            Interaction::SphericalWell { depth, radius } => {
                let tol = 1e-12 * radius;
                RadialFunction::from_fn(grid.clone(), |r| {
                    if (r - radius).abs() <= tol {
                        -0.5 * depth
                    } else {
                        self.eval(r)
                    }
                })
            }
            _ => RadialFunction::from_fn(grid.clone(), |r| self.eval(r)),
        }
    }

    /// Length over which `V` varies; used for resolution checks.
    pub fn length_scale(&self) -> f64 {
        match self {
            Interaction::SphericalWell { radius, .. } => *radius,
            Interaction::GaussianWell { width, .. } => *width,
            Interaction::Tabulated { r, .. } => r.last().copied().unwrap_or(1.0),
        }
    }

    pub fn min_value(&self) -> f64 {
        match self {
            Interaction::SphericalWell { depth, .. } | Interaction::GaussianWell { depth, .. } => -depth,
            Interaction::Tabulated { v, .. } => v.iter().copied().fold(0.0, f64::min),
        }
    }
}

/// Radial trap potential in macroscopic units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Trap {
    /// `c r²`.
    Harmonic { coefficient: f64 },
    /// `c₁ (1 + r²)^{β/2}`, bounded by `c₁ r^β ≤ W ≤ c₂ r^β` for `r ≥ 1`.
    Power { beta: f64, c1: f64, c2: f64 },
    /// Piecewise-linear table, constant beyond the last node.
    Tabulated { r: Vec<f64>, w: Vec<f64>, beta: f64 },
}

impl Default for Trap {
    fn default() -> Self {
        Trap::Harmonic { coefficient: 1.0 }
    }
}

impl Trap {
    pub fn validate(&self) -> Result<()> {
        match self {
            Trap::Harmonic { coefficient } => positive("harmonic coefficient", *coefficient),
            Trap::Power { beta, c1, c2 } => {
                positive("trap exponent beta", *beta)?;
                positive("trap constant c1", *c1)?;
                let needed = c1 * 2f64.powf(beta / 2.0);
                if *c2 < needed {
                    return Err(Error::Config(format!(
                        "trap constant c2 = {c2} is below c1·2^(β/2) = {needed}"
                    )));
                }
                Ok(())
            }
            Trap::Tabulated { r, w, beta } => {
                validate_table("trap", r, w)?;
                positive("trap exponent beta", *beta)?;
                if w.iter().any(|&x| x <= 0.0) {
                    return Err(Error::Config("tabulated trap must be positive".into()));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Trap::Harmonic { coefficient } => coefficient * r * r,
            Trap::Power { beta, c1, .. } => c1 * (1.0 + r * r).powf(beta / 2.0),
            Trap::Tabulated { r: rs, w, .. } => {
                interpolate(rs, w, r, w.last().copied().unwrap_or(0.0))
            }
        }
    }

    pub fn sample(&self, grid: &Arc<RadialGrid>) -> RadialFunction {
        RadialFunction::from_fn(grid.clone(), |r| self.eval(r))
    }

    /// Growth exponent `β`.
    pub fn beta(&self) -> f64 {
        match self {
            Trap::Harmonic { .. } => 2.0,
            Trap::Power { beta, .. } | Trap::Tabulated { beta, .. } => *beta,
        }
    }

    pub fn as_harmonic(&self) -> Option<f64> {
        match self {
            Trap::Harmonic { coefficient } => Some(*coefficient),
            _ => None,
        }
    }
}

/// Full model: `V`, `W`, scale ratio `h ∈ (0, 1)` and offset `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsModel {
    #[serde(default)]
    pub interaction: Interaction,
    #[serde(default)]
    pub trap: Trap,
    pub h: f64,
    pub d: f64,
}

impl PhysicsModel {
    pub fn new(interaction: Interaction, trap: Trap, h: f64, d: f64) -> Result<Self> {
        let m = Self {
            interaction,
            trap,
            h,
            d,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.interaction.validate()?;
        self.trap.validate()?;
        check_h(self.h)?;
        if !self.d.is_finite() {
            return Err(Error::Config(format!("offset D must be finite, got {}", self.d)));
        }
        Ok(())
    }

    /// `μ = −E₀ + D h²`.
    pub fn mu(&self, e0: f64) -> f64 {
        -e0 + self.d * self.h * self.h
    }

    pub fn with_h(&self, h: f64) -> Self {
        Self { h, ..self.clone() }
    }

    pub fn with_d(&self, d: f64) -> Self {
        Self { d, ..self.clone() }
    }
}

pub fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("h must lie in (0, 1), got {h}")))
    }
}

fn positive(what: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} must be positive, got {x}")))
    }
}

fn validate_table(what: &str, r: &[f64], v: &[f64]) -> Result<()> {
    if r.len() < 2 || r.len() != v.len() {
        return Err(Error::Config(format!(
            "tabulated {what} needs matching r and value columns of length ≥ 2"
        )));
    }
    if r[0] < 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("tabulated {what} radii must be increasing and ≥ 0")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("tabulated {what} values must be finite")));
    }
    Ok(())
}

fn interpolate(r: &[f64], v: &[f64], x: f64, beyond: f64) -> f64 {
    if x <= r[0] {
        return v[0];
    }
    if x >= r[r.len() - 1] {
        return beyond;
    }
    let j = r.partition_point(|&t| t <= x);
    let t = (x - r[j - 1]) / (r[j] - r[j - 1]);
    v[j - 1] + t * (v[j] - v[j - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_edge_is_averaged() {
        let g = Arc::new(RadialGrid::uniform(4.0, 400).unwrap());
        let v = Interaction::SphericalWell {
            depth: 4.0,
            radius: 1.0,
        }
        .sample(&g);
        assert_eq!(v.values()[98], -4.0);
        assert_eq!(v.values()[99], -2.0);
        assert_eq!(v.values()[100], 0.0);
    }

    #[test]
    fn validation() {
        assert!(PhysicsModel::new(Interaction::default(), Trap::default(), 1.5, 1.0).is_err());
        assert!(PhysicsModel::new(Interaction::default(), Trap::default(), 0.3, 1.0).is_ok());
        let bad = Trap::Power {
            beta: 2.0,
            c1: 1.0,
            c2: 1.5,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn tabulated_interpolation() {
        let t = Trap::Tabulated {
            r: vec![0.0, 1.0, 2.0],
            w: vec![1.0, 2.0, 5.0],
            beta: 2.0,
        };
        assert_eq!(t.eval(1.5), 3.5);
        assert_eq!(t.eval(3.0), 5.0);
    }
}
