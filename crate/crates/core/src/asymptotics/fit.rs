use serde::{Deserialize, Serialize};

use crate::bcs::McEstimate;
use crate::numerics::linear_fit;
use crate::{Error, Result};

/// Minimum number of significant points for a power-law fit.
pub const MIN_FIT_POINTS: usize = 4;

/// Points whose magnitude is below this many standard errors are dropped.
pub const SIGNIFICANCE: f64 = 3.0;

/// `|value| ≈ prefactor · h^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    /// Abscissae used in the fit.
    pub used: Vec<f64>,
    /// Abscissae dropped as statistically insignificant.
    pub excluded: Vec<f64>,
}

/// Least squares of `log|value|` against `log h`.
///
/// Points with `|value| ≤ 3·stderr` (in particular exact zeros) are excluded;
/// fewer than four remaining points is a degenerate fit.
pub fn fit_power_law(points: &[(f64, McEstimate)]) -> Result<PowerLawFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!(
            "{} points given, at least {MIN_FIT_POINTS} required",
            points.len()
        )));
    }
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(h, v) in points {
        if !(h > 0.0) {
            return Err(Error::Domain(format!("fit abscissa must be positive, got {h}")));
        }
        if v.mean.abs() > SIGNIFICANCE * v.stderr && v.mean.is_finite() {
            used.push(h);
            xs.push(h.ln());
            ys.push(v.mean.abs().ln());
        } else {
            excluded.push(h);
        }
    }
    if used.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!(
            "only {} of {} points exceed {SIGNIFICANCE}·stderr",
            used.len(),
            points.len()
        )));
    }
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    if !slope.is_finite() {
        return Err(Error::DegenerateFit("abscissae are not distinct".into()));
    }
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared: r2,
        used,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HS: [f64; 5] = [0.5, 0.4, 0.3, 0.2, 0.15];

    fn exact(f: impl Fn(f64) -> f64) -> Vec<(f64, McEstimate)> {
        HS.iter().map(|&h| (h, McEstimate::exact(f(h)))).collect()
    }

    #[test]
    fn pure_powers() {
        let q = fit_power_law(&exact(|h| 0.7 * h * h)).unwrap();
        assert!((q.exponent - 2.0).abs() < 1e-6);
        assert!((q.prefactor - 0.7).abs() < 1e-6);
        assert!((q.r_squared - 1.0).abs() < 1e-12);
        let l = fit_power_law(&exact(|h| -3.0 * h)).unwrap();
        assert!((l.exponent - 1.0).abs() < 1e-6);
    }

    #[test]
    fn mixed_power_lies_between() {
        let f = fit_power_law(&exact(|h| 0.1 * h + 2.0 * h * h)).unwrap();
        assert!(f.exponent > 1.0 && f.exponent < 2.0, "{}", f.exponent);
    }

    #[test]
    fn insignificant_points_are_dropped() {
        let mut pts = exact(|h| h * h);
        pts.push((0.1, McEstimate { mean: 1e-3, stderr: 1e-3 }));
        let f = fit_power_law(&pts).unwrap();
        assert_eq!(f.excluded, vec![0.1]);
        assert!((f.exponent - 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_power_law(&exact(|h| h)[..3]), Err(Error::DegenerateFit(_))));
        assert!(matches!(fit_power_law(&exact(|_| 0.0)), Err(Error::DegenerateFit(_))));
    }
}
