use serde::{Deserialize, Serialize};

use super::{evaluate_trial, ModelFamily, StudyConfig};
use crate::bcs::McEstimate;
use crate::model::check_h;
use crate::{Error, Exec, Result};

/// Label under which `D_c` is reported: the crossing of the explicit trial
/// family, an upper bound on the true critical offset.
pub const CRITICAL_LABEL: &str = "trial-family critical offset";

/// Bracket and resolution of the critical-offset search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticalConfig {
    /// Lower end of the `D` bracket, as an offset above `E_W`.
    pub lo_offset: f64,
    /// Upper end of the `D` bracket, as an offset above `E_W`.
    pub hi_offset: f64,
    /// Final bracket width.
    pub tolerance: f64,
    /// Interior points evaluated per refinement round.
    pub points_per_round: usize,
}

impl Default for CriticalConfig {
    fn default() -> Self {
        Self {
            lo_offset: 1e-3,
            hi_offset: 1.0,
            tolerance: 1e-3,
            points_per_round: 3,
        }
    }
}

/// Trial energy at one offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DSample {
    pub d: f64,
    pub energy: McEstimate,
    /// `‖ψ*(D)‖₂²`.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub label: String,
    pub h: f64,
    /// Zero of the secant through the final bracket.
    pub d_c: f64,
    /// `3σ / |dE/dD|` with `σ` the larger endpoint standard error.
    pub d_uncertainty: f64,
    /// Final bracket `[lo, hi]` with the trial energies at its ends.
    pub lo: DSample,
    pub hi: DSample,
    /// Whether the endpoint energies have strictly opposite signs.
    pub certified: bool,
    /// Whether both endpoint energies exceed three standard errors.
    pub significant: bool,
    /// Secant slope `dE/dD` across the final bracket.
    pub slope: f64,
    pub e_w: f64,
    /// `D_c − E_W`.
    pub gap: f64,
    pub e0: f64,
    /// `μ_c = −E₀ + D_c h²`.
    pub mu_c: f64,
    pub mu_c_uncertainty: f64,
    pub seed: u64,
    /// Every evaluated offset, in increasing order.
    pub samples: Vec<DSample>,
}

fn sign(e: &DSample) -> i32 {
    if e.energy.mean > 0.0 {
        1
    } else if e.energy.mean < 0.0 {
        -1
    } else {
        0
    }
}

/// Trial energy of `ψ*(D)` at scale `h`; exactly zero in the normal phase.
fn energy_at(family: &ModelFamily, h: f64, d: f64, config: &StudyConfig, exec: Exec) -> Result<DSample> {
    let gp = family.minimize(d, &config.minimizer)?;
    let mass = gp.mass();
    if mass == 0.0 {
        return Ok(DSample {
            d,
            energy: McEstimate::exact(0.0),
            mass,
        });
    }
    let (_, e) = evaluate_trial(family, &gp.psi_star, h, d, config, exec)?;
    Ok(DSample {
        d,
        energy: e.total_bcs,
        mass,
    })
}

/// Bracket to try after a search found no sign change on `[lo, hi]`.
///
/// A trial energy that is nonnegative throughout puts the crossing above
/// `hi`; a negative one at `lo` puts it between `E_W` and `lo`; an exactly
/// vanishing energy at `lo` means `lo` lies in the normal phase `D ≤ E_W`.
pub fn widen_bracket(lo: f64, hi: f64, f_lo: f64, f_hi: f64, e_w: f64) -> (f64, f64) {
    let width = hi - lo;
    if f_lo < 0.0 {
        let new_lo = if lo > e_w { e_w + 0.1 * (lo - e_w) } else { lo - width };
        (new_lo, lo)
    } else if f_lo == 0.0 && f_hi < 0.0 {
        (e_w + 1e-2 * width.min(1.0), hi)
    } else {
        (lo, hi + 2.0 * width)
    }
}

/// Locates `D_c(h)`, where the trial energy of `ψ*(D)` changes sign, by
/// repeated multisection of `[E_W + lo_offset, E_W + hi_offset]`.
///
/// All offsets share the Monte Carlo seed, so the energies are correlated
/// and the sign pattern is a deterministic function of `D`. Each round
/// evaluates its interior points concurrently.
pub fn estimate_mu_c(
    family: &ModelFamily,
    h: f64,
    critical: &CriticalConfig,
    config: &StudyConfig,
    exec: Exec,
) -> Result<CriticalPoint> {
    check_h(h)?;
    if !(critical.lo_offset < critical.hi_offset) || !(critical.tolerance > 0.0) || critical.points_per_round == 0 {
        return Err(Error::Config(format!("invalid critical-offset search {critical:?}")));
    }
    let e_w = family.e_w();
    let ends = exec.map_slice(&[e_w + critical.lo_offset, e_w + critical.hi_offset], |&d| {
        energy_at(family, h, d, config, exec)
    });
    let mut samples = Vec::new();
    let mut lo = ends[0].clone()?;
    let mut hi = ends[1].clone()?;
    samples.extend([lo, hi]);
    if sign(&lo) * sign(&hi) >= 0 {
        let (a, b) = widen_bracket(lo.d, hi.d, lo.energy.mean, hi.energy.mean, e_w);
        log::warn!(
            "no sign change of the trial energy on [{}, {}]; try D ∈ [{a:.6}, {b:.6}]",
            lo.d,
            hi.d
        );
        return Err(Error::NoSignChange {
            lo: lo.d,
            hi: hi.d,
            f_lo: lo.energy.mean,
            f_hi: hi.energy.mean,
        });
    }
    let m = critical.points_per_round;
    while hi.d - lo.d > critical.tolerance {
        let step = (hi.d - lo.d) / (m + 1) as f64;
        let ds: Vec<f64> = (1..=m).map(|k| lo.d + k as f64 * step).collect();
        let mut row = vec![lo];
        for r in exec.map_slice(&ds, |&d| energy_at(family, h, d, config, exec)) {
            row.push(r?);
        }
        row.push(hi);
        samples.extend_from_slice(&row[1..=m]);
        let k = (0..=m)
            .find(|&k| sign(&row[k]) != sign(&row[k + 1]))
            .expect("endpoints have opposite signs");
        lo = row[k];
        hi = row[k + 1];
        // Only the normal phase gives an exactly vanishing energy.
        if sign(&lo) == 0 || sign(&hi) == 0 {
            return Err(Error::Domain(format!(
                "trial energy vanishes inside the bracket at D = {}",
                if sign(&lo) == 0 { lo.d } else { hi.d }
            )));
        }
    }
    samples.sort_by(|a, b| a.d.total_cmp(&b.d));
    let slope = (hi.energy.mean - lo.energy.mean) / (hi.d - lo.d);
    let d_c = lo.d - lo.energy.mean / slope;
    let sigma = lo.energy.stderr.max(hi.energy.stderr);
    let d_uncertainty = 3.0 * sigma / slope.abs();
    let significant = lo.energy.mean.abs() > 3.0 * lo.energy.stderr && hi.energy.mean.abs() > 3.0 * hi.energy.stderr;
    Ok(CriticalPoint {
        label: CRITICAL_LABEL.into(),
        h,
        d_c,
        d_uncertainty,
        lo,
        hi,
        certified: sign(&lo) * sign(&hi) < 0,
        significant,
        slope,
        e_w,
        gap: d_c - e_w,
        e0: family.e0(),
        mu_c: -family.e0() + d_c * h * h,
        mu_c_uncertainty: d_uncertainty * h * h,
        seed: config.mc.seed,
        samples,
    })
}
