use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{gaussian_calculus_oracle, gaussian_g_bcs, harmonic_oracle, square_well_oracle, GaussianCase, GaussianPiece};
use crate::Result;

/// Bumped whenever a case is added, removed or its definition changes.
pub const ORACLE_TABLE_VERSION: u32 = 1;

/// One reference value with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub name: String,
    pub inputs: BTreeMap<String, f64>,
    /// `None` when the reference asserts absence (no bound state).
    pub expected: Option<f64>,
    pub formula: String,
    /// How the value was obtained and independently checked.
    pub derivation: String,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleTable {
    pub version: u32,
    pub cases: Vec<OracleCase>,
}

impl OracleTable {
    pub fn get(&self, name: &str) -> Option<&OracleCase> {
        self.cases.iter().find(|c| c.name == name)
    }
}

fn case(name: &str, inputs: &[(&str, f64)], expected: Option<f64>, formula: &str, derivation: &str, tol: f64) -> OracleCase {
    OracleCase {
        name: name.into(),
        inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        expected,
        formula: formula.into(),
        derivation: derivation.into(),
        tolerance: tol,
    }
}

/// The pinned Gaussian configuration of the quartic and structure checks.
pub fn reference_gaussian() -> GaussianCase {
    GaussianCase {
        psi_width: 1.0,
        psi_scale: 1.0,
        alpha_width: 0.5,
        h: 0.4,
        trap: 1.0,
        e0: 0.7,
        d: 0.5,
    }
}

/// Every reference value used by the verification suite.
pub fn oracle_table() -> Result<OracleTable> {
    const ROOT: &str = "bisection on k cot(kR) = -kappa; cross-checked by shooting quadrature";
    const GAUSS: &str = "Gaussian moment calculus; cross-checked by nested Gauss-Legendre quadrature to 1e-8";
    let mut cases = vec![
        case(
            "square_well_v4_r1",
            &[("v0", 4.0), ("radius", 1.0)],
            square_well_oracle(4.0, 1.0),
            "E0 = V0 - k^2, k cot(kR) = -sqrt(E0)",
            ROOT,
            1e-6,
        ),
        case(
            "square_well_v2.4_r1",
            &[("v0", 2.4), ("radius", 1.0)],
            square_well_oracle(2.4, 1.0),
            "no bound state below V0 R^2 = pi^2/4",
            ROOT,
            0.0,
        ),
        case(
            "square_well_v2.6_r1",
            &[("v0", 2.6), ("radius", 1.0)],
            square_well_oracle(2.6, 1.0),
            "E0 = V0 - k^2, k cot(kR) = -sqrt(E0)",
            ROOT,
            1e-6,
        ),
        case(
            "harmonic_quarter_one_energy",
            &[("a", 0.25), ("b", 1.0)],
            Some(harmonic_oracle(0.25, 1.0).energy),
            "E = 3 sqrt(ab)",
            "exact Gaussian eigenfunction",
            1e-6,
        ),
        case(
            "harmonic_quarter_one_gamma",
            &[("a", 0.25), ("b", 1.0)],
            Some(harmonic_oracle(0.25, 1.0).gamma),
            "gamma = sqrt(b/a)/2",
            "exact Gaussian eigenfunction",
            1e-12,
        ),
        case(
            "g_bcs_gaussian",
            &[("gamma", 0.5), ("e0", 0.5)],
            Some(gaussian_g_bcs(0.5, 0.5)),
            "(2 pi)^3 (gamma/pi)^{3/2} (E0 + 3/(8 gamma))",
            GAUSS,
            1e-3,
        ),
        case(
            "psi_w_l4_gamma1",
            &[("gamma", 1.0)],
            Some(PI.powf(-1.5)),
            "||psi_W||_4^4 = (2 gamma/pi)^3 (pi/(4 gamma))^{3/2}",
            GAUSS,
            1e-10,
        ),
    ];
    let g = reference_gaussian();
    let inputs = [
        ("psi_width", g.psi_width),
        ("psi_scale", g.psi_scale),
        ("alpha_width", g.alpha_width),
        ("h", g.h),
        ("trap", g.trap),
        ("e0", g.e0),
        ("d", g.d),
    ];
    let pieces = [
        ("hs_norm", GaussianPiece::HsNorm, "h^{-1} ||psi||^2", 1e-8),
        ("top_singular", GaussianPiece::TopSingular, "Mehler: s amp h^{-2} (pi/(p+rho))^{3/2}", 1e-6),
        ("schatten4", GaussianPiece::Schatten(4), "(s mu0)^4 / (1 - r^4)^3", 1e-5),
        ("w_term", GaussianPiece::WTerm, "b s^2 (3h/(4a) + 3h^3/(16c))", 1e-6),
        ("psi_l4", GaussianPiece::PsiL4, "s^4 (2a/pi)^3 (pi/(4a))^{3/2}", 1e-10),
        ("quartic_plain", GaussianPiece::QuarticPlain, "tr (alpha alpha*)^2", 1e-2),
        ("quartic_shifted", GaussianPiece::QuarticShifted, "tr (-h^2 Lap + E0)(alpha alpha*)^2", 1e-2),
        ("quartic_trap", GaussianPiece::QuarticTrap, "tr h^2 W (alpha alpha*)^2", 1e-2),
        ("quartic_hbar", GaussianPiece::QuarticHbar, "tr (-h^2 Lap + E0 + h^2 (W - D))(alpha alpha*)^2", 1e-2),
    ];
    for (name, piece, formula, tol) in pieces {
        cases.push(case(
            &format!("gaussian_{name}"),
            &inputs,
            Some(gaussian_calculus_oracle(&g, piece)?),
            formula,
            GAUSS,
            tol,
        ));
    }
    for h in [0.5, 0.35, 0.25] {
        let gh = GaussianCase { h, ..g };
        cases.push(case(
            &format!("gaussian_top_singular_h{h}"),
            &[("psi_width", g.psi_width), ("alpha_width", g.alpha_width), ("h", h)],
            Some(gaussian_calculus_oracle(&gh, GaussianPiece::TopSingular)?),
            "Mehler top singular value",
            GAUSS,
            1e-6,
        ));
    }
    Ok(OracleTable {
        version: ORACLE_TABLE_VERSION,
        cases,
    })
}
