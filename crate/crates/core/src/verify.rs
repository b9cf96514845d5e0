//! The oracle and invariant suite: every numerical pathway compared with a
//! closed form or an exact identity, reported check by check.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bcs::{
    admissibility_polynomial, build_pair_kernel, decompose_alpha, quadratic_energy, quartic_trace_mc,
    top_singular_value, McConfig, PairProfile, QuadratureConfig, Remainder, SectorConfig, DEFAULT_MARGIN,
};
use crate::gp::{self, gl_split, minimize_gp_unconstrained, GpGrid, MinimizerConfig, TrapProblem};
use crate::model::{Interaction, PhysicsModel, Trap};
use crate::numerics::{radial_fourier, RadialFunction, RadialGrid};
use crate::oracles::{
    gaussian_calculus_oracle, gaussian_g_bcs, harmonic_oracle, oracle_table, reference_gaussian, square_well_oracle,
    GaussianCase, GaussianPiece, ORACLE_TABLE_VERSION,
};
use crate::twobody::{g_bcs_from_transform, solve_ground_state, TwoBodyConfig, TwoBodySolution};
use crate::{Error, Exec, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub twobody: TwoBodyConfig,
    pub grid: GpGrid,
    pub minimizer: MinimizerConfig,
    pub sectors: SectorConfig,
    pub quadrature: QuadratureConfig,
    /// Run the Monte Carlo comparison with the Gaussian quartic oracle.
    pub include_mc: bool,
    pub mc: McConfig,
    /// Seed of the random directions in the gradient check.
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            twobody: TwoBodyConfig::default(),
            grid: GpGrid::default(),
            minimizer: MinimizerConfig::default(),
            sectors: SectorConfig::default(),
            quadrature: QuadratureConfig::default(),
            include_mc: true,
            mc: McConfig {
                samples: 1_000_000,
                ..McConfig::default()
            },
            seed: 7,
        }
    }
}

/// Outcome of one comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub group: String,
    pub name: String,
    pub value: f64,
    pub reference: f64,
    /// The quantity compared with `tolerance` (absolute or relative, see `note`).
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

impl Check {
    fn new(group: &str, name: &str, value: f64, reference: f64, error: f64, tolerance: f64, note: &str) -> Self {
        Self {
            group: group.into(),
            name: name.into(),
            value,
            reference,
            error,
            tolerance,
            passed: error <= tolerance,
            note: note.into(),
        }
    }

    fn abs(group: &str, name: &str, value: f64, reference: f64, tol: f64) -> Self {
        Self::new(group, name, value, reference, (value - reference).abs(), tol, "absolute")
    }

    fn rel(group: &str, name: &str, value: f64, reference: f64, tol: f64) -> Self {
        let err = (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
        Self::new(group, name, value, reference, err, tol, "relative")
    }

    /// A condition; `value` is reported for information.
    fn holds(group: &str, name: &str, value: f64, ok: bool, note: &str) -> Self {
        Self {
            passed: ok,
            ..Self::new(group, name, value, f64::NAN, f64::NAN, f64::NAN, note)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub oracle_version: u32,
    pub checks: Vec<Check>,
    pub failures: usize,
    pub passed: bool,
}

impl VerifyReport {
    pub fn group(&self, group: &str) -> impl Iterator<Item = &Check> {
        let g = group.to_string();
        self.checks.iter().filter(move |c| c.group == g)
    }

    pub fn group_passed(&self, group: &str) -> bool {
        let mut any = false;
        for c in self.group(group) {
            any = true;
            if !c.passed {
                return false;
            }
        }
        any
    }
}

fn harmonic_trap(grid: &GpGrid) -> Result<TrapProblem> {
    gp::solve_trap_ground(&Trap::default(), &grid.build()?)
}

/// `E_W` of `−¼Δ + |x|²` and the overlap of `ψ_W` with the normalized `e^{−r²}`.
pub fn trap_checks(grid: &GpGrid) -> Result<Vec<Check>> {
    let t = harmonic_trap(grid)?;
    let o = harmonic_oracle(0.25, 1.0);
    let exact = RadialFunction::from_fn(t.grid.clone(), |r| (2.0 * o.gamma / PI).powf(0.75) * (-o.gamma * r * r).exp());
    let overlap = t.psi_w.inner(&exact)?.abs();
    Ok(vec![
        Check::abs("trap", "harmonic E_W", t.e_w, o.energy, 1e-6),
        Check::new("trap", "ground-state overlap", overlap, 1.0, 1.0 - overlap, 1e-8, "1 - overlap"),
    ])
}

fn square_well(depth: f64) -> Interaction {
    Interaction::SphericalWell { depth, radius: 1.0 }
}

/// Square-well binding energy and the bound-state threshold.
pub fn square_well_checks() -> Result<Vec<Check>> {
    let grid = Arc::new(RadialGrid::uniform(20.0, 16000)?);
    let gs = solve_ground_state(&square_well(4.0), &grid)?;
    let exact = square_well_oracle(4.0, 1.0).ok_or_else(|| Error::Domain("oracle has no bound state".into()))?;
    let wide = Arc::new(RadialGrid::uniform(60.0, 12000)?);
    let below = solve_ground_state(&square_well(2.4), &wide);
    let above = solve_ground_state(&square_well(2.6), &wide);
    Ok(vec![
        Check::abs("square-well", "E0 at V0 = 4", gs.e0, exact, 1e-6),
        Check::holds(
            "square-well",
            "no bound state at V0 = 2.4",
            2.4,
            matches!(below, Err(Error::NoBoundState { .. })) && square_well_oracle(2.4, 1.0).is_none(),
            "threshold pi^2/4",
        ),
        Check::holds(
            "square-well",
            "bound state at V0 = 2.6",
            above.as_ref().map(|g| g.e0).unwrap_or(f64::NAN),
            above.as_ref().is_ok_and(|g| g.e0 > 0.0),
            "threshold pi^2/4",
        ),
    ])
}

/// `g_BCS` of the normalized Gaussian `α̂₀ ∝ e^{−p²/2}` at `E₀ = ½`.
pub fn pairing_checks() -> Result<Vec<Check>> {
    let pg = Arc::new(RadialGrid::uniform(12.0, 1200)?);
    let (gamma, e0) = (0.5, 0.5);
    let hat = RadialFunction::from_fn(pg, |p| (2.0 * gamma / PI).powf(0.75) * (-gamma * p * p).exp());
    let g = g_bcs_from_transform(&hat, e0).g_bcs;
    Ok(vec![
        Check::abs("pairing", "Gaussian g_BCS", g, gaussian_g_bcs(gamma, e0), 1e-3),
        Check::abs("pairing", "Gaussian g_BCS (closed form)", gaussian_g_bcs(gamma, e0), 8.0 * (PI / 2.0).powf(1.5) * 1.25, 1e-12),
    ])
}

/// Normal phase below `E_W`, the trial-state bound just above it, and the
/// Ginzburg-Landau splitting identity on converged minimizers.
pub fn gp_checks(grid: &GpGrid, g: f64, config: &MinimizerConfig) -> Result<Vec<Check>> {
    let t = harmonic_trap(grid)?;
    let below = minimize_gp_unconstrained(&t, t.e_w - 0.1, g, None, config)?;
    let delta = 0.05;
    let above = minimize_gp_unconstrained(&t, t.e_w + delta, g, None, config)?;
    let bound = -delta * delta / (4.0 * g * PI.powf(-1.5));
    let mut checks = vec![
        Check::abs("gp-criticality", "E^GP below E_W", below.energy, 0.0, 0.0),
        Check::new("gp-criticality", "mass below E_W", below.norms.l2, 0.0, below.norms.l2, 1e-4, "||psi*||_2"),
        Check::holds("gp-criticality", "E^GP under the trial bound", above.energy, above.energy <= bound, "E^GP <= -delta^2/(4 g pi^-3/2)"),
        Check::rel("gp-criticality", "E^GP near the trial bound", above.energy, bound, 0.1),
    ];
    for dd in [0.05, 0.5, 1.0, 3.0] {
        let r = minimize_gp_unconstrained(&t, t.e_w + dd, g, None, config)?;
        if r.converged && r.mass() > 0.0 {
            let s = gl_split(&r, &t, config)?;
            checks.push(Check::new(
                "gl-split",
                &format!("identity at D = E_W + {dd}"),
                s.identity_relative,
                0.0,
                s.identity_relative,
                1e-6,
                "relative",
            ));
        } else {
            checks.push(Check::holds("gl-split", &format!("minimizer at D = E_W + {dd}"), r.grad_residual, false, "not converged"));
        }
    }
    Ok(checks)
}

/// Relative-sector residual and trap term of the trial kernel of `ψ*` at
/// `h = 0.3` for the solved pair.
pub fn trial_structure_checks(
    profile: &Arc<PairProfile>,
    interaction: &Interaction,
    config: &VerifyConfig,
    exec: Exec,
) -> Result<Vec<Check>> {
    let t = harmonic_trap(&config.grid)?;
    let d = t.e_w + 0.5;
    let h = 0.3;
    let psi = minimize_gp_unconstrained(&t, d, profile.g_bcs, None, &config.minimizer)?.psi_star;
    let kernel = build_pair_kernel(&psi, profile, h)?;
    let model = PhysicsModel::new(interaction.clone(), Trap::default(), h, d)?;
    let q = quadratic_energy(&kernel, &model, &config.quadrature, exec)?;
    let scale = psi.norm_sq() / h;
    let closed = h * psi.weighted_norm_sq(|r| r * r) + 0.25 * h.powi(3) * psi.norm_sq() * profile.second_moment / profile.norm_sq;
    Ok(vec![
        Check::new(
            "trial-structure",
            "relative-sector residual",
            q.relative_residual,
            0.0,
            q.relative_residual.abs() / scale,
            1e-6,
            "relative to ||psi||^2/h",
        ),
        Check::rel("trial-structure", "W term", q.w_term, closed, 1e-6),
    ])
}

fn gaussian_setup(c: f64) -> Result<(RadialFunction, Arc<PairProfile>, GaussianCase)> {
    let g = GaussianCase {
        alpha_width: c,
        ..reference_gaussian()
    };
    let grid = Arc::new(RadialGrid::uniform(8.0, 2000)?);
    let a = g.psi_width;
    let psi = RadialFunction::from_fn(grid, |r| g.psi_scale * (2.0 * a / PI).powf(0.75) * (-a * r * r).exp());
    let profile = Arc::new(PairProfile::gaussian(c, g.e0, 12.0, 2400)?);
    Ok((psi, profile, g))
}

fn random_field(grid: &Arc<RadialGrid>, rng: &mut ChaCha8Rng) -> RadialFunction {
    let terms: Vec<(f64, f64)> = (0..4).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.5..3.0))).collect();
    RadialFunction::from_fn(grid.clone(), |r| terms.iter().map(|(c, a)| c * (-a * r * r).exp()).sum())
}

/// Exact identities that need no Monte Carlo.
pub fn identity_checks(config: &VerifyConfig, exec: Exec) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let (psi, profile, case) = gaussian_setup(reference_gaussian().alpha_width)?;

    for h in [0.5, 0.3, 0.15] {
        let k = build_pair_kernel(&psi, &profile, h)?;
        let hs = k.hs_norm_sq()?;
        checks.push(Check::rel("identities", &format!("HS norm at h = {h}"), hs, psi.norm_sq() * profile.norm_sq / h, 1e-8));
    }

    let h = 0.35;
    let k = build_pair_kernel(&psi, &profile, h)?;
    let chi = psi.map(|r, v| 0.3 * r * v);
    let rho = RadialFunction::from_fn(profile.grid().clone(), |r| (1.0 - r * r) * (-0.8 * r * r).exp());
    let kr = k.clone().with_remainder(Remainder::orthogonal(chi, &rho, &profile)?)?;
    let dec = decompose_alpha(&kr)?;
    let id = dec.identities;
    let mut roundtrip: f64 = 0.0;
    for &(eta, xi) in &[(0.1, 0.05), (0.7, 0.3), (1.5, 0.9), (2.2, 0.02)] {
        let z = xi / h;
        let mut v = dec.psi.eval(eta) * profile.alpha0.eval(z) / (h * h);
        for (a, b) in &dec.remainder {
            v += a.eval(eta) * b.eval(z);
        }
        roundtrip = roundtrip.max((v - kr.eval_com(eta, xi)).abs());
    }
    let peak = kr.eval_com(0.0, 0.0).abs();
    checks.push(Check::new("identities", "decomposition roundtrip", roundtrip, 0.0, roundtrip / peak, 1e-10, "relative to max |alpha|"));
    checks.push(Check::new("identities", "recovered field", id.psi_deviation, 0.0, id.psi_deviation, 1e-10, "max |psi_rec - psi|"));
    checks.push(Check::new("identities", "orthogonality", id.orthogonality_defect, 0.0, id.orthogonality_defect, 1e-10, "absolute"));
    checks.push(Check::new("identities", "Pythagoras", id.pythagoras_residual, 0.0, id.pythagoras_residual, 1e-10, "relative"));

    for (scale, h) in [(0.3, 0.3), (0.5, 0.2)] {
        let k = build_pair_kernel(&psi.scaled(scale), &profile, h)?;
        let top = top_singular_value(&k, &config.sectors, exec)?;
        let s_sq = top.value.powi(2);
        let lambda = crate::bcs::admissible_lambda(top.value, h, DEFAULT_MARGIN)?;
        let at = admissibility_polynomial(lambda, h, s_sq);
        let half = admissibility_polynomial(0.5 * lambda, h, s_sq);
        checks.push(Check::holds(
            "identities",
            &format!("admissibility at lambda (h = {h})"),
            at,
            at >= 0.0 && half < 0.0,
            "p(lambda) >= 0 > p(lambda/2)",
        ));
        let g = GaussianCase { psi_scale: scale, h, ..case };
        let exact = gaussian_calculus_oracle(&g, GaussianPiece::TopSingular)?;
        checks.push(Check::rel("identities", &format!("s1 vs Mehler (h = {h})"), top.value, exact, 1e-6));
    }

    let t = harmonic_trap(&config.grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let field = random_field(&t.grid, &mut rng);
    let (d, g) = (2.0, 0.7);
    let grad = gp::gp_gradient(&field, &t.w, d, g)?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let phi = random_field(&t.grid, &mut rng);
        let eps = 1e-5;
        let plus = gp::gp_energy(&field.add(&phi.scaled(eps))?, &t.w, d, g)?;
        let minus = gp::gp_energy(&field.add(&phi.scaled(-eps))?, &t.w, d, g)?;
        let fd = (plus - minus) / (2.0 * eps);
        let an = 2.0 * gp::dot(&grad, &phi);
        worst = worst.max((fd - an).abs() / an.abs().max(1.0));
    }
    checks.push(Check::new("identities", "GP gradient vs central differences", worst, 0.0, worst, 1e-6, "relative, 20 directions"));

    let fg = Arc::new(RadialGrid::uniform(12.0, 1200)?);
    let f = RadialFunction::from_fn(fg.clone(), |r| (1.0 + 0.5 * r * r) * (-0.7 * r * r).exp());
    let pg = Arc::new(fg.conjugate(1200)?);
    let fhat = radial_fourier(&f, &pg).function;
    checks.push(Check::rel("identities", "Fourier unitarity", fhat.norm_sq(), f.norm_sq(), 1e-8));
    let back = radial_fourier(&fhat, &fg).function;
    let err = back.add(&f.scaled(-1.0))?.norm() / f.norm();
    checks.push(Check::new("identities", "Fourier roundtrip", err, 0.0, err, 1e-8, "relative L2"));

    let parts = gp::parts(&t.psi_w, &t.w)?;
    let mut worst: f64 = 0.0;
    for s in [0.3f64, 1.0, 2.5] {
        let e = gp::gp_energy(&t.psi_w.scaled(s.sqrt()), &t.w, d, g)?;
        let expected = s * (parts.kinetic + parts.potential - d * parts.mass) + s * s * g * parts.quartic;
        worst = worst.max((e - expected).abs() / expected.abs().max(1.0));
    }
    checks.push(Check::new("identities", "E_D(sqrt(t) psi) quadratic in t", worst, 0.0, worst, 1e-10, "relative"));
    Ok(checks)
}

/// Monte Carlo quartic traces against the all-Gaussian oracle at `h = 0.4`.
pub fn quartic_mc_checks(mc: &McConfig, exec: Exec) -> Result<Vec<Check>> {
    let (psi, profile, case) = gaussian_setup(reference_gaussian().alpha_width)?;
    let h = case.h;
    let k = build_pair_kernel(&psi, &profile, h)?;
    let model = PhysicsModel::new(Interaction::default(), Trap::default(), h, case.d)?;
    let traces = quartic_trace_mc(&k, &model, mc, exec)?;
    let mut checks = Vec::new();
    for (name, est, piece) in [
        ("tr (aa*)^2", traces.plain, GaussianPiece::QuarticPlain),
        ("tr (-h^2 Lap + E0)(aa*)^2", traces.shifted, GaussianPiece::QuarticShifted),
        ("tr h^2 W (aa*)^2", traces.trap, GaussianPiece::QuarticTrap),
        ("tr hbar (aa*)^2", traces.hbar, GaussianPiece::QuarticHbar),
    ] {
        let exact = gaussian_calculus_oracle(&case, piece)?;
        let z = (est.mean - exact).abs() / est.stderr.max(f64::MIN_POSITIVE);
        let mut c = Check::new("quartic-mc", name, est.mean, exact, z, 3.0, "standard errors");
        let rel = est.relative_error();
        c.passed &= rel <= 1e-2;
        c.note = format!("standard errors; stderr/|mean| = {rel:.2e}");
        checks.push(c);
    }
    Ok(checks)
}

/// Values of the oracle table against the functions that produce them.
pub fn table_checks() -> Result<Vec<Check>> {
    let t = oracle_table()?;
    let mut checks = vec![Check::holds("oracle-table", "version", t.version as f64, t.version == ORACLE_TABLE_VERSION, "")];
    let g = reference_gaussian();
    let expect = |name: &str| t.get(name).and_then(|c| c.expected).unwrap_or(f64::NAN);
    checks.push(Check::rel(
        "oracle-table",
        "Schatten-4 equals plain quartic trace",
        expect("gaussian_schatten4"),
        gaussian_calculus_oracle(&g, GaussianPiece::QuarticPlain)?,
        1e-12,
    ));
    Ok(checks)
}

/// The full suite with the default interaction.
pub fn run_suite(config: &VerifyConfig, exec: Exec) -> Result<VerifyReport> {
    let interaction = Interaction::default();
    let sol = TwoBodySolution::solve(&interaction, &config.twobody)?;
    let profile = Arc::new(PairProfile::from_solution(&sol)?);
    let mut checks = Vec::new();
    checks.extend(trap_checks(&config.grid)?);
    checks.extend(square_well_checks()?);
    checks.extend(pairing_checks()?);
    checks.extend(gp_checks(&config.grid, profile.g_bcs, &config.minimizer)?);
    checks.extend(trial_structure_checks(&profile, &interaction, config, exec)?);
    checks.extend(identity_checks(config, exec)?);
    if config.include_mc {
        checks.extend(quartic_mc_checks(&config.mc, exec)?);
    }
    checks.extend(table_checks()?);
    let failures = checks.iter().filter(|c| !c.passed).count();
    for c in checks.iter().filter(|c| !c.passed) {
        log::warn!("check failed: {} / {} (error {:.3e}, tolerance {:.1e})", c.group, c.name, c.error, c.tolerance);
    }
    Ok(VerifyReport {
        oracle_version: ORACLE_TABLE_VERSION,
        checks,
        failures,
        passed: failures == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_checks_are_counted() {
        let c = Check::rel("g", "x", 1.1, 1.0, 1e-3);
        assert!(!c.passed);
        let ok = Check::abs("g", "y", 1.0, 1.0, 0.0);
        assert!(ok.passed);
        let r = VerifyReport {
            oracle_version: 1,
            checks: vec![c, ok],
            failures: 1,
            passed: false,
        };
        assert!(!r.group_passed("g"));
        assert!(!r.group_passed("missing"));
    }

    #[test]
    fn identity_suite_passes() {
        let checks = identity_checks(&VerifyConfig::default(), Exec::Parallel).unwrap();
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn closed_form_groups_pass() {
        let mut checks = trap_checks(&GpGrid::default()).unwrap();
        checks.extend(pairing_checks().unwrap());
        checks.extend(gp_checks(&GpGrid::default(), 2.0, &MinimizerConfig::default()).unwrap());
        checks.extend(table_checks().unwrap());
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
