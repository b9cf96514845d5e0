use std::sync::Arc;

use bcsgp::asymptotics::{estimate_mu_c, evaluate_trial, h_sweep, ModelFamily, PsiSource, SweepRecord};
use bcsgp::bcs::PairProfile;
use bcsgp::gp::{criticality_scan, gl_split, GpResult};
use bcsgp::oracles::oracle_table;
use bcsgp::twobody::{compute_g_bcs, TwoBodySolution};
use bcsgp::verify::{run_suite, VerifyConfig};
use bcsgp::{Error, Exec};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::report::{num, Report, Table};

/// Header shared by every per-`h` table.
const H_COLUMNS: [&str; 8] = ["h", "E_bcs", "E_gp", "residual", "residual_stderr", "lambda", "s1", "D_c"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    TwoBody,
    Gp,
    TrialEnergy,
    Sweep,
    MuC,
    Verify,
    OracleTable,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::TwoBody => "twobody",
            Command::Gp => "gp",
            Command::TrialEnergy => "trial-energy",
            Command::Sweep => "sweep",
            Command::MuC => "mu-c",
            Command::Verify => "verify",
            Command::OracleTable => "oracle-table",
        }
    }
}

/// How a command ended, beyond hard errors.
#[derive(Debug)]
pub enum Failure {
    /// Library error; partial results may already be in the report.
    Numerics(Error),
    /// Checks that ran but did not pass.
    Checks(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numerics(e)
    }
}

/// Machine-readable name of an error variant.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Config(_) => "config",
        Error::EigenNonConvergence { .. } => "eigen-non-convergence",
        Error::NoSignChange { .. } => "no-sign-change",
        Error::NoBoundState { .. } => "no-bound-state",
        Error::GapViolated { .. } => "gap-violated",
        Error::Inadmissible { .. } => "inadmissible",
        Error::Domain(_) => "domain",
        Error::DivisionRegion { .. } => "division-region",
        Error::DegenerateFit(_) => "degenerate-fit",
        Error::NotConverged { .. } => "not-converged",
    }
}

pub fn run(cmd: Command, config: &RunConfig, exec: Exec, report: &mut Report) -> Result<(), Failure> {
    match cmd {
        Command::TwoBody => twobody(config, report),
        Command::Gp => gp(config, exec, report),
        Command::TrialEnergy => trial_energy(config, exec, report),
        Command::Sweep => sweep(config, exec, report),
        Command::MuC => mu_c(config, exec, report),
        Command::Verify => verify(config, exec, report),
        Command::OracleTable => {
            report.set_result(&oracle_table()?);
            Ok(())
        }
    }
}

fn family(config: &RunConfig) -> Result<(TwoBodySolution, ModelFamily), Error> {
    let m = &config.model;
    let sol = TwoBodySolution::solve(&m.interaction, &config.twobody)?;
    let profile = Arc::new(PairProfile::from_solution(&sol)?);
    let fam = ModelFamily::with_profile(m.interaction.clone(), m.trap.clone(), profile, &config.grid)?;
    Ok((sol, fam))
}

fn twobody(config: &RunConfig, report: &mut Report) -> Result<(), Failure> {
    let sol = TwoBodySolution::solve(&config.model.interaction, &config.twobody)?;
    let pairing = compute_g_bcs(&sol);
    report.result = json!({
        "e0": sol.e0,
        "e0_discrete": sol.e0_discrete,
        "residual": sol.residual,
        "p_wave_bottom": sol.p_wave_bottom,
        "gap": sol.gap,
        "decay": sol.decay,
        "moments": sol.moments(config.model.trap.beta()),
        "pairing": pairing,
        "fourier_tail_warning": sol.fourier_tail_warning,
    });
    let mut alpha = Table::new("alpha0", &["r", "alpha0", "minus_v_alpha0"]);
    let va = sol.shifted_kinetic_alpha0();
    for ((r, a), v) in sol.grid().nodes().iter().zip(sol.alpha0.values()).zip(va.values()) {
        alpha.push([num(*r), num(*a), num(*v)]);
    }
    let mut hat = Table::new("alpha0_hat", &["p", "alpha0_hat"]);
    for (p, a) in sol.alpha0_hat.grid().nodes().iter().zip(sol.alpha0_hat.values()) {
        hat.push([num(*p), num(*a)]);
    }
    report.tables = vec![alpha, hat];
    Ok(())
}

fn gp_summary(r: &GpResult) -> Value {
    json!({
        "d": r.d,
        "energy": r.energy,
        "mass": r.mass(),
        "grad_residual": r.grad_residual,
        "converged": r.converged,
        "iterations": r.iterations,
        "norms": r.norms,
    })
}

fn gp(config: &RunConfig, exec: Exec, report: &mut Report) -> Result<(), Failure> {
    let (_, fam) = family(config)?;
    let d = config.model.offset(fam.e_w());
    let r = fam.minimize(d, &config.minimizer)?;
    let split = if r.mass() > 0.0 {
        let s = gl_split(&r, &fam.trap_problem, &config.minimizer)?;
        json!({
            "mass": s.mass,
            "mu0": s.mu0,
            "e_tilde": s.e_tilde,
            "e_gl": s.e_gl,
            "identity_residual": s.identity_residual,
            "identity_relative": s.identity_relative,
            "f0_residual": s.f0_residual,
        })
    } else {
        Value::Null
    };
    let offsets: Vec<f64> = config.gp.scan_offsets.iter().map(|o| fam.e_w() + o).collect();
    let scan = criticality_scan(&fam.trap_problem, fam.g_bcs(), &offsets, &config.minimizer, exec)?;
    let mut table = Table::new("criticality_scan", &["d", "d_minus_e_w", "energy"]);
    for &(d, e) in &scan {
        table.push([num(d), num(d - fam.e_w()), num(e)]);
    }
    let mut psi = Table::new("psi_star", &["r", "psi_star"]);
    for (x, p) in fam.trap_problem.grid.nodes().iter().zip(r.psi_star.values()) {
        psi.push([num(*x), num(*p)]);
    }
    report.result = json!({
        "e_w": fam.e_w(),
        "e_w_discrete": fam.trap_problem.e_w_discrete,
        "g_bcs": fam.g_bcs(),
        "minimizer": gp_summary(&r),
        "gl_split": split,
        "criticality_scan": scan.iter().map(|&(d, e)| json!({ "d": d, "energy": e })).collect::<Vec<_>>(),
    });
    report.tables = vec![table, psi];
    Ok(())
}

fn trial_energy(config: &RunConfig, exec: Exec, report: &mut Report) -> Result<(), Failure> {
    let (_, fam) = family(config)?;
    let d = config.model.offset(fam.e_w());
    let h = config.model.h;
    let r = fam.minimize(d, &config.minimizer)?;
    let (state, energy) = evaluate_trial(&fam, &r.psi_star, h, d, &config.study(), exec)?;
    let residual = energy.total_bcs.affine(1.0 / h, -r.energy);
    let mut table = Table::new("trial_energy", &H_COLUMNS);
    table.push([
        num(h),
        num(energy.total_bcs.mean),
        num(r.energy),
        num(residual.mean),
        num(residual.stderr),
        num(energy.lambda),
        num(energy.s1),
        String::new(),
    ]);
    report.result = json!({
        "e_w": fam.e_w(),
        "e0": fam.e0(),
        "g_bcs": fam.g_bcs(),
        "gp": gp_summary(&r),
        "trial": state.summary(),
        "energy": energy,
        "residual": residual,
    });
    report.tables = vec![table];
    Ok(())
}

fn sweep_table(record: &SweepRecord) -> Table {
    let mut t = Table::new("sweep", &H_COLUMNS);
    for e in &record.entries {
        t.push([
            num(e.h),
            num(e.energy.total_bcs.mean),
            num(record.e_gp),
            num(e.residual.mean),
            num(e.residual.stderr),
            num(e.trial.lambda),
            num(e.trial.s1),
            String::new(),
        ]);
    }
    t
}

fn sweep(config: &RunConfig, exec: Exec, report: &mut Report) -> Result<(), Failure> {
    let (_, fam) = family(config)?;
    let d = config.model.offset(fam.e_w());
    let record = h_sweep(&fam, d, &PsiSource::GpMinimizer, &config.model.h_list, &config.study(), exec)?;
    report.set_result(&record);
    report.tables = vec![sweep_table(&record)];
    record.require_fit()?;
    Ok(())
}

fn mu_c(config: &RunConfig, exec: Exec, report: &mut Report) -> Result<(), Failure> {
    let (_, fam) = family(config)?;
    let search = config.critical.search();
    let study = config.study();
    let mut table = Table::new("mu_c", &H_COLUMNS);
    let mut points = Vec::new();
    let mut outcome = Ok(());
    for (i, &h) in config.critical.h_values.iter().enumerate() {
        match estimate_mu_c(&fam, h, &search, &study.for_index(i), exec) {
            Ok(p) => {
                table.push([
                    num(h),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    num(p.d_c),
                ]);
                points.push(p);
            }
            Err(e) => {
                outcome = Err(Failure::Numerics(e));
                break;
            }
        }
    }
    report.result = json!({
        "e_w": fam.e_w(),
        "e0": fam.e0(),
        "g_bcs": fam.g_bcs(),
        "points": points,
    });
    report.tables = vec![table];
    outcome
}

fn verify(config: &RunConfig, exec: Exec, report: &mut Report) -> Result<(), Failure> {
    let mut mc = config.mc;
    mc.samples = config.verify.mc_samples;
    let vc = VerifyConfig {
        twobody: config.twobody.clone(),
        grid: config.grid,
        minimizer: config.minimizer,
        sectors: config.sectors,
        quadrature: config.quadrature,
        include_mc: config.verify.include_mc,
        mc,
        seed: config.verify.seed,
    };
    let suite = run_suite(&vc, exec)?;
    let mut table = Table::new("verify", &["group", "name", "value", "reference", "error", "tolerance", "passed"]);
    for c in &suite.checks {
        table.push([
            c.group.clone(),
            c.name.clone(),
            num(c.value),
            num(c.reference),
            num(c.error),
            num(c.tolerance),
            c.passed.to_string(),
        ]);
    }
    report.set_result(&suite);
    report.tables = vec![table];
    if suite.failures > 0 {
        return Err(Failure::Checks(suite.failures));
    }
    Ok(())
}
