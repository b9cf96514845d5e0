use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::model::{Interaction, Trap};
use crate::numerics::{find_root_scalar, RadialFunction, RadialGrid};
use crate::twobody::{TwoBodyConfig, TwoBodySolution};
use crate::Exec;

const A: f64 = 1.0;
const C: f64 = 0.5;
const E0: f64 = 0.7;

fn gauss_psi(a: f64) -> RadialFunction {
    let grid = Arc::new(RadialGrid::uniform(8.0, 2000).unwrap());
    RadialFunction::from_fn(grid, move |r| (2.0 * a / PI).powf(0.75) * (-a * r * r).exp())
}

fn gauss_profile(c: f64) -> Arc<PairProfile> {
    Arc::new(PairProfile::gaussian(c, E0, 12.0, 2400).unwrap())
}

fn model(h: f64, d: f64) -> PhysicsModel {
    PhysicsModel::new(Interaction::default(), Trap::Harmonic { coefficient: 1.0 }, h, d).unwrap()
}

/// Mehler-kernel spectrum of `h⁻² ψ(η) α₀(ξ/h)` for Gaussian factors: the
/// singular values per Cartesian direction are `μ₀^{1/3} r^k`.
fn mehler(a: f64, c: f64, h: f64) -> (f64, f64) {
    let amp = (2.0 * a / PI).powf(0.75) * (2.0 * c / PI).powf(0.75);
    let p = a / 4.0 + c / (h * h);
    let q = c / (h * h) - a / 4.0;
    let rho = (p * p - q * q).sqrt();
    (amp / (h * h) * (PI / (p + rho)).powf(1.5), q / (p + rho))
}

fn mehler_schatten(a: f64, c: f64, h: f64, n: i32) -> f64 {
    let (mu0, r) = mehler(a, c, h);
    mu0.powi(n) / (1.0 - r.powi(n)).powi(3)
}

/// Closed-form quartic traces of the all-Gaussian trial kernel with
/// `W = |x|²`: `(tr(αᾱ)², tr(−h²Δ+E₀)(αᾱ)², tr h²W(αᾱ)²)`.
fn gaussian_quartic(a: f64, c: f64, h: f64, e0: f64) -> (f64, f64, f64) {
    let u = [0.25, 0.5, 0.25];
    let v = [-0.25, 0.0, 0.25];
    let w = [0.75, 0.5, 0.25];
    let mut m = nalgebra::Matrix3::<f64>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = 2.0 * a * h * h * (u[i] * u[j] + v[i] * v[j]) + c * (if i == j { 2.0 } else { 1.0 });
        }
    }
    let mi = m.try_inverse().unwrap();
    let quad = |x: [f64; 3]| {
        let x = nalgebra::Vector3::from(x);
        (x.transpose() * mi * x)[0]
    };
    let i1d = PI.powf(1.5) / m.determinant().sqrt();
    let amp_a = (2.0 * a / PI).powf(0.75);
    let amp_c = (2.0 * c / PI).powf(0.75);
    let base = h * amp_a.powi(4) * amp_c.powi(4) * (PI / (4.0 * a)).powf(1.5) * i1d.powi(3);
    let rel = base * (6.0 * c + e0 - 4.0 * c * c * 3.0 * 0.5 * mi[(0, 0)]);
    let com = -0.25 * h * h * base * (4.0 * a * a * 3.0 * (1.0 / (8.0 * a) + 0.5 * h * h * quad(u)) - 6.0 * a);
    let trap = h * h * base * 3.0 * (1.0 / (8.0 * a) + 0.5 * h * h * quad(w));
    (base, rel + com, trap)
}

fn quick_sectors() -> SectorConfig {
    SectorConfig {
        points_per_scale: 6.0,
        ..SectorConfig::default()
    }
}

#[test]
fn gaussian_profile_constants() {
    let p = gauss_profile(C);
    assert!((p.norm_sq - 1.0).abs() < 1e-14);
    assert!(p.eigen_residual.abs() < 1e-5, "{}", p.eigen_residual);
    // g_BCS = (2π)³ ∫ (p² + E₀) α̂₀⁴ with α̂₀ = (2c/π)^{-3/4}... in closed form.
    let g0 = (2.0 * PI).powi(3) * (1.0 / (4.0 * PI * C)).powf(1.5);
    assert!((p.g_quartic / g0 - 1.0).abs() < 1e-10, "{} {g0}", p.g_quartic);
    let g = g0 * (E0 + 1.5 * C);
    assert!((p.g_bcs / g - 1.0).abs() < 1e-10);
    assert!((p.g_kinetic / g - 1.0).abs() < 1e-5);
    assert!((p.second_moment - 3.0 / (4.0 * C)).abs() < 1e-10);
    let l1 = (2.0 * C / PI).powf(0.75) * (PI / C).powf(1.5);
    assert!((p.l1 - l1).abs() < 1e-10);
}

#[test]
fn zero_field_gives_zero_kernel() {
    let psi = gauss_psi(A).scaled(0.0);
    let k = build_pair_kernel(&psi, &gauss_profile(C), 0.4).unwrap();
    assert_eq!(k.hs_norm_sq().unwrap(), 0.0);
    assert!(k.is_zero());
    let top = top_singular_value(&k, &quick_sectors(), Exec::Parallel).unwrap();
    assert_eq!(top.value, 0.0);
    let t = make_trial_state(k.clone(), DEFAULT_MARGIN, &quick_sectors(), Exec::Parallel).unwrap();
    assert_eq!(t.lambda, 0.0);
    let mc = quartic_trace_mc(&k, &model(0.4, 0.5), &McConfig::default(), Exec::Parallel).unwrap();
    assert_eq!(mc.hbar, McEstimate::exact(0.0));
    let e = trial_bcs_energy(&t, &model(0.4, 0.5), &QuadratureConfig::default(), &McConfig::default(), Exec::Parallel)
        .unwrap();
    assert_eq!(e.total_bcs.mean, 0.0);
    assert_eq!(e.total_bcs.stderr, 0.0);
}

#[test]
fn hilbert_schmidt_identity() {
    let p = gauss_profile(C);
    for (h, s) in [(0.5, 1.0), (0.3, 0.2), (0.15, 3.0)] {
        let psi = gauss_psi(A).scaled(s);
        let k = build_pair_kernel(&psi, &p, h).unwrap();
        let hs = k.hs_norm_sq().unwrap();
        assert!((hs * h / psi.norm_sq() - 1.0).abs() < 1e-8);
    }
    // Closed form for Gaussian inputs at h = 0.5: the Mehler sum at n = 2.
    let k = build_pair_kernel(&gauss_psi(A), &p, 0.5).unwrap();
    let hs = k.hs_norm_sq().unwrap();
    assert!((hs / mehler_schatten(A, C, 0.5, 2) - 1.0).abs() < 1e-10);
}

#[test]
fn kernel_pointwise_values() {
    let p = gauss_profile(C);
    let k = build_pair_kernel(&gauss_psi(A), &p, 0.4).unwrap();
    let x = [0.3f64, -0.1, 0.2];
    let y = [0.1f64, 0.25, -0.05];
    let eta2: f64 = (0..3).map(|i| (0.5 * (x[i] + y[i])).powi(2)).sum();
    let xi2: f64 = (0..3).map(|i| (x[i] - y[i]).powi(2)).sum();
    let exact = (2.0 * A / PI).powf(0.75) * (2.0 * C / PI).powf(0.75) / 0.16
        * (-A * eta2 - C * xi2 / 0.16).exp();
    assert!((k.eval(x, y) / exact - 1.0).abs() < 1e-6);
    assert_eq!(k.eval(x, y), k.eval(y, x));
}

#[test]
fn warns_when_alpha0_unresolved() {
    let p = Arc::new(PairProfile::gaussian(C, E0, 12.0, 100).unwrap());
    let k = build_pair_kernel(&gauss_psi(A), &p, 0.2).unwrap();
    assert!(!k.warnings.is_empty());
    let k = build_pair_kernel(&gauss_psi(A), &gauss_profile(C), 0.2).unwrap();
    assert!(k.warnings.is_empty());
}

#[test]
fn rank_one_singular_value() {
    let grid = Arc::new(RadialGrid::uniform(6.0, 600).unwrap());
    let u = RadialFunction::from_fn(grid.clone(), |r| (-r * r).exp());
    let v = RadialFunction::from_fn(grid, |r| (1.0 + r) * (-2.0 * r * r).exp());
    let k = RankOneKernel { u: u.clone(), v: v.clone() };
    let top = top_singular_value(&k, &SectorConfig::default(), Exec::Sequential).unwrap();
    // Midpoint sampling of smooth even data: compare with the grid norms.
    let exact = u.norm() * v.norm();
    assert!(top.converged);
    assert!(top.residual <= 1e-6);
    assert!((top.value / exact - 1.0).abs() < 1e-4, "{} {exact}", top.value);
    let k = RankOneKernel { u: u.clone(), v: u.clone() };
    let top = top_singular_value(&k, &SectorConfig::default(), Exec::Sequential).unwrap();
    assert!((top.value / u.norm_sq() - 1.0).abs() < 1e-8, "{}", top.value / u.norm_sq());
}

#[test]
fn top_singular_matches_mehler() {
    let p = gauss_profile(C);
    let mut scaled = Vec::new();
    for h in [0.5, 0.35, 0.25] {
        let k = build_pair_kernel(&gauss_psi(A), &p, h).unwrap();
        let top = top_singular_value(&k, &SectorConfig::default(), Exec::Parallel).unwrap();
        let (mu0, _) = mehler(A, C, h);
        assert!(top.converged && top.residual <= 1e-6);
        assert!((top.value / mu0 - 1.0).abs() < 1e-6, "h={h}: {} vs {mu0}", top.value);
        scaled.push(top.value / h.sqrt());
    }
    let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
    assert!(hi / lo < 2.0);
}

#[test]
fn schatten_norms_match_mehler() {
    let p = gauss_profile(C);
    let h = 0.5;
    let k = build_pair_kernel(&gauss_psi(A), &p, h).unwrap();
    let rep = schatten_norms(&k, &[2, 4, 6], &SectorConfig::default(), Exec::Parallel).unwrap();
    assert!((rep.norms[0].ratio - 1.0).abs() < 1e-8);
    assert!(rep.hs_captured > 1.0 - 1e-6, "{}", rep.hs_captured);
    for (norm, n) in rep.norms.iter().zip([2, 4, 6]) {
        let exact = mehler_schatten(A, C, h, n);
        assert!((norm.value / exact - 1.0).abs() < 1e-5, "n={n}: {} vs {exact}", norm.value);
        assert!(norm.tail_bound <= 1e-5 * exact);
    }
    let k2 = build_pair_kernel(&gauss_psi(A).scaled(2.0), &p, h).unwrap();
    let rep2 = schatten_norms(&k2, &[2, 4, 6], &SectorConfig::default(), Exec::Parallel).unwrap();
    for (a, b) in rep.norms.iter().zip(&rep2.norms) {
        let n = a.order as i32;
        assert!((b.value / a.value / 2f64.powi(n) - 1.0).abs() < 1e-9);
    }
    assert!(matches!(
        schatten_norms(&k, &[3], &SectorConfig::default(), Exec::Parallel),
        Err(crate::Error::Config(_))
    ));
}

#[test]
fn admissible_lambda_is_minimal_root() {
    let (s_sq, h) = (0.01f64, 0.3);
    let lambda = admissible_lambda(s_sq.sqrt(), h, 1e-9).unwrap();
    let oracle = find_root_scalar(|l| admissibility_polynomial(l, h, s_sq) - 1e-9, 0.0, 5.0, 1e-14).unwrap();
    assert!((lambda - oracle).abs() < 1e-10 * oracle, "{lambda} {oracle}");
    assert!(admissibility_polynomial(lambda, h, s_sq) >= 1e-9 * (1.0 - 1e-6));
    assert!(admissibility_polynomial(lambda / 2.0, h, s_sq) < 1e-9);
    // Decreasing in s² on [0, s₁²].
    for k in 0..10 {
        let s = s_sq * k as f64 / 10.0;
        assert!(admissibility_polynomial(lambda, h, s) >= admissibility_polynomial(lambda, h, s_sq));
    }
    assert!(matches!(admissible_lambda(0.7, 0.3, 1e-9), Err(crate::Error::Inadmissible { .. })));
}

#[test]
fn trial_state_of_gaussian_field() {
    let big = build_pair_kernel(&gauss_psi(A), &gauss_profile(C), 0.3).unwrap();
    assert!(matches!(
        make_trial_state(big, DEFAULT_MARGIN, &quick_sectors(), Exec::Parallel),
        Err(crate::Error::Inadmissible { .. })
    ));
    let k = build_pair_kernel(&gauss_psi(A).scaled(0.3), &gauss_profile(C), 0.3).unwrap();
    let t = make_trial_state(k, DEFAULT_MARGIN, &quick_sectors(), Exec::Parallel).unwrap();
    assert!(t.admissible && t.lambda > 0.0);
    assert!(t.polynomial_at_top() >= DEFAULT_MARGIN * 0.999);
    let halved = admissibility_polynomial(t.lambda / 2.0, 0.3, t.top_singular.value.powi(2));
    assert!(halved < DEFAULT_MARGIN);
}

#[test]
fn quadratic_terms_for_gaussians() {
    let p = gauss_profile(C);
    let h = 0.4;
    let d = 0.3;
    let psi = gauss_psi(A);
    let k = build_pair_kernel(&psi, &p, h).unwrap();
    let q = quadratic_energy(&k, &model(h, d), &QuadratureConfig::default(), Exec::Parallel).unwrap();
    let w = Trap::Harmonic { coefficient: 1.0 }.sample(psi.grid());
    let parts = crate::gp::parts(&psi, &w).unwrap();
    assert!((q.kinetic_com - h * parts.kinetic).abs() < 1e-12 * q.kinetic_com);
    assert!(q.relative_residual.abs() <= 1e-5 * psi.norm_sq() / h);
    let closed = h * 3.0 / (4.0 * A) + h.powi(3) / 4.0 * 3.0 / (4.0 * C);
    assert!((q.w_term / closed - 1.0).abs() < 1e-6, "{} vs {closed}", q.w_term);
    let harmonic = harmonic_trap_term(&psi, &p, 1.0, h);
    assert!((q.w_term / harmonic - 1.0).abs() < 1e-6);
    assert!((q.d_term + h * d * psi.norm_sq()).abs() < 1e-10);
}

#[test]
fn quadratic_semiclassical_order() {
    let p = gauss_profile(C);
    let psi = gauss_psi(A);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for h in [0.5, 0.4, 0.3, 0.2, 0.15] {
        let k = build_pair_kernel(&psi, &p, h).unwrap();
        let q = quadratic_energy(&k, &model(h, 0.3), &QuadratureConfig::default(), Exec::Parallel).unwrap();
        xs.push(h.ln());
        ys.push((q.total - q.gp_quadratic).abs().ln());
    }
    let (slope, _, _) = crate::numerics::linear_fit(&xs, &ys);
    assert!(slope >= 1.9, "{slope}");
}

#[test]
fn decomposition_identities() {
    let p = gauss_profile(C);
    let h = 0.35;
    let psi = gauss_psi(A);
    let k = build_pair_kernel(&psi, &p, h).unwrap();
    let dec = decompose_alpha(&k).unwrap();
    assert!(dec.identities.psi_deviation < 1e-10);
    assert!(dec.identities.remainder_norm_sq.abs() < 1e-10 * dec.identities.alpha_norm_sq);

    let chi = psi.map(|r, v| 0.3 * r * v);
    let rho_raw = RadialFunction::from_fn(p.grid().clone(), |r| (1.0 - r * r) * (-0.8 * r * r).exp());
    let rem = Remainder::orthogonal(chi.clone(), &rho_raw, &p).unwrap();
    let kr = k.clone().with_remainder(rem).unwrap();
    let dec = decompose_alpha(&kr).unwrap();
    let id = dec.identities;
    assert!(id.psi_deviation < 1e-10);
    assert!(id.orthogonality_defect < 1e-10);
    assert!(id.pythagoras_residual < 1e-10);
    assert!(id.input_defect < 1e-12);
    assert!(id.remainder_norm_sq > 0.0);

    let bad = Remainder {
        chi: chi.clone(),
        rho: p.alpha0.clone(),
    };
    let dec = decompose_alpha(&k.clone().with_remainder(bad).unwrap()).unwrap();
    let expect = psi.add(&chi.scaled(h * h)).unwrap();
    let dev = dec
        .psi
        .values()
        .iter()
        .zip(expect.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(dev < 1e-10, "{dev}");
    assert!((dec.identities.scaling - h * h).abs() < 1e-12);
    assert!(dec.identities.input_defect > 1e-3);
    assert!(dec.identities.orthogonality_defect < 1e-10);
    assert!(dec.identities.pythagoras_residual < 1e-10);
}

#[test]
fn relative_residual_of_solved_pair() {
    let sol = TwoBodySolution::solve(&Interaction::default(), &TwoBodyConfig::default()).unwrap();
    let p = Arc::new(PairProfile::from_solution(&sol).unwrap());
    assert!(p.eigen_residual.abs() < 1e-8, "{}", p.eigen_residual);
    let psi = gauss_psi(A);
    let h = 0.3;
    let k = build_pair_kernel(&psi, &p, h).unwrap();
    let q = quadratic_energy(&k, &model(h, 0.3), &QuadratureConfig::default(), Exec::Parallel).unwrap();
    assert!(q.relative_residual.abs() <= 1e-6 * psi.norm_sq() / h);
}

#[test]
fn quartic_traces_match_gaussian_oracle() {
    let h = 0.4;
    let d = 0.3;
    let k = build_pair_kernel(&gauss_psi(A), &gauss_profile(C), h).unwrap();
    let cfg = McConfig {
        samples: 1_000_000,
        ..McConfig::default()
    };
    let mc = quartic_trace_mc(&k, &model(h, d), &cfg, Exec::Parallel).unwrap();
    let (t0, tk, tw) = gaussian_quartic(A, C, h, E0);
    assert!((t0 - 0.8981186572).abs() < 1e-9);
    assert!((tk - 1.5557410962).abs() < 1e-9);
    assert!((tw - 0.0741646429).abs() < 1e-9);
    for (est, exact) in [(mc.plain, t0), (mc.shifted, tk), (mc.trap, tw), (mc.hbar, tk + tw - d * h * h * t0)] {
        assert!((est.mean - exact).abs() < 3.0 * est.stderr + 2e-5 * exact.abs(), "{est:?} vs {exact}");
        assert!(est.relative_error() < 1e-2);
    }
    assert!(mc.warnings.is_empty());
}

#[test]
fn monte_carlo_is_deterministic_and_consistent() {
    let h = 0.35;
    let k = build_pair_kernel(&gauss_psi(A), &gauss_profile(C), h).unwrap();
    let m = model(h, 0.3);
    let base = McConfig {
        samples: 200_000,
        control_variates: false,
        ..McConfig::default()
    };
    let a = quartic_trace_mc(&k, &m, &base, Exec::Parallel).unwrap();
    let b = quartic_trace_mc(&k, &m, &base, Exec::Sequential).unwrap();
    assert_eq!(a, b);
    let doubled = McConfig {
        samples: 400_000,
        ..base
    };
    let c = quartic_trace_mc(&k, &m, &doubled, Exec::Parallel).unwrap();
    let ratio = a.hbar.stderr / c.hbar.stderr;
    assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.2, "{ratio}");
    let other = McConfig { seed: 7, ..base };
    let e = quartic_trace_mc(&k, &m, &other, Exec::Parallel).unwrap();
    let comb = (a.hbar.stderr.powi(2) + e.hbar.stderr.powi(2)).sqrt();
    assert!((a.hbar.mean - e.hbar.mean).abs() < 3.0 * comb);
    let few = McConfig { samples: 1000, ..base };
    assert!(matches!(quartic_trace_mc(&k, &m, &few, Exec::Parallel), Err(crate::Error::Config(_))));
}

#[test]
fn energy_breakdown_assembly() {
    let h = 0.3;
    let d = 1.8;
    let k = build_pair_kernel(&gauss_psi(A).scaled(0.3), &gauss_profile(C), h).unwrap();
    let t = make_trial_state(k, DEFAULT_MARGIN, &quick_sectors(), Exec::Parallel).unwrap();
    let cfg = McConfig {
        samples: 200_000,
        ..McConfig::default()
    };
    let e = trial_bcs_energy(&t, &model(h, d), &QuadratureConfig::default(), &cfg, Exec::Parallel).unwrap();
    let weight = 1.0 + t.lambda * h;
    assert!((e.total_bcs.mean - (e.quadratic + weight * e.quartic.mean)).abs() < 1e-12);
    assert!(e.reduction_slack.mean >= -3.0 * e.reduction_slack.stderr);
    // For W = |x|² the quadratic part exceeds its GP counterpart by (h³/4)‖ψ‖²‖|·|α₀‖².
    let mass = 0.09;
    let shift = h.powi(3) / 4.0 * mass * 3.0 / (4.0 * C);
    let extra = e.quadratic - e.gp_quadratic - e.quad_relative_residual;
    assert!((extra - shift).abs() < 1e-6 * shift, "{extra} {shift}");
    assert!((e.total_bcs.mean / h - e.gp_reference / h).abs() < 1.0 * h);
    let wrong = model(0.4, d);
    assert!(trial_bcs_energy(&t, &wrong, &QuadratureConfig::default(), &cfg, Exec::Parallel).is_err());
}
