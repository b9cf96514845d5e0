use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::numerics::RadialGrid;

fn square_well(depth: f64) -> Interaction {
    Interaction::SphericalWell { depth, radius: 1.0 }
}

/// Root of `k cot k = −κ`, `k² = V₀ − E`, `κ² = E`, by bisection.
fn square_well_oracle(v0: f64) -> f64 {
    let f = |e: f64| {
        let k = (v0 - e).sqrt();
        k / k.tan() + e.sqrt()
    };
    let (mut lo, mut hi) = (1e-14, v0.min((PI * PI) - 1e-9).min(v0 - 1e-12));
    // restrict to the branch k ∈ (π/2, π)
    hi = hi.min(v0 - PI * PI / 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn square_well_matches_transcendental_root() {
    let exact = square_well_oracle(4.0);
    assert!((exact - 0.4071014836413114).abs() < 1e-12);
    let grid = Arc::new(RadialGrid::uniform(20.0, 16000).unwrap());
    let gs = solve_ground_state(&square_well(4.0), &grid).unwrap();
    assert!((gs.e0 - exact).abs() < 1e-6, "{} vs {exact}", gs.e0);
    assert!(gs.residual < 1e-8);
    assert!((gs.alpha0.norm() - 1.0).abs() < 1e-12);
    assert!(gs.p_wave_bottom > -gs.e0);
}

#[test]
fn bound_state_threshold() {
    let grid = Arc::new(RadialGrid::uniform(60.0, 12000).unwrap());
    assert!(matches!(
        solve_ground_state(&square_well(2.4), &grid),
        Err(Error::NoBoundState { .. })
    ));
    let gs = solve_ground_state(&square_well(2.6), &grid).unwrap();
    assert!(gs.e0 > 0.0);
}

#[test]
fn underresolved_grid_is_rejected() {
    let grid = Arc::new(RadialGrid::uniform(20.0, 400).unwrap());
    assert!(matches!(
        solve_ground_state(&square_well(4.0), &grid),
        Err(Error::Config(_))
    ));
}

#[test]
fn default_gaussian_well_has_unit_binding_energy() {
    let sol = TwoBodySolution::solve(&Interaction::default(), &TwoBodyConfig::default()).unwrap();
    assert!((sol.e0 - 1.0).abs() < 1e-7, "{}", sol.e0);
    assert!(sol.residual <= 1e-8);
    assert!((sol.alpha0_hat.norm() - 1.0).abs() < 1e-8);
    assert!(sol.fourier_tail_warning.is_none());
    assert!(sol.gap.gap > 0.0);
    assert!((sol.decay.rate - 1.0).abs() < 0.05);
    let g = compute_g_bcs(&sol);
    assert!(g.g_bcs > 0.0 && !g.tail_warning);
}

#[test]
fn tuned_depth_reproduces_default() {
    let depth = tune_gaussian_depth(1.0, 1.0, &TwoBodyConfig::default()).unwrap();
    assert!((depth - crate::model::DEFAULT_GAUSSIAN_DEPTH).abs() < 1e-6, "{depth}");
}

#[test]
fn gap_decreases_with_eps_and_fails_near_one() {
    let grid = Arc::new(RadialGrid::uniform(24.0, 6000).unwrap());
    let i = Interaction::default();
    let gs = solve_ground_state(&i, &grid).unwrap();
    let v = i.sample(&grid);
    let mut prev = f64::INFINITY;
    for eps in [0.1, 0.3, 0.5, 0.6] {
        let g = compute_spectral_gap(&gs, &v, eps, 4).unwrap().gap;
        assert!(g < prev);
        prev = g;
    }
    assert!(matches!(
        compute_spectral_gap(&gs, &v, 0.99, 4),
        Err(Error::GapViolated { .. })
    ));
}

#[test]
fn square_well_decay_rate() {
    let sol = TwoBodySolution::solve(&square_well(4.0), &TwoBodyConfig::default()).unwrap();
    let b = sol.e0.sqrt();
    assert!((sol.decay.rate / b - 1.0).abs() < 0.05, "{} vs {b}", sol.decay.rate);
    assert!(!sol.decay.short_tail);
}

#[test]
fn gaussian_moments() {
    let g = Arc::new(RadialGrid::uniform(12.0, 1200).unwrap());
    let a = RadialFunction::from_fn(g.clone(), |r| PI.powf(-0.75) * (-0.5 * r * r).exp());
    let v = RadialFunction::from_fn(g.clone(), |r| -(-r * r).exp());
    let m = alpha0_diagnostics(&a, &a, &v, 2.0);
    assert!((m.first.powi(2) - 1.5).abs() < 1e-10);
    assert!((a.norm() - 1.0).abs() < 1e-10);
    assert!((m.hat_l2 - 1.0).abs() < 1e-10);
}

#[test]
fn gaussian_g_bcs_oracle() {
    let pg = Arc::new(RadialGrid::uniform(12.0, 1200).unwrap());
    let hat = RadialFunction::from_fn(pg, |p| PI.powf(-0.75) * (-0.5 * p * p).exp());
    let e0 = 0.5;
    let expected = 8.0 * (PI / 2.0).powf(1.5) * (e0 + 0.75);
    let g = g_bcs_from_transform(&hat, e0);
    assert!((g.g_bcs - expected).abs() < 1e-9, "{} vs {expected}", g.g_bcs);
    assert!((expected - 19.687).abs() < 1e-3);
    // homogeneity and linearity in E₀
    let scaled = g_bcs_from_transform(&hat.scaled(1.7), e0);
    assert!((scaled.g_bcs / g.g_bcs - 1.7f64.powi(4)).abs() < 1e-12);
    let shifted = g_bcs_from_transform(&hat, e0 + 0.3);
    let l4 = hat.lp_norm_pow(4.0);
    assert!((shifted.g_bcs - g.g_bcs - (2.0 * PI).powi(3) * 0.3 * l4).abs() < 1e-10);
}
