use std::f64::consts::PI;
use std::sync::Arc;

use bcsgp::asymptotics::{fit_power_law, widen_bracket};
use bcsgp::bcs::{admissibility_polynomial, admissible_lambda, build_pair_kernel, McEstimate, PairProfile};
use bcsgp::gp::{gp_energy, parts};
use bcsgp::numerics::quadrature::composite_gauss;
use bcsgp::numerics::radial_fourier;
use bcsgp::oracles::square_well_oracle;
use bcsgp::twobody::g_bcs_from_transform;
use bcsgp::{RadialFunction, RadialGrid};
use proptest::prelude::*;

fn gaussian_mix(grid: &Arc<RadialGrid>, terms: &[(f64, f64)]) -> RadialFunction {
    RadialFunction::from_fn(grid.clone(), |r| terms.iter().map(|(c, a)| c * (-a * r * r).exp()).sum())
}

fn terms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, 0.6..3.0f64), 1..4)
        .prop_filter("nonzero field", |t| t.iter().map(|(c, _)| c.abs()).sum::<f64>() > 0.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauss_rule_is_exact_on_polynomials(
        coeffs in prop::collection::vec(-2.0..2.0f64, 1..12),
        a in -3.0..0.0f64,
        len in 0.1..5.0f64,
        panels in 1usize..6,
    ) {
        // order 6 integrates degree ≤ 11 exactly
        let b = a + len;
        let (x, w) = composite_gauss(a, b, panels, 6);
        let p = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * p(*x)).sum();
        let exact: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0))
            .sum();
        let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.abs() * a.abs().max(b.abs()).powi(k as i32 + 1)).sum();
        prop_assert!((got - exact).abs() <= 1e-13 * scale.max(1.0), "{got} vs {exact}");
    }

    #[test]
    fn gp_energy_is_quadratic_in_mass_scaling(t in terms(), d in -1.0..3.0f64, g in 0.1..40.0f64) {
        let grid = Arc::new(RadialGrid::uniform(8.0, 400).unwrap());
        let w = RadialFunction::from_fn(grid.clone(), |r| r * r);
        let psi = gaussian_mix(&grid, &t);
        let p = parts(&psi, &w).unwrap();
        let q = p.kinetic + p.potential - d * p.mass;
        let quartic = g * p.quartic;
        for s in [0.25, 1.0, 2.5] {
            let e = gp_energy(&psi.scaled(f64::sqrt(s)), &w, d, g).unwrap();
            let expected = s * q + s * s * quartic;
            prop_assert!((e - expected).abs() <= 1e-10 * (s * q.abs() + s * s * quartic.abs()).max(1e-12));
        }
    }

    #[test]
    fn hilbert_schmidt_norm_scales_inversely_with_h(t in terms(), h in 0.12..0.9f64, c in 0.5..2.0f64) {
        let grid = Arc::new(RadialGrid::uniform(8.0, 400).unwrap());
        let psi = gaussian_mix(&grid, &t);
        let profile = Arc::new(PairProfile::gaussian(c, 0.7, 10.0, 800).unwrap());
        let k = build_pair_kernel(&psi, &profile, h).unwrap();
        let expected = psi.norm_sq() * profile.norm_sq / h;
        prop_assert!((k.hs_norm_sq().unwrap() - expected).abs() <= 1e-8 * expected);
    }

    #[test]
    fn admissible_lambda_clears_the_margin(s1 in 0.0..0.38f64, h in 0.05..0.95f64, margin in 0.0..1e-3f64) {
        let Ok(lambda) = admissible_lambda(s1, h, margin) else {
            return Ok(());
        };
        prop_assert!(lambda >= 0.0);
        for i in 0..=64 {
            let s_sq = s1 * s1 * i as f64 / 64.0;
            let p = admissibility_polynomial(lambda, h, s_sq);
            prop_assert!(p >= margin - 1e-12, "p({s_sq}) = {p} below {margin}");
        }
        if s1 > 1e-3 && margin > 0.0 {
            prop_assert!(admissibility_polynomial(lambda / 2.0, h, s1 * s1) < margin);
        }
    }

    #[test]
    fn fourier_transform_is_unitary_and_involutive(t in terms()) {
        let fg = Arc::new(RadialGrid::uniform(12.0, 1000).unwrap());
        let pg = Arc::new(fg.conjugate(1000).unwrap());
        let f = gaussian_mix(&fg, &t);
        let fhat = radial_fourier(&f, &pg).function;
        prop_assert!((fhat.norm_sq() - f.norm_sq()).abs() <= 1e-8 * f.norm_sq());
        let back = radial_fourier(&fhat, &fg).function;
        prop_assert!(back.add(&f.scaled(-1.0)).unwrap().norm() <= 1e-8 * f.norm());
    }

    #[test]
    fn pairing_coefficient_homogeneity(gamma in 0.3..2.0f64, e0 in 0.05..3.0f64, c in 0.2..3.0f64, shift in 0.0..2.0f64) {
        let pg = Arc::new(RadialGrid::uniform(14.0, 1400).unwrap());
        let a = RadialFunction::from_fn(pg.clone(), |p| (-gamma * p * p).exp());
        let g = g_bcs_from_transform(&a, e0).g_bcs;
        prop_assert!(g > 0.0);
        let scaled = g_bcs_from_transform(&a.scaled(c), e0).g_bcs;
        prop_assert!((scaled - c.powi(4) * g).abs() <= 1e-12 * scaled);
        let l4 = 4.0 * PI * pg.nodes().iter().zip(pg.weights()).zip(a.values()).map(|((_, w), a)| w * a.powi(4)).sum::<f64>();
        let shifted = g_bcs_from_transform(&a, e0 + shift).g_bcs;
        prop_assert!((shifted - g - (2.0 * PI).powi(3) * shift * l4).abs() <= 1e-12 * shifted);
    }

    #[test]
    fn power_law_fit_recovers_clean_powers(exponent in 0.5..3.0f64, prefactor in 0.01..10.0f64, sign in prop::bool::ANY) {
        let s = if sign { 1.0 } else { -1.0 };
        let pts: Vec<(f64, McEstimate)> = [0.5, 0.4, 0.3, 0.2, 0.15]
            .iter()
            .map(|&h: &f64| (h, McEstimate { mean: s * prefactor * h.powf(exponent), stderr: 0.0 }))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        prop_assert!((fit.exponent - exponent).abs() < 1e-9);
        prop_assert!((fit.prefactor - prefactor).abs() < 1e-9 * prefactor);
        prop_assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn widened_brackets_move_toward_a_sign_change(lo in 0.01..2.0f64, width in 0.01..2.0f64, case in 0u8..3) {
        let e_w = 0.0;
        let hi = lo + width;
        let (f_lo, f_hi) = match case {
            0 => (-1.0, -2.0),
            1 => (0.0, -1.0),
            _ => (0.0, 0.0),
        };
        let (a, b) = widen_bracket(lo, hi, f_lo, f_hi, e_w);
        prop_assert!(a < b);
        match case {
            0 => prop_assert!(a < lo && a > e_w),
            1 => prop_assert!(b == hi && a > e_w),
            _ => prop_assert!(b > hi && a == lo),
        }
    }

    #[test]
    fn square_well_energy_lies_in_the_well(v0 in 0.0..40.0f64, radius in 0.3..3.0f64) {
        match square_well_oracle(v0, radius) {
            Some(e0) => {
                prop_assert!(v0 * radius * radius > PI * PI / 4.0);
                prop_assert!(e0 > 0.0 && e0 < v0);
                let k = (v0 - e0).sqrt();
                let kappa = e0.sqrt();
                prop_assert!((k / (k * radius).tan() + kappa).abs() < 1e-8 * k.max(1.0));
            }
            None => prop_assert!(v0 * radius * radius <= PI * PI / 4.0 + 1e-9),
        }
    }
}
