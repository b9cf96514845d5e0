use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use super::*;
use crate::numerics::quadrature::composite_gauss;
use crate::Error;

/// `u'/u` at `R` of `u'' = −k² u`, `u(0) = 0`, by RK4.
fn interior_log_derivative(k: f64, radius: f64) -> f64 {
    let n = 20_000;
    let dt = radius / n as f64;
    let (mut u, mut v) = (0.0, 1.0);
    let f = |u: f64, v: f64| (v, -k * k * u);
    for _ in 0..n {
        let k1 = f(u, v);
        let k2 = f(u + 0.5 * dt * k1.0, v + 0.5 * dt * k1.1);
        let k3 = f(u + 0.5 * dt * k2.0, v + 0.5 * dt * k2.1);
        let k4 = f(u + dt * k3.0, v + dt * k3.1);
        u += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    v / u
}

#[test]
fn square_well_matches_integrated_matching_condition() {
    for (v0, r) in [(4.0, 1.0), (2.6, 1.0), (10.0, 0.7)] {
        let e0 = square_well_oracle(v0, r).unwrap();
        assert!(e0 > 0.0 && e0 < v0);
        let k = (v0 - e0).sqrt();
        assert!((interior_log_derivative(k, r) + e0.sqrt()).abs() < 1e-8);
    }
}

#[test]
fn square_well_threshold_and_deep_limit() {
    assert_eq!(square_well_oracle(2.4, 1.0), None);
    assert_eq!(square_well_oracle(PI * PI / 4.0 - 1e-9, 1.0), None);
    assert!(square_well_oracle(PI * PI / 4.0 + 1e-6, 1.0).unwrap() < 1e-6);
    // Wide wells approach a box of effective width R + 1/κ.
    let e = square_well_oracle(4.0, 50.0).unwrap();
    assert!((4.0 - e - (PI / 50.5).powi(2)).abs() < 1e-6, "{e}");
    assert!((square_well_oracle(4.0, 100.0).unwrap() - 4.0).abs() < 1e-3);
    assert_eq!(square_well_oracle(-1.0, 1.0), None);
}

#[test]
fn harmonic_closed_form_solves_the_equation() {
    let o = harmonic_oracle(0.25, 1.0);
    assert_eq!((o.energy, o.gamma), (1.5, 1.0));
    let o = harmonic_oracle(1.0, 1.0);
    assert_eq!((o.energy, o.gamma), (3.0, 0.5));
    assert!((harmonic_oracle(0.3, 4.0 * 0.7).energy - 2.0 * harmonic_oracle(0.3, 0.7).energy).abs() < 1e-14);
    for (a, b) in [(0.25, 1.0), (0.7, 2.3)] {
        let o = harmonic_oracle(a, b);
        let f = |r: f64| (-o.gamma * r * r).exp();
        let dr = 1e-3;
        for r in [0.3, 0.9, 1.7] {
            let lap = (f(r + dr) - 2.0 * f(r) + f(r - dr)) / (dr * dr) + 2.0 / r * (f(r + dr) - f(r - dr)) / (2.0 * dr);
            let res = -a * lap + b * r * r * f(r) - o.energy * f(r);
            assert!(res.abs() < 1e-6 * o.energy, "{res}");
        }
    }
}

fn radial_integral(f: impl Fn(f64) -> f64, r_max: f64) -> f64 {
    let (x, w) = composite_gauss(0.0, r_max, 200, 12);
    x.iter().zip(&w).map(|(r, w)| 4.0 * PI * r * r * f(*r) * w).sum()
}

#[test]
fn g_bcs_and_l4_against_quadrature() {
    for (gamma, e0) in [(0.5, 0.5), (1.3, 0.2)] {
        let amp = (2.0 * gamma / PI).powf(0.75);
        let q = (2.0 * PI).powi(3) * radial_integral(|p| (p * p + e0) * (amp * (-gamma * p * p).exp()).powi(4), 20.0);
        assert!((q / gaussian_g_bcs(gamma, e0) - 1.0).abs() < 1e-10);
    }
    assert!((gaussian_g_bcs(0.5, 0.5) - 8.0 * (PI / 2.0).powf(1.5) * 1.25).abs() < 1e-12);
    let g = GaussianCase { psi_width: 1.0, ..reference_gaussian() };
    let l4 = gaussian_calculus_oracle(&g, GaussianPiece::PsiL4).unwrap();
    assert!((l4 - PI.powf(-1.5)).abs() < 1e-14);
    let amp = (2.0 / PI).powf(0.75);
    let q = radial_integral(|r| (amp * (-r * r).exp()).powi(4), 10.0);
    assert!((q / l4 - 1.0).abs() < 1e-10);
}

/// Nyström discretization of the one-dimensional factor
/// `k(x, y) = exp(−a(x+y)²/4 − c(x−y)²/h²)` of the trial kernel.
struct Factor {
    x: Vec<f64>,
    w: Vec<f64>,
    k: DMatrix<f64>,
    dk: DMatrix<f64>,
}

impl Factor {
    fn new(case: &GaussianCase) -> Self {
        let (a, c, h) = (case.psi_width, case.alpha_width, case.h);
        let (x, w) = composite_gauss(-8.0, 8.0, 80, 12);
        let n = x.len();
        let k = DMatrix::from_fn(n, n, |i, j| {
            let (s, d) = (x[i] + x[j], x[i] - x[j]);
            (-a * s * s / 4.0 - c * d * d / (h * h)).exp()
        });
        let dk = DMatrix::from_fn(n, n, |i, j| {
            let (s, d) = (x[i] + x[j], x[i] - x[j]);
            k[(i, j)] * (-a * s / 2.0 - 2.0 * c * d / (h * h))
        });
        Self { x, w, k, dk }
    }

    fn weighted(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.x.len();
        DMatrix::from_fn(n, n, |i, j| m[(i, j)] * self.w[j])
    }

    fn top(&self) -> f64 {
        let n = self.x.len();
        let s = DMatrix::from_fn(n, n, |i, j| self.w[i].sqrt() * self.k[(i, j)] * self.w[j].sqrt());
        SymmetricEigen::new(s).eigenvalues.iter().copied().fold(f64::MIN, f64::max)
    }

    /// `(tr k⁴, tr(−∂²k⁴), tr(x²k⁴))`.
    fn quartic(&self) -> (f64, f64, f64) {
        let k2 = self.weighted(&self.k) * &self.k;
        let dk2 = self.weighted(&self.dk) * &self.k;
        let n = self.x.len();
        let (mut t0, mut t1, mut t2) = (0.0, 0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let ww = self.w[i] * self.w[j];
                t0 += ww * k2[(i, j)].powi(2);
                t1 += ww * dk2[(i, j)].powi(2);
                t2 += ww * self.x[i].powi(2) * k2[(i, j)].powi(2);
            }
        }
        (t0, t1, t2)
    }
}

fn prefactor(case: &GaussianCase) -> f64 {
    let amp = |w: f64| (2.0 * w / PI).powf(0.75);
    case.psi_scale * amp(case.psi_width) * amp(case.alpha_width) / (case.h * case.h)
}

fn cases() -> Vec<GaussianCase> {
    let g = reference_gaussian();
    vec![
        g,
        GaussianCase { h: 0.5, psi_scale: 0.3, ..g },
        GaussianCase { h: 0.25, psi_width: 0.6, alpha_width: 0.8, trap: 2.0, e0: 1.1, ..g },
    ]
}

#[test]
fn singular_values_and_schatten_against_nystrom() {
    for g in cases() {
        let f = Factor::new(&g);
        let a = prefactor(&g);
        let s1 = a * f.top().powi(3);
        let exact = gaussian_calculus_oracle(&g, GaussianPiece::TopSingular).unwrap();
        assert!((s1 / exact - 1.0).abs() < 1e-8, "{s1} {exact}");
        let hs: f64 = f.weighted(&f.k).component_mul(&f.weighted(&f.k).transpose()).sum();
        let hs = a * a * hs.powi(3);
        let exact = gaussian_calculus_oracle(&g, GaussianPiece::HsNorm).unwrap();
        assert!((hs / exact - 1.0).abs() < 1e-8, "{hs} {exact}");
        let s4 = gaussian_calculus_oracle(&g, GaussianPiece::Schatten(4)).unwrap();
        let plain = gaussian_calculus_oracle(&g, GaussianPiece::QuarticPlain).unwrap();
        assert!((s4 / plain - 1.0).abs() < 1e-12);
    }
}

#[test]
fn quartic_traces_against_nested_quadrature() {
    for g in cases() {
        let f = Factor::new(&g);
        let a4 = prefactor(&g).powi(4);
        let (t0, t1, t2) = f.quartic();
        let h2 = g.h * g.h;
        let plain = a4 * t0.powi(3);
        let shifted = a4 * (3.0 * h2 * t1 * t0 * t0 + g.e0 * t0.powi(3));
        let trap = a4 * 3.0 * h2 * g.trap * t2 * t0 * t0;
        let hbar = shifted + trap - h2 * g.d * plain;
        for (piece, q) in [
            (GaussianPiece::QuarticPlain, plain),
            (GaussianPiece::QuarticShifted, shifted),
            (GaussianPiece::QuarticTrap, trap),
            (GaussianPiece::QuarticHbar, hbar),
        ] {
            let exact = gaussian_calculus_oracle(&g, piece).unwrap();
            assert!((q / exact - 1.0).abs() < 1e-8, "{piece:?}: {q} {exact}");
        }
    }
}

#[test]
fn w_term_against_quadrature() {
    for g in cases() {
        let f = Factor::new(&g);
        let a2 = prefactor(&g).powi(2);
        let n = f.x.len();
        let (mut t0, mut t2) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let v = f.w[i] * f.w[j] * f.k[(i, j)].powi(2);
                t0 += v;
                t2 += v * f.x[i].powi(2);
            }
        }
        let q = g.h * g.h * g.trap * a2 * 3.0 * t2 * t0 * t0;
        let exact = gaussian_calculus_oracle(&g, GaussianPiece::WTerm).unwrap();
        assert!((q / exact - 1.0).abs() < 1e-8, "{q} {exact}");
    }
}

#[test]
fn zero_field_and_invalid_descriptors() {
    let g = GaussianCase { psi_scale: 0.0, ..reference_gaussian() };
    assert_eq!(gaussian_calculus_oracle(&g, GaussianPiece::QuarticHbar).unwrap(), 0.0);
    let bad = GaussianCase { alpha_width: -1.0, ..reference_gaussian() };
    assert!(matches!(gaussian_calculus_oracle(&bad, GaussianPiece::HsNorm), Err(Error::Domain(_))));
    assert!(GaussianCase::trap_coefficient(&crate::Trap::default()).is_ok());
    let power = crate::Trap::Power { beta: 4.0, c1: 1.0, c2: 1.0 };
    assert!(matches!(GaussianCase::trap_coefficient(&power), Err(Error::Domain(_))));
}

#[test]
fn table_is_complete_and_serializable() {
    let t = oracle_table().unwrap();
    assert_eq!(t.version, ORACLE_TABLE_VERSION);
    assert_eq!(t.get("square_well_v2.4_r1").unwrap().expected, None);
    assert!((t.get("g_bcs_gaussian").unwrap().expected.unwrap() - 19.687).abs() < 1e-3);
    let json = serde_json::to_string(&t).unwrap();
    let back: OracleTable = serde_json::from_str(&json).unwrap();
    assert_eq!(back, t);
}
