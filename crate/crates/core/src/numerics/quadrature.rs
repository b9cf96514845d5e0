//! Gauss-Legendre rules and interpolatory panel weights.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|t| half * t).collect(),
    )
}

/// Composite Gauss-Legendre rule with `panels` equal panels of `order` nodes.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(lo + 0.5 * width * (xi + 1.0));
            weights.push(0.5 * width * wi);
        }
    }
    (nodes, weights)
}

/// Weights for `∫₀^{n·dr} g(r) dr` on the nodes `dr, 2dr, …, n·dr`, for
/// integrands with `g(0) = 0` (the origin carries no weight).
///
/// Trapezoid rule with Gregory end corrections through fourth differences at
/// the right end only: the Euler-Maclaurin terms at the origin vanish for
/// even integrands, so `r² f(r)` with even smooth `f` is integrated with
/// spectral accuracy there.
pub fn gregory_weights(n: usize, dr: f64) -> Vec<f64> {
    assert!(n >= 5, "need at least five nodes");
    let mut q = vec![dr; n];
    q[n - 1] = 0.5 * dr;
    // Backward differences ∇^k g_n = Σ_j (−1)^j C(k, j) g_{n−j}.
    const C: [f64; 4] = [1.0 / 12.0, 1.0 / 24.0, 19.0 / 720.0, 3.0 / 160.0];
    for (k, c) in C.iter().enumerate() {
        let order = k + 1;
        let mut binom = 1.0;
        for j in 0..=order {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            q[n - 1 - j] -= dr * c * sign * binom;
            binom = binom * (order - j) as f64 / (j + 1) as f64;
        }
    }
    q
}

/// Weights `w_i` with `Σ w_i f(r_i) ≈ ∫₀^{r_last} f(r) r² dr` for increasing
/// nodes `r` in `(0, r_last]` (the origin is not a node).
///
/// Product integration: `f` is interpolated by cubics on panels of three
/// intervals (the first panel `[0, r_3]` uses the stencil `r_1..r_4`, a
/// trailing remainder reuses the last four nodes) and integrated exactly
/// against `r²`. The first `linear_head` intervals use piecewise-linear
/// interpolation instead, which keeps the weights positive on grids that are
/// strongly clustered at the origin.
pub fn radial_product_weights(r: &[f64], linear_head: usize) -> Vec<f64> {
    let n = r.len();
    assert!(n >= 4 && linear_head + 1 < n, "need at least four nodes");
    let mut w = vec![0.0; n];
    // interval k is [t_k, t_{k+1}] with t_0 = 0, t_k = r_{k-1}
    let t = |k: usize| if k == 0 { 0.0 } else { r[k - 1] };
    let mut a = if linear_head == 0 {
        add_product_integral(r, 0, 4, 0.0, t(3), &mut w);
        3
    } else {
        add_product_integral(r, 0, 2, 0.0, t(1), &mut w);
        for k in 1..linear_head {
            add_product_integral(r, k - 1, 2, t(k), t(k + 1), &mut w);
        }
        linear_head
    };
    while a < n {
        let b = (a + 3).min(n);
        let lo = if b - a == 3 { a - 1 } else { n - 4 };
        add_product_integral(r, lo, 4, t(a), t(b), &mut w);
        a = b;
    }
    w
}

/// Adds `∫_a^b ℓ_j(x) x² dx` for the Lagrange basis on `r[lo..lo+len]`.
fn add_product_integral(r: &[f64], lo: usize, len: usize, a: f64, b: f64, out: &mut [f64]) {
    // Four-point Gauss is exact for degree ≤ 7 ≥ 3 + 2.
    let (x, wq) = gauss_legendre_on(4, a, b);
    let nodes = &r[lo..lo + len];
    for (xq, wq) in x.iter().zip(&wq) {
        for j in 0..len {
            let mut l = 1.0;
            for k in 0..len {
                if k != j {
                    l *= (xq - nodes[k]) / (nodes[j] - nodes[k]);
                }
            }
            out[lo + j] += wq * l * xq * xq;
        }
    }
}

/// Legendre polynomials `P_0..=P_lmax` at `x`, written into `out`.
pub fn legendre_all(lmax: usize, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if lmax == 0 {
        return;
    }
    out[1] = x;
    for l in 2..=lmax {
        let lf = l as f64;
        out[l] = ((2.0 * lf - 1.0) * x * out[l - 1] - (lf - 1.0) * out[l - 2]) / lf;
    }
}
