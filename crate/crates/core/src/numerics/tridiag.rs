use crate::{Error, Result};

/// Real symmetric tridiagonal matrix stored by diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// `LDLᵀ` factorization of `T − σ` (no pivoting).
#[derive(Debug, Clone)]
pub struct Factorization {
    d: Vec<f64>,
    l: Vec<f64>,
    negative: usize,
}

impl Factorization {
    /// Number of negative pivots, i.e. eigenvalues of `T` below `σ`.
    pub fn negative_pivots(&self) -> usize {
        self.negative
    }

    pub fn is_positive_definite(&self) -> bool {
        self.negative == 0 && self.d.iter().all(|&d| d > 0.0)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
        x
    }
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Config(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..self.len() {
            let b2 = if i > 0 { self.off[i - 1] * self.off[i - 1] } else { 0.0 };
            q = self.diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::Config(format!("eigenvalue index {k} out of range")));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        lo -= 1e-12 * scale;
        hi += 1e-12 * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * scale {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn factorize(&self, shift: f64) -> Result<Factorization> {
        let n = self.len();
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n.saturating_sub(1));
        let mut negative = 0;
        let mut prev = self.diag[0] - shift;
        for i in 0..n {
            if i > 0 {
                let li = self.off[i - 1] / prev;
                l.push(li);
                prev = self.diag[i] - shift - li * self.off[i - 1];
            }
            if prev == 0.0 || !prev.is_finite() {
                return Err(Error::Domain(format!("singular tridiagonal pivot at row {i}")));
            }
            if prev < 0.0 {
                negative += 1;
            }
            d.push(prev);
        }
        Ok(Factorization { d, l, negative })
    }

    /// Solve `(T − σ) x = b`.
    pub fn solve_shifted(&self, shift: f64, b: &[f64]) -> Result<Vec<f64>> {
        Ok(self.factorize(shift)?.solve(b))
    }

    /// Eigenvector for a converged eigenvalue by inverse iteration; returns
    /// the unit vector (Euclidean norm) and the residual `‖T v − λ v‖`.
    pub fn eigenvector(&self, lambda: f64) -> Result<(Vec<f64>, f64)> {
        let n = self.len();
        let scale = self.gershgorin().1.abs().max(self.gershgorin().0.abs()).max(1.0);
        let mut shift = lambda - 1e-13 * scale;
        let fact = match self.factorize(shift) {
            Ok(f) => f,
            Err(_) => {
                shift = lambda - 1e-10 * scale;
                self.factorize(shift)?
            }
        };
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        normalize(&mut v);
        let mut best = (v.clone(), f64::INFINITY);
        for it in 0..12 {
            v = fact.solve(&v);
            normalize(&mut v);
            let tv = self.matvec(&v);
            let rq: f64 = tv.iter().zip(&v).map(|(a, b)| a * b).sum();
            let residual = tv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - rq * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual < best.1 {
                best = (v.clone(), residual);
            } else if it >= 2 {
                break;
            }
        }
        let (v, residual) = best;
        Ok((v, residual))
    }
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}
