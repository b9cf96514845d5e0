use std::f64::consts::PI;
use std::sync::Arc;

use super::grid::{GridScheme, RadialGrid};
use crate::{Error, Result};

/// Behaviour of a radial function under `r → -r`, used to build
/// interpolation stencils across the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Origin {
    /// Regular at the origin (`f(-r) = f(r)`), e.g. ℓ = 0 profiles.
    #[default]
    Even,
    /// Vanishing at the origin (`f(-r) = -f(r)`), e.g. `u = r f`.
    Odd,
}

/// A spherically symmetric function on ℝ³ sampled on a [`RadialGrid`].
///
/// Values beyond `r_max` are taken to be zero.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    origin: Origin,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            origin: Origin::Even,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self {
            grid,
            values,
            origin: Origin::Even,
        }
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
            origin: Origin::Even,
        }
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map<F: Fn(f64, f64) -> f64>(&self, f: F) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
            origin: self.origin,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|_, v| c * v)
    }

    /// Pointwise sum; both functions must live on the same grid.
    pub fn add(&self, other: &RadialFunction) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
            origin: self.origin,
        })
    }

    fn check_same_grid(&self, other: &RadialFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::Config("radial functions live on different grids".into()))
        }
    }

    /// `‖f‖₂² = 4π ∫ r² |f|² dr`.
    pub fn norm_sq(&self) -> f64 {
        4.0 * PI * self.values.iter().zip(self.grid.weights()).map(|(v, w)| w * v * v).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `‖f‖_p^p = 4π ∫ r² |f|^p dr`.
    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        4.0 * PI
            * self
                .values
                .iter()
                .zip(self.grid.weights())
                .map(|(v, w)| w * v.abs().powf(p))
                .sum::<f64>()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_norm_pow(p).powf(1.0 / p)
    }

    /// `4π ∫ r² g(r) |f|² dr`.
    pub fn weighted_norm_sq<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        4.0 * PI
            * self
                .grid
                .nodes()
                .iter()
                .zip(self.grid.weights())
                .zip(&self.values)
                .map(|((&r, w), v)| w * g(r) * v * v)
                .sum::<f64>()
    }

    /// `‖|·|^k f‖₂`.
    pub fn moment_norm(&self, k: f64) -> f64 {
        self.weighted_norm_sq(|r| r.powf(2.0 * k)).sqrt()
    }

    /// `⟨f, g⟩ = 4π ∫ r² f g dr`.
    pub fn inner(&self, other: &RadialFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(4.0
            * PI
            * self
                .values
                .iter()
                .zip(&other.values)
                .zip(self.grid.weights())
                .map(|((a, b), w)| a * b * w)
                .sum::<f64>())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `|f(r_max)| / max|f|` (zero for the zero function).
    pub fn tail_ratio(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            0.0
        } else {
            self.values.last().map(|v| v.abs() / m).unwrap_or(0.0)
        }
    }

    /// Largest node where `|f| ≥ threshold · max|f|`.
    pub fn support_radius(&self, threshold: f64) -> f64 {
        let cut = threshold * self.max_abs();
        self.grid
            .nodes()
            .iter()
            .zip(&self.values)
            .rev()
            .find(|(_, v)| v.abs() >= cut && **v != 0.0)
            .map(|(r, _)| *r)
            .unwrap_or(0.0)
    }

    /// Radial Laplacian `Δf = (r f)'' / r` by second-order differences on a
    /// uniform grid (`r f` vanishes at the origin and beyond `r_max`).
    pub fn laplacian(&self) -> Result<Self> {
        let dr = self
            .grid
            .spacing()
            .ok_or_else(|| Error::Config("laplacian needs a uniform grid".into()))?;
        let r = self.grid.nodes();
        let n = r.len();
        let u: Vec<f64> = r.iter().zip(&self.values).map(|(r, v)| r * v).collect();
        let inv = 1.0 / (dr * dr);
        let values = (0..n)
            .map(|i| {
                let left = if i == 0 { 0.0 } else { u[i - 1] };
                let right = if i + 1 < n { u[i + 1] } else { 0.0 };
                (right - 2.0 * u[i] + left) * inv / r[i]
            })
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
            origin: self.origin,
        })
    }

    /// Cubic Lagrange interpolation; zero beyond `r_max`.
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r > self.grid.r_max() {
            return 0.0;
        }
        match self.grid.scheme() {
            GridScheme::Uniform => self.eval_uniform(r),
            GridScheme::Graded => self.eval_general(r),
        }
    }

    /// Value at the virtual node `k` (`k ≤ 0` mirrored, `k > n` zero); node
    /// `k ≥ 1` sits at `r_k = k·dr`.
    #[inline]
    fn virtual_value(&self, k: i64) -> f64 {
        let n = self.values.len() as i64;
        if k >= 1 {
            if k <= n {
                self.values[(k - 1) as usize]
            } else {
                0.0
            }
        } else {
            let v = self.virtual_value(-k);
            match self.origin {
                Origin::Even => v,
                Origin::Odd => -v,
            }
        }
    }

    #[inline]
    fn eval_uniform(&self, r: f64) -> f64 {
        let dr = self.grid.r_max() / self.values.len() as f64;
        let x = r / dr;
        let k = x.floor() as i64;
        // Stencil positions in units of dr; the origin is never a node.
        let idx: [i64; 4] = match k {
            0 => [-2, -1, 1, 2],
            1 => [-1, 1, 2, 3],
            _ => [k - 1, k, k + 1, k + 2],
        };
        lagrange4(
            x,
            [idx[0] as f64, idx[1] as f64, idx[2] as f64, idx[3] as f64],
            [
                self.virtual_value(idx[0]),
                self.virtual_value(idx[1]),
                self.virtual_value(idx[2]),
                self.virtual_value(idx[3]),
            ],
        )
    }

    fn eval_general(&self, r: f64) -> f64 {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        // first node index with nodes[j] >= r
        let j = nodes.partition_point(|&x| x < r);
        let mirror = |i: i64| -> (f64, f64) {
            if i >= 0 {
                let i = i as usize;
                if i < n {
                    (nodes[i], self.values[i])
                } else {
                    let extra = (i - n + 1) as f64 * (nodes[n - 1] - nodes[n - 2]);
                    (nodes[n - 1] + extra, 0.0)
                }
            } else {
                let i = (-i - 1) as usize;
                let s = match self.origin {
                    Origin::Even => 1.0,
                    Origin::Odd => -1.0,
                };
                (-nodes[i], s * self.values[i])
            }
        };
        // indices in "signed" numbering where -1 mirrors node 0
        let start = j as i64 - 2;
        let pts: Vec<(f64, f64)> = (start..start + 4).map(mirror).collect();
        lagrange4(
            r,
            [pts[0].0, pts[1].0, pts[2].0, pts[3].0],
            [pts[0].1, pts[1].1, pts[2].1, pts[3].1],
        )
    }
}

#[inline]
fn lagrange4(x: f64, xs: [f64; 4], ys: [f64; 4]) -> f64 {
    let mut acc = 0.0;
    for j in 0..4 {
        let mut l = 1.0;
        for k in 0..4 {
            if k != j {
                l *= (x - xs[k]) / (xs[j] - xs[k]);
            }
        }
        acc += l * ys[j];
    }
    acc
}
