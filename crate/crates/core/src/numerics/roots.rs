use crate::{Error, Result};

/// Root of a scalar function with a sign change on `[lo, hi]`.
///
/// Brent's method (inverse quadratic interpolation with secant and bisection
/// fallbacks). Terminates when the bracket is narrower than
/// `tol · max(1, |x|)` or `f(x) = 0`.
pub fn find_root_scalar<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..300 {
        let scale = tol * b.abs().max(1.0);
        if fb == 0.0 || (b - a).abs() <= scale {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let m = (3.0 * a + b) / 4.0;
        let outside = !((s > m.min(b)) && (s < m.max(b)));
        let slow = if bisected {
            (s - b).abs() >= 0.5 * (b - c).abs() || (b - c).abs() < scale
        } else {
            (s - b).abs() >= 0.5 * (c - d).abs() || (c - d).abs() < scale
        };
        if outside || slow || !s.is_finite() {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

/// Plain bisection returning the final bracket `(lo, hi)` with `f(lo)`
/// and `f(hi)` of opposite sign; stops once `hi − lo ≤ width`.
pub fn bisect_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    width: f64,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa.signum() == fb.signum() || fa == 0.0 || fb == 0.0 {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    while b - a > width {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm.signum() == fa.signum() && fm != 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((a, b))
}
