//! Shared numerical routines: Brent root finding, adaptive quadrature,
//! and small dense linear solves. Everything here operates on plain `f64`
//! slices; the systems involved are at most p x p for a handful of features.

use crate::error::{Error, Result};

/// Brent's method for a root of `f` on the bracket `[a, b]`.
///
/// Converges when the bracket shrinks below `xtol` or `|f|` drops below
/// `ftol`. The bracket must straddle a sign change.
pub fn brent_root<F>(mut f: F, a: f64, b: f64, xtol: f64, ftol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    const MAX_ITER: usize = 200;

    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    // Keep b the best estimate: |f(b)| <= |f(a)|.
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb.abs() <= ftol {
            return Ok(b);
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, falling back to secant.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol {
            d
        } else if m > 0.0 {
            tol
        } else {
            -tol
        };
        fb = f(b);
        if fb == 0.0 {
            return Ok(b);
        }
    }

    Ok(b)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
///
/// Subdivides until the Richardson error estimate falls below
/// `abs_tol + rel_tol * |integral|` on each panel.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    const MAX_DEPTH: usize = 48;
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_recurse(f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: usize,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * (abs_tol + rel_tol * (left + right).abs()) {
        return left + right + delta / 15.0;
    }
    let half_abs = 0.5 * abs_tol;
    simpson_recurse(f, a, m, fa, flm, fm, left, rel_tol, half_abs, depth - 1)
        + simpson_recurse(f, m, b, fm, frm, fb, right, rel_tol, half_abs, depth - 1)
}

/// LU factorization with partial pivoting of a dense row-major n x n matrix.
///
/// Factorize once, then solve any number of right-hand sides.
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factorize(mut a: Vec<f64>, n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix shape mismatch");
        let mut perm = vec![0usize; n];

        // Scale-aware singularity threshold per column.
        let max_abs = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = 1e-12 * max_abs.max(1e-300);

        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_val = a[k * n + k].abs();
            for i in (k + 1)..n {
                let v = a[i * n + k].abs();
                if v > pivot_val {
                    pivot_row = i;
                    pivot_val = v;
                }
            }
            if !pivot_val.is_finite() || pivot_val <= tiny {
                return Err(Error::SingularSystem { index: k });
            }
            perm[k] = pivot_row;
            if pivot_row != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot_row * n + j);
                }
            }
            let inv_pivot = 1.0 / a[k * n + k];
            for i in (k + 1)..n {
                let factor = a[i * n + k] * inv_pivot;
                a[i * n + k] = factor;
                for j in (k + 1)..n {
                    a[i * n + j] -= factor * a[k * n + j];
                }
            }
        }

        Ok(LuFactors { n, lu: a, perm })
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.n;
        assert_eq!(rhs.len(), n, "rhs length mismatch");
        for k in 0..n {
            rhs.swap(k, self.perm[k]);
            for i in (k + 1)..n {
                rhs[i] -= self.lu[i * n + k] * rhs[k];
            }
        }
        for i in (0..n).rev() {
            let mut sum = rhs[i];
            for j in (i + 1)..n {
                sum -= self.lu[i * n + j] * rhs[j];
            }
            rhs[i] = sum / self.lu[i * n + i];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Solve a single dense system `a x = b` (row-major n x n).
pub fn solve_linear(a: Vec<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let factors = LuFactors::factorize(a, n)?;
    Ok(factors.solve(b))
}

/// Pearson correlation of two equal-length samples.
///
/// Returns `None` when either sample has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    if x.is_empty() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    assert!((0.0..=1.0).contains(&q));
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}
