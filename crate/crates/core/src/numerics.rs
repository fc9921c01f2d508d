//! Quadrature grids, the exponential-segment integration rule and a bracketed
//! root finder.

use crate::error::{Error, Result};

/// Daily quadrature step in years.
pub const DAILY_STEP: f64 = 1.0 / 365.0;

/// Nodes `a, a+h, a+2h, ... , b` with every breakpoint in `(a, b)` forced in.
pub fn grid(a: f64, b: f64, step: f64, breaks: &[f64]) -> Vec<f64> {
    debug_assert!(b >= a && step > 0.0);
    let n = if step.is_finite() {
        ((b - a) / step).ceil() as usize
    } else {
        1
    };
    let mut nodes = Vec::with_capacity(n + 2 + breaks.len());
    nodes.push(a);
    for k in 1..n {
        let t = a + k as f64 * step;
        if t < b {
            nodes.push(t);
        }
    }
    nodes.extend(breaks.iter().copied().filter(|&t| t > a && t < b));
    nodes.push(b);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
    if nodes.len() == 1 {
        nodes.push(b);
    }
    nodes
}

/// `(1 - e^{-x}) / x`, stable near 0.
pub fn one_minus_exp_over(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - 0.5 * x + x * x / 6.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// Exact integral over `[a, a + width]` of the exponential interpolant through
/// the positive values `fa` and `fb`.
pub fn exp_segment(width: f64, fa: f64, fb: f64) -> f64 {
    debug_assert!(fa > 0.0 && fb > 0.0);
    let x = (fa / fb).ln();
    width * fa * one_minus_exp_over(x)
}

/// Composite rule on `nodes` for a positive integrand that is exponential
/// between consecutive nodes; reduces to exact integration for products of
/// log-linear discount factors and piecewise-constant-hazard survival.
pub fn integrate_exp<F>(nodes: &[f64], mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut total = 0.0;
    let mut prev = f(nodes[0])?;
    for w in nodes.windows(2) {
        let next = f(w[1])?;
        total += exp_segment(w[1] - w[0], prev, next);
        prev = next;
    }
    Ok(total)
}

/// Composite trapezoid rule on `nodes`.
pub fn trapezoid<F>(nodes: &[f64], mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut total = 0.0;
    let mut prev = f(nodes[0])?;
    for w in nodes.windows(2) {
        let next = f(w[1])?;
        total += 0.5 * (w[1] - w[0]) * (prev + next);
        prev = next;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub x_tol: f64,
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            x_tol: 1e-15,
            f_tol: 1e-15,
            max_iter: 200,
        }
    }
}

/// Brent's method on `[lo, hi]`: bisection safeguarded by secant and inverse
/// quadratic steps. The endpoints must bracket a sign change.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::domain(format!(
            "root not bracketed on [{lo}, {hi}]: f = {fa:e}, {fb:e}"
        )));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut bisected = true;

    for _ in 0..opts.max_iter {
        if fb.abs() <= opts.f_tol || (b - a).abs() <= opts.x_tol * (1.0 + b.abs()) {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lower = (3.0 * a + b) / 4.0;
        let outside = !((s > lower.min(b)) && (s < lower.max(b)));
        let slow = if bisected {
            (s - b).abs() >= (b - c).abs() / 2.0
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0
        };
        if outside || slow {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s)?;
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
