//! Independent shooting reference for the integration tests.
//!
//! Integrates `w'' + (N-1)/s w' = -f(w)` in the original variables `(w, w')`
//! with RK4 on geometrically spaced `s`, and locates the first zero by cubic
//! Hermite interpolation on the bracketing step. Shares no code with the
//! library integrator.
#![allow(dead_code)]

pub struct Reference {
    pub first_zero: f64,
    pub lambda: f64,
    pub steps: usize,
}

/// First zero of the radial IVP `w(0) = a`, `w'(0) = 0`. `ratio_step` is the
/// logarithmic step `ln(s_{k+1}/s_k)`.
pub fn reference_first_zero(f: impl Fn(f64) -> f64, a: f64, n: u32, ratio_step: f64) -> Option<Reference> {
    let n = n as f64;
    let fa = f(a);
    let rhs = |s: f64, w: f64, dw: f64| -> (f64, f64) { (dw, -(n - 1.0) / s * dw - f(w.max(0.0))) };

    // two-term series w = a - f(a) s²/(2N)
    let mut s = 1e-4 * (a.max(1.0) / fa.max(f64::MIN_POSITIVE)).sqrt().min(1.0);
    let mut w = a - fa * s * s / (2.0 * n);
    let mut dw = -fa * s / n;
    let growth = ratio_step.exp();
    let mut steps = 0;
    while s < 1e3 {
        let h = s * (growth - 1.0);
        let (k1w, k1d) = rhs(s, w, dw);
        let (k2w, k2d) = rhs(s + h / 2.0, w + h / 2.0 * k1w, dw + h / 2.0 * k1d);
        let (k3w, k3d) = rhs(s + h / 2.0, w + h / 2.0 * k2w, dw + h / 2.0 * k2d);
        let (k4w, k4d) = rhs(s + h, w + h * k3w, dw + h * k3d);
        let w1 = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        let dw1 = dw + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        steps += 1;
        if w1 <= 0.0 {
            let root = hermite_root(s, s + h, w, dw, w1, dw1);
            return Some(Reference { first_zero: root, lambda: root * root, steps });
        }
        s += h;
        w = w1;
        dw = dw1;
    }
    None
}

fn hermite_root(s0: f64, s1: f64, w0: f64, d0: f64, w1: f64, d1: f64) -> f64 {
    let h = s1 - s0;
    let cubic = |x: f64| {
        let t = (x - s0) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * w0 + (t3 - 2.0 * t2 + t) * h * d0 + (-2.0 * t3 + 3.0 * t2) * w1 + (t3 - t2) * h * d1
    };
    let (mut lo, mut hi) = (s0, s1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cubic(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
