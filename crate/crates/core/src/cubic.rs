//! Roots of a real monic cubic `x³ + a x² + b x + c`, classified by the sign
//! of the discriminant rather than by inspecting solver output.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicRoots {
    /// Three real roots in ascending order (discriminant >= 0).
    Real([f64; 3]),
    /// One real root plus a conjugate pair `re ± i·im` with `im >= 0`.
    Mixed { real: f64, re: f64, im: f64 },
}

/// `18abc − 4a³c + a²b² − 4b³ − 27c²`. Positive for three distinct real
/// roots, negative when two of them form a complex-conjugate pair.
pub fn discriminant(a: f64, b: f64, c: f64) -> f64 {
    18.0 * a * b * c - 4.0 * a * a * a * c + a * a * b * b - 4.0 * b * b * b - 27.0 * c * c
}

fn eval(a: f64, b: f64, c: f64, x: f64) -> (f64, f64) {
    let f = ((x + a) * x + b) * x + c;
    let df = (3.0 * x + 2.0 * a) * x + b;
    (f, df)
}

fn polish(a: f64, b: f64, c: f64, mut x: f64) -> f64 {
    for _ in 0..3 {
        let (f, df) = eval(a, b, c, x);
        if df == 0.0 {
            break;
        }
        let next = x - f / df;
        // Newton only helps if it actually reduces the residual.
        if eval(a, b, c, next).0.abs() < f.abs() {
            x = next;
        } else {
            break;
        }
    }
    x
}

pub fn solve_monic(a: f64, b: f64, c: f64) -> CubicRoots {
    let shift = a / 3.0;
    // Depressed cubic t³ + p t + q with x = t − a/3.
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

    if discriminant(a, b, c) >= 0.0 {
        let mut roots = if p >= 0.0 {
            // Only reachable with a (numerically) triple root.
            let t = (-q).cbrt();
            [t - shift; 3]
        } else {
            let m = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            [0.0, 1.0, 2.0].map(|k| m * (theta - 2.0 * PI * k / 3.0).cos() - shift)
        };
        for r in roots.iter_mut() {
            *r = polish(a, b, c, *r);
        }
        roots.sort_by(f64::total_cmp);
        CubicRoots::Real(roots)
    } else {
        let d = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        // Pick the sign that avoids cancellation.
        let u = (-0.5 * q - d.copysign(q)).cbrt();
        let v = if u == 0.0 { 0.0 } else { -p / (3.0 * u) };
        let real = polish(a, b, c, u + v - shift);
        // Deflate: x³ + a x² + b x + c = (x − real)(x² + e x + f).
        let e = a + real;
        let f = b + e * real;
        let re = -0.5 * e;
        let im = (f - 0.25 * e * e).max(0.0).sqrt();
        CubicRoots::Mixed { real, re, im }
    }
}
