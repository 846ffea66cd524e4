#![allow(dead_code)]

use std::f64::consts::PI;

/// `φ_t` on `R^d` at radius `r`.
pub fn phi(d: usize, t: f64, r: f64) -> f64 {
    (2.0 * PI * t).powf(-(d as f64) / 2.0) * (-r * r / (2.0 * t)).exp()
}

/// Surface area of the unit sphere in `R^d`.
pub fn sphere(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / statrs::function::gamma::gamma(d as f64 / 2.0)
}

/// Composite Simpson rule with `2 * half_n` panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, half_n: usize) -> f64 {
    let n = 2 * half_n;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `∫_{R^d} g(|y|) dy` for radial `g`.
pub fn radial_integral(d: usize, g: impl Fn(f64) -> f64, r_max: f64) -> f64 {
    sphere(d) * simpson(|r| r.powi(d as i32 - 1) * g(r), 0.0, r_max, 20_000)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}
