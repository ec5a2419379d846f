//! Reference evaluations written independently of the library code paths.

#![allow(dead_code)]

use num_complex::Complex64;

/// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
pub fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..60 {
            let mut p = [1.0, z];
            for k in 2..=n {
                let next = ((2 * k - 1) as f64 * z * p[1] - (k - 1) as f64 * p[0]) / k as f64;
                p = [p[1], next];
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p[1] };
            let pm = if n == 1 { 1.0 } else { p[0] };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        out.push((z, 2.0 / ((1.0 - z * z) * dp * dp)));
    }
    out
}

/// Composite Gauss-Legendre over `[a, b]` with `panels` equal panels.
pub fn composite<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let c = a + (k as f64 + 0.5) * h;
        for (x, w) in rule {
            acc += f(c + 0.5 * h * x) * (0.5 * h * w);
        }
    }
    acc
}

/// `γ(μ, x) = ∫₀ˣ t^{μ−1} e^{−t} dt` along the straight ray `t = x s`.
///
/// The order is raised with `γ(μ, x) = (x^μ e^{−x} + γ(μ+1, x))/μ` until
/// `Re μ ≥ 1`, after which `s = e^τ` gives an integrand decaying like
/// `e^{τ Re μ}`.
pub fn lower_gamma_ray(mu: Complex64, x: Complex64) -> Complex64 {
    if mu.re >= 1.0 {
        let rule = legendre_rule(16);
        let rate = mu.im.abs() + x.norm() + 1.0;
        let lo = -45.0 / mu.re;
        let panels = ((-lo) * rate / 2.0).ceil() as usize + 4;
        let inner = composite(|tau| (mu * tau - x * tau.exp()).exp(), lo, 0.0, panels, &rule);
        return (mu * x.ln()).exp() * inner;
    }
    ((mu * x.ln() - x).exp() + lower_gamma_ray(mu + 1.0, x)) / mu
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
