//! Complex gamma and normalised incomplete gamma functions.
//!
//! `γ(μ, x) = ∫₀ˣ t^{μ−1} e^{−t} dt` and `Γ(μ, x) = ∫ₓ^∞ t^{μ−1} e^{−t} dt`,
//! both with the principal branch of `t^{μ−1}` along the straight ray from
//! the origin. For `Re μ ≤ 0` the lower function is understood as the
//! analytic continuation in `μ` (the power series), which is what the chirp
//! integrals need at purely imaginary order.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;

pub type ComplexValue = Complex64;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// Below this modulus the power series is used for any direction of `x`.
const SERIES_RADIUS: f64 = 8.0;
const SERIES_MAX_TERMS: usize = 5_000;
const CF_MAX_ITER: usize = 20_000;
const CF_TINY: f64 = 1e-300;

fn ensure_finite(what: &str, z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} is not finite: {z}")))
    }
}

fn finite_or_err(what: &'static str, z: Complex64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NoConvergence {
            what,
            residual: f64::INFINITY,
        })
    }
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `ln Γ(z)` from the Lanczos sum, for `Re z ≥ 1/2`.
fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    let w = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += *c / (w + k as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (w + 0.5) * t.ln() - t + acc.ln()
}

/// A logarithm of `sin(πz)` that stays finite far from the real axis.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return (PI * z).sin().ln();
    }
    let i_pi_z = Complex64::new(0.0, PI) * z;
    if z.im > 0.0 {
        -i_pi_z + (1.0 - (2.0 * i_pi_z).exp()).ln() + Complex64::new(0.0, 0.5).ln()
    } else {
        i_pi_z + (1.0 - (-2.0 * i_pi_z).exp()).ln() + Complex64::new(0.0, -0.5).ln()
    }
}

/// A logarithm of `Γ(z)` (not necessarily the principal branch; its
/// exponential is `Γ(z)`). Finite where `Γ(z)` itself would overflow or
/// underflow, e.g. far up the imaginary axis.
pub fn ln_gamma(z: ComplexValue) -> Result<ComplexValue> {
    ensure_finite("gamma argument", z)?;
    if is_pole(z) {
        return Err(Error::Domain(format!("gamma has a pole at {}", z.re)));
    }
    if z.re < 0.5 {
        Ok(PI.ln() - ln_sin_pi(z) - lanczos_ln_gamma(1.0 - z))
    } else {
        Ok(lanczos_ln_gamma(z))
    }
}

/// Complex gamma function.
///
/// Lanczos approximation for `Re z ≥ 1/2`, reflection
/// `Γ(z) Γ(1−z) = π / sin(πz)` otherwise.
pub fn gamma(z: ComplexValue) -> Result<ComplexValue> {
    ensure_finite("gamma argument", z)?;
    if is_pole(z) {
        return Err(Error::Domain(format!("gamma has a pole at {}", z.re)));
    }
    let value = if z.re >= 0.5 {
        lanczos_ln_gamma(z).exp()
    } else if z.im.abs() < 20.0 {
        let right = lanczos_ln_gamma(1.0 - z).exp();
        PI / ((PI * z).sin() * right)
    } else {
        ln_gamma(z)?.exp()
    };
    finite_or_err("gamma (overflow)", value)
}

/// Which route evaluates the incomplete gamma pair at `(μ, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Series,
    ContinuedFraction,
}

fn choose_route(mu: Complex64, x: Complex64) -> Route {
    let r = x.norm();
    let near_negative_axis = x.re < 0.0 && x.im.abs() < 0.1 * r;
    if r <= SERIES_RADIUS || r <= 0.9 * mu.norm() || near_negative_axis {
        Route::Series
    } else {
        Route::ContinuedFraction
    }
}

/// Power series for `γ(μ, x)`.
///
/// In the right half plane the Kummer form `x^μ e^{−x} Σ xⁿ / (μ)_{n+1}` has
/// no cancellation; in the left half plane `x^μ Σ (−x)ⁿ / (n! (μ+n))` does.
fn lower_series(mu: Complex64, x: Complex64) -> Result<Complex64> {
    let x_pow = (mu * x.ln()).exp();
    let mut sum = Complex64::new(0.0, 0.0);
    if x.re >= 0.0 {
        let mut term = 1.0 / mu;
        for n in 0..SERIES_MAX_TERMS {
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() && (n as f64) > x.norm() {
                return Ok(x_pow * (-x).exp() * sum);
            }
            term *= x / (mu + (n + 1) as f64);
        }
    } else {
        let mut power = Complex64::new(1.0, 0.0);
        for n in 0..SERIES_MAX_TERMS {
            let term = power / (mu + n as f64);
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() && (n as f64) > x.norm() {
                return Ok(x_pow * sum);
            }
            power *= -x / (n + 1) as f64;
        }
    }
    Err(Error::NoConvergence {
        what: "incomplete gamma series",
        residual: sum.norm(),
    })
}

/// Legendre continued fraction for `Γ(μ, x)` (modified Lentz).
fn upper_continued_fraction(mu: Complex64, x: Complex64) -> Result<Complex64> {
    let tiny = Complex64::new(CF_TINY, 0.0);
    let mut b = x + 1.0 - mu;
    let mut c = Complex64::new(1.0 / CF_TINY, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let an = -(i as f64) * (i as f64 - mu);
        b += 2.0;
        d = an * d + b;
        if d.norm() < CF_TINY {
            d = tiny;
        }
        c = b + an / c;
        if c.norm() < CF_TINY {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            return Ok((mu * x.ln() - x).exp() * h);
        }
    }
    Err(Error::NoConvergence {
        what: "incomplete gamma continued fraction",
        residual: h.norm(),
    })
}

/// `γ(μ, x)` from the series at unit modulus plus quadrature along the ray.
fn lower_ray_quadrature(mu: Complex64, x: Complex64) -> Result<Complex64> {
    let r = x.norm();
    if r <= 1.0 {
        return lower_series(mu, x);
    }
    let start = x / r;
    let head = lower_series(mu, start)?;
    let span = x - start;
    let integrand = |s: f64| {
        let t = start + span * s;
        ((mu - 1.0) * t.ln() - t).exp() * span
    };
    let turns = (x.im.abs() + mu.im.abs() * r.ln() + r) / PI;
    let panels = (turns.ceil() as usize).clamp(4, 20_000);
    let breaks: Vec<f64> = (0..=panels).map(|k| k as f64 / panels as f64).collect();
    let scale = breaks
        .iter()
        .map(|&s| integrand(s).norm())
        .fold(head.norm(), f64::max);
    let tol = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let tail = quadrature::integrate_panels(&integrand, &breaks, tol, 40);
    if !tail.converged {
        return Err(Error::Accuracy {
            what: "incomplete gamma ray quadrature",
            estimate: tail.error,
            tolerance: tol,
        });
    }
    Ok(head + tail.value)
}

/// Unnormalised pair `(γ(μ,x), Γ(μ,x))` together with `Γ(μ)`.
fn incomplete_pair(mu: Complex64, x: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
    ensure_finite("incomplete gamma order", mu)?;
    ensure_finite("incomplete gamma argument", x)?;
    let full = gamma(mu)?;
    if x == Complex64::new(0.0, 0.0) {
        return Ok((Complex64::new(0.0, 0.0), full, full));
    }
    let pair = match choose_route(mu, x) {
        Route::Series => lower_series(mu, x)
            .or_else(|_| lower_ray_quadrature(mu, x))
            .map(|lower| (lower, full - lower)),
        Route::ContinuedFraction => match upper_continued_fraction(mu, x) {
            Ok(upper) => Ok((full - upper, upper)),
            Err(_) => lower_ray_quadrature(mu, x).map(|lower| (lower, full - lower)),
        },
    }?;
    Ok((
        finite_or_err("lower incomplete gamma", pair.0)?,
        finite_or_err("upper incomplete gamma", pair.1)?,
        full,
    ))
}

/// Unnormalised lower incomplete gamma `γ(μ, x)`.
pub fn lower_incomplete(mu: ComplexValue, x: ComplexValue) -> Result<ComplexValue> {
    incomplete_pair(mu, x).map(|(lower, _, _)| lower)
}

/// Unnormalised upper incomplete gamma `Γ(μ, x)`.
pub fn upper_incomplete(mu: ComplexValue, x: ComplexValue) -> Result<ComplexValue> {
    incomplete_pair(mu, x).map(|(_, upper, _)| upper)
}

/// `γ'(μ, x) = γ(μ, x) / Γ(μ)`.
pub fn lower_incomplete_normalized(mu: ComplexValue, x: ComplexValue) -> Result<ComplexValue> {
    incomplete_pair(mu, x).map(|(lower, _, full)| lower / full)
}

/// `Γ'(μ, x) = Γ(μ, x) / Γ(μ)`.
pub fn upper_incomplete_normalized(mu: ComplexValue, x: ComplexValue) -> Result<ComplexValue> {
    incomplete_pair(mu, x).map(|(_, upper, full)| upper / full)
}
