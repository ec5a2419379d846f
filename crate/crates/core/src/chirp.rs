//! The detector-response integral over an exponentially chirped phase,
//!
//! ```text
//! I_p(T, t₀) = ∫_{t₀}^{T} dt e^{iΔt} exp(i (ν_p/κ) e^{κt}),
//! ```
//!
//! evaluated by direct quadrature and by closed forms in terms of the
//! normalised incomplete gamma functions. With `y = e^{κt}` the integral
//! becomes `(1/κ) ∫ y^{ia−1} e^{iby} dy`, `a = Δ/κ`, `b = ν_p/κ`.
//!
//! A lower limit `y₀ = 0` (detector on since `t₀ = −∞`) is understood as the
//! adiabatically switched limit: the `y^{ia}` boundary term at the origin
//! has no limit and is dropped, which is the same as the analytic
//! continuation used by the closed form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadResult};
use crate::special::{self, ComplexValue};

/// Absolute quadrature tolerance per unit of dimensionless time `κt`.
pub const QUADRATURE_TOL_PER_UNIT: f64 = 1e-9;
const MAX_BISECTIONS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChirpDirection {
    /// `ν(t) = ν e^{+|κ|t}`
    Up,
    /// `ν(t) = ν e^{−|κ|t}`
    Down,
}

/// Exponential chirp `ν(t) = ν e^{κt}` switched on at `t_start` and off at `t_stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpProfile {
    kappa: f64,
    t_start: f64,
    t_stop: f64,
}

impl ChirpProfile {
    /// `t_start` may be `-∞` for an upward chirp (trap frequency starting from zero).
    pub fn new(kappa: f64, t_start: f64, t_stop: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa != 0.0) {
            return Err(Error::InvalidInput(format!(
                "chirp rate must be finite and nonzero, got {kappa}"
            )));
        }
        if !t_stop.is_finite() || t_start.is_nan() || t_start == f64::INFINITY {
            return Err(Error::InvalidInput(format!(
                "chirp window [{t_start}, {t_stop}] must end at a finite time"
            )));
        }
        if t_start > t_stop {
            return Err(Error::InvalidInput(format!(
                "chirp window must satisfy t_start <= t_stop, got [{t_start}, {t_stop}]"
            )));
        }
        if kappa < 0.0 && t_start.is_infinite() {
            return Err(Error::InvalidInput(
                "a downward chirp needs a finite start time".into(),
            ));
        }
        Ok(Self {
            kappa,
            t_start,
            t_stop,
        })
    }

    /// Window `(−∞, T]` with `T` chosen so that `e^{κT} = y_t`.
    pub fn from_infinite_past(kappa: f64, y_t: f64) -> Result<Self> {
        Self::from_final_ratio(kappa, f64::NEG_INFINITY, y_t)
    }

    /// Window `[t_start, T]` with `T` chosen so that `e^{κT} = y_t`.
    pub fn from_final_ratio(kappa: f64, t_start: f64, y_t: f64) -> Result<Self> {
        if !(y_t.is_finite() && y_t > 0.0) {
            return Err(Error::InvalidInput(format!(
                "final frequency ratio must be positive and finite, got {y_t}"
            )));
        }
        Self::new(kappa, t_start, y_t.ln() / kappa)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_stop(&self) -> f64 {
        self.t_stop
    }

    pub fn direction(&self) -> ChirpDirection {
        if self.kappa > 0.0 {
            ChirpDirection::Up
        } else {
            ChirpDirection::Down
        }
    }

    /// `e^{κ t₀}`, zero for an infinite past.
    pub fn y0(&self) -> f64 {
        (self.kappa * self.t_start).exp()
    }

    /// `e^{κ T}`.
    pub fn y_t(&self) -> f64 {
        (self.kappa * self.t_stop).exp()
    }

    /// Dimensionless parameters for a detuning `delta` and mode frequency `nu_p`.
    pub fn reduced(&self, delta: f64, nu_p: f64) -> Result<ReducedParams> {
        ReducedParams::with_direction(
            delta / self.kappa,
            nu_p / self.kappa.abs(),
            self.y0(),
            self.y_t(),
            self.direction(),
        )
    }
}

/// Dimensionless form of one mode's chirp integral.
///
/// `a = Δ/κ`, `b = ν_p/|κ|`, `y0 = e^{κt₀}`, `y_t = e^{κT}`. For an upward
/// chirp `0 ≤ y0 ≤ y_t`; for a downward one the order is reversed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    pub a: f64,
    pub b: f64,
    pub y0: f64,
    pub y_t: f64,
    pub direction: ChirpDirection,
}

impl ReducedParams {
    /// Upward chirp.
    pub fn new(a: f64, b: f64, y0: f64, y_t: f64) -> Result<Self> {
        Self::with_direction(a, b, y0, y_t, ChirpDirection::Up)
    }

    pub fn with_direction(a: f64, b: f64, y0: f64, y_t: f64, direction: ChirpDirection) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidInput(format!("a = Δ/κ must be finite, got {a}")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidInput(format!("b = ν_p/κ must be positive, got {b}")));
        }
        let (lo, hi) = match direction {
            ChirpDirection::Up => (y0, y_t),
            ChirpDirection::Down => (y_t, y0),
        };
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "chirp endpoints y0 = {y0}, y_t = {y_t} are not ordered for a {direction:?} chirp"
            )));
        }
        Ok(Self {
            a,
            b,
            y0,
            y_t,
            direction,
        })
    }

    /// `(y_lo, y_hi)` of the integration range in `y`.
    pub fn y_range(&self) -> (f64, f64) {
        match self.direction {
            ChirpDirection::Up => (self.y0, self.y_t),
            ChirpDirection::Down => (self.y_t, self.y0),
        }
    }

    fn phase_sign(&self) -> f64 {
        match self.direction {
            ChirpDirection::Up => 1.0,
            ChirpDirection::Down => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralMethod {
    Quadrature,
    ClosedFinite,
    ClosedInfinite,
}

/// Value of `I_p` in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpIntegral {
    pub value: ComplexValue,
    /// `|I_p|²` in s².
    pub abs_sq: f64,
    pub method: IntegralMethod,
    /// Absolute error estimate on `value`, in seconds.
    pub err_estimate: f64,
}

impl ChirpIntegral {
    fn from_value(value: Complex64, method: IntegralMethod, err_estimate: f64) -> Self {
        Self {
            value,
            abs_sq: value.norm_sqr(),
            method,
            err_estimate,
        }
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa != 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("chirp rate must be finite and nonzero, got {kappa}")))
    }
}

/// `∫_{lo}^{hi} y^{p−1} e^{iωy} dy` for `0 < lo ≤ hi`, on panels that keep
/// the phase increment per panel bounded.
///
/// Below `y = 1/|ω|` the integral is taken in `τ = ln y`, where the
/// integrand `e^{pτ} e^{iωe^τ}` oscillates at rate `|Im p| + 1` at most;
/// above it, directly in `y` with panels shorter than a half period.
fn log_oscillatory(p: Complex64, omega: f64, lo: f64, hi: f64, tol: f64) -> QuadResult {
    if lo >= hi {
        return QuadResult::ZERO;
    }
    let split = (1.0 / omega.abs()).clamp(lo, hi);
    let rate = p.im.abs();

    let mut out = QuadResult::ZERO;
    let tau_lo = lo.ln();
    let tau_split = split.ln();
    let tau_hi = hi.ln();
    let total_tau = tau_hi - tau_lo;

    if tau_split > tau_lo {
        let width = (PI / (rate + 1.0)).min(1.0);
        let n = ((tau_split - tau_lo) / width).ceil().max(1.0) as usize;
        let breaks: Vec<f64> = (0..=n)
            .map(|k| tau_lo + (tau_split - tau_lo) * k as f64 / n as f64)
            .collect();
        let f = |tau: f64| (p * tau + Complex64::new(0.0, omega * tau.exp())).exp();
        let share = tol * (tau_split - tau_lo) / total_tau;
        out = out.combine(quadrature::integrate_panels(&f, &breaks, share, MAX_BISECTIONS));
    }
    if hi > split {
        let width = PI / (rate / split + omega.abs());
        let n = ((hi - split) / width).ceil().max(1.0) as usize;
        let breaks: Vec<f64> = (0..=n).map(|k| split + (hi - split) * k as f64 / n as f64).collect();
        let f = |y: f64| ((p - 1.0) * y.ln() + Complex64::new(0.0, omega * y)).exp();
        let share = tol * (tau_hi - tau_split) / total_tau;
        out = out.combine(quadrature::integrate_panels(&f, &breaks, share, MAX_BISECTIONS));
    }
    out
}

/// Direct quadrature of `I_p` for either chirp direction.
pub fn integral_quadrature(params: &ReducedParams, kappa: f64) -> Result<ChirpIntegral> {
    check_kappa(kappa)?;
    let (lo, hi) = params.y_range();
    let omega = params.phase_sign() * params.b;
    let mu = Complex64::new(0.0, params.a);

    if lo == hi {
        return Ok(ChirpIntegral::from_value(Complex64::new(0.0, 0.0), IntegralMethod::Quadrature, 0.0));
    }

    let (value, result, tolerance) = if lo > 0.0 {
        let tol = QUADRATURE_TOL_PER_UNIT * (hi / lo).ln().max(1.0);
        let r = log_oscillatory(mu, omega, lo, hi, tol);
        (r.value, r, tol)
    } else {
        // Integrate the origin boundary term by parts below s = min(Y, 1/b):
        // ∫₀^s y^{μ−1} e^{iωy} = s^μ e^{iωs}/μ − (iω/μ) ∫₀^s y^μ e^{iωy}.
        if params.a == 0.0 {
            return Err(Error::Domain(
                "an infinite-past window diverges at zero detuning".into(),
            ));
        }
        let split = hi.min(1.0 / params.b);
        let cut = 1e-17 * split * params.a.abs().min(1.0);
        let tol = QUADRATURE_TOL_PER_UNIT * (hi / cut).ln();
        let near_tol = tol * params.a.abs() / params.b / split;
        let near = log_oscillatory(mu + 1.0, omega, cut, split, near_tol);
        let boundary = (mu * split.ln() + Complex64::new(0.0, omega * split)).exp() / mu;
        let factor = Complex64::new(0.0, omega) / mu;
        let far = log_oscillatory(mu, omega, split, hi, tol);
        let scaled = QuadResult {
            value: boundary - factor * near.value + far.value,
            error: factor.norm() * near.error + far.error,
            converged: near.converged && far.converged,
        };
        (scaled.value, scaled, tol)
    };

    if !result.converged || result.error > tolerance {
        return Err(Error::Accuracy {
            what: "chirp integral quadrature",
            estimate: result.error / kappa.abs(),
            tolerance: tolerance / kappa.abs(),
        });
    }
    Ok(ChirpIntegral::from_value(
        value / kappa.abs(),
        IntegralMethod::Quadrature,
        result.error / kappa.abs(),
    ))
}

fn require_closed_form_domain(a: f64, kappa: f64) -> Result<()> {
    check_kappa(kappa)?;
    if kappa < 0.0 {
        return Err(Error::Domain(
            "closed forms cover upward chirps only; use quadrature for κ < 0".into(),
        ));
    }
    if a == 0.0 {
        return Err(Error::Domain("closed form has a Γ(ia) pole at zero detuning".into()));
    }
    Ok(())
}

/// `(−ib)^{−ia} Γ(ia)`, the common prefactor of the closed forms (times κ).
fn closed_prefactor(a: f64, b: f64) -> Result<Complex64> {
    let mu = Complex64::new(0.0, a);
    Ok((special::ln_gamma(mu)? - mu * Complex64::new(0.0, -b).ln()).exp())
}

fn incomplete_terms(params: &ReducedParams) -> Result<(Complex64, Complex64)> {
    let mu = Complex64::new(0.0, params.a);
    let lower = if params.y0 == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        special::lower_incomplete_normalized(mu, Complex64::new(0.0, -params.b * params.y0))?
    };
    let upper = special::upper_incomplete_normalized(mu, Complex64::new(0.0, -params.b * params.y_t))?;
    Ok((lower, upper))
}

/// Finite-window factor `1 − γ'(ia, −iby₀) − Γ'(ia, −iby_T)`.
///
/// `|I|² = |I_∞|² · |window_factor|²`, so this carries all of the `b`
/// dependence of a finite chirp.
pub fn window_factor(params: &ReducedParams) -> Result<Complex64> {
    if params.direction == ChirpDirection::Down {
        return Err(Error::Domain("window factor is defined for upward chirps".into()));
    }
    if params.a == 0.0 {
        return Err(Error::Domain("window factor needs a nonzero detuning".into()));
    }
    let (lower, upper) = incomplete_terms(params)?;
    Ok(1.0 - lower - upper)
}

/// Closed form for finite limits,
/// `I = (1/κ) (−ib)^{−ia} Γ(ia) [1 − γ'(ia, −iby₀) − Γ'(ia, −iby_T)]`.
pub fn integral_closed_finite(params: &ReducedParams, kappa: f64) -> Result<ChirpIntegral> {
    if params.direction == ChirpDirection::Down {
        return Err(Error::Domain(
            "closed forms cover upward chirps only; use quadrature for κ < 0".into(),
        ));
    }
    require_closed_form_domain(params.a, kappa)?;
    let prefactor = closed_prefactor(params.a, params.b)?;
    let (lower, upper) = incomplete_terms(params)?;
    let bracket = 1.0 - lower - upper;
    let value = prefactor * bracket / kappa;
    let scale = prefactor.norm() * (1.0 + lower.norm() + upper.norm()) / kappa;
    Ok(ChirpIntegral::from_value(
        value,
        IntegralMethod::ClosedFinite,
        64.0 * f64::EPSILON * scale,
    ))
}

/// Infinite window `(−∞, ∞)`: `I = Γ(ia) e^{−πa/2} / κ`, with
/// `|I|² = 2π / (κ² a (e^{2πa} − 1))` for either sign of `a`.
///
/// The phase is referenced to `ν_p = κ`; see [`integral_closed_infinite_for_mode`].
pub fn integral_closed_infinite(a: f64, kappa: f64) -> Result<ChirpIntegral> {
    if !a.is_finite() {
        return Err(Error::InvalidInput(format!("a = Δ/κ must be finite, got {a}")));
    }
    require_closed_form_domain(a, kappa)?;
    let value = (special::ln_gamma(Complex64::new(0.0, a))? - PI * a / 2.0).exp() / kappa;
    let abs_sq = 2.0 * PI / (kappa * kappa * a * (2.0 * PI * a).exp_m1());
    Ok(ChirpIntegral {
        value,
        abs_sq,
        method: IntegralMethod::ClosedInfinite,
        err_estimate: 64.0 * f64::EPSILON * value.norm(),
    })
}

/// Infinite-window integral including the mode phase `b^{−ia}`, directly
/// comparable with [`integral_closed_finite`] for the same `b`.
pub fn integral_closed_infinite_for_mode(a: f64, b: f64, kappa: f64) -> Result<ChirpIntegral> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidInput(format!("b = ν_p/κ must be positive, got {b}")));
    }
    let mut out = integral_closed_infinite(a, kappa)?;
    out.value *= Complex64::new(0.0, -a * b.ln()).exp();
    Ok(out)
}

/// Noise spectrum of a plane wave seen from a uniformly accelerated frame,
/// `S(Δ) = (2π / (Δ a/c)) / (e^{2πΔc/a} − 1)`.
///
/// Evaluated as the infinite chirp integral with `κ = a/c`.
pub fn rindler_noise_spectrum(delta: f64, accel_freq: f64) -> Result<f64> {
    if !(accel_freq.is_finite() && accel_freq > 0.0) {
        return Err(Error::InvalidInput(format!(
            "acceleration frequency must be positive, got {accel_freq}"
        )));
    }
    if delta == 0.0 {
        return Err(Error::Domain("noise spectrum diverges at zero detuning".into()));
    }
    Ok(integral_closed_infinite(delta / accel_freq, accel_freq)?.abs_sq)
}

impl ChirpProfile {
    /// `I_p` for detuning `delta` and mode frequency `nu_p`: closed form when
    /// available (upward chirp, `Δ ≠ 0`), quadrature otherwise.
    pub fn integral(&self, delta: f64, nu_p: f64) -> Result<ChirpIntegral> {
        let params = self.reduced(delta, nu_p)?;
        if params.direction == ChirpDirection::Up && params.a != 0.0 {
            integral_closed_finite(&params, self.kappa)
        } else {
            integral_quadrature(&params, self.kappa)
        }
    }
}
