//! Excitation probabilities of the detector ion and derived observables.
//!
//! Units follow ħ = k_B = 1: frequencies are angular (rad/s) and the Unruh
//! temperature is `κ/2π` in the same units. All closed forms depend on the
//! ratios `Δ/κ`, `ν_p/κ` and `z = 2πν/κ` only.

use std::f64::consts::PI;

use crate::chirp::{self, ChirpProfile};
use crate::error::{Error, Result};
use crate::normal_modes::IonChain;

/// Probabilities above this are outside first-order perturbation theory.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;
/// `ν_p/κ` must not exceed this for the thermal regime.
pub const SLOW_MODE_LIMIT: f64 = 0.01;
/// `(ν_p/κ) e^{κT}` must reach this for the thermal regime.
pub const LONG_WINDOW_LIMIT: f64 = 100.0;

/// Laser probe on one ion of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorProbe {
    detuning: f64,
    rabi: f64,
    lamb_dicke: f64,
    ion_index: usize,
}

impl DetectorProbe {
    /// `detuning` is `Δ = ω_A − ω_L`; `ion_index` is 1-based.
    pub fn new(detuning: f64, rabi: f64, lamb_dicke: f64, ion_index: usize) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::InvalidInput(format!("detuning must be finite, got {detuning}")));
        }
        if !(rabi.is_finite() && rabi >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "Rabi frequency must be non-negative, got {rabi}"
            )));
        }
        if !(0.0..1.0).contains(&lamb_dicke) {
            return Err(Error::InvalidInput(format!(
                "Lamb-Dicke parameter must lie in [0, 1), got {lamb_dicke}"
            )));
        }
        if ion_index == 0 {
            return Err(Error::InvalidInput("ion index is 1-based".into()));
        }
        Ok(Self {
            detuning,
            rabi,
            lamb_dicke,
            ion_index,
        })
    }

    /// Probe with coupling `χ` given directly (`Ω₀ = χ/η` with `η = 0.1`).
    pub fn with_chi(detuning: f64, chi: f64) -> Result<Self> {
        Self::new(detuning, chi / 0.1, 0.1, 1)
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn lamb_dicke(&self) -> f64 {
        self.lamb_dicke
    }

    pub fn ion_index(&self) -> usize {
        self.ion_index
    }

    /// `χ = Ω₀ η`.
    pub fn chi(&self) -> f64 {
        self.rabi * self.lamb_dicke
    }

    pub fn at_detuning(&self, detuning: f64) -> Result<Self> {
        Self::new(detuning, self.rabi, self.lamb_dicke, self.ion_index)
    }
}

fn check_rate(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidInput(format!(
            "chirp rate must be positive and finite here, got {kappa}"
        )));
    }
    Ok(())
}

/// `2π / (x (e^{2πx} − 1))` for `x = Δ/κ` of either sign, i.e. `κ²|I_∞|²`.
pub fn planck_response(x: f64) -> f64 {
    2.0 * PI / (x * (2.0 * PI * x).exp_m1())
}

/// Red sideband (`Δ > 0`) probability for an infinite upward chirp,
/// `P^R = χ² W · 2π / (κΔ (e^{2πΔ/κ} − 1))` with `W = Σ_p |b_m^(p)|²/√μ_p`.
pub fn red_probability(chain: &IonChain, probe: &DetectorProbe, kappa: f64) -> Result<f64> {
    check_rate(kappa)?;
    if probe.detuning <= 0.0 {
        return Err(Error::Domain(format!(
            "red sideband needs Δ > 0, got {}; use blue_probability",
            probe.detuning
        )));
    }
    unruh_probability(chain, probe, kappa)
}

/// Blue sideband (`Δ < 0`) probability,
/// `P^B = χ² W · 2π / (κ|Δ| (1 − e^{−2π|Δ|/κ}))`.
pub fn blue_probability(chain: &IonChain, probe: &DetectorProbe, kappa: f64) -> Result<f64> {
    check_rate(kappa)?;
    if probe.detuning >= 0.0 {
        return Err(Error::Domain(format!(
            "blue sideband needs Δ < 0, got {}; use red_probability",
            probe.detuning
        )));
    }
    unruh_probability(chain, probe, kappa)
}

/// Infinite-chirp probability on whichever sideband the sign of `Δ` selects.
pub fn unruh_probability(chain: &IonChain, probe: &DetectorProbe, kappa: f64) -> Result<f64> {
    check_rate(kappa)?;
    if probe.detuning == 0.0 {
        return Err(Error::Domain("the infinite-chirp response has a pole at Δ = 0".into()));
    }
    let weight = chain.mode_weight(probe.ion_index)?;
    let chi = probe.chi();
    Ok(chi * chi * weight * planck_response(probe.detuning / kappa) / (kappa * kappa))
}

/// Finite-window probability `χ² Σ_p (|b_m^(p)|²/√μ_p) |I_p(T, t₀)|²`.
///
/// Uses the closed form for upward chirps and quadrature for downward ones.
pub fn finite_chirp_probability(
    chain: &IonChain,
    probe: &DetectorProbe,
    chirp: &ChirpProfile,
) -> Result<f64> {
    let weights = chain.mode_weights(probe.ion_index)?;
    let chi = probe.chi();
    let mut sum = 0.0;
    for (p, w) in weights.iter().enumerate() {
        let nu_p = chain.mode_frequency(p + 1);
        sum += w * chirp.integral(probe.detuning, nu_p)?.abs_sq;
    }
    Ok(chi * chi * sum)
}

/// The same probability written as the infinite-window Planck factor times
/// the mode-weighted window factors, `P_∞/W · Σ_p w_p |1 − γ' − Γ'|²`.
pub fn finite_chirp_probability_factorized(
    chain: &IonChain,
    probe: &DetectorProbe,
    chirp: &ChirpProfile,
) -> Result<f64> {
    let kappa = chirp.kappa();
    check_rate(kappa)?;
    let weights = chain.mode_weights(probe.ion_index)?;
    let mut sum = 0.0;
    for (p, w) in weights.iter().enumerate() {
        let params = chirp.reduced(probe.detuning, chain.mode_frequency(p + 1))?;
        sum += w * chirp::window_factor(&params)?.norm_sqr();
    }
    let chi = probe.chi();
    Ok(chi * chi * planck_response(probe.detuning / kappa) / (kappa * kappa) * sum)
}

/// `P^R = (χ/ν)² z/(e^z − 1)` at `Δ = ν`, `z = 2πν/κ`, single ion.
pub fn red_probability_z(chi_over_nu: f64, z: f64) -> f64 {
    chi_over_nu * chi_over_nu * z / z.exp_m1()
}

/// `P^B = (χ/ν)² z/(1 − e^{−z})` at `Δ = −ν`, single ion.
pub fn blue_probability_z(chi_over_nu: f64, z: f64) -> f64 {
    chi_over_nu * chi_over_nu * z / -(-z).exp_m1()
}

/// Red-to-blue sideband ratio `R = (1 − e^{−z})/(e^z − 1)`, identically `e^{−z}`.
pub fn sideband_ratio(nu: f64, kappa: f64) -> Result<f64> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidInput(format!("trap frequency must be positive, got {nu}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidInput(format!("chirp rate must be positive, got {kappa}")));
    }
    if kappa.is_infinite() {
        return Ok(1.0);
    }
    let z = 2.0 * PI * nu / kappa;
    Ok(-(-z).exp_m1() / z.exp_m1())
}

/// `k_B T = κ/2π`.
pub fn unruh_temperature(kappa: f64) -> Result<f64> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidInput(format!("chirp rate must be non-negative, got {kappa}")));
    }
    Ok(kappa / (2.0 * PI))
}

/// `(Ω₀η/ν)²`, the scale of the sideband probabilities.
pub fn prefactor(probe: &DetectorProbe, nu: f64) -> Result<f64> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidInput(format!("trap frequency must be positive, got {nu}")));
    }
    let r = probe.chi() / nu;
    Ok(r * r)
}

/// Thermal regime `ν_p/κ ≤ 0.01` and `(ν_p/κ) e^{κT} ≥ 100` for every mode.
pub fn in_unruh_regime(chain: &IonChain, chirp: &ChirpProfile) -> bool {
    let kappa = chirp.kappa().abs();
    let y_t = chirp.y_t();
    chain.mode_frequencies().iter().all(|nu_p| {
        let b = nu_p / kappa;
        b <= SLOW_MODE_LIMIT && b * y_t >= LONG_WINDOW_LIMIT
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidityFlags {
    /// Window and chirp rate satisfy the thermal-regime conditions.
    pub unruh_regime: bool,
    /// Every reported probability is at most [`PERTURBATIVE_LIMIT`].
    pub perturbative: bool,
}

/// One detuning of a spectrum.
///
/// `p_red` and `p_blue` are the infinite-chirp sidebands at `|Δ|`; `p_finite`
/// is the finite-window probability at the signed `Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub detuning: f64,
    /// `x = 2πΔ/κ`
    pub x: f64,
    pub p_red: f64,
    pub p_blue: f64,
    pub p_finite: f64,
    pub unruh_temp: f64,
    pub flags: ValidityFlags,
}

impl SpectrumPoint {
    /// The infinite-chirp probability on the sideband selected by `Δ`.
    pub fn p_unruh(&self) -> f64 {
        if self.detuning > 0.0 {
            self.p_red
        } else {
            self.p_blue
        }
    }
}

pub fn spectrum_point(
    chain: &IonChain,
    probe: &DetectorProbe,
    chirp: &ChirpProfile,
) -> Result<SpectrumPoint> {
    let kappa = chirp.kappa();
    check_rate(kappa)?;
    let delta = probe.detuning;
    if delta == 0.0 {
        return Err(Error::Domain("spectrum has a pole at Δ = 0".into()));
    }
    let p_red = red_probability(chain, &probe.at_detuning(delta.abs())?, kappa)?;
    let p_blue = blue_probability(chain, &probe.at_detuning(-delta.abs())?, kappa)?;
    let p_finite = finite_chirp_probability(chain, probe, chirp)?;
    let largest = p_red.max(p_blue).max(p_finite);
    Ok(SpectrumPoint {
        detuning: delta,
        x: 2.0 * PI * delta / kappa,
        p_red,
        p_blue,
        p_finite,
        unruh_temp: unruh_temperature(kappa)?,
        flags: ValidityFlags {
            unruh_regime: in_unruh_regime(chain, chirp),
            perturbative: largest <= PERTURBATIVE_LIMIT,
        },
    })
}
