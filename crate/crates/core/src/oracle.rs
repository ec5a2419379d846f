//! Independent checks of the detector response.
//!
//! [`perturbative_probability`] sums the first-order double integral over the
//! phonon correlation function on a fixed Gauss-Legendre grid, without ever
//! forming a single-time integral. [`evolve_schrodinger`] integrates the full
//! interaction-picture Hamiltonian `χ q̂_m(t) σ_x(t)`, counter-rotating terms
//! included, in a truncated Fock space.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chirp::{ChirpDirection, ChirpProfile};
use crate::error::{Error, Result};
use crate::normal_modes::IonChain;
use crate::spectrum::DetectorProbe;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest chain and Fock cutoff the Schrödinger oracle accepts.
pub const MAX_ORACLE_IONS: usize = 3;
pub const MAX_FOCK: usize = 3;
/// Allowed drift of `‖ψ‖²` away from one.
pub const NORM_DRIFT_LIMIT: f64 = 1e-9;
/// Population at the Fock cutoff above which truncation is reported.
pub const TRUNCATION_WARNING: f64 = 1e-6;
/// Relative accuracy demanded of the double integral.
pub const DOUBLE_INTEGRAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Coupling `χ = Ω₀η` used for the evolution (rad/s).
    pub chi: f64,
    pub n_max: usize,
    pub rtol: f64,
    pub atol: f64,
    /// Relative tolerance for the double integral.
    pub quad_tol: f64,
    /// Switch-on width for an infinite past, in units of `1/|Δ|`.
    pub ramp_width: f64,
}

impl OracleConfig {
    pub fn new(chi: f64) -> Result<Self> {
        let cfg = Self {
            chi,
            n_max: 2,
            rtol: 1e-10,
            atol: 1e-13,
            quad_tol: DOUBLE_INTEGRAL_TOL,
            ramp_width: 8.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_n_max(mut self, n_max: usize) -> Result<Self> {
        self.n_max = n_max;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chi.is_finite() && self.chi >= 0.0) {
            return Err(Error::InvalidInput(format!("χ must be non-negative, got {}", self.chi)));
        }
        if !(1..=MAX_FOCK).contains(&self.n_max) {
            return Err(Error::InvalidInput(format!(
                "Fock cutoff must lie in 1..={MAX_FOCK}, got {}",
                self.n_max
            )));
        }
        for (name, v) in [("rtol", self.rtol), ("atol", self.atol), ("quad_tol", self.quad_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.ramp_width.is_finite() && self.ramp_width > 0.0) {
            return Err(Error::InvalidInput("ramp width must be positive".into()));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// First-order double integral

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// A weighted sample of a linear functional on the correlation kernel:
/// `deriv` marks nodes that act on `∂K/∂y` instead of `K`.
#[derive(Debug, Clone, Copy)]
struct Node {
    y: f64,
    weight: Complex64,
    deriv: bool,
}

/// Nodes for `∫_lo^hi y^{p−1} g(y) dy` where `g` oscillates at most like `e^{iωy}`.
fn power_nodes(p: Complex64, omega: f64, lo: f64, hi: f64, gl: &(Vec<f64>, Vec<f64>)) -> Vec<Node> {
    let mut out = Vec::new();
    if lo >= hi {
        return out;
    }
    let split = (1.0 / omega).clamp(lo, hi);
    let rate = p.im.abs();
    let mut push_panels = |a: f64, b: f64, width: f64, log: bool| {
        let n = ((b - a) / width).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        for k in 0..n {
            let centre = a + (k as f64 + 0.5) * h;
            for (xi, wi) in gl.0.iter().zip(&gl.1) {
                let v = centre + 0.5 * h * xi;
                let wv = 0.5 * h * wi;
                let (y, weight) = if log {
                    let y = v.exp();
                    (y, wv * (p * v).exp())
                } else {
                    (v, wv * ((p - 1.0) * v.ln()).exp())
                };
                out.push(Node { y, weight, deriv: false });
            }
        }
    };
    if split > lo {
        push_panels(lo.ln(), split.ln(), (PI / (rate + 1.0)).min(1.0), true);
    }
    if hi > split {
        push_panels(split, hi, PI / (rate / split + omega), false);
    }
    out
}

/// Discretisation of `∫_{y₀}^{y_T} dy y^{ia−1} (·)`. For `y₀ = 0` the part
/// below `s = min(y_T, 1/ω)` is integrated by parts and the boundary term at
/// the origin dropped (adiabatic switch-on).
fn response_functional(a: f64, omega: f64, lo: f64, hi: f64, gl: &(Vec<f64>, Vec<f64>)) -> Result<Vec<Node>> {
    let mu = Complex64::new(0.0, a);
    if lo > 0.0 {
        return Ok(power_nodes(mu, omega, lo, hi, gl));
    }
    if a == 0.0 {
        return Err(Error::Domain("an infinite-past window diverges at zero detuning".into()));
    }
    let s = hi.min(1.0 / omega);
    let mut nodes = vec![Node {
        y: s,
        weight: (mu * s.ln()).exp() / mu,
        deriv: false,
    }];
    let cut = 1e-9 * s;
    nodes.extend(power_nodes(mu + 1.0, omega, cut, s, gl).into_iter().map(|n| Node {
        weight: -n.weight / mu,
        deriv: true,
        ..n
    }));
    nodes.extend(power_nodes(mu, omega, s, hi, gl));
    Ok(nodes)
}

/// Correlation kernel `(1/N) Σ_p |s_m^(p)|² e^{iσc_p(y'−y'')}` and its
/// derivatives, with `c_p = ν_p/|κ|` and `σ` the chirp direction.
struct Correlation {
    strengths: Vec<f64>,
    freqs: Vec<f64>,
}

impl Correlation {
    fn eval(&self, y1: f64, d1: bool, y2: f64, d2: bool) -> Complex64 {
        let mut acc = ZERO;
        for (w, c) in self.strengths.iter().zip(&self.freqs) {
            let mut term = Complex64::from_polar(*w, c * (y1 - y2));
            if d1 {
                term *= I * c;
            }
            if d2 {
                term *= -I * c;
            }
            acc += term;
        }
        acc
    }
}

fn hermitian_sum(nodes: &[Node], kernel: &Correlation) -> f64 {
    (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let ni = nodes[i];
            let diag = ni.weight.norm_sqr() * kernel.eval(ni.y, ni.deriv, ni.y, ni.deriv).re;
            let off: Complex64 = nodes[i + 1..]
                .iter()
                .map(|nj| ni.weight * nj.weight.conj() * kernel.eval(ni.y, ni.deriv, nj.y, nj.deriv))
                .sum();
            diag + 2.0 * off.re
        })
        .sum()
}

/// First-order excitation probability
/// `χ² ∫∫ dt' dt'' e^{iΔ(t'−t'')} ⟨q̂_m(t'') q̂_m(t')⟩` over the chirp window,
/// evaluated as a double sum over the correlation function.
pub fn perturbative_probability(chain: &IonChain, probe: &DetectorProbe, chirp: &ChirpProfile) -> Result<f64> {
    perturbative_probability_with_tol(chain, probe, chirp, DOUBLE_INTEGRAL_TOL)
}

pub fn perturbative_probability_with_tol(
    chain: &IonChain,
    probe: &DetectorProbe,
    chirp: &ChirpProfile,
    rel_tol: f64,
) -> Result<f64> {
    let m = probe.ion_index();
    chain.check_ion(m)?;
    let chi = probe.chi();
    if chi == 0.0 || chirp.t_start() == chirp.t_stop() {
        return Ok(0.0);
    }
    let kappa = chirp.kappa();
    let n = chain.n_ions() as f64;
    let sign = match chirp.direction() {
        ChirpDirection::Up => 1.0,
        ChirpDirection::Down => -1.0,
    };
    let kernel = Correlation {
        strengths: (1..=chain.n_ions()).map(|p| chain.s(m, p).powi(2) / n).collect(),
        freqs: chain.mode_frequencies().iter().map(|nu| sign * nu / kappa.abs()).collect(),
    };
    let omega = kernel.freqs.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
    let (lo, hi) = {
        let (y0, yt) = (chirp.y0(), chirp.y_t());
        (y0.min(yt), y0.max(yt))
    };
    let a = probe.detuning() / kappa;
    let scale = chi * chi / (kappa * kappa);

    let coarse = response_functional(a, omega, lo, hi, &gauss_legendre(16))?;
    let fine = response_functional(a, omega, lo, hi, &gauss_legendre(24))?;
    let p_coarse = scale * hermitian_sum(&coarse, &kernel);
    let p_fine = scale * hermitian_sum(&fine, &kernel);
    let estimate = (p_fine - p_coarse).abs();
    let tolerance = rel_tol * p_fine.abs() + 1e-300;
    if !(estimate <= tolerance) {
        return Err(Error::Accuracy {
            what: "correlation double integral",
            estimate,
            tolerance,
        });
    }
    Ok(p_fine)
}

/// `|∫₀^{t_w} e^{i(Δ+ν)t} dt|²`, the blue-sideband resonance of a constant trap.
pub fn constant_trap_response(probe: &DetectorProbe, nu: f64, t_window: f64) -> Result<f64> {
    if !(t_window.is_finite() && t_window > 0.0) {
        return Err(Error::InvalidInput(format!("window must be positive, got {t_window}")));
    }
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidInput(format!("trap frequency must be positive, got {nu}")));
    }
    let half = 0.5 * (probe.detuning() + nu) * t_window;
    let sinc = if half == 0.0 { 1.0 } else { half.sin() / half };
    Ok((t_window * sinc).powi(2))
}

// ---------------------------------------------------------------------------
// Schrödinger evolution

/// Amplitudes over `{g, e} ⊗ |n_1 … n_N⟩`, `n_p ≤ n_max`.
///
/// Index layout: `e·M + Σ_p n_p (n_max+1)^{p−1}`, `M = (n_max+1)^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    amplitudes: Vec<Complex64>,
    n_modes: usize,
    n_max: usize,
}

impl TruncatedState {
    /// `|g⟩ ⊗ |0 … 0⟩`.
    pub fn ground(n_modes: usize, n_max: usize) -> Self {
        let dim = 2 * (n_max + 1).pow(n_modes as u32);
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            n_modes,
            n_max,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn phonon_dim(&self) -> usize {
        self.amplitudes.len() / 2
    }

    /// Index of `|excited⟩ ⊗ |occupations⟩`.
    pub fn index(&self, excited: bool, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.n_modes || occupations.iter().any(|&n| n > self.n_max) {
            return None;
        }
        let mut idx = 0;
        let mut stride = 1;
        for &n in occupations {
            idx += n * stride;
            stride *= self.n_max + 1;
        }
        Some(idx + usize::from(excited) * self.phonon_dim())
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        let mut k = index % self.phonon_dim();
        (0..self.n_modes)
            .map(|_| {
                let n = k % (self.n_max + 1);
                k /= self.n_max + 1;
                n
            })
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_n |⟨e, n|ψ⟩|²`.
    pub fn excited_population(&self) -> f64 {
        self.amplitudes[self.phonon_dim()..].iter().map(|c| c.norm_sqr()).sum()
    }

    /// Population of states with some mode at the cutoff.
    pub fn truncation_population(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.occupations(*i).contains(&self.n_max))
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub state: TruncatedState,
    pub excited_population: f64,
    /// `|‖ψ‖² − 1|` at the end of the evolution.
    pub norm_drift: f64,
    /// Largest cutoff population seen at any accepted step.
    pub truncation_population: f64,
    pub truncation_warning: bool,
    pub steps: usize,
}

enum Phase {
    Chirped { kappa: f64 },
    Constant,
}

struct Drive {
    chi: f64,
    delta: f64,
    phase: Phase,
    nus: Vec<f64>,
    /// `s_m^(p)/√N`
    couplings: Vec<f64>,
    /// `(centre, width)` of an erf switch-on.
    ramp: Option<(f64, f64)>,
    n_max: usize,
    strides: Vec<usize>,
    phonon_dim: usize,
    /// Basis states with some mode at the cutoff.
    at_cutoff: Vec<bool>,
}

impl Drive {
    fn mode_phase(&self, p: usize, t: f64) -> f64 {
        match self.phase {
            Phase::Chirped { kappa } => self.nus[p] / kappa * (kappa * t).exp(),
            Phase::Constant => self.nus[p] * t,
        }
    }

    fn envelope(&self, t: f64) -> f64 {
        match self.ramp {
            Some((centre, width)) => 0.5 * (1.0 + libm::erf((t - centre) / width)),
            None => 1.0,
        }
    }

    /// Upper bound on the instantaneous rate of the Hamiltonian's phases.
    fn max_rate(&self, t: f64) -> f64 {
        let modes = (0..self.nus.len())
            .map(|p| match self.phase {
                Phase::Chirped { kappa } => self.nus[p] * (kappa * t).exp(),
                Phase::Constant => self.nus[p],
            })
            .fold(0.0, f64::max);
        let ramp = self.ramp.map_or(0.0, |(_, w)| 1.0 / w);
        self.delta.abs() + modes + ramp + self.chi
    }

    /// `dψ/dt = −i H(t) ψ`.
    fn rhs(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let amp = self.chi * self.envelope(t);
        out.iter_mut().for_each(|o| *o = ZERO);
        if amp == 0.0 {
            return;
        }
        let d = self.phonon_dim;
        let lower = Complex64::from_polar(1.0, -self.delta * t);
        // q = Σ_p α_p a_p + β_p a_p†
        let coeffs: Vec<(Complex64, Complex64)> = (0..self.nus.len())
            .map(|p| {
                let e = Complex64::from_polar(1.0, -self.mode_phase(p, t));
                (I * self.couplings[p] * e, -I * self.couplings[p] * e.conj())
            })
            .collect();
        let scale = -I * amp;
        for excited in [false, true] {
            // σ_x maps the other electronic block onto this one.
            let (src, dst, sig) = if excited {
                (0, d, lower.conj())
            } else {
                (d, 0, lower)
            };
            for k in 0..d {
                let v = psi[src + k];
                if v == ZERO {
                    continue;
                }
                let v = v * sig * scale;
                for (p, (alpha, beta)) in coeffs.iter().enumerate() {
                    let stride = self.strides[p];
                    let n = (k / stride) % (self.n_max + 1);
                    if n > 0 {
                        out[dst + k - stride] += alpha * (n as f64).sqrt() * v;
                    }
                    if n < self.n_max {
                        out[dst + k + stride] += beta * ((n + 1) as f64).sqrt() * v;
                    }
                }
            }
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const MAX_STEPS: usize = 5_000_000;

fn integrate(drive: &Drive, cfg: &OracleConfig, t0: f64, t1: f64, state: &mut TruncatedState) -> Result<(usize, f64)> {
    let dim = state.amplitudes.len();
    let mut y = state.amplitudes.clone();
    let mut k: Vec<Vec<Complex64>> = vec![vec![ZERO; dim]; 7];
    let mut stage = vec![ZERO; dim];
    let mut y_new = vec![ZERO; dim];
    let mut t = t0;
    let mut h = (0.1 / drive.max_rate(t)).min(t1 - t0);
    let mut steps = 0;
    let mut worst_truncation = 0.0_f64;
    drive.rhs(t, &y, &mut k[0]);
    while t < t1 {
        if steps >= MAX_STEPS {
            return Err(Error::Integrator(format!("step limit reached at t = {t}")));
        }
        let h_cap = 0.5 / drive.max_rate(t);
        h = h.min(h_cap).min(t1 - t);
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        acc += kj[i] * (h * A[s][j]);
                    }
                }
                stage[i] = acc;
            }
            drive.rhs(t + C[s] * h, &stage, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }
        let mut err = 0.0_f64;
        for i in 0..dim {
            let mut e = ZERO;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * E[j];
                }
            }
            let sc = cfg.atol + cfg.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max((e * h).norm() / sc);
        }
        if !err.is_finite() {
            return Err(Error::Integrator(format!("non-finite error estimate at t = {t}")));
        }
        if err <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut y_new);
            // first-same-as-last
            let last = k[6].clone();
            k[0].copy_from_slice(&last);
            steps += 1;
            let cut: f64 = y
                .iter()
                .zip(&drive.at_cutoff)
                .filter(|(_, c)| **c)
                .map(|(v, _)| v.norm_sqr())
                .sum();
            worst_truncation = worst_truncation.max(cut);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * t.abs().max(1.0) && t < t1 {
            return Err(Error::Integrator(format!("step size underflow at t = {t}")));
        }
    }
    state.amplitudes.copy_from_slice(&y);
    Ok((steps, worst_truncation))
}

fn check_oracle_size(cfg: &OracleConfig, chain: &IonChain) -> Result<()> {
    cfg.validate()?;
    if chain.n_ions() > MAX_ORACLE_IONS {
        return Err(Error::InvalidInput(format!(
            "Schrödinger oracle supports at most {MAX_ORACLE_IONS} ions, got {}",
            chain.n_ions()
        )));
    }
    Ok(())
}

fn build_drive(cfg: &OracleConfig, chain: &IonChain, probe: &DetectorProbe, phase: Phase) -> Result<Drive> {
    let m = probe.ion_index();
    chain.check_ion(m)?;
    let n = chain.n_ions();
    let strides: Vec<usize> = (0..n).map(|p| (cfg.n_max + 1).pow(p as u32)).collect();
    let probe_state = TruncatedState::ground(n, cfg.n_max);
    let at_cutoff = (0..probe_state.amplitudes.len())
        .map(|i| probe_state.occupations(i).contains(&cfg.n_max))
        .collect();
    Ok(Drive {
        chi: cfg.chi,
        delta: probe.detuning(),
        phase,
        nus: chain.mode_frequencies(),
        couplings: (1..=n).map(|p| chain.s(m, p) / (n as f64).sqrt()).collect(),
        ramp: None,
        n_max: cfg.n_max,
        strides,
        phonon_dim: (cfg.n_max + 1).pow(n as u32),
        at_cutoff,
    })
}

fn finish(state: TruncatedState, steps: usize, worst_truncation: f64) -> Result<Evolution> {
    let norm_drift = (state.norm_sqr() - 1.0).abs();
    if norm_drift > NORM_DRIFT_LIMIT {
        return Err(Error::Integrator(format!(
            "norm drifted by {norm_drift:e} (limit {NORM_DRIFT_LIMIT:e})"
        )));
    }
    Ok(Evolution {
        excited_population: state.excited_population(),
        norm_drift,
        truncation_population: worst_truncation,
        truncation_warning: worst_truncation > TRUNCATION_WARNING,
        steps,
        state,
    })
}

/// Evolves `|g⟩|0⟩` through the chirp window under `χ q̂_m(t) σ_x(t)` with
/// `χ` from `config` and `Δ`, `m` from `probe`.
///
/// An infinite past is replaced by an erf switch-on of width
/// `config.ramp_width/|Δ|`, completed while the mode phases are still frozen.
pub fn evolve_schrodinger(
    config: &OracleConfig,
    chain: &IonChain,
    probe: &DetectorProbe,
    chirp: &ChirpProfile,
) -> Result<Evolution> {
    check_oracle_size(config, chain)?;
    let kappa = chirp.kappa();
    let mut drive = build_drive(config, chain, probe, Phase::Chirped { kappa })?;
    let mut state = TruncatedState::ground(chain.n_ions(), config.n_max);
    if config.chi == 0.0 || chirp.t_start() == chirp.t_stop() {
        return finish(state, 0, 0.0);
    }
    let t1 = chirp.t_stop();
    let t0 = if chirp.t_start().is_finite() {
        chirp.t_start()
    } else {
        let delta = probe.detuning().abs();
        if delta == 0.0 {
            return Err(Error::Domain("an infinite-past window needs Δ ≠ 0".into()));
        }
        let width = config.ramp_width / delta;
        let b_max = chain.mode_frequencies().iter().fold(0.0_f64, |a, nu| a.max(*nu)) / kappa;
        let centre = (1e-12 / b_max).ln() / kappa - 6.0 * width;
        if centre + 6.0 * width > t1 {
            return Err(Error::InvalidInput("window too short for an adiabatic switch-on".into()));
        }
        drive.ramp = Some((centre, width));
        centre - 7.0 * width
    };
    let (steps, worst) = integrate(&drive, config, t0, t1, &mut state)?;
    finish(state, steps, worst)
}

/// Evolution in a constant trap (`φ_p = ν_p t`) over `[0, t_window]`.
pub fn evolve_constant_trap(
    config: &OracleConfig,
    chain: &IonChain,
    probe: &DetectorProbe,
    t_window: f64,
) -> Result<Evolution> {
    check_oracle_size(config, chain)?;
    if !(t_window.is_finite() && t_window >= 0.0) {
        return Err(Error::InvalidInput(format!("window must be non-negative, got {t_window}")));
    }
    let drive = build_drive(config, chain, probe, Phase::Constant)?;
    let mut state = TruncatedState::ground(chain.n_ions(), config.n_max);
    if config.chi == 0.0 || t_window == 0.0 {
        return finish(state, 0, 0.0);
    }
    let (steps, worst) = integrate(&drive, config, 0.0, t_window, &mut state)?;
    finish(state, steps, worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_nodes_integrate_polynomials() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m22: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((m22 - 2.0 / 23.0).abs() < 1e-14);
    }

    #[test]
    fn state_indexing_round_trips() {
        let st = TruncatedState::ground(2, 3);
        assert_eq!(st.amplitudes().len(), 32);
        let idx = st.index(true, &[2, 1]).unwrap();
        assert_eq!(idx, 16 + 2 + 4);
        assert_eq!(st.occupations(idx), vec![2, 1]);
        assert!(st.index(false, &[4, 0]).is_none());
        assert_eq!(st.excited_population(), 0.0);
    }

    #[test]
    fn zero_coupling_leaves_state() {
        let chain = IonChain::single_ion(1.0).unwrap();
        let probe = DetectorProbe::with_chi(1.0, 0.0).unwrap();
        let chirp = ChirpProfile::new(1.0, 0.0, 2.0).unwrap();
        let cfg = OracleConfig::new(0.0).unwrap();
        let out = evolve_schrodinger(&cfg, &chain, &probe, &chirp).unwrap();
        assert_eq!(out.state, TruncatedState::ground(1, 2));
        assert_eq!(perturbative_probability(&chain, &probe, &chirp).unwrap(), 0.0);
    }

    #[test]
    fn blue_resonance_of_constant_trap() {
        let chain = IonChain::single_ion(1.0).unwrap();
        let chi = 1e-3;
        let probe = DetectorProbe::with_chi(-1.0, chi).unwrap();
        let cfg = OracleConfig::new(chi).unwrap();
        let t = 5.0;
        let out = evolve_constant_trap(&cfg, &chain, &probe, t).unwrap();
        let expected = (chi * t).powi(2);
        assert!((out.excited_population - expected).abs() < 1e-3 * expected);
        assert!(out.norm_drift < NORM_DRIFT_LIMIT);
    }

    #[test]
    fn config_limits() {
        assert!(OracleConfig::new(-1.0).is_err());
        assert!(OracleConfig::new(1.0).unwrap().with_n_max(4).is_err());
        assert!(OracleConfig::new(1.0).unwrap().with_n_max(0).is_err());
        let chain = IonChain::new(4, 1.0).unwrap();
        let probe = DetectorProbe::with_chi(1.0, 1.0).unwrap();
        let cfg = OracleConfig::new(1.0).unwrap();
        assert!(evolve_constant_trap(&cfg, &chain, &probe, 1.0).is_err());
    }

    #[test]
    fn response_symmetry() {
        let nu = 2.0;
        let tw = 3.0;
        for d in [0.3, 1.7] {
            let up = constant_trap_response(&DetectorProbe::with_chi(-nu + d, 1.0).unwrap(), nu, tw).unwrap();
            let down = constant_trap_response(&DetectorProbe::with_chi(-nu - d, 1.0).unwrap(), nu, tw).unwrap();
            assert!((up - down).abs() < 1e-14 * up);
        }
        let peak = constant_trap_response(&DetectorProbe::with_chi(-nu, 1.0).unwrap(), nu, tw).unwrap();
        assert_eq!(peak, tw * tw);
    }
}
