//! Acceptance criteria. Each criterion prints one status line; the process
//! exits non-zero if any of them fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use iontrap_unruh::chirp::{integral_closed_finite, integral_quadrature, ChirpProfile, ReducedParams};
use iontrap_unruh::normal_modes::{force_residual, IonChain};
use iontrap_unruh::oracle::{
    constant_trap_response, evolve_schrodinger, perturbative_probability, OracleConfig, NORM_DRIFT_LIMIT,
};
use iontrap_unruh::special::gamma;
use iontrap_unruh::spectrum::{
    blue_probability_z, finite_chirp_probability, prefactor, red_probability, red_probability_z, sideband_ratio,
    DetectorProbe,
};
use num_complex::Complex64;

struct Outcome {
    ok: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn gamma_identity() -> Outcome {
    let worst = log_space(0.01, 10.0, 200)
        .into_iter()
        .map(|x| {
            let g = gamma(Complex64::new(0.0, x)).unwrap();
            (g.norm_sqr() * x * (PI * x).sinh() - PI).abs()
        })
        .fold(0.0, f64::max);
    Outcome { ok: worst < 1e-10, detail: format!("max |Γ(ix)|²·x·sinh(πx) − π| = {worst:.3e} (limit 1e-10)") }
}

fn closed_vs_quadrature() -> Outcome {
    let mut worst = 0.0_f64;
    let mut failures = 0;
    for a in [-3.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 3.0] {
        for b in [0.01, 0.1, 1.0, 10.0] {
            for (y0, y_t) in [(1e-3, 10.0), (1.0, 100.0), (1e-2, 1e3)] {
                let p = ReducedParams::new(a, b, y0, y_t).unwrap();
                match (integral_closed_finite(&p, 1.0), integral_quadrature(&p, 1.0)) {
                    (Ok(c), Ok(q)) => worst = worst.max((c.value - q.value).norm() / c.value.norm()),
                    _ => failures += 1,
                }
            }
        }
    }
    Outcome {
        ok: failures == 0 && worst < 1e-6,
        detail: format!("96-point grid, worst relative difference {worst:.3e} (limit 1e-6), {failures} evaluation errors"),
    }
}

fn unruh_limit() -> Outcome {
    // ν/κ = 0.01, e^{κT} = 10⁴, window opened at t₀ = 0.
    let kappa = 1.0;
    let chain = IonChain::single_ion(0.01 * kappa).unwrap();
    let t_stop = 1e4f64.ln() / kappa;
    let worst_for = |chirp: &ChirpProfile| -> (f64, f64) {
        lin_space(0.1, 2.0, 39)
            .into_iter()
            .map(|a| {
                let probe = DetectorProbe::with_chi(a * kappa, 1e-3).unwrap();
                let finite = finite_chirp_probability(&chain, &probe, chirp).unwrap();
                let unruh = red_probability(&chain, &probe, kappa).unwrap();
                (rel(finite, unruh), a)
            })
            .fold((0.0, 0.0), |m, v| if v.0 > m.0 { v } else { m })
    };
    let literal = ChirpProfile::new(kappa, 0.0, t_stop).unwrap();
    let (worst, at) = worst_for(&literal);
    let adiabatic = ChirpProfile::from_infinite_past(kappa, 1e4).unwrap();
    let (worst_adiabatic, at_adiabatic) = worst_for(&adiabatic);
    // the closed form itself is checked against the double integral at a few detunings
    let oracle_dev = [0.1, 1.0, 2.0]
        .into_iter()
        .map(|a| {
            let probe = DetectorProbe::with_chi(a * kappa, 1e-3).unwrap();
            rel(
                perturbative_probability(&chain, &probe, &literal).unwrap(),
                finite_chirp_probability(&chain, &probe, &literal).unwrap(),
            )
        })
        .fold(0.0, f64::max);
    Outcome {
        ok: worst < 0.02,
        detail: format!(
            "t₀ = 0: max rel deviation {worst:.3e} at Δ/κ = {at:.3} (limit 2e-2); \
             t₀ → −∞: {worst_adiabatic:.3e} at Δ/κ = {at_adiabatic:.3}; closed form vs double integral {oracle_dev:.1e}"
        ),
    }
}

fn fig3_reproduction() -> Outcome {
    let kappa = 1.0;
    let chain = IonChain::single_ion(kappa).unwrap();
    let xs = lin_space(0.25, 8.0, 32);
    let mut sup = Vec::new();
    let mut worst_oracle = 0.0_f64;
    for y_t in [1.0, 10.0, 100.0] {
        let chirp = ChirpProfile::from_infinite_past(kappa, y_t).unwrap();
        let mut d = 0.0_f64;
        for &x in &xs {
            let probe = DetectorProbe::with_chi(x * kappa / (2.0 * PI), kappa).unwrap();
            let finite = finite_chirp_probability(&chain, &probe, &chirp).unwrap();
            let unruh = red_probability(&chain, &probe, kappa).unwrap();
            d = d.max((finite - unruh).abs());
            let oracle = perturbative_probability(&chain, &probe, &chirp).unwrap();
            worst_oracle = worst_oracle.max(rel(finite, oracle));
        }
        sup.push(d);
    }
    let decreasing = sup.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        ok: decreasing && worst_oracle < 1e-4,
        detail: format!(
            "sup distance to limit for y_T = 1, 10, 100: {:.4}, {:.4}, {:.4}; double integral worst rel {worst_oracle:.2e} (limit 1e-4)",
            sup[0], sup[1], sup[2]
        ),
    }
}

fn observables() -> Outcome {
    let r = sideband_ratio(0.5, 1.0).unwrap();
    let r_err = (r - (-PI).exp()).abs();
    let two_pi = 2.0 * PI;
    let p1 = prefactor(&DetectorProbe::new(1.0, two_pi * 500e3, 0.2, 1).unwrap(), two_pi * 200e3).unwrap();
    let p2 = prefactor(&DetectorProbe::new(1.0, two_pi * 500e3, 0.05, 1).unwrap(), two_pi * 200e3).unwrap();
    let ok = r_err < 1e-12 && rel(p1, 0.25) < 1e-15 && rel(p2, 0.015625) < 1e-15;
    Outcome { ok, detail: format!("R(ν/κ = 0.5) = {r:.12} (|R − e^{{−π}}| = {r_err:.1e}); prefactors {p1}, {p2}") }
}

fn detailed_balance() -> Outcome {
    let mut worst_ratio = 0.0_f64;
    let mut worst_diff = 0.0_f64;
    let chi_over_nu = 0.1;
    for z in log_space(0.1, 20.0, 200) {
        let (r, b) = (red_probability_z(chi_over_nu, z), blue_probability_z(chi_over_nu, z));
        worst_ratio = worst_ratio.max(rel(r / b, (-z).exp()));
        worst_diff = worst_diff.max(rel(b - r, chi_over_nu * chi_over_nu * z));
    }
    Outcome {
        ok: worst_ratio < 1e-12 && worst_diff < 1e-12,
        detail: format!("z ∈ [0.1, 20]: ratio error {worst_ratio:.1e}, difference error {worst_diff:.1e} (limit 1e-12)"),
    }
}

fn oracle_equivalence() -> Outcome {
    let kappa = 1.0;
    let chi = 0.01 * kappa;
    let chain = IonChain::single_ion(kappa).unwrap();
    let cfg = OracleConfig::new(chi).unwrap().with_n_max(3).unwrap();
    let mut worst_s = (0.0_f64, 0.0, 0.0);
    let mut worst_d = 0.0_f64;
    let mut worst_drift = 0.0_f64;
    for y_t in [1.0, 10.0, 100.0] {
        let chirp = ChirpProfile::from_infinite_past(kappa, y_t).unwrap();
        for k in 1..=8 {
            let x = k as f64;
            let probe = DetectorProbe::with_chi(x * kappa / (2.0 * PI), chi).unwrap();
            let closed = finite_chirp_probability(&chain, &probe, &chirp).unwrap();
            let double = perturbative_probability(&chain, &probe, &chirp).unwrap();
            let ev = evolve_schrodinger(&cfg, &chain, &probe, &chirp).unwrap();
            let dev = rel(ev.excited_population, closed);
            if dev > worst_s.0 {
                worst_s = (dev, y_t, x);
            }
            worst_d = worst_d.max(rel(double, closed));
            worst_drift = worst_drift.max(ev.norm_drift);
        }
    }
    Outcome {
        ok: worst_s.0 < 0.01 && worst_d < 1e-4 && worst_drift < NORM_DRIFT_LIMIT,
        detail: format!(
            "Schrödinger worst rel {:.3e} at y_T = {}, x = {} (limit 1e-2); double integral {worst_d:.1e} (limit 1e-4); norm drift {worst_drift:.1e}",
            worst_s.0, worst_s.1, worst_s.2
        ),
    }
}

fn normal_modes() -> Outcome {
    let mut worst_mu = 0.0_f64;
    let mut worst_orth = 0.0_f64;
    let mut worst_force = 0.0_f64;
    for n in 2..=10 {
        let chain = IonChain::new(n, 1.0).unwrap();
        let mu = chain.mode_eigenvalues();
        worst_mu = worst_mu.max((mu[0] - 1.0).abs()).max((mu[1] - 3.0).abs());
        let b = chain.mode_matrix();
        let gram = b.transpose() * b - nalgebra::DMatrix::<f64>::identity(n, n);
        worst_orth = worst_orth.max(gram.amax());
        worst_force = worst_force.max(force_residual(chain.positions()).iter().fold(0.0, |m, f| f64::max(m, f.abs())));
    }
    let mu3 = IonChain::new(3, 1.0).unwrap().mode_eigenvalues()[2];
    let mu3_err = (mu3 - 5.8).abs();
    Outcome {
        ok: worst_mu < 1e-10 && mu3_err < 1e-10 && worst_orth < 1e-10 && worst_force < 1e-12,
        detail: format!(
            "N = 2..10: μ₁, μ₂ error {worst_mu:.1e}; μ₃(N = 3) error {mu3_err:.1e}; orthonormality {worst_orth:.1e}; force residual {worst_force:.1e}"
        ),
    }
}

fn constant_trap_limit() -> Outcome {
    let nu = 1.0;
    let t_window = 100.0 * PI / nu;
    let red = constant_trap_response(&DetectorProbe::with_chi(nu, 1e-3).unwrap(), nu, t_window).unwrap();
    let blue = constant_trap_response(&DetectorProbe::with_chi(-nu, 1e-3).unwrap(), nu, t_window).unwrap();
    Outcome {
        ok: red < 1e-3 * blue,
        detail: format!("response at Δ = +ν is {:.2e} of the Δ = −ν peak (limit 1e-3)", red / blue),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("gamma identity", gamma_identity, Duration::from_secs(1)),
        ("closed form vs quadrature", closed_vs_quadrature, Duration::from_secs(30)),
        ("unruh limit", unruh_limit, Duration::from_secs(10)),
        ("fig3 reproduction", fig3_reproduction, Duration::from_secs(30)),
        ("observables", observables, Duration::from_secs(1)),
        ("detailed balance", detailed_balance, Duration::from_secs(1)),
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(300)),
        ("normal modes", normal_modes, Duration::from_secs(5)),
        ("constant-trap limit", constant_trap_limit, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let ok = out.ok && elapsed < *budget;
        failed += usize::from(!ok);
        println!(
            "[{}] criterion {} ({name}): {}; {:.2} s (budget {} s)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
