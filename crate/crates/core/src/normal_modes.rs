//! Axial normal modes of a linear Coulomb crystal in a harmonic trap.
//!
//! Coordinates are dimensionless: positions are in units of the length
//! `(e² / 4πε₀ m ν²)^{1/3}` and mode eigenvalues `μ_p` are squared mode
//! frequencies in units of the bare trap frequency, `ν_p = √μ_p ν`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const NEWTON_MAX_ITER: usize = 200;
const FORCE_TOL: f64 = 1e-13;
const INITIAL_SPACING: f64 = 1.06;

/// A linear chain of `N` ions together with its axial normal-mode data.
#[derive(Debug, Clone, PartialEq)]
pub struct IonChain {
    n_ions: usize,
    nu_bare: f64,
    positions: Vec<f64>,
    mode_eigenvalues: Vec<f64>,
    /// Column `p` holds the mode vector `b^(p)`.
    mode_matrix: DMatrix<f64>,
    /// Entry `(m, p)` holds `s_m^(p)`.
    couplings: DMatrix<f64>,
}

impl IonChain {
    /// Solves for the equilibrium and the normal modes of `n_ions` ions in a
    /// trap of bare (centre-of-mass) angular frequency `nu_bare`.
    pub fn new(n_ions: usize, nu_bare: f64) -> Result<Self> {
        if !(nu_bare.is_finite() && nu_bare > 0.0) {
            return Err(Error::InvalidInput(format!(
                "trap frequency must be positive and finite, got {nu_bare}"
            )));
        }
        let positions = equilibrium_positions(n_ions)?;
        let (mode_eigenvalues, mode_matrix) = mode_decomposition(&positions)?;
        let couplings = couplings(&mode_eigenvalues, &mode_matrix)?;
        Ok(Self {
            n_ions,
            nu_bare,
            positions,
            mode_eigenvalues,
            mode_matrix,
            couplings,
        })
    }

    /// A single ion: one mode with `μ = 1`, `b = s = 1`.
    pub fn single_ion(nu_bare: f64) -> Result<Self> {
        Self::new(1, nu_bare)
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn nu_bare(&self) -> f64 {
        self.nu_bare
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn mode_eigenvalues(&self) -> &[f64] {
        &self.mode_eigenvalues
    }

    pub fn mode_matrix(&self) -> &DMatrix<f64> {
        &self.mode_matrix
    }

    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }

    /// Angular frequency of mode `p` (1-based), `√μ_p ν`.
    pub fn mode_frequency(&self, p: usize) -> f64 {
        self.mode_eigenvalues[p - 1].sqrt() * self.nu_bare
    }

    pub fn mode_frequencies(&self) -> Vec<f64> {
        (1..=self.n_ions).map(|p| self.mode_frequency(p)).collect()
    }

    /// `b_m^(p)` with 1-based ion and mode labels.
    pub fn b(&self, m: usize, p: usize) -> f64 {
        self.mode_matrix[(m - 1, p - 1)]
    }

    /// `s_m^(p)` with 1-based ion and mode labels.
    pub fn s(&self, m: usize, p: usize) -> f64 {
        self.couplings[(m - 1, p - 1)]
    }

    /// Per-mode weights `|b_m^(p)|² / √μ_p` seen by ion `m` (1-based).
    ///
    /// Equal to `|s_m^(p)|² / N`, the amplitude with which mode `p` enters the
    /// displacement correlation of ion `m`.
    pub fn mode_weights(&self, m: usize) -> Result<Vec<f64>> {
        self.check_ion(m)?;
        Ok((1..=self.n_ions)
            .map(|p| self.b(m, p).powi(2) / self.mode_eigenvalues[p - 1].sqrt())
            .collect())
    }

    /// `Σ_p |b_m^(p)|² / √μ_p`.
    pub fn mode_weight(&self, m: usize) -> Result<f64> {
        Ok(self.mode_weights(m)?.iter().sum())
    }

    pub(crate) fn check_ion(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.n_ions {
            return Err(Error::InvalidInput(format!(
                "ion index {m} outside 1..={}",
                self.n_ions
            )));
        }
        Ok(())
    }
}

/// Net dimensionless axial force on each ion at `u`.
pub fn force_residual(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|m| {
            let mut f = u[m];
            for k in 0..n {
                if k == m {
                    continue;
                }
                let d = u[m] - u[k];
                f -= d.signum() / (d * d);
            }
            f
        })
        .collect()
}

/// Hessian of the dimensionless potential `Σ u²/2 + Σ_{n<m} 1/|u_m − u_n|`.
pub fn hessian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 1.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let c = 2.0 / (u[i] - u[j]).abs().powi(3);
            a[(i, j)] = -c;
            diag += c;
        }
        a[(i, i)] = diag;
    }
    a
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn is_ordered(u: &[f64]) -> bool {
    u.windows(2).all(|w| w[0] < w[1])
}

/// Equilibrium positions of `n_ions` ions, sorted ascending.
///
/// Damped Newton iteration from evenly spaced ions; the Jacobian of the force
/// is the potential Hessian.
pub fn equilibrium_positions(n_ions: usize) -> Result<Vec<f64>> {
    if n_ions == 0 {
        return Err(Error::InvalidInput("chain needs at least one ion".into()));
    }
    let centre = (n_ions as f64 + 1.0) / 2.0;
    let mut u: Vec<f64> = (1..=n_ions)
        .map(|m| (m as f64 - centre) * INITIAL_SPACING)
        .collect();

    let mut f = force_residual(&u);
    let mut res = max_abs(&f);
    for _ in 0..NEWTON_MAX_ITER {
        if res < FORCE_TOL {
            return Ok(u);
        }
        let jac = hessian(&u);
        let rhs = DVector::from_iterator(n_ions, f.iter().map(|x| -x));
        let step = jac.lu().solve(&rhs).ok_or(Error::NoConvergence {
            what: "equilibrium Newton solve (singular Jacobian)",
            residual: res,
        })?;

        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, d)| x + lambda * d).collect();
            if is_ordered(&trial) {
                let f_trial = force_residual(&trial);
                let r_trial = max_abs(&f_trial);
                if r_trial < res || lambda < 1e-6 {
                    u = trial;
                    f = f_trial;
                    res = r_trial;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return Err(Error::NoConvergence {
                    what: "equilibrium line search",
                    residual: res,
                });
            }
        }
    }
    if res < FORCE_TOL {
        Ok(u)
    } else {
        Err(Error::NoConvergence {
            what: "equilibrium positions",
            residual: res,
        })
    }
}

/// Eigen-decomposition of the Hessian at `positions`.
///
/// Eigenvalues are returned ascending; each eigenvector column is flipped so
/// that its largest-magnitude entry is positive (first such entry on ties).
pub fn mode_decomposition(positions: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = positions.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty position list".into()));
    }
    let a = hessian(positions);
    let eig = SymmetricEigen::try_new(a, 1e-15, 10_000)
        .ok_or_else(|| Error::Domain("symmetric eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (p, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let col = eig.eigenvectors.column(k);
        let peak = col.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        let lead = col
            .iter()
            .find(|x| x.abs() >= peak * (1.0 - 1e-9))
            .copied()
            .unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        for m in 0..n {
            vectors[(m, p)] = sign * col[m];
        }
    }
    Ok((values, vectors))
}

/// Ion-mode coupling table `s_m^(p) = √N b_m^(p) / μ_p^{1/4}`.
pub fn couplings(mode_eigenvalues: &[f64], mode_matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = mode_eigenvalues.len();
    if mode_matrix.nrows() != n || mode_matrix.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "mode matrix is {}x{} but there are {n} eigenvalues",
            mode_matrix.nrows(),
            mode_matrix.ncols()
        )));
    }
    if let Some(mu) = mode_eigenvalues.iter().find(|mu| !(**mu > 0.0)) {
        return Err(Error::InvalidInput(format!("non-positive mode eigenvalue {mu}")));
    }
    let root_n = (n as f64).sqrt();
    Ok(DMatrix::from_fn(n, n, |m, p| {
        root_n * mode_matrix[(m, p)] / mode_eigenvalues[p].powf(0.25)
    }))
}
