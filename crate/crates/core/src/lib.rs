//! Excitation spectra of a two-level "phonon detector" ion in a trap whose
//! frequency is chirped exponentially, `ν(t) = ν e^{κt}`.
//!
//! The detector response is thermal with temperature `κ/2π` (ħ = k_B = 1) on
//! both the red and the blue motional sideband. The crate evaluates the
//! response in closed form through complex incomplete gamma functions, by
//! direct quadrature, and through two independent oracles: the first-order
//! double integral over the phonon correlation function and a truncated-Fock
//! Schrödinger evolution.

pub mod chirp;
pub mod cli;
pub mod error;
pub mod normal_modes;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
pub use normal_modes::IonChain;
pub use special::ComplexValue;
