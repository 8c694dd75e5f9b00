//! Photon wave mechanics as executable computations.
//!
//! The photon is described by the six-component spinor `ψ = (E; iB)/√2`,
//! which obeys the first-order equation `i ∂_t ψ = -i χ·∇ ψ` on a periodic
//! box. The crate provides the fixed representation matrices, helicity
//! polarization vectors, plane-wave modes, a pseudo-spectral evolver with a
//! classical curl-based oracle, mode-level observables, a truncated Fock-space
//! quantization testbed, infinitesimal Lorentz checks, the Dirac-equation
//! analogy and the transverse Green function.
//!
//! Conventions used everywhere:
//!
//! * natural units, metric `diag(1,-1,-1,-1)`;
//! * plane-wave phases use `k·x = ωt - k·x`, so a positive-frequency mode
//!   carries `exp(-iωt + i k·x)` and `∂_μ ↔ -i k_μ`;
//! * documentation indexes spatial components `1..=3`; code uses `0..3`.

pub mod algebra;
pub mod cli;
pub mod dirac;
pub mod dynamics;
pub mod error;
pub mod greens;
pub mod grid;
pub mod lorentz;
pub mod modes;
pub mod observables;
pub mod polarization;
pub mod quantization;
pub mod suite;

pub use error::{Error, Result};

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};
use num_complex::Complex64;

/// Complex scalar used throughout.
pub type C64 = Complex64;
/// 3×3 complex matrix (`τ_i`, polarization projectors).
pub type Matrix3C = Matrix3<C64>;
/// 6×6 complex matrix (`β^μ`, `χ_i`, `S_i`, `Σ_{μν}`).
pub type Matrix6C = Matrix6<C64>;
/// Complex 3-vector.
pub type Vector3C = Vector3<C64>;
/// The photon wave function at one point.
pub type Spinor6 = Vector6<C64>;
/// Real 3-vector (positions, wave vectors).
pub type Real3 = Vector3<f64>;

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };
pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
