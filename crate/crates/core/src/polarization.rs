//! Longitudinal and circular polarization vectors.
//!
//! Helicity is the eigenvalue of `τ·k̂`, which acts as `u ↦ i k̂ × u`. For
//! `k = ẑ` the `+1` vector is `(1, i, 0)/√2`.
//!
//! Away from the `z` axis (`κ = √(k₁² + k₂²) > 0`)
//!
//! ```text
//! ε(k, +1) = (k₁k₃ - i k₂|k|, k₂k₃ + i k₁|k|, -κ²) / (√2 |k| κ)
//! ε(k, -1) = ε(k, +1)*
//! ε(k,  0) = k / |k|
//! ```
//!
//! which fixes the phase so that the third component of `ε(k, +1)` is real
//! and non-positive. On the axis the formula is `0/0`; there
//! `ε(+|k|ẑ, ±1) = (1, ±i, 0)/√2` and the negative axis follows the parity
//! rule `ε(-k, λ) = ε(k, -λ)`, which the off-axis formula satisfies exactly.

use serde::{Deserialize, Serialize};

use crate::algebra::tau_dot;
use crate::{Error, Matrix3C, Real3, Result, Vector3C, C64};

/// Spin projection along `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Helicity {
    Minus,
    Zero,
    Plus,
}

impl Helicity {
    pub const ALL: [Helicity; 3] = [Helicity::Minus, Helicity::Zero, Helicity::Plus];
    pub const TRANSVERSE: [Helicity; 2] = [Helicity::Minus, Helicity::Plus];

    pub fn value(self) -> i32 {
        match self {
            Helicity::Minus => -1,
            Helicity::Zero => 0,
            Helicity::Plus => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }

    pub fn from_value(v: i32) -> Result<Self> {
        match v {
            -1 => Ok(Helicity::Minus),
            0 => Ok(Helicity::Zero),
            1 => Ok(Helicity::Plus),
            _ => Err(Error::InvalidParameter(format!("helicity must be -1, 0 or 1, got {v}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Helicity::Minus => Helicity::Plus,
            Helicity::Zero => Helicity::Zero,
            Helicity::Plus => Helicity::Minus,
        }
    }

    pub fn is_transverse(self) -> bool {
        self != Helicity::Zero
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationTriad {
    pub k: Real3,
    pub eps0: Vector3C,
    pub eps_plus: Vector3C,
    pub eps_minus: Vector3C,
}

impl PolarizationTriad {
    pub fn new(k: &Real3) -> Result<Self> {
        let eps_plus = circular(k, Helicity::Plus)?;
        Ok(Self {
            k: *k,
            eps0: longitudinal(k)?,
            eps_minus: eps_plus.conjugate(),
            eps_plus,
        })
    }

    pub fn get(&self, lambda: Helicity) -> &Vector3C {
        match lambda {
            Helicity::Minus => &self.eps_minus,
            Helicity::Zero => &self.eps0,
            Helicity::Plus => &self.eps_plus,
        }
    }
}

pub fn longitudinal(k: &Real3) -> Result<Vector3C> {
    let norm = k.norm();
    if norm == 0.0 {
        return Err(Error::ZeroWaveVector);
    }
    Ok((k / norm).map(C64::from))
}

pub fn circular(k: &Real3, lambda: Helicity) -> Result<Vector3C> {
    let norm = k.norm();
    if norm == 0.0 {
        return Err(Error::ZeroWaveVector);
    }
    let kappa = k[0].hypot(k[1]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = if kappa > 0.0 {
        let (c, sn) = (k[0] / kappa, k[1] / kappa);
        let cz = k[2] / norm;
        Vector3C::new(
            C64::new(cz * c * s, -sn * s),
            C64::new(cz * sn * s, c * s),
            C64::new(-kappa / norm * s, 0.0),
        )
    } else if k[2] > 0.0 {
        Vector3C::new(C64::new(s, 0.0), C64::new(0.0, s), C64::new(0.0, 0.0))
    } else {
        // ε(-|k|ẑ, +1) = ε(|k|ẑ, -1)
        Vector3C::new(C64::new(s, 0.0), C64::new(0.0, -s), C64::new(0.0, 0.0))
    };
    match lambda {
        Helicity::Plus => Ok(plus),
        Helicity::Minus => Ok(plus.conjugate()),
        Helicity::Zero => longitudinal(k),
    }
}

/// `ε(k, λ)` for any helicity.
pub fn polarization(k: &Real3, lambda: Helicity) -> Result<Vector3C> {
    circular(k, lambda)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationResiduals {
    /// `max |ε†(λ) ε(λ') - δ_{λλ'}|`.
    pub orthonormality: f64,
    /// `max |Σ_λ ε ε† - I₃|`.
    pub completeness: f64,
    /// `max |(τ·k̂) ε(λ) - λ ε(λ)|`.
    pub helicity: f64,
}

impl PolarizationResiduals {
    pub fn max(&self) -> f64 {
        self.orthonormality.max(self.completeness).max(self.helicity)
    }
}

pub fn verify_polarization_identities(k: &Real3) -> Result<PolarizationResiduals> {
    let triad = PolarizationTriad::new(k)?;
    let mut ortho: f64 = 0.0;
    let mut complete = Matrix3C::zeros();
    let khat = k / k.norm();
    let helicity_op = tau_dot(&khat);
    let mut helicity: f64 = 0.0;
    for a in Helicity::ALL {
        let ea = triad.get(a);
        for b in Helicity::ALL {
            let target = if a == b { 1.0 } else { 0.0 };
            let ip = ea.dotc(triad.get(b));
            ortho = ortho.max((ip - C64::from(target)).norm());
        }
        complete += ea * ea.adjoint();
        let hv = helicity_op * ea - ea * C64::from(a.as_f64());
        helicity = helicity.max(hv.camax());
    }
    let completeness = (complete - Matrix3C::identity()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(PolarizationResiduals {
        orthonormality: ortho,
        completeness,
        helicity,
    })
}
