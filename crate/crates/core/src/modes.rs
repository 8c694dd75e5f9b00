//! Plane-wave solutions of the Dirac-like equation on a periodic box.
//!
//! A positive-frequency mode is `√(ω/V) f(k,λ) e^{-i(ωt - k·x)}` and its
//! negative-frequency partner is `√(ω/V) g(k,λ) e^{+i(ωt - k·x)}`, with
//!
//! ```text
//! f(k,λ) = (ε(k,λ); λ ε(k,λ)) / √(1+λ²)
//! g(k,λ) = (λ ε(k,λ); ε(k,λ)) / √(1+λ²)
//! ```
//!
//! The `λ = 0` solutions are zero-frequency eigenvectors of `χ·k`. They are
//! available as spinors for algebraic checks but carry zero amplitude in
//! field synthesis unless [`LongitudinalPolicy::UnitAmplitude`] is selected.

use nalgebra::{DMatrix, Matrix6};
use serde::{Deserialize, Serialize};

use crate::algebra::{hamiltonian_symbol, tau_dot, MatrixSet};
use crate::grid::BoxSpec;
use crate::polarization::{polarization, Helicity};
use crate::{Error, Matrix6C, Real3, Result, Spinor6, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FreqSign {
    Positive,
    Negative,
}

/// Mode amplitude convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Normalization {
    /// `√(ω/V)`; `∫φ†φ = ω`.
    #[default]
    Energy,
    /// `1/√V`; `∫φ†φ = 1`.
    Number,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LongitudinalPolicy {
    /// `ω_L = 0`, so `λ = 0` modes synthesize to zero.
    #[default]
    Suppressed,
    /// Debug: `λ = 0` modes use the transverse prefactor at the same `|k|`
    /// and no time dependence.
    UnitAmplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModeOptions {
    pub normalization: Normalization,
    pub longitudinal: LongitudinalPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub grid: BoxSpec,
    pub n: [i64; 3],
    pub helicity: Helicity,
    pub sign: FreqSign,
}

impl ModeSpec {
    pub fn new(grid: &BoxSpec, n: [i64; 3], helicity: Helicity, sign: FreqSign) -> Self {
        Self {
            grid: grid.clone(),
            n,
            helicity,
            sign,
        }
    }

    pub fn wave_vector(&self) -> Real3 {
        self.grid.wave_vector_of(self.n)
    }

    /// Physical frequency: `|k|` for `λ = ±1`, zero for `λ = 0`.
    pub fn omega(&self) -> f64 {
        if self.helicity.is_transverse() {
            self.wave_vector().norm()
        } else {
            0.0
        }
    }

    pub fn spinor(&self) -> Result<Spinor6> {
        let k = self.wave_vector();
        match self.sign {
            FreqSign::Positive => f_spinor(&k, self.helicity),
            FreqSign::Negative => g_spinor(&k, self.helicity),
        }
    }

    fn prefactor(&self, opts: &ModeOptions) -> f64 {
        let v = self.grid.volume();
        match (self.helicity.is_transverse(), opts.longitudinal) {
            (false, LongitudinalPolicy::Suppressed) => 0.0,
            _ => match opts.normalization {
                Normalization::Energy => (self.wave_vector().norm() / v).sqrt(),
                Normalization::Number => 1.0 / v.sqrt(),
            },
        }
    }

    /// Phase `±(ωt - k·x)` entering the exponential, as `-i` times it.
    fn phase(&self, x: &Real3, t: f64) -> C64 {
        let arg = self.omega() * t - self.wave_vector().dot(x);
        match self.sign {
            FreqSign::Positive => (-I * arg).exp(),
            FreqSign::Negative => (I * arg).exp(),
        }
    }
}

fn component_norm(lambda: Helicity) -> f64 {
    1.0 / (1.0 + lambda.as_f64().powi(2)).sqrt()
}

pub fn f_spinor(k: &Real3, lambda: Helicity) -> Result<Spinor6> {
    let eps = polarization(k, lambda)?;
    let l = C64::from(lambda.as_f64());
    let c = C64::from(component_norm(lambda));
    Ok(Spinor6::new(
        eps[0] * c,
        eps[1] * c,
        eps[2] * c,
        eps[0] * l * c,
        eps[1] * l * c,
        eps[2] * l * c,
    ))
}

pub fn g_spinor(k: &Real3, lambda: Helicity) -> Result<Spinor6> {
    let eps = polarization(k, lambda)?;
    let l = C64::from(lambda.as_f64());
    let c = C64::from(component_norm(lambda));
    Ok(Spinor6::new(
        eps[0] * l * c,
        eps[1] * l * c,
        eps[2] * l * c,
        eps[0] * c,
        eps[1] * c,
        eps[2] * c,
    ))
}

pub fn mode_field(m: &ModeSpec, x: &Real3, t: f64) -> Result<Spinor6> {
    mode_field_with(m, x, t, &ModeOptions::default())
}

pub fn mode_field_with(m: &ModeSpec, x: &Real3, t: f64, opts: &ModeOptions) -> Result<Spinor6> {
    Ok(m.spinor()? * (m.phase(x, t) * m.prefactor(opts)))
}

/// Mode sampled on every grid point of its box at time `t`.
pub fn sample_mode(m: &ModeSpec, t: f64, opts: &ModeOptions) -> Result<Vec<Spinor6>> {
    let spinor = m.spinor()? * C64::from(m.prefactor(opts));
    Ok((0..m.grid.len())
        .map(|idx| spinor * m.phase(&m.grid.position(idx), t))
        .collect())
}

/// Residual of `iβ^μ∂_μ φ` for a mode: analytic time derivative, spectral
/// space derivatives. Relative to `max |φ|`; zero for a vanishing field.
pub fn dirac_residual(m: &ModeSpec, opts: &ModeOptions) -> Result<f64> {
    let field = sample_mode(m, 0.0, opts)?;
    let scale = crate::grid::max_norm(&field);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let omega = m.omega();
    let dt = match m.sign {
        FreqSign::Positive => -I * omega,
        FreqSign::Negative => I * omega,
    };
    let b = &m.grid;
    let set = MatrixSet::global();
    let spec = b.forward(&field);
    let grads: [Vec<Spinor6>; 3] = std::array::from_fn(|a| {
        let s: Vec<Spinor6> = spec
            .iter()
            .enumerate()
            .map(|(idx, v)| v * (I * b.wave_vector(idx)[a]))
            .collect();
        b.inverse(&s)
    });
    let mut worst: f64 = 0.0;
    for idx in 0..b.len() {
        let mut r = set.beta0 * field[idx] * dt;
        for a in 0..3 {
            r += set.beta[a] * grads[a][idx];
        }
        worst = worst.max((r * I).camax());
    }
    Ok(worst / scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalityReport {
    /// `∫φ†_a φ_b - ω_a δ_ab` among same-sign modes.
    pub same_sign: DMatrix<C64>,
    /// `∫φ†_a φ̃_b`, where `φ̃_b` has the opposite frequency sign of mode `b`
    /// and the same spatial dependence (wave vector `-n_b`).
    pub mixed: DMatrix<C64>,
    pub max_residual: f64,
}

/// Discrete-sum check of the mode orthonormality relations at `t = 0`.
///
/// `same_sign[a][b]` compares modes of equal frequency sign (zero when the
/// signs differ); `mixed[a][b]` overlaps mode `a` with the opposite-frequency
/// solution sharing the spatial factor of mode `b`.
pub fn orthonormality_check(
    grid: &BoxSpec,
    modes: &[ModeSpec],
    opts: &ModeOptions,
) -> Result<OrthonormalityReport> {
    if modes.iter().any(|m| &m.grid != grid) {
        return Err(Error::MixedBox);
    }
    let dv = grid.cell_volume();
    let fields: Vec<Vec<Spinor6>> = modes
        .iter()
        .map(|m| sample_mode(m, 0.0, opts))
        .collect::<Result<_>>()?;
    let partners: Vec<Vec<Spinor6>> = modes
        .iter()
        .map(|m| {
            let mut p = m.clone();
            p.n = m.n.map(|v| -v);
            p.sign = match m.sign {
                FreqSign::Positive => FreqSign::Negative,
                FreqSign::Negative => FreqSign::Positive,
            };
            sample_mode(&p, 0.0, opts)
        })
        .collect::<Result<_>>()?;
    let overlap = |a: &[Spinor6], b: &[Spinor6]| -> C64 {
        a.iter().zip(b).map(|(u, v)| u.dotc(v)).sum::<C64>() * dv
    };
    let n = modes.len();
    let mut same = DMatrix::from_element(n, n, C64::from(0.0));
    let mut mixed = DMatrix::from_element(n, n, C64::from(0.0));
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            if modes[a].sign == modes[b].sign {
                let mut v = overlap(&fields[a], &fields[b]);
                if a == b
                    || (modes[a].n == modes[b].n && modes[a].helicity == modes[b].helicity)
                {
                    v -= expected_norm(&modes[a], opts);
                }
                same[(a, b)] = v;
                worst = worst.max(v.norm());
            }
            let m = overlap(&fields[a], &partners[b]);
            mixed[(a, b)] = m;
            if modes[a].helicity.is_transverse() && modes[b].helicity.is_transverse() {
                worst = worst.max(m.norm());
            }
        }
    }
    Ok(OrthonormalityReport {
        same_sign: same,
        mixed,
        max_residual: worst,
    })
}

fn expected_norm(m: &ModeSpec, opts: &ModeOptions) -> C64 {
    let p = m.prefactor(opts);
    C64::from(p * p * m.grid.volume())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    pub omega: f64,
    /// `ω Σ_λ (f f† + g g†) - ω I₆` at a single `k`.
    pub single_k: Matrix6C,
    /// Same with the sum averaged over `k` and `-k`.
    pub symmetrized: Matrix6C,
}

impl CompletenessReport {
    /// Off-diagonal (upper-right) block of the single-`k` defect divided by `ω`.
    pub fn helicity_block(&self) -> crate::Matrix3C {
        self.single_k.fixed_view::<3, 3>(0, 3) / C64::from(self.omega)
    }
}

fn projector_sum(k: &Real3) -> Result<Matrix6C> {
    let mut acc = Matrix6C::zeros();
    for lam in Helicity::ALL {
        let f = f_spinor(k, lam)?;
        let g = g_spinor(k, lam)?;
        acc += f * f.adjoint() + g * g.adjoint();
    }
    Ok(acc)
}

pub fn completeness_check(k: &Real3) -> Result<CompletenessReport> {
    let omega = k.norm();
    if omega == 0.0 {
        return Err(Error::ZeroWaveVector);
    }
    let w = C64::from(omega);
    let id = Matrix6::identity() * w;
    let single = projector_sum(k)? * w;
    let sym = (projector_sum(k)? + projector_sum(&(-k))?) * (w * 0.5);
    Ok(CompletenessReport {
        omega,
        single_k: single - id,
        symmetrized: sym - id,
    })
}

/// Eigenvalues of `χ·k`, descending.
pub fn dispersion_spectrum(k: &Real3) -> [f64; 6] {
    let h = hamiltonian_symbol(k);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    std::array::from_fn(|i| ev[i])
}

/// Sum over helicities of `λ ε ε†`, the helicity operator `τ·k̂`.
pub fn helicity_operator(k: &Real3) -> crate::Matrix3C {
    tau_dot(&(k / k.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::max_abs;
    use std::f64::consts::PI;

    fn unit_box(n: usize) -> BoxSpec {
        BoxSpec::cubic(2.0 * PI, n).unwrap()
    }

    #[test]
    fn longitudinal_spinors_are_block_vectors() {
        let k = Real3::new(0.3, -0.4, 1.2);
        let e0 = polarization(&k, Helicity::Zero).unwrap();
        let f = f_spinor(&k, Helicity::Zero).unwrap();
        let g = g_spinor(&k, Helicity::Zero).unwrap();
        for i in 0..3 {
            assert_eq!(f[i], e0[i]);
            assert_eq!(f[i + 3], C64::from(0.0));
            assert_eq!(g[i], C64::from(0.0));
            assert_eq!(g[i + 3], e0[i]);
        }
    }

    #[test]
    fn g_is_lambda_f_and_swap_maps_f_to_g() {
        let x = MatrixSet::global().swap_blocks();
        for k in [Real3::new(0.0, 0.0, 1.0), Real3::new(1.0, -2.0, 0.5), Real3::new(-3.0, 0.0, -1.0)] {
            for lam in Helicity::ALL {
                let f = f_spinor(&k, lam).unwrap();
                let g = g_spinor(&k, lam).unwrap();
                assert!((f.norm() - 1.0).abs() < 1e-15 && (g.norm() - 1.0).abs() < 1e-15);
                assert_eq!(x * f, g);
                if lam.is_transverse() {
                    assert_eq!(g, f * C64::from(lam.as_f64()));
                }
            }
        }
    }

    #[test]
    fn mode_eigen_relations() {
        let k = Real3::new(1.0, 2.0, -0.5);
        let h = hamiltonian_symbol(&k);
        for lam in Helicity::TRANSVERSE {
            let f = f_spinor(&k, lam).unwrap();
            assert!((h * f - f * C64::from(k.norm())).camax() < 1e-14);
            let g = g_spinor(&k, lam).unwrap();
            assert!((h * g - g * C64::from(k.norm())).camax() < 1e-14);
        }
        let f0 = f_spinor(&k, Helicity::Zero).unwrap();
        assert!((h * f0).camax() < 1e-15);
    }

    #[test]
    fn mode_field_at_origin_and_zero_longitudinal() {
        let b = unit_box(8);
        let m = ModeSpec::new(&b, [1, 0, 2], Helicity::Plus, FreqSign::Positive);
        let v = mode_field(&m, &Real3::zeros(), 0.0).unwrap();
        let expected = m.spinor().unwrap() * C64::from((m.omega() / b.volume()).sqrt());
        assert_eq!(v, expected);
        let l = ModeSpec::new(&b, [1, 0, 2], Helicity::Zero, FreqSign::Positive);
        let field = sample_mode(&l, 0.3, &ModeOptions::default()).unwrap();
        assert!(field.iter().all(|s| s.camax() == 0.0));
        let debug = ModeOptions {
            longitudinal: LongitudinalPolicy::UnitAmplitude,
            ..Default::default()
        };
        let field = sample_mode(&l, 0.3, &debug).unwrap();
        assert!(field.iter().all(|s| s.camax() > 0.0));
    }

    #[test]
    fn modes_satisfy_dirac_equation() {
        let b = BoxSpec::new([2.0, 3.0, 4.0], [8, 8, 8]).unwrap();
        for n in [[1, 0, 0], [0, -2, 1], [3, 3, -3]] {
            for lam in Helicity::TRANSVERSE {
                for sign in [FreqSign::Positive, FreqSign::Negative] {
                    let m = ModeSpec::new(&b, n, lam, sign);
                    let r = dirac_residual(&m, &ModeOptions::default()).unwrap();
                    assert!(r <= 1e-12, "{n:?} {lam:?} {sign:?}: {r}");
                }
            }
        }
    }

    #[test]
    fn orthonormality_on_grid() {
        let b = unit_box(8);
        let mut modes = Vec::new();
        for n in [[1, 0, 0], [0, 1, 1], [-1, 2, 0], [2, 2, 2]] {
            for lam in Helicity::TRANSVERSE {
                for sign in [FreqSign::Positive, FreqSign::Negative] {
                    modes.push(ModeSpec::new(&b, n, lam, sign));
                }
            }
        }
        let rep = orthonormality_check(&b, &modes, &ModeOptions::default()).unwrap();
        assert!(rep.max_residual <= 1e-12, "{}", rep.max_residual);
        // self-overlap equals ω
        let m = &modes[0];
        let f = sample_mode(m, 0.0, &ModeOptions::default()).unwrap();
        let norm: f64 = f.iter().map(|v| v.norm_squared()).sum::<f64>() * b.cell_volume();
        assert!((norm - m.omega()).abs() < 1e-12);
        let other = BoxSpec::cubic(1.0, 8).unwrap();
        let stray = ModeSpec::new(&other, [1, 0, 0], Helicity::Plus, FreqSign::Positive);
        assert_eq!(
            orthonormality_check(&b, &[modes[0].clone(), stray], &ModeOptions::default()),
            Err(Error::MixedBox)
        );
    }

    #[test]
    fn number_normalization_gives_unit_norm() {
        let b = unit_box(8);
        let opts = ModeOptions {
            normalization: Normalization::Number,
            ..Default::default()
        };
        let m = ModeSpec::new(&b, [2, -1, 0], Helicity::Minus, FreqSign::Negative);
        let f = sample_mode(&m, 0.7, &opts).unwrap();
        let norm: f64 = f.iter().map(|v| v.norm_squared()).sum::<f64>() * b.cell_volume();
        assert!((norm - 1.0).abs() < 1e-13);
    }

    #[test]
    fn completeness_readings() {
        for k in [Real3::new(0.0, 0.0, 1.0), Real3::new(1.0, 2.0, -2.0), Real3::new(-0.2, 0.0, -3.0)] {
            let rep = completeness_check(&k).unwrap();
            assert!(max_abs(&rep.symmetrized) <= 1e-12 * rep.omega);
            let defect = rep.helicity_block() - helicity_operator(&k);
            assert!(defect.iter().all(|v| v.norm() <= 1e-12));
            // diagonal blocks are exact
            let diag = rep.single_k.fixed_view::<3, 3>(0, 0).into_owned();
            assert!(diag.iter().all(|v| v.norm() <= 1e-12 * rep.omega));
        }
        assert_eq!(completeness_check(&Real3::zeros()), Err(Error::ZeroWaveVector));
    }

    #[test]
    fn dispersion_examples() {
        let ev = dispersion_spectrum(&Real3::new(0.0, 0.0, 2.0));
        let expected = [2.0, 2.0, 0.0, 0.0, -2.0, -2.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(dispersion_spectrum(&Real3::zeros()), [0.0; 6]);
    }
}
