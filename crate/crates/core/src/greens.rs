//! Transverse photon Green function and massless scalar propagator as
//! Fourier multipliers, plus a small-lattice position-space realization.
//!
//! `∂_μ ↔ -ik_μ` with `k·x = ωt - k·x`, so `β^μ∂_μ ↔ -i(β⁰ω - β^j k^j)` and
//! `∂^μ∂_μ ↔ -k²` with `k² = ω² - |k|²`.

use std::io::Write;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{block_diag, MatrixSet};
use crate::dynamics::{omega_symbol, transverse_projector};
use crate::grid::FftNd;
use crate::{Error, Matrix6C, Real3, Result, C64, I};

/// Largest lattice transformed by [`position_space_propagator`].
pub const LATTICE_LIMIT: usize = 32 * 32 * 32 * 32;

/// `(ω, k)` with upper indices.
pub type FourVector = [f64; 4];

/// `k² = ω² - |k|²`.
pub fn minkowski_square(k: &FourVector) -> f64 {
    k[0] * k[0] - k[1] * k[1] - k[2] * k[2] - k[3] * k[3]
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")))
    }
}

/// `i/(k² + iε)`.
pub fn scalar_propagator_multiplier(k: &FourVector, epsilon: f64) -> Result<C64> {
    check_epsilon(epsilon)?;
    Ok(I / C64::new(minkowski_square(k), epsilon))
}

/// `β^μk_μ = β⁰ω - β^j k^j`.
pub fn beta_dot(k: &FourVector) -> Matrix6C {
    let set = MatrixSet::global();
    let mut m = set.beta0 * C64::from(k[0]);
    for j in 0..3 {
        m -= set.beta[j] * C64::from(k[j + 1]);
    }
    m
}

/// `δ̂_T(k) = I₂ ⊗ (I₃ - k̂k̂ᵀ)`.
pub fn transverse_delta_symbol(k: &FourVector) -> Result<Matrix6C> {
    let s = Real3::new(k[1], k[2], k[3]);
    if s.norm() == 0.0 {
        return Err(Error::ZeroSpatialK);
    }
    Ok(block_diag(&transverse_projector(&s)))
}

/// `Ω̂(k) = I₂ ⊗ kkᵀ` for the spatial part.
pub fn omega_hat(k: &FourVector) -> Matrix6C {
    omega_symbol(&Real3::new(k[1], k[2], k[3]))
}

/// Image of `iR_T`: `(β^μk_μ) δ̂_T(k) i/(k² + iε)`.
pub fn transverse_green_multiplier(k: &FourVector, epsilon: f64) -> Result<Matrix6C> {
    let p = scalar_propagator_multiplier(k, epsilon)?;
    Ok(beta_dot(k) * transverse_delta_symbol(k)? * p)
}

/// `max |(β·k)² - k²I - Ω̂(k)|`.
pub fn square_identity_residual(k: &FourVector) -> f64 {
    let b = beta_dot(k);
    let d = b * b - Matrix6C::identity() * C64::from(minkowski_square(k)) - omega_hat(k);
    d.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Defining property of `R_T`: `iβ^ν∂_ν` acts as `β·k`, and the multiplier
/// of `R_T` is `-i` times [`transverse_green_multiplier`]. Returns
/// `(max |(β·k)R̂_T - k²/(k²+iε) δ̂_T|, max |(β·k)R̂_T - δ̂_T|)`.
pub fn defining_property(k: &FourVector, epsilon: f64) -> Result<(f64, f64)> {
    let r = transverse_green_multiplier(k, epsilon)? * -I;
    let lhs = beta_dot(k) * r;
    let dt = transverse_delta_symbol(k)?;
    let k2 = minkowski_square(k);
    let exact = dt * (C64::from(k2) / C64::new(k2, epsilon));
    let m = |a: Matrix6C| a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok((m(lhs - exact), m(lhs - dt)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonSweep {
    pub epsilons: Vec<f64>,
    pub errors: Vec<f64>,
    /// Smallest log-log slope of error against ε.
    pub order: f64,
}

/// Distance of `(β·k)R̂_T` from `δ̂_T` over decreasing `ε` at off-shell `k`.
pub fn epsilon_sweep(k: &FourVector, epsilons: &[f64]) -> Result<EpsilonSweep> {
    let errors = epsilons
        .iter()
        .map(|&e| Ok(defining_property(k, e)?.1))
        .collect::<Result<Vec<_>>>()?;
    let order = epsilons
        .windows(2)
        .zip(errors.windows(2))
        .map(|(e, r)| (r[0] / r[1]).ln() / (e[0] / e[1]).ln())
        .fold(f64::INFINITY, f64::min);
    Ok(EpsilonSweep {
        epsilons: epsilons.to_vec(),
        errors,
        order,
    })
}

/// Periodic spacetime lattice `(Nt, Nx, Ny, Nz)` with extents `(T, Lx, Ly, Lz)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagatorLattice {
    pub dims: [usize; 4],
    pub extents: [f64; 4],
    pub epsilon: f64,
}

impl PropagatorLattice {
    /// Cubic space of side `2π` with `T = 2π/√7`. Then `ω² = 7n²` is never
    /// a sum of three integer squares, so `|k²| ≥ 1` on every mode but the
    /// zero 4-momentum.
    pub fn standard(n: usize, epsilon: f64) -> Self {
        let l = 2.0 * std::f64::consts::PI;
        Self {
            dims: [n; 4],
            extents: [l / 7f64.sqrt(), l, l, l],
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if self.dims.iter().any(|&d| d < 2) || self.extents.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lattice {:?} with extents {:?} is degenerate",
                self.dims, self.extents
            )));
        }
        let total = self.len();
        if total > LATTICE_LIMIT {
            return Err(Error::BudgetExceeded {
                what: "propagator lattice",
                size: total,
                limit: LATTICE_LIMIT,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self, idx: usize) -> [usize; 4] {
        let mut rest = idx;
        let mut c = [0; 4];
        for a in (0..4).rev() {
            c[a] = rest % self.dims[a];
            rest /= self.dims[a];
        }
        c
    }

    pub fn index(&self, c: [usize; 4]) -> usize {
        c.iter().zip(&self.dims).fold(0, |acc, (&v, &d)| acc * d + v)
    }

    /// Signed mode numbers, `-N/2 ≤ n < N/2`.
    pub fn mode_number(&self, idx: usize) -> [i64; 4] {
        let c = self.coords(idx);
        std::array::from_fn(|a| {
            let n = self.dims[a] as i64;
            let v = c[a] as i64;
            if v >= (n + 1) / 2 { v - n } else { v }
        })
    }

    pub fn wave_vector(&self, idx: usize) -> FourVector {
        let n = self.mode_number(idx);
        std::array::from_fn(|a| 2.0 * std::f64::consts::PI * n[a] as f64 / self.extents[a])
    }

    /// Site coordinates `(t, x, y, z)` folded into `[-extent/2, extent/2)`.
    pub fn centered_position(&self, idx: usize) -> FourVector {
        let n = self.mode_number(idx);
        std::array::from_fn(|a| n[a] as f64 * self.extents[a] / self.dims[a] as f64)
    }

    fn volume(&self) -> f64 {
        self.extents.iter().product()
    }

    /// Index of the site `-x`.
    pub fn mirror(&self, idx: usize) -> usize {
        let c = self.coords(idx);
        self.index(std::array::from_fn(|a| (self.dims[a] - c[a]) % self.dims[a]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagatorReport {
    pub sites: usize,
    /// Modes left out of the sum (the zero 4-momentum).
    pub excluded_modes: usize,
    pub min_abs_k2: f64,
    /// `max |∂²(iΔ) + iδ⁴| / max |δ⁴|` on the band-limited lattice delta.
    pub d_alembert_residual: f64,
    /// `max |Δ(x) - Δ(-x)| / max |Δ|`.
    pub symmetry_residual: f64,
    /// Largest `|Δ_{2ε} - Δ_ε| / max|Δ_ε|` over sites with
    /// `| |t| - |x| | ≥ L/4`.
    pub far_field_change: f64,
    pub far_field_sites: usize,
}

/// `iΔ(x) = (1/V₄) Σ_{k≠0} i/(k²+iε) e^{-ik·x}` on the lattice, with `Δ`
/// returned alongside its report.
pub fn position_space_propagator(lattice: &PropagatorLattice) -> Result<(Vec<C64>, PropagatorReport)> {
    lattice.validate()?;
    let fft = FftNd::new(&lattice.dims);
    let volume = lattice.volume();
    let n = lattice.len();
    let transform = |mult: &(dyn Fn(f64) -> C64 + Sync)| -> Vec<C64> {
        let mut data: Vec<C64> = (0..n)
            .into_par_iter()
            .map(|idx| {
                if idx == 0 {
                    C64::from(0.0)
                } else {
                    mult(minkowski_square(&lattice.wave_vector(idx)))
                }
            })
            .collect();
        // multiplier is even in k, so the sign of the exponent is immaterial
        fft.inverse(&mut data);
        let s = n as f64 / volume;
        data.iter().map(|v| v * s).collect()
    };
    let eps = lattice.epsilon;
    let i_delta = transform(&|k2| I / C64::new(k2, eps));
    let box_i_delta = transform(&|k2| I / C64::new(k2, eps) * -k2);
    let lattice_delta = transform(&|_| C64::from(1.0));
    let i_delta_2 = transform(&|k2| I / C64::new(k2, 2.0 * eps));

    let delta: Vec<C64> = i_delta.iter().map(|v| v * -I).collect();
    let delta_2: Vec<C64> = i_delta_2.iter().map(|v| v * -I).collect();
    let max = |v: &[C64]| v.iter().map(|c| c.norm()).fold(0.0, f64::max);

    let d_alembert = box_i_delta
        .iter()
        .zip(&lattice_delta)
        .map(|(a, d)| (a + d * I).norm())
        .fold(0.0, f64::max)
        / max(&lattice_delta);
    let scale = max(&delta);
    let symmetry = (0..n)
        .map(|i| (delta[i] - delta[lattice.mirror(i)]).norm())
        .fold(0.0, f64::max)
        / scale;
    let cut = lattice.extents[1] / 4.0;
    let mut far = 0.0f64;
    let mut far_sites = 0;
    for i in 0..n {
        let x = lattice.centered_position(i);
        let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        if (x[0].abs() - r).abs() >= cut {
            far_sites += 1;
            far = far.max((delta_2[i] - delta[i]).norm() / scale);
        }
    }
    let min_abs_k2 = (1..n)
        .map(|i| minkowski_square(&lattice.wave_vector(i)).abs())
        .fold(f64::INFINITY, f64::min);
    Ok((
        delta,
        PropagatorReport {
            sites: n,
            excluded_modes: 1,
            min_abs_k2,
            d_alembert_residual: d_alembert,
            symmetry_residual: symmetry,
            far_field_change: far,
            far_field_sites: far_sites,
        },
    ))
}

/// `t,x,re_delta,im_delta` over the `y = z = 0` plane.
pub fn write_propagator_csv<W: Write>(lattice: &PropagatorLattice, delta: &[C64], mut w: W) -> Result<()> {
    if delta.len() != lattice.len() {
        return Err(Error::ShapeMismatch {
            expected: lattice.len(),
            got: delta.len(),
        });
    }
    writeln!(w, "t,x,re_delta,im_delta")?;
    for it in 0..lattice.dims[0] {
        for ix in 0..lattice.dims[1] {
            let idx = lattice.index([it, ix, 0, 0]);
            let t = it as f64 * lattice.extents[0] / lattice.dims[0] as f64;
            let x = ix as f64 * lattice.extents[1] / lattice.dims[1] as f64;
            writeln!(w, "{t:e},{x:e},{:e},{:e}", delta[idx].re, delta[idx].im)?;
        }
    }
    Ok(())
}

/// Longitudinal projector `I₂ ⊗ k̂k̂ᵀ`, for transversality checks.
pub fn longitudinal_symbol(k: &FourVector) -> Result<Matrix6C> {
    Ok(Matrix6C::identity() - transverse_delta_symbol(k)?)
}

/// Eigenvalues of `(β·k)²` for diagnostics: `k²` (four times) and `ω²` (twice).
pub fn square_spectrum(k: &FourVector) -> DVector<f64> {
    let b = beta_dot(k);
    let sq = b * b;
    let mut ev: Vec<f64> = sq.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    DVector::from_vec(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_examples() {
        let v = scalar_propagator_multiplier(&[2.0, 0.0, 0.0, 1.0], 1e-14).unwrap();
        assert!((v - I / 3.0).norm() <= 1e-14);
        let on = scalar_propagator_multiplier(&[1.0, 0.0, 0.0, 1.0], 1e-6).unwrap();
        assert!((on - C64::from(1e6)).norm() <= 1e-6);
        assert!(scalar_propagator_multiplier(&[1.0; 4], 0.0).is_err());
    }

    #[test]
    fn green_multiplier_properties() {
        let k = [1.3, 0.2, -0.7, 0.5];
        assert!(matches!(transverse_green_multiplier(&[1.0, 0.0, 0.0, 0.0], 1e-3), Err(Error::ZeroSpatialK)));
        let (exact, _) = defining_property(&k, 1e-3).unwrap();
        assert!(exact <= 1e-14);
        let g = transverse_green_multiplier(&k, 1e-3).unwrap();
        let long = longitudinal_symbol(&k).unwrap();
        assert!((g * long).iter().all(|v| v.norm() <= 1e-14));
        let od = omega_hat(&k) * transverse_delta_symbol(&k).unwrap();
        assert!(od.iter().all(|v| v.norm() <= 1e-15));
        let sw = epsilon_sweep(&k, &[1e-2, 1e-3, 1e-4, 1e-5]).unwrap();
        assert!((sw.order - 1.0).abs() <= 0.01, "{sw:?}");
    }

    #[test]
    fn square_identity_integer_k() {
        for k in [[2.0, 0.0, 0.0, 1.0], [1.0, 1.0, -1.0, 2.0], [0.0, 3.0, 4.0, 0.0]] {
            assert_eq!(square_identity_residual(&k), 0.0);
        }
        let ev = square_spectrum(&[2.0, 0.0, 0.0, 1.0]);
        assert!((ev[0] - 3.0).abs() <= 1e-14 && (ev[5] - 4.0).abs() <= 1e-14);
    }

    #[test]
    fn lattice_propagator() {
        let lat = PropagatorLattice::standard(8, 1e-12);
        let (delta, r) = position_space_propagator(&lat).unwrap();
        assert!(r.min_abs_k2 >= 1.0 - 1e-12);
        assert!(r.far_field_change <= lat.epsilon, "{r:?}");
        assert!(r.d_alembert_residual <= 1e-10, "{r:?}");
        assert!(r.symmetry_residual <= 1e-14, "{r:?}");
        let mut buf = Vec::new();
        write_propagator_csv(&lat, &delta, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 65);
        let (_, r16) = position_space_propagator(&PropagatorLattice::standard(16, 1e-12)).unwrap();
        assert!(r16.far_field_change <= 1e-12 && r16.d_alembert_residual <= 1e-10, "{r16:?}");
        let big = PropagatorLattice::standard(40, 1e-12);
        assert!(matches!(position_space_propagator(&big), Err(Error::BudgetExceeded { .. })));
    }

    proptest! {
        #[test]
        fn square_identity_random(w in -5.0..5.0f64, a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64) {
            prop_assert!(square_identity_residual(&[w, a, b, c]) <= 1e-12);
            let v = scalar_propagator_multiplier(&[w, a, b, c], 1e-3).unwrap();
            let m = scalar_propagator_multiplier(&[-w, -a, -b, -c], 1e-3).unwrap();
            prop_assert_eq!(v, m);
        }
    }
}
