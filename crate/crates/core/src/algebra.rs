//! Fixed matrices of the `(1,0)⊕(0,1)` representation.
//!
//! Index mapping: the documented component `i ∈ {1,2,3}` is stored at
//! position `i - 1`; Lorentz indices `μ ∈ {0,1,2,3}` are stored as-is, with
//! `0` the time index.
//!
//! Every matrix here has entries in `{0, ±1, ±i}` and is assembled from
//! integer data, so the algebraic identities between them hold with exact
//! floating-point equality.

use std::sync::OnceLock;

use nalgebra::Matrix3;

use crate::dynamics::{transversality_residual, FieldState};
use crate::grid::{max_norm, BoxSpec};
use crate::{Error, Matrix3C, Matrix6C, Real3, Result, Spinor6, C64, I};

/// Totally antisymmetric symbol on 0-based indices, `ε_{012} = 1`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i32 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Diagonal of the metric `diag(1,-1,-1,-1)`.
pub fn metric(mu: usize) -> f64 {
    if mu == 0 {
        1.0
    } else {
        -1.0
    }
}

fn gaussian_integer(re: i32, im: i32) -> C64 {
    C64::new(re as f64, im as f64)
}

/// `(τ_i)_{jk} = -i ε_{ijk}`.
pub fn build_tau() -> [Matrix3C; 3] {
    std::array::from_fn(|i| Matrix3::from_fn(|j, k| gaussian_integer(0, -levi_civita(i, j, k))))
}

/// Assemble a 6×6 matrix from four 3×3 blocks.
pub fn blocks(a: &Matrix3C, b: &Matrix3C, c: &Matrix3C, d: &Matrix3C) -> Matrix6C {
    let mut m = Matrix6C::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(c);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(d);
    m
}

pub fn block_diag(a: &Matrix3C) -> Matrix6C {
    let z = Matrix3C::zeros();
    blocks(a, &z, &z, a)
}

pub fn commutator(a: &Matrix6C, b: &Matrix6C) -> Matrix6C {
    a * b - b * a
}

/// The full set of representation matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    pub tau: [Matrix3C; 3],
    /// `β⁰ = diag(I₃, -I₃)`.
    pub beta0: Matrix6C,
    /// `β_i = (0, τ_i; -τ_i, 0)`; these are the contravariant `β^i`.
    pub beta: [Matrix6C; 3],
    /// `χ_i = β⁰ β_i`.
    pub chi: [Matrix6C; 3],
    /// `S_i = I₂ ⊗ τ_i`.
    pub spin: [Matrix6C; 3],
    /// Lorentz generators `Σ_{μν}`, antisymmetric, `Σ_{μμ} = 0`.
    pub sigma: [[Matrix6C; 4]; 4],
}

impl MatrixSet {
    pub fn new() -> Self {
        build_matrix_set()
    }

    /// Shared instance, built once.
    pub fn global() -> &'static MatrixSet {
        static SET: OnceLock<MatrixSet> = OnceLock::new();
        SET.get_or_init(build_matrix_set)
    }

    /// `β^μ` with `β^0 = β⁰`, `β^i = β_i`.
    pub fn beta_upper(&self, mu: usize) -> &Matrix6C {
        if mu == 0 {
            &self.beta0
        } else {
            &self.beta[mu - 1]
        }
    }

    /// `β_μ = g_{μν} β^ν`.
    pub fn beta_lower(&self, mu: usize) -> Matrix6C {
        self.beta_upper(mu) * C64::from(metric(mu))
    }

    /// `X = (0, I₃; I₃, 0)`, exchanging the `E` and `iB` blocks.
    pub fn swap_blocks(&self) -> Matrix6C {
        let id = Matrix3C::identity();
        let z = Matrix3C::zeros();
        blocks(&z, &id, &id, &z)
    }
}

impl Default for MatrixSet {
    fn default() -> Self {
        Self::new()
    }
}

pub fn build_matrix_set() -> MatrixSet {
    let tau = build_tau();
    let id = Matrix3C::identity();
    let z = Matrix3C::zeros();
    let beta0 = blocks(&id, &z, &z, &(-id));
    let beta: [Matrix6C; 3] = std::array::from_fn(|i| blocks(&z, &tau[i], &(-tau[i]), &z));
    let chi: [Matrix6C; 3] = std::array::from_fn(|i| beta0 * beta[i]);
    let spin: [Matrix6C; 3] = std::array::from_fn(|i| block_diag(&tau[i]));

    let mut sigma = [[Matrix6C::zeros(); 4]; 4];
    for l in 1..4 {
        for m in 1..4 {
            let mut acc = Matrix6C::zeros();
            for (n, s) in spin.iter().enumerate() {
                let e = levi_civita(l - 1, m - 1, n);
                if e != 0 {
                    acc += s * C64::from(e as f64);
                }
            }
            sigma[l][m] = acc;
        }
        sigma[l][0] = chi[l - 1] * I;
        sigma[0][l] = -(chi[l - 1] * I);
    }

    MatrixSet {
        tau,
        beta0,
        beta,
        chi,
        spin,
        sigma,
    }
}

/// `τ·v` for a real vector; acts as `u ↦ i v × u`.
pub fn tau_dot(v: &Real3) -> Matrix3C {
    let tau = &MatrixSet::global().tau;
    tau[0] * C64::from(v[0]) + tau[1] * C64::from(v[1]) + tau[2] * C64::from(v[2])
}

/// Fourier symbol `χ·k` of `Ĥ = -iχ·∇` on `e^{ik·x}`.
pub fn hamiltonian_symbol(k: &Real3) -> Matrix6C {
    let chi = &MatrixSet::global().chi;
    chi[0] * C64::from(k[0]) + chi[1] * C64::from(k[1]) + chi[2] * C64::from(k[2])
}

/// Residual of `Ĥ(L̂+S) - (L̂+S)Ĥ` applied to `state`, relative to `max |ψ|`.
///
/// `L̂ = x × (-i∇)` uses positions relative to the box center. Derivatives of
/// the band-limited factor are spectral; derivatives of the coordinate
/// prefactor use `∂_j x_b = δ_{jb}`, so the operator identity is tested
/// without periodic-image artefacts.
pub fn spin_orbit_commutator_residual(state: &FieldState) -> Result<f64> {
    let b = state.grid();
    let psi = state.psi();
    let scale = max_norm(psi);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let transverse = transversality_residual(state);
    if transverse > 1e-10 {
        return Err(Error::NonTransverse {
            residual: transverse,
        });
    }
    let set = MatrixSet::global();

    let spec = b.forward(psi);
    // q[c] = -i ∂_c ψ ; qq[j][c] = -i ∂_j q[c]
    let q: [Vec<Spinor6>; 3] = std::array::from_fn(|c| derivative_field(b, &spec, &[c]));
    let qq: [[Vec<Spinor6>; 3]; 3] =
        std::array::from_fn(|j| std::array::from_fn(|c| derivative_field(b, &spec, &[j, c])));

    let mut worst: f64 = 0.0;
    for x in 0..b.len() {
        let pos = b.centered_position(x);
        let h_psi: Spinor6 = (0..3).map(|j| set.chi[j] * q[j][x]).sum();
        for a in 0..3 {
            // Ĥ (L+S)_a ψ
            let mut lhs = Spinor6::zeros();
            for j in 0..3 {
                for c in 0..3 {
                    let e = levi_civita(a, j, c);
                    if e != 0 {
                        lhs += set.chi[j] * q[c][x] * C64::new(0.0, -(e as f64));
                    }
                }
            }
            for bb in 0..3 {
                for c in 0..3 {
                    let e = levi_civita(a, bb, c) as f64;
                    if e != 0.0 {
                        let mut t = Spinor6::zeros();
                        for j in 0..3 {
                            t += set.chi[j] * qq[j][c][x];
                        }
                        lhs += t * C64::from(e * pos[bb]);
                    }
                }
            }
            for j in 0..3 {
                lhs += set.chi[j] * (set.spin[a] * q[j][x]);
            }
            // (L+S)_a Ĥ ψ
            let mut rhs = set.spin[a] * h_psi;
            for bb in 0..3 {
                for c in 0..3 {
                    let e = levi_civita(a, bb, c) as f64;
                    if e != 0.0 {
                        let mut t = Spinor6::zeros();
                        for j in 0..3 {
                            t += set.chi[j] * qq[c][j][x];
                        }
                        rhs += t * C64::from(e * pos[bb]);
                    }
                }
            }
            worst = worst.max((lhs - rhs).camax());
        }
    }
    Ok(worst / scale)
}

/// Spin-orbit commutator residual on a randomized band-limited transverse
/// field.
pub fn verify_spin_orbit_commutator(grid: &BoxSpec, seed: u64) -> Result<f64> {
    if grid.points().iter().any(|&n| n < 8) {
        return Err(Error::InvalidBox(
            "spin-orbit check needs at least 8 points per axis".into(),
        ));
    }
    let state = FieldState::random_transverse(grid, seed, 2)?;
    spin_orbit_commutator_residual(&state)
}

/// Apply `Π_a (-i ∂_{axes[a]})` spectrally, given the forward transform.
pub(crate) fn derivative_field(b: &BoxSpec, spec: &[Spinor6], axes: &[usize]) -> Vec<Spinor6> {
    let out: Vec<Spinor6> = spec
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let k = b.wave_vector(idx);
            let f: f64 = axes.iter().map(|&a| k[a]).product();
            v * C64::from(f)
        })
        .collect();
    b.inverse(&out)
}

/// Exact comparison helper for integer-backed matrices.
pub fn exactly_equal<const N: usize>(
    a: &nalgebra::SMatrix<C64, N, N>,
    b: &nalgebra::SMatrix<C64, N, N>,
) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x == y)
}

pub fn max_abs<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ONE, ZERO};

    #[test]
    fn tau_entries() {
        let tau = build_tau();
        // (τ₁)_{23} = -i in 1-based indexing
        assert_eq!(tau[0][(1, 2)], C64::new(0.0, -1.0));
        assert_eq!(tau[0][(2, 1)], C64::new(0.0, 1.0));
        for d in 0..3 {
            assert_eq!(tau[2][(d, d)], ZERO);
        }
    }

    #[test]
    fn tau_commutators_exact() {
        let tau = build_tau();
        for l in 0..3 {
            assert!(exactly_equal(&tau[l].adjoint(), &tau[l]));
            for m in 0..3 {
                let lhs = tau[l] * tau[m] - tau[m] * tau[l];
                let mut rhs = Matrix3C::zeros();
                for n in 0..3 {
                    rhs += tau[n] * C64::new(0.0, levi_civita(l, m, n) as f64);
                }
                assert!(exactly_equal(&lhs, &rhs), "[τ{l}, τ{m}]");
            }
        }
        assert!(exactly_equal(&(tau[0] * tau[1] - tau[1] * tau[0]), &(tau[2] * I)));
    }

    #[test]
    fn matrix_set_invariants() {
        let s = MatrixSet::new();
        assert!(exactly_equal(&(s.beta0 * s.beta0), &Matrix6C::identity()));
        let ss: Matrix6C = s.spin.iter().map(|m| m * m).sum();
        assert!(exactly_equal(&ss, &(Matrix6C::identity() * C64::from(2.0))));
        let z = Matrix3C::zeros();
        assert!(exactly_equal(&s.chi[0], &blocks(&z, &s.tau[0], &s.tau[0], &z)));
        for i in 0..3 {
            assert!(exactly_equal(&s.chi[i], &(s.beta0 * s.beta[i])));
            assert!(exactly_equal(&s.chi[i].adjoint(), &s.chi[i]));
            assert!(exactly_equal(&(s.beta0 * s.chi[i] * s.beta0), &(-s.chi[i])));
        }
        for mu in 0..4 {
            assert!(exactly_equal(&s.sigma[mu][mu], &Matrix6C::zeros()));
            for nu in 0..4 {
                assert!(exactly_equal(&s.sigma[mu][nu], &(-s.sigma[nu][mu])));
                // pseudo-unitarity of the generators
                let conj = s.beta0 * s.sigma[mu][nu].adjoint() * s.beta0;
                assert!(exactly_equal(&conj, &s.sigma[mu][nu]));
            }
        }
        for l in 1..4 {
            for m in 1..4 {
                assert!(exactly_equal(&commutator(&s.beta0, &s.sigma[l][m]), &Matrix6C::zeros()));
            }
        }
        assert_eq!(s.beta_lower(2), -s.beta[1]);
        assert_eq!(s.beta_lower(0), s.beta0);
        assert_eq!(s.swap_blocks() * s.swap_blocks(), Matrix6C::identity());
        assert_eq!(s.beta0[(0, 0)], ONE);
    }

    #[test]
    fn hamiltonian_symbol_properties() {
        assert_eq!(hamiltonian_symbol(&Real3::zeros()), Matrix6C::zeros());
        let h = hamiltonian_symbol(&Real3::new(0.0, 0.0, 1.0));
        assert!(exactly_equal(&h, &h.adjoint()));
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let expected = [1.0, 1.0, 0.0, 0.0, -1.0, -1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let h = hamiltonian_symbol(&Real3::new(0.3, -1.2, 2.5));
        assert!(max_abs(&(h - h.adjoint())) == 0.0);
    }

    #[test]
    fn tau_dot_is_cross_product() {
        let v = Real3::new(0.2, -0.7, 1.1);
        let u = crate::Vector3C::new(C64::new(1.0, 0.5), C64::new(-0.3, 0.0), C64::new(0.0, 2.0));
        let lhs = tau_dot(&v) * u;
        let vc = v.map(C64::from);
        let rhs = vc.cross(&u) * I;
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn spin_orbit_commutator_on_constant_and_plane_wave() {
        let b = BoxSpec::cubic(2.0 * std::f64::consts::PI, 8).unwrap();
        let constant = FieldState::new(
            b.clone(),
            vec![Spinor6::from_element(C64::new(0.3, -0.1)); b.len()],
            0.0,
        )
        .unwrap();
        assert_eq!(spin_orbit_commutator_residual(&constant).unwrap(), 0.0);

        let mode = crate::modes::ModeSpec::new(&b, [1, 2, 0], crate::polarization::Helicity::Plus, crate::modes::FreqSign::Positive);
        let wave = FieldState::from_mode(&mode, &crate::modes::ModeOptions::default()).unwrap();
        assert!(spin_orbit_commutator_residual(&wave).unwrap() <= 1e-10);
    }

    #[test]
    fn spin_orbit_commutator_random_seeds() {
        let b = BoxSpec::cubic(2.0 * std::f64::consts::PI, 8).unwrap();
        for seed in [1, 2, 3] {
            let r = verify_spin_orbit_commutator(&b, seed).unwrap();
            assert!(r <= 1e-10, "seed {seed}: {r}");
        }
    }

    #[test]
    fn spin_orbit_rejects_longitudinal_field() {
        let b = BoxSpec::cubic(2.0 * std::f64::consts::PI, 8).unwrap();
        let psi: Vec<Spinor6> = (0..b.len())
            .map(|x| {
                let p = b.position(x);
                let mut v = Spinor6::zeros();
                v[0] = C64::from(p[0].cos());
                v
            })
            .collect();
        let state = FieldState::new(b, psi, 0.0).unwrap();
        assert!(matches!(
            spin_orbit_commutator_residual(&state),
            Err(Error::NonTransverse { .. })
        ));
    }
}
