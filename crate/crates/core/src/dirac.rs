//! The free Dirac equation in the Dirac–Pauli representation and its
//! two-spinor form.
//!
//! `γ⁰ = diag(I, -I)`, `γ^j = (0, σ_j; -σ_j, 0)` and `ψ = (χ; φ)`. In this
//! representation
//!
//! ```text
//! (σ·∇)χ = (-∂_t + im)φ
//! (σ·∇)φ = (-∂_t - im)χ
//! ```
//!
//! is `M(iγ^μ∂_μ - m)ψ = 0` with the unitary `M = (0, i; -i, 0)`.
//!
//! Solutions with time dependence `e^{-iEt}`, `E > 0`, have `χ` large and
//! `φ = (σ·p)χ/(E + m)`; solutions with `e^{+iEt}` have `φ` large and
//! `χ = -(σ·p)φ/(E + m)`.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{metric, MatrixSet};
use crate::grid::BoxSpec;
use crate::modes::{f_spinor, g_spinor, FreqSign};
use crate::polarization::Helicity;
use crate::{Error, Real3, Result, C64, I, ONE, ZERO};

pub type Matrix2C = Matrix2<C64>;
pub type Matrix4C = Matrix4<C64>;
pub type Spinor2 = Vector2<C64>;
pub type Spinor4 = Vector4<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn value(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
        }
    }

    fn basis(self) -> Spinor2 {
        match self {
            Spin::Up => Spinor2::new(ONE, ZERO),
            Spin::Down => Spinor2::new(ZERO, ONE),
        }
    }
}

/// Pauli matrices built from integer data.
pub fn pauli() -> [Matrix2C; 3] {
    [
        Matrix2C::new(ZERO, ONE, ONE, ZERO),
        Matrix2C::new(ZERO, -I, I, ZERO),
        Matrix2C::new(ONE, ZERO, ZERO, -ONE),
    ]
}

fn sigma_dot(p: &Real3) -> Matrix2C {
    let s = pauli();
    s[0] * C64::from(p[0]) + s[1] * C64::from(p[1]) + s[2] * C64::from(p[2])
}

fn blocks4(a: &Matrix2C, b: &Matrix2C, c: &Matrix2C, d: &Matrix2C) -> Matrix4C {
    let mut m = Matrix4C::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

/// `γ^μ`, upper index.
pub fn gamma_matrices() -> [Matrix4C; 4] {
    let s = pauli();
    let id = Matrix2C::identity();
    let z = Matrix2C::zeros();
    [
        blocks4(&id, &z, &z, &(-id)),
        blocks4(&z, &s[0], &(-s[0]), &z),
        blocks4(&z, &s[1], &(-s[1]), &z),
        blocks4(&z, &s[2], &(-s[2]), &z),
    ]
}

/// `max |{γ^μ, γ^ν} - 2g^{μν}I|` over all pairs; zero in exact arithmetic.
pub fn gamma_anticommutator_defect() -> f64 {
    let g = gamma_matrices();
    let mut worst: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            let mut d = g[mu] * g[nu] + g[nu] * g[mu];
            if mu == nu {
                d -= Matrix4C::identity() * C64::from(2.0 * metric(mu));
            }
            worst = worst.max(d.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
    }
    worst
}

/// `M` with `M(iγ^μ∂_μ - m)ψ` equal to the stacked two-spinor residuals.
pub fn maxwell_map() -> Matrix4C {
    let id = Matrix2C::identity();
    let z = Matrix2C::zeros();
    blocks4(&z, &(id * I), &(id * -I), &z)
}

/// `H_D(p) = γ⁰(γ^j p_j + m)`, the generator of `i∂_tψ = H_Dψ` with `p = -i∇`.
pub fn dirac_hamiltonian(p: &Real3, mass: f64) -> Matrix4C {
    let g = gamma_matrices();
    let mut inner = Matrix4C::identity() * C64::from(mass);
    for j in 0..3 {
        inner += g[j + 1] * C64::from(p[j]);
    }
    g[0] * inner
}

/// Two-spinor amplitude with its mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracSpinor {
    pub chi: Spinor2,
    pub phi: Spinor2,
    pub mass: f64,
}

impl DiracSpinor {
    pub fn stacked(&self) -> Spinor4 {
        Spinor4::new(self.chi[0], self.chi[1], self.phi[0], self.phi[1])
    }

    pub fn from_stacked(v: &Spinor4, mass: f64) -> Self {
        Self {
            chi: Spinor2::new(v[0], v[1]),
            phi: Spinor2::new(v[2], v[3]),
            mass,
        }
    }

    /// `|χ| / |φ|`.
    pub fn component_ratio(&self) -> f64 {
        self.chi.norm() / self.phi.norm()
    }
}

pub fn energy(p: &Real3, mass: f64) -> f64 {
    (p.norm_squared() + mass * mass).sqrt()
}

/// Unit-norm plane-wave amplitude for `e^{i(p·x ∓ Et)}`.
pub fn dirac_plane_wave(p: &Real3, spin: Spin, sign: FreqSign, mass: f64) -> Result<DiracSpinor> {
    if !(mass >= 0.0) || !mass.is_finite() {
        return Err(Error::InvalidParameter(format!("mass {mass} must be finite and ≥ 0")));
    }
    let e = energy(p, mass);
    if e == 0.0 {
        return Err(Error::ZeroWaveVector);
    }
    let xi = spin.basis();
    let small = sigma_dot(p) * xi / C64::from(e + mass);
    let (chi, phi) = match sign {
        FreqSign::Positive => (xi, small),
        FreqSign::Negative => (-small, xi),
    };
    let n = (chi.norm_squared() + phi.norm_squared()).sqrt();
    Ok(DiracSpinor {
        chi: chi / C64::from(n),
        phi: phi / C64::from(n),
        mass,
    })
}

/// A plane wave sampled on the grid with its exact time derivative.
pub fn sample_plane_wave(
    grid: &BoxSpec,
    n: [i64; 3],
    spin: Spin,
    sign: FreqSign,
    mass: f64,
    t: f64,
) -> Result<(Vec<Spinor4>, Vec<Spinor4>)> {
    let p = grid.wave_vector_of(n);
    let u = dirac_plane_wave(&p, spin, sign, mass)?.stacked();
    let e = match sign {
        FreqSign::Positive => energy(&p, mass),
        FreqSign::Negative => -energy(&p, mass),
    };
    let psi: Vec<Spinor4> = (0..grid.len())
        .map(|i| u * (I * (p.dot(&grid.position(i)) - e * t)).exp())
        .collect();
    let dot = psi.iter().map(|v| v * (-I * e)).collect();
    Ok((psi, dot))
}

/// Random band-limited spinor field with `|n_a| ≤ n_max`.
pub fn random_field(grid: &BoxSpec, seed: u64, n_max: i64) -> Vec<Spinor4> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec: Vec<Spinor4> = (0..grid.len())
        .map(|idx| {
            if grid.mode_number(idx).iter().all(|v| v.abs() <= n_max) && !grid.is_nyquist(idx) {
                Spinor4::from_fn(|_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            } else {
                Spinor4::zeros()
            }
        })
        .collect();
    grid.inverse(&spec)
}

fn gradient_sigma(grid: &BoxSpec, f: &[Spinor2]) -> Vec<Spinor2> {
    let mut spec = grid.forward(f);
    for (idx, v) in spec.iter_mut().enumerate() {
        *v = sigma_dot(&grid.wave_vector(idx)) * *v * I;
    }
    grid.inverse(&spec)
}

/// Residuals of the two-spinor lines,
/// `(σ·∇)χ - (-∂_t + im)φ` and `(σ·∇)φ - (-∂_t - im)χ`.
pub fn maxwell_like_residual(
    grid: &BoxSpec,
    mass: f64,
    chi: &[Spinor2],
    phi: &[Spinor2],
    chi_dot: &[Spinor2],
    phi_dot: &[Spinor2],
) -> Result<(Vec<Spinor2>, Vec<Spinor2>)> {
    for len in [chi.len(), phi.len(), chi_dot.len(), phi_dot.len()] {
        grid.check_len(len)?;
    }
    let sc = gradient_sigma(grid, chi);
    let sp = gradient_sigma(grid, phi);
    let m = I * mass;
    let first = (0..grid.len()).map(|x| sc[x] - (-phi_dot[x] + phi[x] * m)).collect();
    let second = (0..grid.len()).map(|x| sp[x] - (-chi_dot[x] - chi[x] * m)).collect();
    Ok((first, second))
}

/// `(iγ^μ∂_μ - m)ψ` with a supplied time derivative.
pub fn dirac_equation_residual(grid: &BoxSpec, mass: f64, psi: &[Spinor4], psi_dot: &[Spinor4]) -> Result<Vec<Spinor4>> {
    grid.check_len(psi.len())?;
    grid.check_len(psi_dot.len())?;
    let g = gamma_matrices();
    let spec = grid.forward(psi);
    let grads: [Vec<Spinor4>; 3] = std::array::from_fn(|a| {
        let s: Vec<Spinor4> = spec
            .iter()
            .enumerate()
            .map(|(idx, v)| v * (I * grid.wave_vector(idx)[a]))
            .collect();
        grid.inverse(&s)
    });
    Ok((0..grid.len())
        .map(|x| {
            let mut d = g[0] * psi_dot[x];
            for j in 0..3 {
                d += g[j + 1] * grads[j][x];
            }
            d * I - psi[x] * C64::from(mass)
        })
        .collect())
}

pub fn split(psi: &[Spinor4]) -> (Vec<Spinor2>, Vec<Spinor2>) {
    psi.iter()
        .map(|v| (Spinor2::new(v[0], v[1]), Spinor2::new(v[2], v[3])))
        .unzip()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `max |M r₁ - r₂|` with `r₁` the four-spinor residual and `r₂` the
    /// stacked two-spinor residuals.
    pub map_residual: f64,
    /// `max | ‖r₁‖ - ‖r₂‖ |` pointwise.
    pub norm_residual: f64,
    /// `max ‖r₁‖`.
    pub scale: f64,
}

/// Compares both forms of the equation on an arbitrary field and time
/// derivative.
pub fn equivalence_check(grid: &BoxSpec, mass: f64, psi: &[Spinor4], psi_dot: &[Spinor4]) -> Result<EquivalenceReport> {
    let r1 = dirac_equation_residual(grid, mass, psi, psi_dot)?;
    let (chi, phi) = split(psi);
    let (cd, pd) = split(psi_dot);
    let (a, b) = maxwell_like_residual(grid, mass, &chi, &phi, &cd, &pd)?;
    let m = maxwell_map();
    let mut map_residual: f64 = 0.0;
    let mut norm_residual: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for x in 0..grid.len() {
        let r2 = Spinor4::new(a[x][0], a[x][1], b[x][0], b[x][1]);
        map_residual = map_residual.max((m * r1[x] - r2).norm());
        norm_residual = norm_residual.max((r1[x].norm() - r2.norm()).abs());
        scale = scale.max(r1[x].norm());
    }
    Ok(EquivalenceReport {
        map_residual,
        norm_residual,
        scale,
    })
}

/// `exp(-iH_D t)` applied per Fourier mode as `cos(Et) - i sin(Et) H_D/E`.
pub fn evolve_dirac(grid: &BoxSpec, mass: f64, psi: &[Spinor4], t: f64) -> Result<Vec<Spinor4>> {
    grid.check_len(psi.len())?;
    let mut spec = grid.forward(psi);
    for (idx, v) in spec.iter_mut().enumerate() {
        let p = grid.wave_vector(idx);
        let e = energy(&p, mass);
        if e == 0.0 {
            continue;
        }
        let h = dirac_hamiltonian(&p, mass);
        let u = Matrix4C::identity() * C64::from((e * t).cos()) - h * (I * ((e * t).sin() / e));
        *v = u * *v;
    }
    Ok(grid.inverse(&spec))
}

/// `Λ = I + (η/2)α_l` with `α_l = γ⁰γ^l`.
pub fn dirac_boost(axis: usize, eta: f64) -> Matrix4C {
    let g = gamma_matrices();
    Matrix4C::identity() + g[0] * g[axis + 1] * C64::from(eta / 2.0)
}

/// `(∫(φ†φ - χ†χ), ∫(φ†φ + χ†χ))` as Riemann sums.
pub fn densities(grid: &BoxSpec, psi: &[Spinor4]) -> (f64, f64) {
    let dv = grid.cell_volume();
    let (mut diff, mut sum) = (0.0, 0.0);
    for v in psi {
        let c = v[0].norm_sqr() + v[1].norm_sqr();
        let p = v[2].norm_sqr() + v[3].norm_sqr();
        diff += (p - c) * dv;
        sum += (p + c) * dv;
    }
    (diff, sum)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalogyReport {
    /// Smallest `‖σ·k‖` coupling `φ` into `∂_tχ` over the sampled `k ≠ 0`.
    pub coupling: f64,
    /// Two-spinor residual of the `χ ↔ φ`, `m → -m` image of plane waves.
    pub swap_residual: f64,
    /// `max |X f(k,λ) - g(k,λ)|` for the photon block swap `X`.
    pub photon_duality: f64,
    /// Change of `∫(φ†φ - χ†χ)` under a boost at `2ε` over that at `ε`.
    pub invariant_ratio: f64,
    /// Same ratio for `∫(φ†φ + χ†χ)`.
    pub density_ratio: f64,
    /// Relative drift of `∫(φ†φ + χ†χ)` over one period of evolution.
    pub conservation_drift: f64,
    /// `|φ|` of the positive-energy rest spinor.
    pub rest_positive_small: f64,
    /// `|χ|` of the negative-energy rest spinor.
    pub rest_negative_small: f64,
    /// `max | |χ|/|φ| - |p|/(E+m) |` over negative-energy plane waves, and
    /// the mirrored `|φ|/|χ|` over positive-energy ones.
    pub ratio_error: f64,
    /// Largest `|E² - p² - m²|` from the eigenvalues of `H_D(p)`.
    pub dispersion: f64,
}

/// Runs the structural analogy checks on a small periodic grid.
pub fn analogy_suite(grid: &BoxSpec, mass: f64, seed: u64, eps: f64) -> Result<AnalogyReport> {
    if !(mass >= 0.0) {
        return Err(Error::InvalidParameter(format!("mass {mass} must be ≥ 0")));
    }
    if !(eps > 0.0 && eps <= 1e-2) {
        return Err(Error::InvalidParameter(format!("boost parameter {eps} must lie in (0, 1e-2]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut momenta: Vec<[i64; 3]> = vec![[1, 0, 0], [0, 1, 1], [1, -1, 2]];
    for _ in 0..5 {
        momenta.push(std::array::from_fn(|_| rng.random_range(-2i64..=2)));
    }
    momenta.retain(|n| *n != [0, 0, 0]);

    let coupling = momenta
        .iter()
        .map(|n| sigma_dot(&grid.wave_vector_of(*n)).norm())
        .fold(f64::INFINITY, f64::min);

    let mut swap_residual: f64 = 0.0;
    let mut ratio_error: f64 = 0.0;
    let mut dispersion: f64 = 0.0;
    let mut photon_duality: f64 = 0.0;
    let x = MatrixSet::global().swap_blocks();
    for n in &momenta {
        let p = grid.wave_vector_of(*n);
        let e = energy(&p, mass);
        let expected = p.norm() / (e + mass);
        for spin in [Spin::Up, Spin::Down] {
            for sign in [FreqSign::Positive, FreqSign::Negative] {
                let (psi, dot) = sample_plane_wave(grid, *n, spin, sign, mass, 0.3)?;
                let (chi, phi) = split(&psi);
                let (cd, pd) = split(&dot);
                let (a, b) = maxwell_like_residual(grid, -mass, &phi, &chi, &pd, &cd)?;
                let r = a.iter().chain(&b).map(|v| v.norm()).fold(0.0, f64::max);
                swap_residual = swap_residual.max(r);
                let s = DiracSpinor::from_stacked(&psi[0], mass);
                let got = match sign {
                    FreqSign::Negative => s.component_ratio(),
                    FreqSign::Positive => 1.0 / s.component_ratio(),
                };
                ratio_error = ratio_error.max((got - expected).abs());
            }
        }
        let ev = dirac_hamiltonian(&p, mass).symmetric_eigen().eigenvalues;
        for v in ev.iter() {
            dispersion = dispersion.max((v * v - e * e).abs());
        }
        for lam in Helicity::TRANSVERSE {
            let d = x * f_spinor(&p, lam)? - g_spinor(&p, lam)?;
            photon_duality = photon_duality.max(d.norm());
        }
    }

    let psi = random_field(grid, seed, 1);
    let base = densities(grid, &psi);
    let boosted = |eta: f64| {
        let l = dirac_boost(1, eta);
        let moved: Vec<Spinor4> = psi.iter().map(|v| l * v).collect();
        densities(grid, &moved)
    };
    let (a, b) = (boosted(eps), boosted(2.0 * eps));
    let invariant_ratio = (b.0 - base.0).abs() / (a.0 - base.0).abs();
    let density_ratio = (b.1 - base.1).abs() / (a.1 - base.1).abs();

    let min_e = momenta
        .iter()
        .map(|n| energy(&grid.wave_vector_of(*n), mass))
        .fold(f64::INFINITY, f64::min);
    let period = 2.0 * std::f64::consts::PI / min_e;
    let evolved = evolve_dirac(grid, mass, &psi, period)?;
    let conservation_drift = (densities(grid, &evolved).1 - base.1).abs() / base.1;

    let (rest_positive_small, rest_negative_small) = if mass > 0.0 {
        let pos = dirac_plane_wave(&Real3::zeros(), Spin::Up, FreqSign::Positive, mass)?;
        let neg = dirac_plane_wave(&Real3::zeros(), Spin::Up, FreqSign::Negative, mass)?;
        (pos.phi.norm(), neg.chi.norm())
    } else {
        (0.0, 0.0)
    };

    Ok(AnalogyReport {
        coupling,
        swap_residual,
        photon_duality,
        invariant_ratio,
        density_ratio,
        conservation_drift,
        rest_positive_small,
        rest_negative_small,
        ratio_error,
        dispersion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> BoxSpec {
        BoxSpec::cubic(2.0 * PI, 8).unwrap()
    }

    #[test]
    fn gamma_algebra_exact() {
        assert_eq!(gamma_anticommutator_defect(), 0.0);
        let m = maxwell_map();
        assert_eq!(m.adjoint() * m, Matrix4C::identity());
    }

    #[test]
    fn rest_frame_components() {
        let pos = dirac_plane_wave(&Real3::zeros(), Spin::Down, FreqSign::Positive, 1.0).unwrap();
        assert_eq!(pos.phi, Spinor2::zeros());
        assert_eq!(pos.chi, Spinor2::new(ZERO, C64::from(1.0)));
        let neg = dirac_plane_wave(&Real3::zeros(), Spin::Up, FreqSign::Negative, 1.0).unwrap();
        assert_eq!(neg.chi.norm(), 0.0);
        assert!(dirac_plane_wave(&Real3::zeros(), Spin::Up, FreqSign::Positive, 0.0).is_err());
        assert!(dirac_plane_wave(&Real3::x(), Spin::Up, FreqSign::Positive, -1.0).is_err());
    }

    #[test]
    fn small_momentum_ratio() {
        let m = 2.0;
        for p in [1e-3, 1e-2, 0.1] {
            let v = Real3::new(p, 0.0, 0.0);
            let s = dirac_plane_wave(&v, Spin::Up, FreqSign::Negative, m).unwrap();
            let e = energy(&v, m);
            assert!((s.component_ratio() - p / (e + m)).abs() <= 1e-14);
            // leading order p/2m
            assert!((s.component_ratio() - p / (2.0 * m)).abs() <= p.powi(3));
        }
    }

    #[test]
    fn plane_waves_solve_both_forms() {
        let g = grid();
        for sign in [FreqSign::Positive, FreqSign::Negative] {
            for spin in [Spin::Up, Spin::Down] {
                let (psi, dot) = sample_plane_wave(&g, [1, -2, 1], spin, sign, 1.3, 0.7).unwrap();
                let r = dirac_equation_residual(&g, 1.3, &psi, &dot).unwrap();
                assert!(r.iter().all(|v| v.norm() <= 1e-12));
                let (c, p) = split(&psi);
                let (cd, pd) = split(&dot);
                let (a, b) = maxwell_like_residual(&g, 1.3, &c, &p, &cd, &pd).unwrap();
                assert!(a.iter().chain(&b).all(|v| v.norm() <= 1e-12));
            }
        }
    }

    #[test]
    fn equivalence_on_random_fields() {
        let g = grid();
        let psi = random_field(&g, 3, 2);
        let dot = random_field(&g, 4, 2);
        let r = equivalence_check(&g, 0.8, &psi, &dot).unwrap();
        assert!(r.scale > 1e-3);
        assert!(r.map_residual <= 1e-12 && r.norm_residual <= 1e-12, "{r:?}");
    }

    #[test]
    fn massless_lines_coincide() {
        let g = grid();
        let chi: Vec<Spinor2> = split(&random_field(&g, 5, 2)).0;
        let dot: Vec<Spinor2> = split(&random_field(&g, 6, 2)).0;
        let (a, b) = maxwell_like_residual(&g, 0.0, &chi, &chi, &dot, &dot).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn evolution_matches_plane_wave() {
        let g = grid();
        let (psi, _) = sample_plane_wave(&g, [2, 0, 1], Spin::Up, FreqSign::Negative, 0.5, 0.0).unwrap();
        let (later, _) = sample_plane_wave(&g, [2, 0, 1], Spin::Up, FreqSign::Negative, 0.5, 1.7).unwrap();
        let ev = evolve_dirac(&g, 0.5, &psi, 1.7).unwrap();
        let err = ev.iter().zip(&later).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn analogy_suite_values() {
        let r = analogy_suite(&grid(), 1.0, 9, 1e-3).unwrap();
        assert!(r.coupling > 0.0);
        assert!(r.swap_residual <= 1e-12, "{r:?}");
        assert!(r.photon_duality <= 1e-15, "{r:?}");
        assert!((r.invariant_ratio - 4.0).abs() <= 0.2, "{r:?}");
        assert!((r.density_ratio - 2.0).abs() <= 0.1, "{r:?}");
        assert!(r.conservation_drift <= 1e-10, "{r:?}");
        assert_eq!(r.rest_positive_small, 0.0);
        assert_eq!(r.rest_negative_small, 0.0);
        assert!(r.ratio_error <= 1e-10);
        assert!(r.dispersion <= 1e-12);
        assert!(analogy_suite(&grid(), 1.0, 9, 0.5).is_err());
    }
}
