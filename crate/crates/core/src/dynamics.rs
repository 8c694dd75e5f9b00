//! Time evolution of the photon wave function on a periodic grid.
//!
//! [`evolve_spectral`] applies `exp(-i(χ·k)t)` to every Fourier component.
//! Since `(χ·k)³ = |k|²(χ·k)`, the exponential has the closed form
//!
//! ```text
//! exp(-iHt) = I - i sin(|k|t)/|k| H + (cos(|k|t) - 1)/|k|² H²
//! ```
//!
//! which is exact for the spectrum `{±|k|, 0}`. [`evolve_curl`] integrates
//! `∂_t E = ∇×B`, `∂_t B = -∇×E` with a time-staggered leapfrog and spectral
//! curls, and serves as an independent classical reference.
//!
//! Snapshot layout (little endian): three `u64` grid dimensions, three `f64`
//! box lengths, one `f64` time, then for every grid point in row-major order
//! twelve `f64` values `Re ψ₁, Im ψ₁, …, Re ψ₆, Im ψ₆`.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{hamiltonian_symbol, MatrixSet};
use crate::grid::{l2_norm, BoxSpec};
use crate::modes::{f_spinor, sample_mode, ModeOptions, ModeSpec};
use crate::polarization::Helicity;
use crate::{Error, Matrix3C, Matrix6C, Real3, Result, Spinor6, Vector3C, C64, I};

/// Boundary-mass level above which angular momentum is flagged.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    grid: BoxSpec,
    psi: Vec<Spinor6>,
    time: f64,
}

impl FieldState {
    pub fn new(grid: BoxSpec, psi: Vec<Spinor6>, time: f64) -> Result<Self> {
        grid.check_len(psi.len())?;
        Ok(Self { grid, psi, time })
    }

    pub fn zeros(grid: &BoxSpec) -> Self {
        Self {
            grid: grid.clone(),
            psi: vec![Spinor6::zeros(); grid.len()],
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &BoxSpec {
        &self.grid
    }

    pub fn psi(&self) -> &[Spinor6] {
        &self.psi
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn into_psi(self) -> Vec<Spinor6> {
        self.psi
    }

    /// `ψ = (E; iB)/√2`.
    pub fn from_eb(grid: &BoxSpec, e: &[Real3], b: &[Real3], time: f64) -> Result<Self> {
        grid.check_len(e.len())?;
        grid.check_len(b.len())?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = e
            .iter()
            .zip(b)
            .map(|(e, b)| {
                Spinor6::new(
                    C64::from(e[0] * s),
                    C64::from(e[1] * s),
                    C64::from(e[2] * s),
                    C64::new(0.0, b[0] * s),
                    C64::new(0.0, b[1] * s),
                    C64::new(0.0, b[2] * s),
                )
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            psi,
            time,
        })
    }

    /// `E = √2 ψ_upper`, `B = -i√2 ψ_lower`, without discarding imaginary parts.
    pub fn to_eb_complex(&self) -> (Vec<Vector3C>, Vec<Vector3C>) {
        let r = std::f64::consts::SQRT_2;
        self.psi
            .iter()
            .map(|p| {
                let e = Vector3C::new(p[0], p[1], p[2]) * C64::from(r);
                let b = Vector3C::new(p[3], p[4], p[5]) * C64::new(0.0, -r);
                (e, b)
            })
            .unzip()
    }

    /// Real parts of [`FieldState::to_eb_complex`].
    pub fn to_eb(&self) -> (Vec<Real3>, Vec<Real3>) {
        let (e, b) = self.to_eb_complex();
        (
            e.iter().map(|v| v.map(|c| c.re)).collect(),
            b.iter().map(|v| v.map(|c| c.re)).collect(),
        )
    }

    /// Largest imaginary part of `E` or `B`.
    pub fn reality_defect(&self) -> f64 {
        let (e, b) = self.to_eb_complex();
        e.iter()
            .chain(&b)
            .flat_map(|v| v.iter().map(|c| c.im.abs()))
            .fold(0.0, f64::max)
    }

    /// Real transverse `E`, `B` with random Fourier content on `|n_a| ≤ n_max`,
    /// `n ≠ 0`.
    pub fn random_transverse(grid: &BoxSpec, seed: u64, n_max: i64) -> Result<Self> {
        if grid.points().iter().any(|&n| n_max >= (n / 2) as i64) || n_max < 1 {
            return Err(Error::InvalidParameter(format!(
                "n_max = {n_max} must be in 1..N/2 on every axis"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut e_spec = vec![Vector3C::zeros(); grid.len()];
        let mut b_spec = vec![Vector3C::zeros(); grid.len()];
        for idx in 0..grid.len() {
            let n = grid.mode_number(idx);
            if n == [0, 0, 0] || n.iter().any(|v| v.abs() > n_max) {
                continue;
            }
            let p = transverse_projector(&grid.wave_vector(idx));
            let mut draw = || {
                Vector3C::from_fn(|_, _| {
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })
            };
            e_spec[idx] = p * draw();
            b_spec[idx] = p * draw();
        }
        let re = |spec: &[Vector3C]| -> Vec<Real3> {
            grid.inverse(spec).iter().map(|v| v.map(|c| c.re)).collect()
        };
        Self::from_eb(grid, &re(&e_spec), &re(&b_spec), 0.0)
    }

    /// A single mode sampled at `t = 0`.
    pub fn from_mode(mode: &ModeSpec, opts: &ModeOptions) -> Result<Self> {
        Self::new(mode.grid.clone(), sample_mode(mode, 0.0, opts)?, 0.0)
    }

    /// `Σ c_m φ_m` at `t = 0`.
    pub fn from_modes(grid: &BoxSpec, modes: &[(ModeSpec, C64)], opts: &ModeOptions) -> Result<Self> {
        let mut psi = vec![Spinor6::zeros(); grid.len()];
        for (m, c) in modes {
            if &m.grid != grid {
                return Err(Error::MixedBox);
            }
            for (p, v) in psi.iter_mut().zip(sample_mode(m, 0.0, opts)?) {
                *p += v * *c;
            }
        }
        Self::new(grid.clone(), psi, 0.0)
    }

    /// Positive-frequency helicity beam along `z` with a single axial mode
    /// number `n_z`, a Gaussian transverse profile of intensity width `sigma`
    /// centered in the box, and unit energy.
    pub fn gaussian_beam(grid: &BoxSpec, n_z: i64, sigma: f64, helicity: Helicity) -> Result<Self> {
        if !helicity.is_transverse() || !(sigma > 0.0) {
            return Err(Error::InvalidParameter(
                "beam needs a transverse helicity and a positive width".into(),
            ));
        }
        if grid.index_of_mode([0, 0, n_z]).is_none() || n_z == 0 {
            return Err(Error::InvalidParameter(format!("axial mode {n_z} is not on the grid")));
        }
        let center = Real3::from_fn(|a, _| 0.5 * grid.lengths()[a]);
        let mut spec = vec![Spinor6::zeros(); grid.len()];
        for (idx, s) in spec.iter_mut().enumerate() {
            let n = grid.mode_number(idx);
            if n[2] != n_z || grid.is_nyquist(idx) {
                continue;
            }
            let k = grid.wave_vector(idx);
            let kt2 = k[0] * k[0] + k[1] * k[1];
            // ε(k, λ) carries e^{-iλφ_k} near the axis; undo it so the
            // spectrum is smooth and the beam has no vortex tail
            let azimuth = if kt2 > 0.0 {
                C64::new(k[0], helicity.as_f64() * k[1]) / kt2.sqrt()
            } else {
                C64::from(1.0)
            };
            let amp = (-kt2 * sigma * sigma).exp() * (-I * k.dot(&center)).exp() * azimuth;
            *s = f_spinor(&k, helicity)? * amp;
        }
        let mut psi = grid.inverse(&spec);
        let norm = l2_norm(&psi, grid.cell_volume());
        psi.iter_mut().for_each(|p| *p /= C64::from(norm));
        Self::new(grid.clone(), psi, 0.0)
    }
}

/// `I₃ - k̂k̂ᵀ`, or the identity at `k = 0`.
pub fn transverse_projector(k: &Real3) -> Matrix3C {
    let n2 = k.norm_squared();
    if n2 == 0.0 {
        return Matrix3C::identity();
    }
    Matrix3C::from_fn(|i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        C64::from(d - k[i] * k[j] / n2)
    })
}

/// `exp(-i(χ·k)t)` in closed form.
pub fn evolution_operator(k: &Real3, t: f64) -> Matrix6C {
    let w = k.norm();
    if w == 0.0 {
        return Matrix6C::identity();
    }
    let h = hamiltonian_symbol(k);
    let (s, c) = (w * t).sin_cos();
    Matrix6C::identity() - h * C64::new(0.0, s / w) + h * h * C64::from((c - 1.0) / (w * w))
}

pub fn evolve_spectral(state: &FieldState, duration: f64) -> FieldState {
    let grid = &state.grid;
    let mut spec = grid.forward(&state.psi);
    spec.par_iter_mut().enumerate().for_each(|(idx, v)| {
        *v = evolution_operator(&grid.wave_vector(idx), duration) * *v;
    });
    FieldState {
        grid: grid.clone(),
        psi: grid.inverse(&spec),
        time: state.time + duration,
    }
}

/// Spectral curl of a real vector field.
pub fn curl(grid: &BoxSpec, f: &[Real3]) -> Vec<Real3> {
    let cf: Vec<Vector3C> = f.iter().map(|v| v.map(C64::from)).collect();
    let mut spec = grid.forward(&cf);
    for (idx, v) in spec.iter_mut().enumerate() {
        let ik = grid.wave_vector(idx).map(|c| I * c);
        *v = ik.cross(v);
    }
    grid.inverse(&spec).iter().map(|v| v.map(|c| c.re)).collect()
}

/// Largest stable leapfrog step, `2/k_max`.
pub fn curl_step_bound(grid: &BoxSpec) -> f64 {
    2.0 / grid.k_max()
}

/// Leapfrog for `∂_t E = ∇×B`, `∂_t B = -∇×E`, starting and ending with
/// `E` and `B` at the same time level.
pub fn evolve_curl(
    grid: &BoxSpec,
    e: &[Real3],
    b: &[Real3],
    dt: f64,
    steps: usize,
) -> Result<(Vec<Real3>, Vec<Real3>)> {
    grid.check_len(e.len())?;
    grid.check_len(b.len())?;
    let bound = curl_step_bound(grid);
    if !(dt > 0.0 && dt < bound) {
        return Err(Error::UnstableStep { dt, bound });
    }
    let mut e = e.to_vec();
    let mut b = b.to_vec();
    if steps == 0 {
        return Ok((e, b));
    }
    let axpy = |y: &mut [Real3], a: f64, x: &[Real3]| {
        y.iter_mut().zip(x).for_each(|(y, x)| *y += x * a);
    };
    axpy(&mut b, -0.5 * dt, &curl(grid, &e));
    for step in 0..steps {
        axpy(&mut e, dt, &curl(grid, &b));
        let h = if step + 1 == steps { 0.5 * dt } else { dt };
        axpy(&mut b, -h, &curl(grid, &e));
    }
    Ok((e, b))
}

/// `Ω = I₂ ⊗ (∇∇·)`, Fourier multiplier `I₂ ⊗ (-kkᵀ)`.
pub fn omega_apply(state: &FieldState) -> FieldState {
    let grid = &state.grid;
    let mut spec = grid.forward(&state.psi);
    for (idx, v) in spec.iter_mut().enumerate() {
        *v = -(omega_symbol(&grid.wave_vector(idx)) * *v);
    }
    FieldState {
        grid: grid.clone(),
        psi: grid.inverse(&spec),
        time: state.time,
    }
}

/// `Ω̂(k) = I₂ ⊗ kkᵀ`.
pub fn omega_symbol(k: &Real3) -> Matrix6C {
    let kk = Matrix3C::from_fn(|i, j| C64::from(k[i] * k[j]));
    crate::algebra::block_diag(&kk)
}

/// Longitudinal fraction `‖(I₂ ⊗ k̂k̂ᵀ)ψ‖ / ‖ψ‖`.
///
/// This is `‖Ωψ‖/‖ψ‖` with `Ω` normalized per mode by `|k|²`, so the value
/// does not depend on the box size. Uniform content counts as transverse.
pub fn transversality_residual(state: &FieldState) -> f64 {
    let grid = &state.grid;
    let spec = grid.forward(&state.psi);
    let mut long = 0.0;
    let mut total = 0.0;
    for (idx, v) in spec.iter().enumerate() {
        total += v.norm_squared();
        let k = grid.wave_vector(idx);
        let n2 = k.norm_squared();
        if n2 > 0.0 {
            long += (omega_symbol(&k) * *v).norm_squared() / (n2 * n2);
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (long / total).sqrt()
    }
}

/// `max |(χ·k)² + I₂⊗kkᵀ - |k|² I₆|`.
pub fn factorization_residual(k: &Real3) -> f64 {
    let h = hamiltonian_symbol(k);
    let d = h * h + omega_symbol(k) - Matrix6C::identity() * C64::from(k.norm_squared());
    crate::algebra::max_abs(&d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conserved {
    pub time: f64,
    /// `∫ψ†ψ = ½∫(E² + B²)`.
    pub energy: f64,
    /// `∫ψ†χψ`, equal to `∫E×B` for real fields.
    pub momentum: [f64; 3],
    /// `⟨ψ|L̂ + S|ψ⟩` about the box center.
    pub angular_momentum: [f64; 3],
    pub transversality: f64,
    /// Fraction of `∫ψ†ψ` with `|x_a| ≥ 0.4 L_a`, per axis.
    pub boundary_mass: [f64; 3],
}

impl Conserved {
    /// Angular-momentum components whose lever arms touch the boundary.
    pub fn flagged_components(&self) -> [bool; 3] {
        std::array::from_fn(|a| {
            (0..3)
                .filter(|&b| b != a)
                .any(|b| self.boundary_mass[b] > BOUNDARY_MASS_LIMIT)
        })
    }
}

pub fn conserved_quantities(state: &FieldState) -> Conserved {
    let grid = &state.grid;
    let dv = grid.cell_volume();
    let set = MatrixSet::global();
    let psi = &state.psi;
    let spec = grid.forward(psi);
    let grads: [Vec<Spinor6>; 3] =
        std::array::from_fn(|c| crate::algebra::derivative_field(grid, &spec, &[c]));

    let mut energy = 0.0;
    let mut momentum = Real3::zeros();
    let mut angular = Real3::zeros();
    let mut edge = [0.0f64; 3];
    let lengths = grid.lengths();
    for x in 0..grid.len() {
        let p = &psi[x];
        let rho = p.norm_squared();
        energy += rho;
        let pos = grid.centered_position(x);
        for a in 0..3 {
            momentum[a] += p.dotc(&(set.chi[a] * p)).re;
            if pos[a].abs() >= 0.4 * lengths[a] {
                edge[a] += rho;
            }
            let mut l = set.spin[a] * p;
            for b in 0..3 {
                for c in 0..3 {
                    let e = crate::algebra::levi_civita(a, b, c);
                    if e != 0 {
                        l += grads[c][x] * C64::from(e as f64 * pos[b]);
                    }
                }
            }
            angular[a] += p.dotc(&l).re;
        }
    }
    let boundary_mass = if energy > 0.0 {
        edge.map(|v| v / energy)
    } else {
        [0.0; 3]
    };
    Conserved {
        time: state.time,
        energy: energy * dv,
        momentum: (momentum * dv).into(),
        angular_momentum: (angular * dv).into(),
        transversality: transversality_residual(state),
        boundary_mass,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionReport {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub momentum: Vec<[f64; 3]>,
    pub total_angular_momentum: Vec<[f64; 3]>,
    pub transversality_residual: Vec<f64>,
}

impl EvolutionReport {
    /// Conserved quantities along `evolve_spectral` from `state` at each of
    /// `times` (offsets from `state.time()`).
    pub fn sample(state: &FieldState, times: &[f64]) -> Self {
        let rows: Vec<Conserved> = times
            .par_iter()
            .map(|&t| conserved_quantities(&evolve_spectral(state, t)))
            .collect();
        Self {
            times: rows.iter().map(|r| r.time).collect(),
            energy: rows.iter().map(|r| r.energy).collect(),
            momentum: rows.iter().map(|r| r.momentum).collect(),
            total_angular_momentum: rows.iter().map(|r| r.angular_momentum).collect(),
            transversality_residual: rows.iter().map(|r| r.transversality).collect(),
        }
    }

    pub fn energy_drift(&self) -> f64 {
        scalar_drift(&self.energy)
    }

    pub fn momentum_drift(&self) -> f64 {
        vector_drift(&self.momentum)
    }

    pub fn angular_momentum_drift(&self) -> f64 {
        vector_drift(&self.total_angular_momentum)
    }
}

/// `max_t |q(t) - q(0)| / |q(0)|`, or the absolute drift when `q(0) = 0`.
fn scalar_drift(series: &[f64]) -> f64 {
    let Some(&q0) = series.first() else { return 0.0 };
    let scale = if q0 == 0.0 { 1.0 } else { q0.abs() };
    series.iter().map(|q| (q - q0).abs() / scale).fold(0.0, f64::max)
}

fn vector_drift(series: &[[f64; 3]]) -> f64 {
    let Some(q0) = series.first().map(|v| Real3::from(*v)) else { return 0.0 };
    let scale = if q0.norm() == 0.0 { 1.0 } else { q0.norm() };
    series
        .iter()
        .map(|q| (Real3::from(*q) - q0).norm() / scale)
        .fold(0.0, f64::max)
}

pub fn write_snapshot(state: &FieldState, path: &Path) -> Result<()> {
    let grid = &state.grid;
    let mut buf = Vec::with_capacity(56 + grid.len() * 96);
    for n in grid.points() {
        buf.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for l in grid.lengths() {
        buf.extend_from_slice(&l.to_le_bytes());
    }
    buf.extend_from_slice(&state.time.to_le_bytes());
    for p in &state.psi {
        for c in p.iter() {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<FieldState> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    let word = |i: usize| -> Result<[u8; 8]> {
        buf.get(8 * i..8 * i + 8)
            .map(|s| s.try_into().unwrap())
            .ok_or_else(|| Error::Io("snapshot truncated".into()))
    };
    let mut points = [0usize; 3];
    let mut lengths = [0.0; 3];
    for a in 0..3 {
        points[a] = u64::from_le_bytes(word(a)?) as usize;
        lengths[a] = f64::from_le_bytes(word(3 + a)?);
    }
    let time = f64::from_le_bytes(word(6)?);
    let grid = BoxSpec::new(lengths, points)?;
    let body = buf.len().saturating_sub(56) / 8;
    if body != grid.len() * 12 || buf.len() % 8 != 0 {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            got: body / 12,
        });
    }
    let mut psi = Vec::with_capacity(grid.len());
    for x in 0..grid.len() {
        let mut s = Spinor6::zeros();
        for c in 0..6 {
            let base = 7 + 12 * x + 2 * c;
            s[c] = C64::new(f64::from_le_bytes(word(base)?), f64::from_le_bytes(word(base + 1)?));
        }
        psi.push(s);
    }
    FieldState::new(grid, psi, time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::FreqSign;
    use std::f64::consts::PI;

    fn cube(n: usize) -> BoxSpec {
        BoxSpec::cubic(2.0 * PI, n).unwrap()
    }

    fn max_diff(a: &[Spinor6], b: &[Spinor6]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).camax()).fold(0.0, f64::max)
    }

    #[test]
    fn eb_roundtrip_and_energy() {
        let g = cube(8);
        let zero = FieldState::from_eb(&g, &vec![Real3::zeros(); g.len()], &vec![Real3::zeros(); g.len()], 0.0)
            .unwrap();
        assert!(zero.psi().iter().all(|p| p.camax() == 0.0));
        let ex = vec![Real3::x(); g.len()];
        let s = FieldState::from_eb(&g, &ex, &vec![Real3::zeros(); g.len()], 0.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(s.psi()[3], Spinor6::new(r.into(), 0.0.into(), 0.0.into(), 0.0.into(), 0.0.into(), 0.0.into()));

        let state = FieldState::random_transverse(&g, 11, 2).unwrap();
        let (e, b) = state.to_eb();
        let back = FieldState::from_eb(&g, &e, &b, 0.0).unwrap();
        let scale = crate::grid::max_norm(state.psi());
        assert!(max_diff(back.psi(), state.psi()) <= 1e-15 * scale);
        let field_energy: f64 =
            e.iter().zip(&b).map(|(e, b)| 0.5 * (e.norm_squared() + b.norm_squared())).sum::<f64>() * g.cell_volume();
        let c = conserved_quantities(&state);
        assert!((c.energy - field_energy).abs() <= 1e-13 * field_energy);
        assert_eq!(state.reality_defect(), 0.0);
        assert!(matches!(
            FieldState::from_eb(&g, &e[1..], &b, 0.0),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn evolution_operator_matches_eigendecomposition() {
        for k in [Real3::new(0.0, 0.0, 1.0), Real3::new(0.7, -1.1, 2.3)] {
            let t = 1.37;
            let h = hamiltonian_symbol(&k);
            let eig = h.symmetric_eigen();
            let d = Matrix6C::from_diagonal(&eig.eigenvalues.map(|l| (-I * l * t).exp()));
            let oracle = eig.eigenvectors * d * eig.eigenvectors.adjoint();
            let u = evolution_operator(&k, t);
            assert!(crate::algebra::max_abs(&(u - oracle)) < 1e-13);
            assert!(crate::algebra::max_abs(&(u * u.adjoint() - Matrix6C::identity())) < 1e-14);
        }
    }

    #[test]
    fn single_mode_picks_up_phase() {
        let g = cube(8);
        let m = ModeSpec::new(&g, [1, -1, 2], Helicity::Plus, FreqSign::Positive);
        let s = FieldState::from_mode(&m, &ModeOptions::default()).unwrap();
        let t = 0.83;
        let out = evolve_spectral(&s, t);
        let phase = (-I * m.omega() * t).exp();
        let expected: Vec<Spinor6> = s.psi().iter().map(|p| p * phase).collect();
        assert!(max_diff(out.psi(), &expected) <= 1e-13);
        assert_eq!(out.time(), t);
    }

    #[test]
    fn longitudinal_content_is_static() {
        let g = cube(8);
        let e: Vec<Real3> = (0..g.len())
            .map(|x| {
                let p = g.position(x);
                Real3::new(p[0].sin(), 0.0, 0.0)
            })
            .collect();
        let s = FieldState::from_eb(&g, &e, &vec![Real3::zeros(); g.len()], 0.0).unwrap();
        assert!(transversality_residual(&s) > 0.99);
        let out = evolve_spectral(&s, 5.0);
        assert!(max_diff(out.psi(), s.psi()) <= 1e-14);
    }

    #[test]
    fn unitarity_and_reversibility() {
        let g = cube(8);
        let s = FieldState::random_transverse(&g, 4, 3).unwrap();
        let n0 = l2_norm(s.psi(), g.cell_volume());
        for t in [0.1, 3.0, 250.0] {
            let f = evolve_spectral(&s, t);
            assert!((l2_norm(f.psi(), g.cell_volume()) - n0).abs() <= 1e-12 * n0);
            let back = evolve_spectral(&f, -t);
            assert!(max_diff(back.psi(), s.psi()) <= 1e-12 * crate::grid::max_norm(s.psi()));
            assert!(transversality_residual(&f) <= 1e-12);
        }
    }

    #[test]
    fn curl_scheme_converges_at_second_order() {
        let g = cube(8);
        let m = ModeSpec::new(&g, [1, 2, 0], Helicity::Minus, FreqSign::Positive);
        let s = FieldState::from_mode(&m, &ModeOptions::default()).unwrap();
        let (e0, b0) = s.to_eb();
        let t = 1.0;
        let exact = evolve_spectral(&s, t).to_eb();
        let mut errs = Vec::new();
        for steps in [40, 80, 160] {
            let (e, b) = evolve_curl(&g, &e0, &b0, t / steps as f64, steps).unwrap();
            let num: f64 = e
                .iter()
                .zip(&exact.0)
                .chain(b.iter().zip(&exact.1))
                .map(|(a, b)| (a - b).norm_squared())
                .sum();
            let den: f64 = exact.0.iter().chain(&exact.1).map(|v| v.norm_squared()).sum();
            errs.push((num / den).sqrt());
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 2.0).abs() <= 0.1, "order {order}");
        }
    }

    #[test]
    fn curl_rejects_large_steps_and_keeps_zero() {
        let g = cube(8);
        let z = vec![Real3::zeros(); g.len()];
        let bound = curl_step_bound(&g);
        assert!(matches!(evolve_curl(&g, &z, &z, bound, 1), Err(Error::UnstableStep { .. })));
        let (e, b) = evolve_curl(&g, &z, &z, 0.5 * bound, 10).unwrap();
        assert!(e.iter().chain(&b).all(|v| v.norm() == 0.0));
    }

    #[test]
    fn omega_on_gradient_and_plane_wave() {
        let g = cube(8);
        let m = ModeSpec::new(&g, [2, 0, 1], Helicity::Plus, FreqSign::Negative);
        let s = FieldState::from_mode(&m, &ModeOptions::default()).unwrap();
        assert!(crate::grid::max_norm(omega_apply(&s).psi()) <= 1e-12);
        // E = ∇φ with φ = cos(x + 2y): ∇∇·E = ∇(∇²φ) = -5 E
        let e: Vec<Real3> = (0..g.len())
            .map(|x| {
                let p = g.position(x);
                let s = -(p[0] + 2.0 * p[1]).sin();
                Real3::new(s, 2.0 * s, 0.0)
            })
            .collect();
        let st = FieldState::from_eb(&g, &e, &vec![Real3::zeros(); g.len()], 0.0).unwrap();
        let out = omega_apply(&st);
        let expected: Vec<Spinor6> = st.psi().iter().map(|p| p * C64::from(-5.0)).collect();
        assert!(max_diff(out.psi(), &expected) <= 1e-12);
        for k in [Real3::new(1.0, 2.0, 3.0), Real3::new(-0.1, 0.0, 7.5)] {
            assert!(factorization_residual(&k) <= 1e-12 * k.norm_squared());
        }
    }

    #[test]
    fn conserved_quantities_examples() {
        let g = cube(8);
        let m = ModeSpec::new(&g, [1, 0, 0], Helicity::Plus, FreqSign::Positive);
        let s = FieldState::from_mode(&m, &ModeOptions::default()).unwrap();
        let c = conserved_quantities(&s);
        assert!((c.energy - m.omega()).abs() <= 1e-13);
        // standing wave
        let pair = [
            (m.clone(), C64::from(1.0)),
            (ModeSpec::new(&g, [-1, 0, 0], Helicity::Plus, FreqSign::Positive), C64::from(1.0)),
        ];
        let sw = FieldState::from_modes(&g, &pair, &ModeOptions::default()).unwrap();
        let c = conserved_quantities(&sw);
        assert!(Real3::from(c.momentum).norm() <= 1e-13);
        assert!(c.energy > 0.0);
    }

    #[test]
    fn momentum_is_poynting_vector() {
        let g = cube(8);
        let s = FieldState::random_transverse(&g, 9, 2).unwrap();
        let (e, b) = s.to_eb();
        let poynting: Real3 = e.iter().zip(&b).map(|(e, b)| e.cross(b)).sum::<Real3>() * g.cell_volume();
        let c = conserved_quantities(&s);
        assert!((Real3::from(c.momentum) - poynting).norm() <= 1e-12 * poynting.norm().max(1.0));
    }

    #[test]
    fn beam_angular_momentum_is_conserved() {
        let l = 2.0 * PI;
        let g = BoxSpec::new([l, l, l / 80.0], [64, 64, 4]).unwrap();
        let s = FieldState::gaussian_beam(&g, 1, l / 24.0, Helicity::Plus).unwrap();
        let c0 = conserved_quantities(&s);
        assert!((c0.energy - 1.0).abs() < 1e-12);
        assert!(c0.angular_momentum[2] > 0.0);
        assert!(!c0.flagged_components()[2], "{c0:?}");
        let times: Vec<f64> = (0..=8).map(|i| i as f64 * l / 8.0).collect();
        let rep = EvolutionReport::sample(&s, &times);
        assert!(rep.energy_drift() <= 1e-8);
        assert!(rep.momentum_drift() <= 1e-8);
        assert!(rep.angular_momentum_drift() <= 1e-8, "{}", rep.angular_momentum_drift());
    }

    #[test]
    fn snapshot_roundtrip() {
        let g = BoxSpec::new([1.0, 2.0, 3.0], [4, 4, 6]).unwrap();
        let s = evolve_spectral(&FieldState::random_transverse(&g, 3, 1).unwrap(), 0.25);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.bin");
        write_snapshot(&s, &path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 56 + 96 * g.len() as u64);
        assert_eq!(read_snapshot(&path).unwrap(), s);
    }
}
