//! Mode amplitudes, the pseudo-Lagrangian, the canonical momentum and the
//! 4-momentum of a field on a periodic grid.
//!
//! A real field (`E`, `B` real) is expanded as
//!
//! ```text
//! ψ = (1/√2) Σ_{k,λ=±1} [ a(k,λ) φ⁺_{k,λ} - λ a*(k,λ) φ⁻_{k,-λ} ]
//! ```
//!
//! where `φ⁺_{k,λ} = √(ω/V) f(k,λ) e^{i(k·x - ωt)}` and
//! `φ⁻_{k,λ} = √(ω/V) g(k,λ) e^{-i(k·x - ωt)}`. The factor `-λ` and the
//! helicity flip come from `β⁰ f(k,λ)* = -λ g(k,-λ)`, which is what makes the
//! sum satisfy `ψ* = β⁰ψ`. The projection is `a(k,λ) = (√2/ω) ∫ φ⁺† ψ`.
//!
//! `(-i∂_t)⁻¹` acts on the time dependence of `ψ†`. On the mode content it is
//! `H⁺ = Ĥ/|k|²`, the pseudo-inverse of the Hamiltonian symbol, so
//! `π = i (H⁺ψ)†`. Zero-frequency content (uniform and longitudinal) lies in
//! the kernel of `H⁺` and drops out.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{hamiltonian_symbol, MatrixSet};
use crate::dynamics::{transverse_projector, FieldState};
use crate::grid::{max_norm, BoxSpec, FftNd};
use crate::modes::{f_spinor, g_spinor};
use crate::polarization::Helicity;
use crate::{Error, Matrix3C, Matrix6C, Real3, Result, Spinor6, Vector3C, C64, I};

/// Relative imaginary part of `E`, `B` tolerated by [`decompose`].
pub const REALITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    grid: BoxSpec,
    amps: BTreeMap<([i64; 3], Helicity), C64>,
}

impl ModeAmplitudes {
    pub fn new(grid: &BoxSpec) -> Self {
        Self {
            grid: grid.clone(),
            amps: BTreeMap::new(),
        }
    }

    pub fn grid(&self) -> &BoxSpec {
        &self.grid
    }

    /// Sets `a(n, λ)`. `n` must be a nonzero, non-Nyquist grid mode and `λ`
    /// transverse.
    pub fn insert(&mut self, n: [i64; 3], lambda: Helicity, a: C64) -> Result<()> {
        let ok = lambda.is_transverse()
            && n != [0, 0, 0]
            && self.grid.index_of_mode(n).is_some()
            && self.grid.index_of_mode(n.map(|v| -v)).is_some();
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "mode {n:?} with helicity {} cannot carry an amplitude",
                lambda.value()
            )));
        }
        self.amps.insert((n, lambda), a);
        Ok(())
    }

    pub fn get(&self, n: [i64; 3], lambda: Helicity) -> C64 {
        self.amps.get(&(n, lambda)).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&([i64; 3], Helicity), &C64)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// `Σ ω|a|²`.
    pub fn energy(&self) -> f64 {
        self.amps
            .iter()
            .map(|((n, _), a)| self.grid.wave_vector_of(*n).norm() * a.norm_sqr())
            .sum()
    }

    /// `Σ k|a|²`.
    pub fn momentum(&self) -> Real3 {
        self.amps
            .iter()
            .map(|((n, _), a)| self.grid.wave_vector_of(*n) * a.norm_sqr())
            .sum()
    }

    /// One row per amplitude: `k_index,n1,n2,n3,lambda,re,im,omega`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k_index,n1,n2,n3,lambda,re,im,omega")?;
        for ((n, lam), a) in &self.amps {
            let idx = self.grid.index_of_mode(*n).expect("stored modes are on the grid");
            let omega = self.grid.wave_vector_of(*n).norm();
            writeln!(
                w,
                "{idx},{},{},{},{},{:e},{:e},{:e}",
                n[0],
                n[1],
                n[2],
                lam.value(),
                a.re,
                a.im,
                omega
            )?;
        }
        Ok(())
    }
}

fn prefactor(grid: &BoxSpec, omega: f64) -> f64 {
    (omega / grid.volume()).sqrt()
}

pub fn decompose(state: &FieldState) -> Result<ModeAmplitudes> {
    let grid = state.grid();
    let scale = max_norm(state.psi()) * std::f64::consts::SQRT_2;
    let imag = state.reality_defect();
    if imag > REALITY_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NonRealField { imag });
    }
    let spec = grid.forward(state.psi());
    let dv = grid.cell_volume();
    let mut out = ModeAmplitudes::new(grid);
    for (idx, v) in spec.iter().enumerate() {
        let n = grid.mode_number(idx);
        if n == [0, 0, 0] || grid.is_nyquist(idx) {
            continue;
        }
        let k = grid.wave_vector(idx);
        let omega = k.norm();
        let c = std::f64::consts::SQRT_2 / omega * prefactor(grid, omega) * dv;
        for lam in Helicity::TRANSVERSE {
            let a = f_spinor(&k, lam)?.dotc(v) * c;
            if a != C64::from(0.0) {
                out.amps.insert((n, lam), a);
            }
        }
    }
    Ok(out)
}

/// Spectrum (forward-transform convention) of the real field built from
/// `amps`, together with the time derivative of every term.
fn synthesize(amps: &ModeAmplitudes) -> Result<(Vec<Spinor6>, Vec<Spinor6>)> {
    let grid = amps.grid();
    let count = grid.len() as f64;
    let mut spec = vec![Spinor6::zeros(); grid.len()];
    let mut dspec = vec![Spinor6::zeros(); grid.len()];
    for ((n, lam), a) in amps.iter() {
        let k = grid.wave_vector_of(*n);
        let omega = k.norm();
        let c = prefactor(grid, omega) * std::f64::consts::FRAC_1_SQRT_2 * count;
        let plus = f_spinor(&k, *lam)? * (a * c);
        let minus = g_spinor(&k, lam.flipped())? * (a.conj() * (-lam.as_f64() * c));
        let ip = grid.index_of_mode(*n).expect("validated on insert");
        let im = grid.index_of_mode(n.map(|v| -v)).expect("validated on insert");
        spec[ip] += plus;
        spec[im] += minus;
        dspec[ip] += plus * (-I * omega);
        dspec[im] += minus * (I * omega);
    }
    Ok((spec, dspec))
}

/// Field at `t = 0` from its mode amplitudes.
pub fn reconstruct(amps: &ModeAmplitudes) -> Result<FieldState> {
    let (spec, _) = synthesize(amps)?;
    FieldState::new(amps.grid().clone(), amps.grid().inverse(&spec), 0.0)
}

/// Exact `∂_t ψ` at `t = 0` for the field built from `amps`, differentiating
/// every plane-wave term analytically.
pub fn analytic_time_derivative(amps: &ModeAmplitudes) -> Result<Vec<Spinor6>> {
    let (_, dspec) = synthesize(amps)?;
    Ok(amps.grid().inverse(&dspec))
}

/// `(I₂ ⊗ δ_T)ψ` with the uniform and Nyquist components removed.
pub fn transverse_nonuniform_part(state: &FieldState) -> FieldState {
    let grid = state.grid();
    let mut spec = grid.forward(state.psi());
    for (idx, v) in spec.iter_mut().enumerate() {
        if grid.mode_number(idx) == [0, 0, 0] || grid.is_nyquist(idx) {
            *v = Spinor6::zeros();
        } else {
            let p = transverse_projector(&grid.wave_vector(idx));
            *v = crate::algebra::block_diag(&p) * *v;
        }
    }
    FieldState::new(grid.clone(), grid.inverse(&spec), state.time()).expect("same grid")
}

/// How `∂_t ψ` is obtained for [`pseudo_lagrangian_density`].
#[derive(Debug, Clone, PartialEq)]
pub enum TimeDerivative {
    /// `∂_t ψ = -iĤψ`, evaluated spectrally.
    OnShell,
    /// `∂_t ψ = 0`.
    Frozen,
    /// Caller-provided values, one per grid point.
    Supplied(Vec<Spinor6>),
}

/// `Ĥψ = -iχ·∇ψ`, spectrally.
pub fn apply_hamiltonian(grid: &BoxSpec, psi: &[Spinor6]) -> Vec<Spinor6> {
    let mut spec = grid.forward(psi);
    for (idx, v) in spec.iter_mut().enumerate() {
        *v = hamiltonian_symbol(&grid.wave_vector(idx)) * *v;
    }
    grid.inverse(&spec)
}

/// `H⁺ψ` with `H⁺(k) = (χ·k)/|k|²`, zero at `k = 0`.
pub fn apply_inverse_frequency(grid: &BoxSpec, psi: &[Spinor6]) -> Vec<Spinor6> {
    let mut spec = grid.forward(psi);
    for (idx, v) in spec.iter_mut().enumerate() {
        *v = pseudo_inverse_symbol(&grid.wave_vector(idx)) * *v;
    }
    grid.inverse(&spec)
}

fn pseudo_inverse_symbol(k: &Real3) -> Matrix6C {
    let n2 = k.norm_squared();
    if n2 == 0.0 {
        Matrix6C::zeros()
    } else {
        hamiltonian_symbol(k) / C64::from(n2)
    }
}

/// `L = ψ̄ iβ^μ∂_μ ψ = ψ†(i∂_tψ - Ĥψ)` per grid point.
///
/// The value is complex off shell; its imaginary part is a total time
/// derivative of `ψ†ψ/2` plus a spatial divergence.
pub fn pseudo_lagrangian_density(state: &FieldState, dt: &TimeDerivative) -> Result<Vec<C64>> {
    let grid = state.grid();
    let psi = state.psi();
    let h = apply_hamiltonian(grid, psi);
    let psi_dot: Vec<Spinor6> = match dt {
        TimeDerivative::OnShell => h.iter().map(|v| v * -I).collect(),
        TimeDerivative::Frozen => vec![Spinor6::zeros(); psi.len()],
        TimeDerivative::Supplied(v) => {
            grid.check_len(v.len())?;
            v.clone()
        }
    };
    Ok(psi
        .iter()
        .zip(&psi_dot)
        .zip(&h)
        .map(|((p, d), h)| p.dotc(&(d * I - h)))
        .collect())
}

/// Direct `β⁰`-sandwich form `ψ†β⁰ i(β⁰∂_t + β^j∂_j)ψ`, kept independent of
/// [`pseudo_lagrangian_density`] as an oracle.
pub fn pseudo_lagrangian_direct(state: &FieldState, psi_dot: &[Spinor6]) -> Result<Vec<C64>> {
    let grid = state.grid();
    grid.check_len(psi_dot.len())?;
    let set = MatrixSet::global();
    let spec = grid.forward(state.psi());
    let grads: [Vec<Spinor6>; 3] = std::array::from_fn(|a| {
        let s: Vec<Spinor6> = spec
            .iter()
            .enumerate()
            .map(|(idx, v)| v * (I * grid.wave_vector(idx)[a]))
            .collect();
        grid.inverse(&s)
    });
    Ok((0..grid.len())
        .map(|x| {
            let mut d = set.beta0 * psi_dot[x];
            for a in 0..3 {
                d += set.beta[a] * grads[a][x];
            }
            let bar = set.beta0 * state.psi()[x];
            bar.dotc(&(d * I))
        })
        .collect())
}

/// `π_j(x)`, stored as a column per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateField {
    pub pi: Vec<Spinor6>,
    /// Grid wave vectors whose zero-frequency content was projected out.
    pub removed_zero_modes: usize,
}

impl ConjugateField {
    /// `π(x)·v` for a column `v`.
    pub fn contract(&self, x: usize, v: &Spinor6) -> C64 {
        self.pi[x].dot(v)
    }
}

pub fn canonical_momentum(state: &FieldState) -> ConjugateField {
    let grid = state.grid();
    let spec = grid.forward(state.psi());
    let scale = spec.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut removed = 0;
    let mut inv = Vec::with_capacity(spec.len());
    for (idx, v) in spec.iter().enumerate() {
        let k = grid.wave_vector(idx);
        let p = pseudo_inverse_symbol(&k);
        // kernel content: v minus its projection onto the ±|k| eigenspaces
        let kernel = v - hamiltonian_symbol(&k) * (p * v);
        if scale > 0.0 && kernel.norm() > 1e-12 * scale {
            removed += 1;
        }
        inv.push(p * v);
    }
    let h_inv = grid.inverse(&inv);
    ConjugateField {
        pi: h_inv.iter().map(|v| v.map(|c| I * c.conj())).collect(),
        removed_zero_modes: removed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourMomentum {
    /// `∫(πψ̇ - L′)`.
    pub energy: f64,
    /// `-∫π∇ψ`.
    pub momentum: [f64; 3],
    /// `∫L′`, reported separately.
    pub l_prime: f64,
}

/// 4-momentum with `ψ̇ = -iĤψ`.
pub fn four_momentum(state: &FieldState) -> FourMomentum {
    let grid = state.grid();
    let psi = state.psi();
    let dv = grid.cell_volume();
    let pi = canonical_momentum(state);
    let h = apply_hamiltonian(grid, psi);
    let psi_dot: Vec<Spinor6> = h.iter().map(|v| v * -I).collect();
    // (-i∂_t)⁻¹ψ̄ = (H⁺ψ)†β⁰ = -iπβ⁰
    let set = MatrixSet::global();
    let mut energy = C64::from(0.0);
    let mut l_prime = C64::from(0.0);
    for x in 0..grid.len() {
        energy += pi.contract(x, &psi_dot[x]);
        let row = pi.pi[x].map(|c| -I * c);
        let resid = set.beta0 * (psi_dot[x] * I - h[x]);
        l_prime += row.dot(&(set.beta0 * resid));
    }
    let spec = grid.forward(psi);
    let mut momentum = Real3::zeros();
    for a in 0..3 {
        let d: Vec<Spinor6> = spec
            .iter()
            .enumerate()
            .map(|(idx, v)| v * (I * grid.wave_vector(idx)[a]))
            .collect();
        let grad = grid.inverse(&d);
        let s: C64 = (0..grid.len()).map(|x| pi.contract(x, &grad[x])).sum();
        momentum[a] = -(s * dv).re;
    }
    FourMomentum {
        energy: ((energy - l_prime) * dv).re,
        momentum: momentum.into(),
        l_prime: (l_prime * dv).re,
    }
}

/// The transverse delta `δ_ij - k_ik_j/|k|²` as a Fourier multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseDelta {
    grid: BoxSpec,
}

impl TransverseDelta {
    pub fn new(grid: &BoxSpec) -> Self {
        Self { grid: grid.clone() }
    }

    /// Multiplier at grid index `idx`; the identity at `k = 0`.
    pub fn multiplier(&self, idx: usize) -> Matrix3C {
        transverse_projector(&self.grid.wave_vector(idx))
    }

    pub fn apply(&self, field: &[Vector3C]) -> Vec<Vector3C> {
        let mut spec = self.grid.forward(field);
        for (idx, v) in spec.iter_mut().enumerate() {
            *v = self.multiplier(idx) * *v;
        }
        self.grid.inverse(&spec)
    }

    /// Band-limited kernel `(1/V) Σ_k δ_T(k) e^{ik·r}` at every grid
    /// separation `r`, summed over the grid modes admitted by `include`.
    pub fn kernel(&self, include: impl Fn([i64; 3]) -> bool) -> Vec<Matrix3C> {
        let g = &self.grid;
        let fft = g.fft();
        let mut out = vec![Matrix3C::zeros(); g.len()];
        let mut buf = vec![C64::from(0.0); g.len()];
        for i in 0..3 {
            for j in 0..3 {
                for (idx, b) in buf.iter_mut().enumerate() {
                    *b = if include(g.mode_number(idx)) {
                        self.multiplier(idx)[(i, j)]
                    } else {
                        C64::from(0.0)
                    };
                }
                fft.inverse(&mut buf);
                for (o, b) in out.iter_mut().zip(&buf) {
                    o[(i, j)] = b / g.cell_volume();
                }
            }
        }
        out
    }
}

/// Space-time periodic lattice for the action `A = Re Σ ψ̄ iβ^μ∂_μψ dV dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeGrid {
    pub space: BoxSpec,
    pub steps: usize,
    pub period: f64,
}

impl SpacetimeGrid {
    pub fn len(&self) -> usize {
        self.steps * self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn shape(&self) -> Vec<usize> {
        let p = self.space.points();
        vec![self.steps, p[0], p[1], p[2]]
    }

    fn omega(&self, t_index: usize) -> f64 {
        let n = t_index as i64;
        let half = (self.steps / 2) as i64;
        let m = if n < half { n } else { n - self.steps as i64 };
        2.0 * std::f64::consts::PI * m as f64 / self.period
    }

    /// Random band-limited complex field with `|m_t|, |n_a| ≤ n_max`.
    pub fn random_field(&self, seed: u64, n_max: i64) -> Vec<Spinor6> {
        let fft = FftNd::new(&self.shape());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = self.space.len();
        let mut out = vec![Spinor6::zeros(); self.len()];
        let mut buf = vec![C64::from(0.0); self.len()];
        for c in 0..6 {
            for (idx, b) in buf.iter_mut().enumerate() {
                let t = idx / space;
                let m = (self.omega(t) * self.period / (2.0 * std::f64::consts::PI)).round() as i64;
                let n = self.space.mode_number(idx % space);
                let inside = m.abs() <= n_max && n.iter().all(|v| v.abs() <= n_max);
                *b = if inside {
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    C64::from(0.0)
                };
            }
            fft.inverse(&mut buf);
            for (o, b) in out.iter_mut().zip(&buf) {
                o[c] = *b * self.len() as f64;
            }
        }
        out
    }

    /// `iβ^μ∂_μψ` with spectral derivatives in time and space.
    pub fn dirac_operator(&self, psi: &[Spinor6]) -> Vec<Spinor6> {
        let fft = FftNd::new(&self.shape());
        let space = self.space.len();
        let set = MatrixSet::global();
        let mut spec = psi.to_vec();
        transform(&fft, &mut spec, false);
        for (idx, v) in spec.iter_mut().enumerate() {
            let w = self.omega(idx / space);
            let k = self.space.wave_vector(idx % space);
            // ∂_t → iω_m, ∂_a → ik_a on e^{i(ω_m t + k·x)}
            let mut d = set.beta0 * *v * (I * w);
            for a in 0..3 {
                d += set.beta[a] * *v * (I * k[a]);
            }
            *v = d * I;
        }
        transform(&fft, &mut spec, true);
        spec
    }

    pub fn action(&self, psi: &[Spinor6]) -> f64 {
        let d = self.dirac_operator(psi);
        let beta0 = MatrixSet::global().beta0;
        let cell = self.space.cell_volume() * self.period / self.steps as f64;
        psi.iter().zip(&d).map(|(p, d)| (beta0 * p).dotc(d).re).sum::<f64>() * cell
    }

    /// `δA/δψ*`-type gradient `G = β⁰ iβ^μ∂_μψ`, with `δA = 2 Re Σ η†G`.
    pub fn action_gradient(&self, psi: &[Spinor6]) -> Vec<Spinor6> {
        let beta0 = MatrixSet::global().beta0;
        self.dirac_operator(psi).iter().map(|v| beta0 * v).collect()
    }
}

fn transform(fft: &FftNd, field: &mut [Spinor6], inverse: bool) {
    let out = crate::grid::transform_components(fft, field, inverse);
    field.copy_from_slice(&out);
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerLagrangeReport {
    /// `(h, finite-difference δA)` for every scanned step.
    pub scan: Vec<(f64, f64)>,
    pub selected_step: f64,
    pub analytic: f64,
    pub relative_error: f64,
}

/// Compares the central difference `[A(ψ+hη) - A(ψ-hη)]/2h` with
/// `2 Re Σ η†β⁰ iβ^μ∂_μψ`, selecting the step on the flattest part of the
/// scan `h ∈ {10⁻⁴ … 10⁻⁷}`.
pub fn euler_lagrange_check(
    lattice: &SpacetimeGrid,
    psi: &[Spinor6],
    eta: &[Spinor6],
) -> Result<EulerLagrangeReport> {
    if psi.len() != lattice.len() || eta.len() != lattice.len() {
        return Err(Error::ShapeMismatch {
            expected: lattice.len(),
            got: psi.len().min(eta.len()),
        });
    }
    let cell = lattice.space.cell_volume() * lattice.period / lattice.steps as f64;
    let g = lattice.action_gradient(psi);
    let analytic = 2.0 * eta.iter().zip(&g).map(|(e, g)| e.dotc(g).re).sum::<f64>() * cell;
    let shifted = |h: f64| -> Vec<Spinor6> {
        psi.iter().zip(eta).map(|(p, e)| p + e * C64::from(h)).collect()
    };
    let scan: Vec<(f64, f64)> = [1e-4, 1e-5, 1e-6, 1e-7]
        .iter()
        .map(|&h| {
            let fd = (lattice.action(&shifted(h)) - lattice.action(&shifted(-h))) / (2.0 * h);
            (h, fd)
        })
        .collect();
    let best = scan
        .windows(2)
        .min_by(|a, b| {
            let da = (a[0].1 - a[1].1).abs();
            let db = (b[0].1 - b[1].1).abs();
            da.partial_cmp(&db).unwrap()
        })
        .map(|w| w[0])
        .expect("scan has four entries");
    let denom = analytic.abs().max(f64::MIN_POSITIVE);
    Ok(EulerLagrangeReport {
        relative_error: (best.1 - analytic).abs() / denom,
        selected_step: best.0,
        analytic,
        scan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{conserved_quantities, evolve_spectral};
    use crate::modes::{sample_mode, FreqSign, ModeOptions, ModeSpec};
    use std::f64::consts::PI;

    fn cube() -> BoxSpec {
        BoxSpec::cubic(2.0 * PI, 8).unwrap()
    }

    fn max_diff(a: &[Spinor6], b: &[Spinor6]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn single_amplitude_roundtrip() {
        let g = cube();
        let a0 = C64::new(0.3, -0.7);
        let mut amps = ModeAmplitudes::new(&g);
        amps.insert([1, 2, -1], Helicity::Plus, a0).unwrap();
        let s = reconstruct(&amps).unwrap();
        assert!(s.reality_defect() <= 1e-15);
        // the positive-frequency part is exactly a₀ φ⁺/√2
        let m = ModeSpec::new(&g, [1, 2, -1], Helicity::Plus, FreqSign::Positive);
        let phi = sample_mode(&m, 0.0, &ModeOptions::default()).unwrap();
        let back = decompose(&s).unwrap();
        assert!((back.get([1, 2, -1], Helicity::Plus) - a0).norm() <= 1e-14);
        for ((n, lam), a) in back.iter() {
            if (*n, *lam) != ([1, 2, -1], Helicity::Plus) {
                assert!(a.norm() <= 1e-14, "{n:?} {lam:?} {a}");
            }
        }
        let c = conserved_quantities(&s);
        assert!((c.energy - m.omega() * a0.norm_sqr()).abs() <= 1e-13);
        assert!(phi.len() == g.len());
        assert!(amps.insert([4, 0, 0], Helicity::Plus, a0).is_err());
        assert!(amps.insert([1, 0, 0], Helicity::Zero, a0).is_err());
    }

    #[test]
    fn zero_field_and_non_real_field() {
        let g = cube();
        assert!(decompose(&FieldState::zeros(&g)).unwrap().is_empty());
        let m = ModeSpec::new(&g, [1, 0, 0], Helicity::Plus, FreqSign::Positive);
        let s = FieldState::from_mode(&m, &ModeOptions::default()).unwrap();
        assert!(matches!(decompose(&s), Err(Error::NonRealField { .. })));
    }

    #[test]
    fn random_field_roundtrip_and_parseval() {
        let g = cube();
        let s = FieldState::random_transverse(&g, 21, 3).unwrap();
        let amps = decompose(&s).unwrap();
        let r = reconstruct(&amps).unwrap();
        let target = transverse_nonuniform_part(&s);
        assert!(max_diff(r.psi(), target.psi()) <= 1e-10 * max_norm(s.psi()));
        let e_field = conserved_quantities(&s).energy;
        let e_modes = amps.energy();
        let fm = four_momentum(&s);
        assert!((e_modes - e_field).abs() <= 1e-10 * e_field);
        assert!((fm.energy - e_field).abs() <= 1e-10 * e_field);
        let p_modes = amps.momentum();
        let p_field = Real3::from(conserved_quantities(&s).momentum);
        assert!((p_modes - Real3::from(fm.momentum)).norm() <= 1e-10 * e_field);
        assert!((p_modes - p_field).norm() <= 1e-10 * e_field);
        assert!(fm.l_prime.abs() <= 1e-12 * e_field);
    }

    #[test]
    fn single_mode_four_momentum() {
        let g = BoxSpec::new([2.0, 3.0, 5.0], [8, 8, 8]).unwrap();
        let a0 = C64::new(1.5, 0.5);
        let mut amps = ModeAmplitudes::new(&g);
        amps.insert([0, 1, 2], Helicity::Minus, a0).unwrap();
        let s = reconstruct(&amps).unwrap();
        let fm = four_momentum(&s);
        let k = g.wave_vector_of([0, 1, 2]);
        assert!((fm.energy - k.norm() * a0.norm_sqr()).abs() <= 1e-12 * fm.energy);
        assert!((Real3::from(fm.momentum) - k * a0.norm_sqr()).norm() <= 1e-12 * fm.energy);
        // equal-amplitude ±k pair
        amps.insert([0, -1, -2], Helicity::Minus, a0).unwrap();
        let fm = four_momentum(&reconstruct(&amps).unwrap());
        assert!(Real3::from(fm.momentum).norm() <= 1e-12 * fm.energy);
    }

    #[test]
    fn four_momentum_is_constant_in_time() {
        let g = cube();
        let s = FieldState::random_transverse(&g, 5, 2).unwrap();
        let f0 = four_momentum(&s);
        let f1 = four_momentum(&evolve_spectral(&s, 3.7));
        assert!((f0.energy - f1.energy).abs() <= 1e-10 * f0.energy);
        let dp = Real3::from(f0.momentum) - Real3::from(f1.momentum);
        assert!(dp.norm() <= 1e-10 * f0.energy);
    }

    #[test]
    fn canonical_momentum_of_modes() {
        let g = cube();
        let m = ModeSpec::new(&g, [1, 1, 0], Helicity::Plus, FreqSign::Positive);
        let s = FieldState::from_mode(&m, &ModeOptions::default()).unwrap();
        let pi = canonical_momentum(&s);
        let w = m.omega();
        for (p, v) in pi.pi.iter().zip(s.psi()) {
            let expected = v.map(|c| I * c.conj() / w);
            assert!((p - expected).norm() <= 1e-14);
        }
        assert_eq!(pi.removed_zero_modes, 0);
        let neg = ModeSpec::new(&g, [1, 1, 0], Helicity::Plus, FreqSign::Negative);
        let s = FieldState::from_mode(&neg, &ModeOptions::default()).unwrap();
        for (p, v) in canonical_momentum(&s).pi.iter().zip(s.psi()) {
            assert!((p - v.map(|c| -I * c.conj() / w)).norm() <= 1e-14);
        }
        // uniform static field
        let u = FieldState::new(g.clone(), vec![Spinor6::from_element(C64::new(1.0, 2.0)); g.len()], 0.0)
            .unwrap();
        let pu = canonical_momentum(&u);
        assert!(pu.pi.iter().all(|p| p.norm() == 0.0));
        assert_eq!(pu.removed_zero_modes, 1);
    }

    #[test]
    fn pseudo_lagrangian_on_and_off_shell() {
        let g = cube();
        let s = FieldState::random_transverse(&g, 8, 3).unwrap();
        let amps = decompose(&s).unwrap();
        let s = reconstruct(&amps).unwrap();
        let dot = analytic_time_derivative(&amps).unwrap();
        let scale = max_norm(s.psi()).powi(2) * g.k_max();
        let l = pseudo_lagrangian_density(&s, &TimeDerivative::Supplied(dot.clone())).unwrap();
        assert!(l.iter().all(|v| v.norm() <= 1e-12 * scale));
        let direct = pseudo_lagrangian_direct(&s, &dot).unwrap();
        assert!(direct.iter().all(|v| v.norm() <= 1e-12 * scale));
        // frozen: L = -ψ†Ĥψ
        let frozen = pseudo_lagrangian_density(&s, &TimeDerivative::Frozen).unwrap();
        let oracle = pseudo_lagrangian_direct(&s, &vec![Spinor6::zeros(); g.len()]).unwrap();
        assert!(frozen.iter().any(|v| v.norm() > 1e-3 * scale));
        for (a, b) in frozen.iter().zip(&oracle) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn pseudo_lagrangian_has_dimension_minus_five() {
        // box scaled by c: mode amplitude √(ω/V) ~ c^{-2}, L ~ amplitude² × ω
        let mut values = Vec::new();
        for c in [1.0, 2.0] {
            let g = BoxSpec::cubic(2.0 * PI * c, 8).unwrap();
            let m = ModeSpec::new(&g, [1, 2, 0], Helicity::Plus, FreqSign::Positive);
            let s = FieldState::from_mode(&m, &ModeOptions::default()).unwrap();
            let l = pseudo_lagrangian_density(&s, &TimeDerivative::Frozen).unwrap();
            values.push(l[0].norm());
        }
        let exponent = (values[1] / values[0]).log2();
        assert!((exponent + 5.0).abs() <= 1e-12, "{exponent}");
    }

    #[test]
    fn transverse_delta_examples() {
        let g = cube();
        let td = TransverseDelta::new(&g);
        let idx = g.index_of_mode([0, 0, 1]).unwrap();
        let m = td.multiplier(idx);
        let expected = Matrix3C::from_diagonal(&Vector3C::new(1.0.into(), 1.0.into(), 0.0.into()));
        assert!((m - expected).norm() <= 1e-15);
        for idx in [0, 7, 100, 300] {
            let p = td.multiplier(idx);
            assert!((p * p - p).norm() <= 1e-15);
        }
        assert_eq!(td.multiplier(0), Matrix3C::identity());
        let grad: Vec<Vector3C> = (0..g.len())
            .map(|x| {
                let p = g.position(x);
                let s = (p[0] - p[2]).cos();
                Vector3C::new(s.into(), 0.0.into(), (-s).into())
            })
            .collect();
        assert!(td.apply(&grad).iter().all(|v| v.norm() <= 1e-12));
    }

    #[test]
    fn euler_lagrange_gradient() {
        let lat = SpacetimeGrid {
            space: BoxSpec::cubic(2.0 * PI, 8).unwrap(),
            steps: 8,
            period: 2.0 * PI,
        };
        let psi = lat.random_field(1, 2);
        let eta = lat.random_field(2, 2);
        let r = euler_lagrange_check(&lat, &psi, &eta).unwrap();
        assert!(r.relative_error <= 1e-6, "{r:?}");
        assert!(lat.action(&psi).is_finite());
    }
}
