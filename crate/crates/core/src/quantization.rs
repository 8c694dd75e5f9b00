//! Truncated Fock spaces and the canonical commutators of the mode expansion.
//!
//! Modes are kept in lexicographic `(n, λ)` order and the Fock basis is the
//! Kronecker product in that order, first mode most significant. Each mode is
//! truncated at occupation `n_max`.
//!
//! The field operator follows the expansion
//! `ψ = (1/√2) Σ [a φ⁺_{k,λ} + a† φ⁻_{k,λ}]` with the `φ±` of [`crate::modes`]
//! and `π = i(H⁺ψ)†` as in [`crate::observables`]. Each term of `[ψ_i, π_j]`
//! contributes `(i/2)(1/V)(f_i f_j*e^{ik·r} + g_i g_j*e^{-ik·r})`, and the
//! helicity sum of either product over the upper block is `δ_T(k)/2`. The
//! two `1/√2` factors of the expansion and of `ψ = (E; iB)/√2` are the origin
//! of the overall `1/2`.

use std::io::Write;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::grid::BoxSpec;
use crate::modes::{f_spinor, g_spinor};
use crate::observables::TransverseDelta;
use crate::polarization::Helicity;
use crate::{Error, Matrix3C, Real3, Result, Spinor6, C64, I};

/// Largest Fock-space dimension built.
pub const FOCK_DIMENSION_LIMIT: usize = 256;

pub type OperatorMatrix = DMatrix<C64>;

#[derive(Debug, Clone, PartialEq)]
pub struct FockModel {
    grid: BoxSpec,
    modes: Vec<([i64; 3], Helicity)>,
    n_max: usize,
}

impl FockModel {
    pub fn new(grid: &BoxSpec, modes: &[([i64; 3], Helicity)], n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        let mut modes = modes.to_vec();
        modes.sort();
        modes.dedup();
        if modes.is_empty() {
            return Err(Error::InvalidParameter("a Fock model needs at least one mode".into()));
        }
        for (n, lam) in &modes {
            if !lam.is_transverse() || *n == [0, 0, 0] {
                return Err(Error::InvalidParameter(format!(
                    "mode {n:?} with helicity {} has no quanta",
                    lam.value()
                )));
            }
        }
        let mut dim: usize = 1;
        for _ in &modes {
            dim = dim.saturating_mul(n_max + 1);
        }
        if dim > FOCK_DIMENSION_LIMIT {
            return Err(Error::BudgetExceeded {
                what: "Fock dimension",
                size: dim,
                limit: FOCK_DIMENSION_LIMIT,
            });
        }
        Ok(Self {
            grid: grid.clone(),
            modes,
            n_max,
        })
    }

    pub fn grid(&self) -> &BoxSpec {
        &self.grid
    }

    pub fn modes(&self) -> &[([i64; 3], Helicity)] {
        &self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dimension(&self) -> usize {
        (self.n_max + 1).pow(self.modes.len() as u32)
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.modes
            .iter()
            .map(|(n, _)| self.grid.wave_vector_of(*n).norm())
            .collect()
    }

    /// Occupation numbers of basis state `index`.
    pub fn occupations(&self, index: usize) -> Vec<usize> {
        let base = self.n_max + 1;
        let mut rest = index;
        let mut occ = vec![0; self.modes.len()];
        for slot in occ.iter_mut().rev() {
            *slot = rest % base;
            rest /= base;
        }
        occ
    }

    /// Basis states with every occupation below `n_max`.
    pub fn safe_states(&self) -> Vec<usize> {
        (0..self.dimension())
            .filter(|&s| self.occupations(s).iter().all(|&o| o < self.n_max))
            .collect()
    }
}

/// Single-mode annihilator on `n_max + 1` levels, `a|n⟩ = √n|n-1⟩`.
pub fn single_mode_annihilator(n_max: usize) -> OperatorMatrix {
    let mut a = DMatrix::zeros(n_max + 1, n_max + 1);
    for n in 1..=n_max {
        a[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    a
}

/// `(a_m, a_m†)` for every mode, embedded in the full space.
pub fn ladder_operators(model: &FockModel) -> Vec<(OperatorMatrix, OperatorMatrix)> {
    let local = single_mode_annihilator(model.n_max);
    let id = DMatrix::<C64>::identity(model.n_max + 1, model.n_max + 1);
    (0..model.modes.len())
        .map(|m| {
            let mut a = DMatrix::<C64>::identity(1, 1);
            for slot in 0..model.modes.len() {
                a = a.kronecker(if slot == m { &local } else { &id });
            }
            let ad = a.adjoint();
            (a, ad)
        })
        .collect()
}

pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a * b - b * a
}

/// `H = Σ ω_m (a_m† a_m + ½)`.
pub fn hamiltonian_operator(model: &FockModel) -> OperatorMatrix {
    let ops = ladder_operators(model);
    let dim = model.dimension();
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for ((a, ad), w) in ops.iter().zip(model.frequencies()) {
        h += (ad * a + DMatrix::<C64>::identity(dim, dim) * C64::from(0.5)) * C64::from(w);
    }
    h
}

/// `p = Σ k_m a_m† a_m`, one matrix per axis.
pub fn momentum_operator(model: &FockModel) -> [OperatorMatrix; 3] {
    let ops = ladder_operators(model);
    let dim = model.dimension();
    std::array::from_fn(|axis| {
        let mut p = DMatrix::<C64>::zeros(dim, dim);
        for ((a, ad), (n, _)) in ops.iter().zip(&model.modes) {
            p += ad * a * C64::from(model.grid.wave_vector_of(*n)[axis]);
        }
        p
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub energy: f64,
    pub occupations: Vec<usize>,
}

/// Eigenvalues of `H` from a Hermitian eigensolver, each labeled with the
/// occupation state whose analytic energy `Σ ω(n + ½)` is closest.
pub fn spectrum(model: &FockModel) -> Vec<SpectrumLevel> {
    let h = hamiltonian_operator(model);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let w = model.frequencies();
    let mut labels: Vec<(f64, Vec<usize>)> = (0..model.dimension())
        .map(|s| {
            let occ = model.occupations(s);
            let e = occ.iter().zip(&w).map(|(&n, w)| w * (n as f64 + 0.5)).sum();
            (e, occ)
        })
        .collect();
    labels.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    ev.into_iter()
        .zip(labels)
        .map(|(energy, (_, occupations))| SpectrumLevel {
            energy,
            occupations,
        })
        .collect()
}

/// `energy,n_0,n_1,…` with a one-line header.
pub fn write_spectrum_csv<W: Write>(levels: &[SpectrumLevel], mut w: W) -> Result<()> {
    let modes = levels.first().map_or(0, |l| l.occupations.len());
    let header: Vec<String> = (0..modes).map(|m| format!("n_{m}")).collect();
    writeln!(w, "energy,{}", header.join(","))?;
    for l in levels {
        let occ: Vec<String> = l.occupations.iter().map(|n| n.to_string()).collect();
        writeln!(w, "{:e},{}", l.energy, occ.join(","))?;
    }
    Ok(())
}

fn positive_mode(grid: &BoxSpec, n: [i64; 3], lam: Helicity, x: &Real3) -> Result<Spinor6> {
    let k = grid.wave_vector_of(n);
    let c = (k.norm() / grid.volume()).sqrt();
    Ok(f_spinor(&k, lam)? * ((I * k.dot(x)).exp() * c))
}

fn negative_mode(grid: &BoxSpec, n: [i64; 3], lam: Helicity, x: &Real3) -> Result<Spinor6> {
    let k = grid.wave_vector_of(n);
    let c = (k.norm() / grid.volume()).sqrt();
    Ok(g_spinor(&k, lam)? * ((-I * k.dot(x)).exp() * c))
}

/// Field operator components `ψ_c(x)` at `t = 0`.
pub fn field_operator(model: &FockModel, x: &Real3) -> Result<[OperatorMatrix; 6]> {
    let ops = ladder_operators(model);
    let dim = model.dimension();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: [OperatorMatrix; 6] = std::array::from_fn(|_| DMatrix::zeros(dim, dim));
    for ((a, ad), (n, lam)) in ops.iter().zip(&model.modes) {
        let p = positive_mode(&model.grid, *n, *lam, x)?;
        let m = negative_mode(&model.grid, *n, *lam, x)?;
        for c in 0..6 {
            out[c] += a * (p[c] * s) + ad * (m[c] * s);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeisenbergReport {
    /// `max |i[H, ψ] - ∂_tψ|` over the truncation-safe block, relative to
    /// the largest field-operator entry.
    pub residual: f64,
    /// Same over the whole truncated space.
    pub full_residual: f64,
    /// `max |⟨0|ψ(x)|0⟩|`.
    pub vacuum_mean: f64,
    /// `max |⟨0|ψ(x)ψ(y)†|0⟩ - ½Σ φ⁺(x)φ⁺(y)†|` over the sample pairs.
    pub two_point: f64,
}

/// Compares `i[H, ψ(x)]` with the analytic derivative of the expansion at a
/// few sample points.
pub fn heisenberg_evolution_check(model: &FockModel) -> Result<HeisenbergReport> {
    let h = hamiltonian_operator(model);
    let ops = ladder_operators(model);
    let grid = &model.grid;
    let dim = model.dimension();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let points: Vec<Real3> = [0usize, 1, grid.len() / 3, grid.len() - 1]
        .iter()
        .map(|&i| grid.position(i))
        .collect();
    let safe = model.safe_states();
    let mut worst: f64 = 0.0;
    let mut worst_full: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut vacuum: f64 = 0.0;
    let mut fields = Vec::new();
    for x in &points {
        let psi = field_operator(model, x)?;
        let mut dot: [OperatorMatrix; 6] = std::array::from_fn(|_| DMatrix::zeros(dim, dim));
        for ((a, ad), (n, lam)) in ops.iter().zip(&model.modes) {
            let w = grid.wave_vector_of(*n).norm();
            let p = positive_mode(grid, *n, *lam, x)?;
            let m = negative_mode(grid, *n, *lam, x)?;
            for c in 0..6 {
                dot[c] += a * (p[c] * s * (-I * w)) + ad * (m[c] * s * (I * w));
            }
        }
        for c in 0..6 {
            let r = commutator(&h, &psi[c]) * I - &dot[c];
            scale = scale.max(psi[c].iter().map(|v| v.norm()).fold(0.0, f64::max));
            worst_full = worst_full.max(r.iter().map(|v| v.norm()).fold(0.0, f64::max));
            for &i in &safe {
                for &j in &safe {
                    worst = worst.max(r[(i, j)].norm());
                }
            }
            vacuum = vacuum.max(psi[c][(0, 0)].norm());
        }
        fields.push(psi);
    }
    let mut two_point: f64 = 0.0;
    for (xi, px) in points.iter().zip(&fields) {
        for (yi, py) in points.iter().zip(&fields) {
            let mut expected = nalgebra::Matrix6::<C64>::zeros();
            for (n, lam) in &model.modes {
                let a = positive_mode(grid, *n, *lam, xi)?;
                let b = positive_mode(grid, *n, *lam, yi)?;
                expected += a * b.adjoint() * C64::from(0.5);
            }
            for i in 0..6 {
                for j in 0..6 {
                    let v = (&px[i] * py[j].adjoint())[(0, 0)];
                    two_point = two_point.max((v - expected[(i, j)]).norm());
                }
            }
        }
    }
    let scale = scale.max(f64::MIN_POSITIVE);
    Ok(HeisenbergReport {
        residual: worst / scale,
        full_residual: worst_full / scale,
        vacuum_mean: vacuum,
        two_point,
    })
}

/// `[a_i, a_j†] - δ_ij I` and `[a_i, a_j]` over all pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderReport {
    /// Largest deviation on the truncation-safe block.
    pub safe_block: f64,
    /// Largest `|[a_i, a_j]|` entry.
    pub annihilator_commutator: f64,
    /// Diagonal of `[a, a†]` for the first mode with the others in vacuum.
    pub single_mode_diagonal: Vec<f64>,
}

pub fn ladder_commutator_check(model: &FockModel) -> LadderReport {
    let ops = ladder_operators(model);
    let dim = model.dimension();
    let safe = model.safe_states();
    let mut safe_block: f64 = 0.0;
    let mut aa: f64 = 0.0;
    for (i, (ai, _)) in ops.iter().enumerate() {
        for (j, (aj, adj)) in ops.iter().enumerate() {
            let mut c = commutator(ai, adj);
            if i == j {
                c -= DMatrix::<C64>::identity(dim, dim);
            }
            for &r in &safe {
                for &s in &safe {
                    safe_block = safe_block.max(c[(r, s)].norm());
                }
            }
            aa = aa.max(commutator(ai, aj).iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
    }
    let (a, ad) = &ops[0];
    let c = commutator(a, ad);
    let stride = dim / (model.n_max + 1);
    let single_mode_diagonal = (0..=model.n_max).map(|n| c[(n * stride, n * stride)].re).collect();
    LadderReport {
        safe_block,
        annihilator_commutator: aa,
        single_mode_diagonal,
    }
}

/// Operator linear in the ladder operators: `Σ_m (lower_m a_m + raise_m a_m†)`.
#[derive(Debug, Clone, PartialEq)]
struct LinearOperator {
    lower: Vec<C64>,
    raise: Vec<C64>,
}

impl LinearOperator {
    /// c-number `[A, B]` from `[a_m, a_n†] = δ_mn`.
    fn commutator(&self, other: &Self) -> C64 {
        self.lower
            .iter()
            .zip(&other.raise)
            .zip(self.raise.iter().zip(&other.lower))
            .map(|((l, r), (r2, l2))| l * r - r2 * l2)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub modes: usize,
    /// `max |[ψ_i(x), π_j(0)] - (i/2)δ_T,ij(x)|` over both diagonal blocks,
    /// relative to `max |δ_T|/2`.
    pub transverse_block: f64,
    /// Largest cross-block entry, same scale.
    pub cross_block: f64,
    /// Largest change between the commutator at `(x, 0)` and at `(x + y, y)`.
    pub translation: f64,
    /// Deviation from the opposite-sign target `-(i/2)δ_T`.
    pub opposite_sign: f64,
}

impl CommutatorReport {
    pub fn max(&self) -> f64 {
        self.transverse_block.max(self.cross_block).max(self.translation)
    }
}

fn field_linear(grid: &BoxSpec, modes: &[([i64; 3], Helicity)], x: &Real3) -> Result<[LinearOperator; 6]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: [LinearOperator; 6] = std::array::from_fn(|_| LinearOperator {
        lower: Vec::with_capacity(modes.len()),
        raise: Vec::with_capacity(modes.len()),
    });
    for (n, lam) in modes {
        let p = positive_mode(grid, *n, *lam, x)?;
        let m = negative_mode(grid, *n, *lam, x)?;
        for c in 0..6 {
            out[c].lower.push(p[c] * s);
            out[c].raise.push(m[c] * s);
        }
    }
    Ok(out)
}

/// `π_j(y) = i(H⁺ψ)_j(y)†`: `H⁺` multiplies `φ⁺` by `1/ω` and `φ⁻` by `-1/ω`.
fn momentum_linear(grid: &BoxSpec, modes: &[([i64; 3], Helicity)], y: &Real3) -> Result<[LinearOperator; 6]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: [LinearOperator; 6] = std::array::from_fn(|_| LinearOperator {
        lower: Vec::with_capacity(modes.len()),
        raise: Vec::with_capacity(modes.len()),
    });
    for (n, lam) in modes {
        let w = grid.wave_vector_of(*n).norm();
        let p = positive_mode(grid, *n, *lam, y)?;
        let m = negative_mode(grid, *n, *lam, y)?;
        for c in 0..6 {
            // (a φ⁺/ω - a† φ⁻/ω)† = a† φ⁺*/ω - a φ⁻*/ω
            out[c].raise.push(I * p[c].conj() * (s / w));
            out[c].lower.push(-I * m[c].conj() * (s / w));
        }
    }
    Ok(out)
}

/// Grid modes `n ≠ 0` with `max |n_a| ≤ cutoff`, both helicities. The cutoff
/// must stay below the Nyquist index so the set is closed under `n → -n`.
pub fn mode_set(grid: &BoxSpec, cutoff: i64) -> Result<Vec<([i64; 3], Helicity)>> {
    if grid.points().iter().any(|&p| cutoff >= (p / 2) as i64) || cutoff < 1 {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} must lie in 1..N/2 on every axis"
        )));
    }
    let mut out = Vec::new();
    for idx in 0..grid.len() {
        let n = grid.mode_number(idx);
        if n != [0, 0, 0] && n.iter().all(|v| v.abs() <= cutoff) {
            for lam in Helicity::TRANSVERSE {
                out.push((n, lam));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `[ψ_i(x), π_j(y)]` as a finite mode sum over `modes`, compared with
/// `(i/2)` times the band-limited transverse delta of `target_cutoff`
/// (upper and lower blocks) and zero (cross blocks), for every grid `x` at
/// `y = 0`. Translation invariance is probed at one extra `y`.
pub fn field_commutator_check(
    grid: &BoxSpec,
    modes: &[([i64; 3], Helicity)],
    target_cutoff: i64,
) -> Result<CommutatorReport> {
    let kernel = TransverseDelta::new(grid)
        .kernel(|n| n != [0, 0, 0] && n.iter().all(|v| v.abs() <= target_cutoff));
    let scale = kernel
        .iter()
        .flat_map(|m| m.iter().map(|v| v.norm()))
        .fold(0.0, f64::max)
        * 0.5;
    let origin = Real3::zeros();
    let shift_idx = grid.len() / 2 + 3;
    let shift = grid.position(shift_idx);
    let pi0 = momentum_linear(grid, modes, &origin)?;
    let pis = momentum_linear(grid, modes, &shift)?;
    let mut transverse: f64 = 0.0;
    let mut cross: f64 = 0.0;
    let mut translation: f64 = 0.0;
    let mut opposite: f64 = 0.0;
    for x in 0..grid.len() {
        let pos = grid.position(x);
        let psi = field_linear(grid, modes, &pos)?;
        let psi_shifted = field_linear(grid, modes, &(pos + shift))?;
        let target: Matrix3C = kernel[x] * (I * 0.5);
        for i in 0..6 {
            for j in 0..6 {
                let v = psi[i].commutator(&pi0[j]);
                let moved = psi_shifted[i].commutator(&pis[j]);
                translation = translation.max((v - moved).norm());
                if (i < 3) == (j < 3) {
                    let t = target[(i % 3, j % 3)];
                    transverse = transverse.max((v - t).norm());
                    opposite = opposite.max((v + t).norm());
                } else {
                    cross = cross.max(v.norm());
                }
            }
        }
    }
    Ok(CommutatorReport {
        modes: modes.len(),
        transverse_block: transverse / scale,
        cross_block: cross / scale,
        translation: translation / scale,
        opposite_sign: opposite / scale,
    })
}

/// Deviation of [`field_commutator_check`] from the full band-limited delta
/// at `grid` for increasing mode cutoffs.
pub fn commutator_cutoff_sweep(grid: &BoxSpec, cutoffs: &[i64]) -> Result<Vec<(i64, f64)>> {
    let full = grid.points().iter().map(|&p| (p / 2) as i64 - 1).min().unwrap_or(1);
    cutoffs
        .iter()
        .map(|&c| {
            let r = field_commutator_check(grid, &mode_set(grid, c)?, full)?;
            Ok((c, r.transverse_block))
        })
        .collect()
}
