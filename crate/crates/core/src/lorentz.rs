//! Infinitesimal Lorentz transformations of the six-spinor and the
//! first-order invariance of the pseudo-Lagrangian.
//!
//! `ε^{μν}` is stored with upper indices and `Λ = I - (i/2) ε^{μν} Σ_{μν}`
//! sums over both index orders. A rotation by `θ` about axis `n` has
//! `ε^{lm} = θ ε_{lmn}` and gives `Λ = I - iθ S_n`; a boost parameter `η`
//! along `l` has `ε^{l0} = -ε^{0l} = η` and gives `Λ = I + η χ_l`, which maps
//! `E → E - η e_l × B`, `B → B + η e_l × E`.
//!
//! Derivatives are evaluated spectrally on shell: `∂_0 ψ = -iĤψ`,
//! `∂_j ψ = ∂ψ/∂x^j`, and `∂^j = -∂_j`.

use serde::Serialize;

use crate::algebra::{commutator, derivative_field, levi_civita, metric, MatrixSet};
use crate::dynamics::{transversality_residual, FieldState};
use crate::grid::max_norm;
use crate::observables::apply_hamiltonian;
use crate::{Error, Matrix6C, Real3, Result, Spinor6, C64, I};

/// Largest `|ε^{μν}|` accepted.
pub const EPSILON_LIMIT: f64 = 1e-2;

/// Threshold for longitudinal or uniform content in [`delta_l_check`].
pub const TRANSVERSE_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfinitesimalLorentz {
    eps: [[f64; 4]; 4],
}

impl InfinitesimalLorentz {
    pub fn new(eps: [[f64; 4]; 4]) -> Result<Self> {
        for mu in 0..4 {
            for nu in 0..4 {
                if eps[mu][nu] != -eps[nu][mu] {
                    return Err(Error::InvalidParameter(format!(
                        "ε^{{{mu}{nu}}} = {} is not antisymmetric",
                        eps[mu][nu]
                    )));
                }
                if !eps[mu][nu].is_finite() || eps[mu][nu].abs() > EPSILON_LIMIT {
                    return Err(Error::InvalidParameter(format!(
                        "|ε^{{{mu}{nu}}}| = {} exceeds {EPSILON_LIMIT}",
                        eps[mu][nu]
                    )));
                }
            }
        }
        Ok(Self { eps })
    }

    pub fn identity() -> Self {
        Self { eps: [[0.0; 4]; 4] }
    }

    /// Rotation by `angle` about spatial axis `axis` (0, 1, 2).
    pub fn rotation(axis: usize, angle: f64) -> Result<Self> {
        let mut eps = [[0.0; 4]; 4];
        for l in 0..3 {
            for m in 0..3 {
                eps[l + 1][m + 1] = angle * levi_civita(l, m, axis) as f64;
            }
        }
        Self::new(eps)
    }

    /// Boost with parameter `eta` along spatial axis `axis` (0, 1, 2).
    pub fn boost(axis: usize, eta: f64) -> Result<Self> {
        let mut eps = [[0.0; 4]; 4];
        eps[axis + 1][0] = eta;
        eps[0][axis + 1] = -eta;
        Self::new(eps)
    }

    pub fn upper(&self) -> [[f64; 4]; 4] {
        self.eps
    }

    /// `ε_{μν} = g_{μμ} g_{νν} ε^{μν}`.
    pub fn lower(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|mu| std::array::from_fn(|nu| metric(mu) * metric(nu) * self.eps[mu][nu]))
    }

    pub fn magnitude(&self) -> f64 {
        self.eps.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `ε^{μν} Σ_{μν}`.
    pub fn generator(&self) -> Matrix6C {
        let set = MatrixSet::global();
        let mut g = Matrix6C::zeros();
        for mu in 0..4 {
            for nu in 0..4 {
                if self.eps[mu][nu] != 0.0 {
                    g += set.sigma[mu][nu] * C64::from(self.eps[mu][nu]);
                }
            }
        }
        g
    }

    /// `Λ = I - (i/2) ε^{μν} Σ_{μν}`.
    pub fn lambda(&self) -> Matrix6C {
        Matrix6C::identity() - self.generator() * (I * 0.5)
    }
}

/// `ψ'(x') = Λψ(x)` pointwise.
pub fn spinor_transform(psi: &[Spinor6], eps: &InfinitesimalLorentz) -> Vec<Spinor6> {
    let l = eps.lambda();
    psi.iter().map(|v| l * v).collect()
}

/// `‖β⁰Λ†β⁰Λ - I‖_max`.
pub fn pseudo_unitarity_defect(eps: &InfinitesimalLorentz) -> f64 {
    let b0 = MatrixSet::global().beta0;
    let l = eps.lambda();
    let d = b0 * l.adjoint() * b0 * l - Matrix6C::identity();
    d.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `ψ̄φ = ψ†β⁰φ`.
pub fn bar_product(psi: &Spinor6, phi: &Spinor6) -> C64 {
    psi.dotc(&(MatrixSet::global().beta0 * phi))
}

/// Lower-index derivatives `∂_μψ` of an on-shell field.
pub fn on_shell_derivatives(state: &FieldState) -> [Vec<Spinor6>; 4] {
    let grid = state.grid();
    let spec = grid.forward(state.psi());
    let h = apply_hamiltonian(grid, state.psi());
    let d0: Vec<Spinor6> = h.iter().map(|v| v * -I).collect();
    let spatial: [Vec<Spinor6>; 3] = std::array::from_fn(|a| {
        derivative_field(grid, &spec, &[a]).into_iter().map(|v| v * I).collect()
    });
    let [d1, d2, d3] = spatial;
    [d0, d1, d2, d3]
}

/// Coefficient matrices of `i[β^μ, Σ_{ρλ}]∂_μ`, indexed by `μ`.
pub fn commutator_coefficients(rho: usize, lambda: usize) -> [Matrix6C; 4] {
    let set = MatrixSet::global();
    std::array::from_fn(|mu| commutator(set.beta_upper(mu), &set.sigma[rho][lambda]) * I)
}

/// Coefficient matrices of `β_ρ∂_λ - β_λ∂_ρ`, indexed by `μ`.
pub fn antisymmetric_coefficients(rho: usize, lambda: usize) -> [Matrix6C; 4] {
    let set = MatrixSet::global();
    std::array::from_fn(|mu| {
        let mut m = Matrix6C::zeros();
        if mu == lambda {
            m += set.beta_lower(rho);
        }
        if mu == rho {
            m -= set.beta_lower(lambda);
        }
        m
    })
}

/// Largest entry of the per-`μ` difference between the two sides of the
/// invariance condition for the pair `(ρ, λ)`, with no field involved.
pub fn coefficient_mismatch(rho: usize, lambda: usize) -> f64 {
    let a = antisymmetric_coefficients(rho, lambda);
    let b = commutator_coefficients(rho, lambda);
    a.iter()
        .zip(&b)
        .flat_map(|(x, y)| (x - y).iter().map(|v| v.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

fn bilinear(psi: &[Spinor6], d: &[Vec<Spinor6>; 4], coeff: &[Matrix6C; 4]) -> Vec<C64> {
    (0..psi.len())
        .map(|x| {
            let mut acc = Spinor6::zeros();
            for mu in 0..4 {
                acc += coeff[mu] * d[mu][x];
            }
            bar_product(&psi[x], &acc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairMismatch {
    pub rho: usize,
    pub lambda: usize,
    /// `max |ψ̄(β_ρ∂_λ - β_λ∂_ρ)ψ - ψ̄ i[β^μ, Σ_{ρλ}]∂_μψ|`, relative to the
    /// field scale.
    pub mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaLReport {
    /// `max|ψ| · max_μ max|∂_μψ|`.
    pub field_scale: f64,
    pub pairs: Vec<PairMismatch>,
    /// Largest relative mismatch over spatial pairs.
    pub rotation: f64,
    /// Largest relative mismatch over mixed time-space pairs.
    pub boost: f64,
    /// Largest relative value of `ψ̄[-(β·∂)χ_l + β⁰∂^l]ψ` over `l`, with
    /// `β·∂ = β^j∂^j`.
    pub reduced_boost: f64,
    /// `max |L_T - L|` for the supplied `ε`, relative to the field scale.
    pub delta_l: f64,
    /// `max |L|`, relative to the field scale.
    pub lagrangian: f64,
}

/// Evaluates both sides of the invariance condition for every pair
/// `ρ < λ` and the transformed density `L_T` for `eps`.
pub fn delta_l_check(state: &FieldState, eps: &InfinitesimalLorentz) -> Result<DeltaLReport> {
    let psi = state.psi();
    let scale_psi = max_norm(psi);
    let long = transversality_residual(state);
    let uniform = psi.iter().sum::<Spinor6>().norm() / psi.len() as f64 / scale_psi.max(f64::MIN_POSITIVE);
    let worst = long.max(uniform);
    if worst > TRANSVERSE_LIMIT {
        return Err(Error::NonTransverse { residual: worst });
    }
    let d = on_shell_derivatives(state);
    let scale = (scale_psi * d.iter().map(|v| max_norm(v)).fold(0.0, f64::max)).max(f64::MIN_POSITIVE);
    let set = MatrixSet::global();

    let mut pairs = Vec::new();
    let (mut rotation, mut boost): (f64, f64) = (0.0, 0.0);
    for rho in 0..4 {
        for lambda in rho + 1..4 {
            let lhs = bilinear(psi, &d, &antisymmetric_coefficients(rho, lambda));
            let rhs = bilinear(psi, &d, &commutator_coefficients(rho, lambda));
            let m = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
            if rho == 0 {
                boost = boost.max(m);
            } else {
                rotation = rotation.max(m);
            }
            pairs.push(PairMismatch { rho, lambda, mismatch: m });
        }
    }

    let mut reduced: f64 = 0.0;
    for l in 0..3 {
        let mut coeff = [Matrix6C::zeros(); 4];
        // -(β^j∂^j) = β^j∂_j
        for j in 0..3 {
            coeff[j + 1] += set.beta[j] * set.chi[l];
        }
        // β⁰∂^l = -β⁰∂_l
        coeff[l + 1] -= set.beta0;
        let v = bilinear(psi, &d, &coeff);
        reduced = reduced.max(v.iter().map(|c| c.norm()).fold(0.0, f64::max) / scale);
    }

    let (lt, l0) = transformed_density(psi, &d, eps);
    let delta_l = lt.iter().zip(&l0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    let lagrangian = l0.iter().map(|c| c.norm()).fold(0.0, f64::max) / scale;
    Ok(DeltaLReport {
        field_scale: scale,
        pairs,
        rotation,
        boost,
        reduced_boost: reduced,
        delta_l,
        lagrangian,
    })
}

/// `(L_T, L)` with `L_T = ψ̄β⁰Λ†β⁰(iβ^μ a_{μν}∂^ν)Λψ` and
/// `a_{μν}∂^ν = ∂_μ + ε_{μν}∂^ν`.
fn transformed_density(psi: &[Spinor6], d: &[Vec<Spinor6>; 4], eps: &InfinitesimalLorentz) -> (Vec<C64>, Vec<C64>) {
    let set = MatrixSet::global();
    let lam = eps.lambda();
    let left = set.beta0 * lam.adjoint() * set.beta0;
    let low = eps.lower();
    (0..psi.len())
        .map(|x| {
            let mut plain = Spinor6::zeros();
            let mut moved = Spinor6::zeros();
            for mu in 0..4 {
                let mut dmu = d[mu][x];
                for nu in 0..4 {
                    if low[mu][nu] != 0.0 {
                        // ∂^ν = g^{νν} ∂_ν
                        dmu += d[nu][x] * C64::from(low[mu][nu] * metric(nu));
                    }
                }
                plain += set.beta_upper(mu) * d[mu][x];
                moved += set.beta_upper(mu) * (lam * dmu);
            }
            let lt = bar_product(&psi[x], &(left * moved * I));
            let l0 = bar_product(&psi[x], &(plain * I));
            (lt, l0)
        })
        .unzip()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub amplitudes: Vec<f64>,
    pub values: Vec<f64>,
    /// Smallest log-log slope between consecutive amplitudes.
    pub order: f64,
}

fn slopes(amplitudes: &[f64], values: &[f64]) -> f64 {
    amplitudes
        .windows(2)
        .zip(values.windows(2))
        .map(|(a, v)| (v[0] / v[1]).ln() / (a[0] / a[1]).ln())
        .fold(f64::INFINITY, f64::min)
}

/// `max |L_T - L|` for `make(a)` at each amplitude and the observed order.
pub fn delta_l_scaling(
    state: &FieldState,
    amplitudes: &[f64],
    make: impl Fn(f64) -> Result<InfinitesimalLorentz>,
) -> Result<ScalingReport> {
    let values = amplitudes
        .iter()
        .map(|&a| Ok(delta_l_check(state, &make(a)?)?.delta_l))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingReport {
        amplitudes: amplitudes.to_vec(),
        order: slopes(amplitudes, &values),
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarInvariants {
    /// `E² - B²` pointwise.
    pub s1: Vec<f64>,
    /// `ψ̄ψ` pointwise.
    pub bar_density: Vec<C64>,
    /// `max |s1 - 2 Re ψ̄ψ|`.
    pub mismatch: f64,
}

pub fn scalar_invariants(e: &[Real3], b: &[Real3]) -> Result<ScalarInvariants> {
    if e.len() != b.len() {
        return Err(Error::ShapeMismatch {
            expected: e.len(),
            got: b.len(),
        });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let s1: Vec<f64> = e.iter().zip(b).map(|(e, b)| e.norm_squared() - b.norm_squared()).collect();
    let bar_density: Vec<C64> = e
        .iter()
        .zip(b)
        .map(|(e, b)| {
            let psi = Spinor6::from_fn(|i, _| {
                if i < 3 {
                    C64::from(e[i] * s)
                } else {
                    I * (b[i - 3] * s)
                }
            });
            bar_product(&psi, &psi)
        })
        .collect();
    let mismatch = s1
        .iter()
        .zip(&bar_density)
        .map(|(s, d)| (s - 2.0 * d.re).abs())
        .fold(0.0, f64::max);
    Ok(ScalarInvariants {
        s1,
        bar_density,
        mismatch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoostChange {
    /// `max |ψ̄'ψ' - ψ̄ψ|`.
    pub bar_density: f64,
    /// `max |ψ'†ψ' - ψ†ψ|`.
    pub density: f64,
}

pub fn boost_change(psi: &[Spinor6], eps: &InfinitesimalLorentz) -> BoostChange {
    let moved = spinor_transform(psi, eps);
    let (mut bar, mut dens): (f64, f64) = (0.0, 0.0);
    for (a, b) in psi.iter().zip(&moved) {
        bar = bar.max((bar_product(b, b) - bar_product(a, a)).norm());
        dens = dens.max((b.norm_squared() - a.norm_squared()).abs());
    }
    BoostChange {
        bar_density: bar,
        density: dens,
    }
}
