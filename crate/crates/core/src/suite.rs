//! Named verification checks grouped by topic, shared by the command-line
//! `check` task and the acceptance tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{levi_civita, verify_spin_orbit_commutator, MatrixSet};
use crate::dirac::{analogy_suite, equivalence_check, gamma_anticommutator_defect, random_field, sample_plane_wave, split, maxwell_like_residual, Spin};
use crate::dynamics::{conserved_quantities, evolve_curl, evolve_spectral, transversality_residual, EvolutionReport, FieldState};
use crate::greens::{defining_property, epsilon_sweep, omega_hat, position_space_propagator, square_identity_residual, transverse_delta_symbol, PropagatorLattice};
use crate::grid::{l2_norm, max_norm, BoxSpec};
use crate::lorentz::{boost_change, coefficient_mismatch, delta_l_check, delta_l_scaling, pseudo_unitarity_defect, scalar_invariants, InfinitesimalLorentz};
use crate::modes::{completeness_check, dirac_residual, dispersion_spectrum, f_spinor, g_spinor, helicity_operator, orthonormality_check, FreqSign, ModeOptions, ModeSpec};
use crate::observables::{analytic_time_derivative, decompose, euler_lagrange_check, four_momentum, pseudo_lagrangian_density, reconstruct, SpacetimeGrid, TimeDerivative};
use crate::polarization::{verify_polarization_identities, Helicity};
use crate::quantization::{commutator_cutoff_sweep, field_commutator_check, heisenberg_evolution_check, ladder_commutator_check, mode_set, spectrum, FockModel};
use crate::{Matrix3C, Matrix6C, Real3, Result, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// Passes when `value ≤ tolerance`.
    Le,
    /// Passes when `value ≥ tolerance`.
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            comparison: Comparison::Le,
            pass: value <= tolerance,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance: bound,
            comparison: Comparison::Ge,
            pass: value >= bound,
        }
    }

    /// `|value - target| ≤ tolerance`, recorded as the deviation.
    pub fn near(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Self::at_most(name, (value - target).abs(), tolerance)
    }

    /// Multiplies upper-bound tolerances by `scale`; lower bounds are kept.
    pub fn rescaled(mut self, scale: f64) -> Self {
        if self.comparison == Comparison::Le {
            self.tolerance *= scale;
            self.pass = self.value <= self.tolerance;
        }
        self
    }
}

/// Default tolerances; every field can be overridden from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub machine: f64,
    pub spin_orbit: f64,
    pub ladder: f64,
    pub hamiltonian: f64,
    pub conservation: f64,
    pub euler_lagrange: f64,
    pub commutator: f64,
    pub boost_pair: f64,
    pub dirac_ratio: f64,
    pub dirac_conservation: f64,
    pub lattice: f64,
    pub curl_order: f64,
    pub scaling_order_min: f64,
    pub ratio: f64,
    pub first_order_ratio: f64,
    pub epsilon_order: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            machine: 1e-12,
            spin_orbit: 1e-10,
            ladder: 1e-13,
            hamiltonian: 1e-10,
            conservation: 1e-8,
            euler_lagrange: 1e-6,
            commutator: 1e-10,
            boost_pair: 1e-10,
            dirac_ratio: 1e-10,
            dirac_conservation: 1e-10,
            lattice: 1e-10,
            curl_order: 0.1,
            scaling_order_min: 1.9,
            ratio: 0.2,
            first_order_ratio: 0.1,
            epsilon_order: 0.05,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> std::result::Result<(), String> {
        let all = [
            ("machine", self.machine),
            ("spin_orbit", self.spin_orbit),
            ("ladder", self.ladder),
            ("hamiltonian", self.hamiltonian),
            ("conservation", self.conservation),
            ("euler_lagrange", self.euler_lagrange),
            ("commutator", self.commutator),
            ("boost_pair", self.boost_pair),
            ("dirac_ratio", self.dirac_ratio),
            ("dirac_conservation", self.dirac_conservation),
            ("lattice", self.lattice),
            ("curl_order", self.curl_order),
            ("scaling_order_min", self.scaling_order_min),
            ("ratio", self.ratio),
            ("first_order_ratio", self.first_order_ratio),
            ("epsilon_order", self.epsilon_order),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerance {name} = {v} must be positive"));
            }
        }
        Ok(())
    }
}

/// Shared inputs of the suites.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteParams {
    pub grid: BoxSpec,
    pub seed: u64,
    pub tol: Tolerances,
}

impl SuiteParams {
    pub fn standard(seed: u64) -> Self {
        Self {
            grid: BoxSpec::cubic(2.0 * std::f64::consts::PI, 16).expect("valid box"),
            seed,
            tol: Tolerances::default(),
        }
    }
}

pub const CRITERIA: [&str; 11] = [
    "algebra identities",
    "dispersion",
    "polarization",
    "modes",
    "completeness",
    "dynamics",
    "observables",
    "quantization",
    "lorentz",
    "dirac analogy",
    "greens",
];

/// Checks for criterion `n` in `1..=11`.
pub fn criterion(n: usize, p: &SuiteParams) -> Result<Vec<Check>> {
    match n {
        1 => {
            let mut c = algebra_checks();
            c.push(Check::at_most(
                "algebra.spin_orbit_commutator",
                verify_spin_orbit_commutator(&p.grid, p.seed)?,
                p.tol.spin_orbit,
            ));
            Ok(c)
        }
        2 => Ok(dispersion_checks(p)),
        3 => polarization_checks(p),
        4 => mode_checks(p),
        5 => completeness_checks(p),
        6 => dynamics_checks(p),
        7 => observable_checks(p),
        8 => quantization_checks(p),
        9 => lorentz_checks(p),
        10 => dirac_checks(p),
        11 => greens_checks(p),
        _ => Err(crate::Error::InvalidParameter(format!("no criterion {n}"))),
    }
}

/// Every criterion in order.
pub fn all_checks(p: &SuiteParams) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=CRITERIA.len() {
        out.extend(criterion(n, p)?);
    }
    Ok(out)
}

fn worst<const R: usize, const C: usize>(m: &nalgebra::SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn random_vector(r: &mut ChaCha8Rng, scale: f64) -> Real3 {
    Real3::new(
        r.random_range(-scale..scale),
        r.random_range(-scale..scale),
        r.random_range(-scale..scale),
    )
}

pub fn algebra_checks() -> Vec<Check> {
    let s = MatrixSet::global();
    let mut tau_comm: f64 = 0.0;
    let mut hermitian: f64 = 0.0;
    for l in 0..3 {
        hermitian = hermitian.max(worst(&(s.tau[l].adjoint() - s.tau[l])));
        for m in 0..3 {
            let mut rhs = Matrix3C::zeros();
            for n in 0..3 {
                let e = levi_civita(l, m, n);
                if e != 0 {
                    rhs += s.tau[n] * (I * e as f64);
                }
            }
            let lhs = s.tau[l] * s.tau[m] - s.tau[m] * s.tau[l];
            tau_comm = tau_comm.max(worst(&(lhs - rhs)));
        }
    }
    let beta0_sq = worst(&(s.beta0 * s.beta0 - Matrix6C::identity()));
    let ss: Matrix6C = s.spin.iter().map(|m| m * m).sum();
    let casimir = worst(&(ss - Matrix6C::identity() * C64::from(2.0)));
    let mut boost_gen: f64 = 0.0;
    let mut rot_comm: f64 = 0.0;
    let mut chi_conj: f64 = 0.0;
    let mut rot_spin: f64 = 0.0;
    for l in 1..4 {
        boost_gen = boost_gen.max(worst(&(s.sigma[l][0] - s.chi[l - 1] * I)));
        boost_gen = boost_gen.max(worst(&(s.sigma[0][l] + s.sigma[l][0])));
        chi_conj = chi_conj.max(worst(&(s.beta0 * s.chi[l - 1] * s.beta0 + s.chi[l - 1])));
        for m in 1..4 {
            let c = s.beta0 * s.sigma[l][m] - s.sigma[l][m] * s.beta0;
            rot_comm = rot_comm.max(worst(&c));
            let mut e = Matrix6C::zeros();
            for n in 0..3 {
                e += s.spin[n] * C64::from(levi_civita(l - 1, m - 1, n) as f64);
            }
            rot_spin = rot_spin.max(worst(&(s.sigma[l][m] - e)));
        }
    }
    vec![
        Check::at_most("algebra.tau_commutator", tau_comm, 0.0),
        Check::at_most("algebra.tau_hermitian", hermitian, 0.0),
        Check::at_most("algebra.beta0_square", beta0_sq, 0.0),
        Check::at_most("algebra.spin_square", casimir, 0.0),
        Check::at_most("algebra.boost_generator", boost_gen, 0.0),
        Check::at_most("algebra.rotation_generator", rot_spin, 0.0),
        Check::at_most("algebra.beta0_rotation_commutator", rot_comm, 0.0),
        Check::at_most("algebra.beta0_chi_conjugation", chi_conj, 0.0),
    ]
}

pub fn dispersion_checks(p: &SuiteParams) -> Vec<Check> {
    let mut r = rng(p.seed, 1);
    let mut err: f64 = 0.0;
    for _ in 0..100 {
        let k = random_vector(&mut r, 3.0);
        let w = k.norm();
        let ev = dispersion_spectrum(&k);
        let expected = [w, w, 0.0, 0.0, -w, -w];
        for (a, b) in ev.iter().zip(expected) {
            err = err.max((a - b).abs() / w.max(1.0));
        }
    }
    vec![Check::at_most("dispersion.eigenvalues", err, p.tol.machine)]
}

pub fn polarization_checks(p: &SuiteParams) -> Result<Vec<Check>> {
    let mut r = rng(p.seed, 2);
    let mut err: f64 = 0.0;
    let mut near_axis = 0;
    for i in 0..100 {
        let k = if i % 10 == 0 {
            // κ in [1e-12, 1e-9)
            let kappa = 10f64.powf(r.random_range(-12.0..-9.0));
            let phi = r.random_range(0.0..std::f64::consts::TAU);
            let sign = if i % 20 == 0 { -1.0 } else { 1.0 };
            near_axis += 1;
            Real3::new(kappa * phi.cos(), kappa * phi.sin(), sign)
        } else {
            let v = random_vector(&mut r, 1.0);
            v / v.norm()
        };
        err = err.max(verify_polarization_identities(&k)?.max());
    }
    Ok(vec![
        Check::at_most("polarization.identities", err, p.tol.machine),
        Check::at_least("polarization.near_axis_cases", near_axis as f64, 10.0),
    ])
}

pub fn mode_checks(p: &SuiteParams) -> Result<Vec<Check>> {
    let g = &p.grid;
    let opts = ModeOptions::default();
    let mut modes = Vec::new();
    let mut dirac: f64 = 0.0;
    for n in [[1, 0, 0], [0, 1, 1], [-1, 2, 0], [2, 2, 2], [0, 0, -3], [1, -1, 1]] {
        for lam in Helicity::TRANSVERSE {
            for sign in [FreqSign::Positive, FreqSign::Negative] {
                let m = ModeSpec::new(g, n, lam, sign);
                dirac = dirac.max(dirac_residual(&m, &opts)?);
                modes.push(m);
            }
        }
    }
    let ortho = orthonormality_check(g, &modes, &opts)?.max_residual;
    let mut r = rng(p.seed, 3);
    let mut g_lambda_f: f64 = 0.0;
    for _ in 0..50 {
        let k = random_vector(&mut r, 2.0);
        for lam in Helicity::TRANSVERSE {
            let d = g_spinor(&k, lam)? - f_spinor(&k, lam)? * C64::from(lam.as_f64());
            g_lambda_f = g_lambda_f.max(d.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
    }
    Ok(vec![
        Check::at_most("modes.orthonormality", ortho, p.tol.machine),
        Check::at_most("modes.dirac_residual", dirac, p.tol.machine),
        Check::at_most("modes.g_equals_lambda_f", g_lambda_f, 0.0),
    ])
}

pub fn completeness_checks(p: &SuiteParams) -> Result<Vec<Check>> {
    let mut r = rng(p.seed, 4);
    let (mut sym, mut defect): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let k = random_vector(&mut r, 3.0);
        let rep = completeness_check(&k)?;
        sym = sym.max(worst(&rep.symmetrized) / rep.omega);
        defect = defect.max(worst(&(rep.helicity_block() - helicity_operator(&k))));
    }
    Ok(vec![
        Check::at_most("completeness.symmetrized", sym, p.tol.machine),
        Check::at_most("completeness.single_k_defect", defect, p.tol.machine),
    ])
}

/// Relative L2 errors of the curl scheme against the spectral solution for
/// a plane wave on an `8³` box, at 40, 80 and 160 steps over unit time.
pub fn curl_convergence() -> Result<Vec<f64>> {
    let g = BoxSpec::cubic(2.0 * std::f64::consts::PI, 8)?;
    let m = ModeSpec::new(&g, [1, 2, 0], Helicity::Minus, FreqSign::Positive);
    let s = FieldState::from_mode(&m, &ModeOptions::default())?;
    let (e0, b0) = s.to_eb();
    let exact = evolve_spectral(&s, 1.0).to_eb();
    let den: f64 = exact.0.iter().chain(&exact.1).map(|v| v.norm_squared()).sum();
    [40usize, 80, 160]
        .iter()
        .map(|&steps| {
            let (e, b) = evolve_curl(&g, &e0, &b0, 1.0 / steps as f64, steps)?;
            let num: f64 = e
                .iter()
                .zip(&exact.0)
                .chain(b.iter().zip(&exact.1))
                .map(|(a, b)| (a - b).norm_squared())
                .sum();
            Ok((num / den).sqrt())
        })
        .collect()
}

/// Localized paraxial beam in a flat box, sampled over one crossing time.
pub fn beam_report() -> Result<(EvolutionReport, [bool; 3])> {
    let l = 2.0 * std::f64::consts::PI;
    let g = BoxSpec::new([l, l, l / 80.0], [64, 64, 4])?;
    let s = FieldState::gaussian_beam(&g, 1, l / 24.0, Helicity::Plus)?;
    let flags = conserved_quantities(&s).flagged_components();
    let times: Vec<f64> = (0..=8).map(|i| i as f64 * l / 8.0).collect();
    Ok((EvolutionReport::sample(&s, &times), flags))
}

pub fn dynamics_checks(p: &SuiteParams) -> Result<Vec<Check>> {
    let g = &p.grid;
    let s = FieldState::random_transverse(g, p.seed, 3)?;
    let n0 = l2_norm(s.psi(), g.cell_volume());
    let scale = max_norm(s.psi());
    let (mut unit, mut rev, mut trans): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for t in [0.1, 3.0, 250.0] {
        let f = evolve_spectral(&s, t);
        unit = unit.max((l2_norm(f.psi(), g.cell_volume()) - n0).abs() / n0);
        let back = evolve_spectral(&f, -t);
        let d = back.psi().iter().zip(s.psi()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        rev = rev.max(d / scale);
        trans = trans.max(transversality_residual(&f));
    }
    let errs = curl_convergence()?;
    let order_dev = errs
        .windows(2)
        .map(|w| ((w[0] / w[1]).log2() - 2.0).abs())
        .fold(0.0, f64::max);
    let (rep, flags) = beam_report()?;
    Ok(vec![
        Check::at_most("dynamics.unitarity", unit, p.tol.machine),
        Check::at_most("dynamics.reversibility", rev, p.tol.machine),
        Check::at_most("dynamics.transversality_preserved", trans, p.tol.machine),
        Check::at_most("dynamics.curl_order_deviation", order_dev, p.tol.curl_order),
        Check::at_most("dynamics.energy_drift", rep.energy_drift(), p.tol.conservation),
        Check::at_most("dynamics.momentum_drift", rep.momentum_drift(), p.tol.conservation),
        Check::at_most("dynamics.angular_momentum_drift", rep.angular_momentum_drift(), p.tol.conservation),
        Check::at_most("dynamics.axial_angular_momentum_flagged", f64::from(u8::from(flags[2])), 0.0),
    ])
}

pub fn observable_checks(p: &SuiteParams) -> Result<Vec<Check>> {
    let g = &p.grid;
    let s0 = FieldState::random_transverse(g, p.seed.wrapping_add(1), 3)?;
    let amps = decompose(&s0)?;
    let s = reconstruct(&amps)?;
    let dot = analytic_time_derivative(&amps)?;
    let scale = max_norm(s.psi()).powi(2) * g.k_max();
    let l = pseudo_lagrangian_density(&s, &TimeDerivative::Supplied(dot))?;
    let on_shell = l.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale;

    let field = conserved_quantities(&s0);
    let fm = four_momentum(&s0);
    let modes = amps.energy();
    let h = (fm.energy - modes).abs().max((modes - field.energy).abs()) / field.energy;
    let pm = amps.momentum();
    let pf = Real3::from(field.momentum);
    let pdev = (Real3::from(fm.momentum) - pm).norm().max((pm - pf).norm()) / field.energy;

    let lat = SpacetimeGrid {
        space: BoxSpec::cubic(2.0 * std::f64::consts::PI, 8)?,
        steps: 8,
        period: 2.0 * std::f64::consts::PI,
    };
    let psi = lat.random_field(p.seed, 2);
    let eta = lat.random_field(p.seed.wrapping_add(1), 2);
    let el = euler_lagrange_check(&lat, &psi, &eta)?;
    Ok(vec![
        Check::at_most("observables.on_shell_lagrangian", on_shell, p.tol.machine),
        Check::at_most("observables.hamiltonian_identity", h, p.tol.hamiltonian),
        Check::at_most("observables.momentum_identity", pdev, p.tol.hamiltonian),
        Check::at_most("observables.euler_lagrange", el.relative_error, p.tol.euler_lagrange),
    ])
}

pub fn quantization_checks(p: &SuiteParams) -> Result<Vec<Check>> {
    let g = BoxSpec::cubic(2.0 * std::f64::consts::PI, 8)?;
    let n_max = 4;
    let single = FockModel::new(&g, &[([1, 2, 0], Helicity::Plus)], n_max)?;
    let diag = ladder_commutator_check(&single).single_mode_diagonal;
    let ladder = diag
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let target = if n == n_max { -(n_max as f64) } else { 1.0 };
            (v - target).abs()
        })
        .fold(0.0, f64::max);
    let w = single.frequencies()[0];
    let levels = spectrum(&single);
    let spacing = levels
        .windows(2)
        .map(|l| (l[1].energy - l[0].energy - w).abs() / w)
        .fold(0.0, f64::max);

    let modes = [([1, 0, 0], Helicity::Plus), ([0, 1, 1], Helicity::Minus), ([1, -1, 0], Helicity::Plus)];
    let three = FockModel::new(&g, &modes, n_max)?;
    let zp: f64 = three.frequencies().iter().sum::<f64>() * 0.5;
    let ground = (spectrum(&three)[0].energy - zp).abs() / zp;
    let multi = ladder_commutator_check(&three);
    let heis = heisenberg_evolution_check(&three)?;

    let full = 3;
    let comm = field_commutator_check(&g, &mode_set(&g, full)?, full)?;
    let sweep = commutator_cutoff_sweep(&g, &[1, 2, 3])?;
    let increase = sweep
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    Ok(vec![
        Check::at_most("quantization.single_mode_commutator", ladder, p.tol.ladder),
        Check::at_most("quantization.multi_mode_commutator", multi.safe_block.max(multi.annihilator_commutator), p.tol.ladder),
        Check::at_most("quantization.ladder_spacing", spacing, p.tol.machine),
        Check::at_most("quantization.ground_energy", ground, p.tol.machine),
        Check::at_most("quantization.field_commutator", comm.transverse_block, p.tol.commutator),
        Check::at_most("quantization.field_commutator_cross_block", comm.cross_block, p.tol.commutator),
        Check::at_most("quantization.field_commutator_translation", comm.translation, p.tol.commutator),
        Check::at_most("quantization.cutoff_sweep_increase", increase, 0.0),
        Check::at_most("quantization.heisenberg", heis.residual, p.tol.machine),
        Check::at_most("quantization.vacuum_mean", heis.vacuum_mean, p.tol.machine),
        Check::at_most("quantization.two_point", heis.two_point, p.tol.machine),
    ])
}

pub fn lorentz_checks(p: &SuiteParams) -> Result<Vec<Check>> {
    let mut case2: f64 = 0.0;
    let mut case1: f64 = 0.0;
    for rho in 0..4 {
        case1 = case1.max(coefficient_mismatch(rho, rho));
        for lam in 1..4 {
            if rho > 0 {
                case2 = case2.max(coefficient_mismatch(rho, lam));
            }
        }
    }
    let g = BoxSpec::cubic(2.0 * std::f64::consts::PI, 8)?;
    let s = FieldState::random_transverse(&g, p.seed, 2)?;
    let r = delta_l_check(&s, &InfinitesimalLorentz::boost(0, 1e-3)?)?;
    let eps = [1e-2, 1e-3, 1e-4];
    let mut order = f64::INFINITY;
    for axis in 0..3 {
        order = order.min(delta_l_scaling(&s, &eps, |a| InfinitesimalLorentz::boost(axis, a))?.order);
        order = order.min(delta_l_scaling(&s, &eps, |a| InfinitesimalLorentz::rotation(axis, a))?.order);
    }
    let a = boost_change(s.psi(), &InfinitesimalLorentz::boost(1, 1e-3)?);
    let b = boost_change(s.psi(), &InfinitesimalLorentz::boost(1, 2e-3)?);
    let pu1 = pseudo_unitarity_defect(&InfinitesimalLorentz::boost(2, 1e-3)?);
    let pu2 = pseudo_unitarity_defect(&InfinitesimalLorentz::boost(2, 2e-3)?);
    let (e, bf) = s.to_eb();
    let inv = scalar_invariants(&e, &bf)?;
    Ok(vec![
        Check::at_most("lorentz.case1_identity", case1, 0.0),
        Check::at_most("lorentz.case2_identity", case2, 0.0),
        Check::at_most("lorentz.rotation_pairs", r.rotation, p.tol.machine),
        Check::at_most("lorentz.boost_pairs", r.boost, p.tol.boost_pair),
        Check::at_most("lorentz.reduced_boost_bilinear", r.reduced_boost, p.tol.boost_pair),
        Check::at_least("lorentz.delta_l_order", order, p.tol.scaling_order_min),
        Check::near("lorentz.bar_density_ratio", b.bar_density / a.bar_density, 4.0, p.tol.ratio),
        Check::near("lorentz.density_ratio", b.density / a.density, 2.0, p.tol.first_order_ratio),
        Check::near("lorentz.pseudo_unitarity_ratio", pu2 / pu1, 4.0, p.tol.ratio),
        Check::at_most("lorentz.scalar_invariant", inv.mismatch, p.tol.machine),
    ])
}

pub fn dirac_checks(p: &SuiteParams) -> Result<Vec<Check>> {
    let g = BoxSpec::cubic(2.0 * std::f64::consts::PI, 8)?;
    let mass = 1.0;
    let psi = random_field(&g, p.seed, 2);
    let dot = random_field(&g, p.seed.wrapping_add(1), 2);
    let eq = equivalence_check(&g, mass, &psi, &dot)?;
    let mut plane: f64 = 0.0;
    for sign in [FreqSign::Positive, FreqSign::Negative] {
        for spin in [Spin::Up, Spin::Down] {
            let (psi, dot) = sample_plane_wave(&g, [1, -2, 1], spin, sign, mass, 0.4)?;
            let (c, ph) = split(&psi);
            let (cd, pd) = split(&dot);
            let (a, b) = maxwell_like_residual(&g, mass, &c, &ph, &cd, &pd)?;
            plane = plane.max(a.iter().chain(&b).map(|v| v.norm()).fold(0.0, f64::max));
        }
    }
    let r = analogy_suite(&g, mass, p.seed, 1e-3)?;
    Ok(vec![
        Check::at_most("dirac.gamma_anticommutator", gamma_anticommutator_defect(), 0.0),
        Check::at_most("dirac.equivalence", eq.map_residual.max(eq.norm_residual) / eq.scale, p.tol.machine),
        Check::at_most("dirac.plane_wave_residual", plane, p.tol.machine),
        Check::at_least("dirac.coupling", r.coupling, f64::MIN_POSITIVE),
        Check::at_most("dirac.swap_symmetry", r.swap_residual, p.tol.machine),
        Check::at_most("dirac.photon_duality", r.photon_duality, p.tol.machine),
        Check::near("dirac.boost_invariant_ratio", r.invariant_ratio, 4.0, p.tol.ratio),
        Check::at_most("dirac.conservation", r.conservation_drift, p.tol.dirac_conservation),
        Check::at_most("dirac.rest_small_components", r.rest_positive_small.max(r.rest_negative_small), 0.0),
        Check::at_most("dirac.component_ratio", r.ratio_error, p.tol.dirac_ratio),
        Check::at_most("dirac.dispersion", r.dispersion, p.tol.machine),
    ])
}

pub fn greens_checks(p: &SuiteParams) -> Result<Vec<Check>> {
    let mut exact: f64 = 0.0;
    for n in [[2, 0, 0, 1], [1, 1, -1, 2], [0, 3, 4, 0], [5, -2, 1, 3]] {
        exact = exact.max(square_identity_residual(&n.map(|v| v as f64)));
    }
    let mut r = rng(p.seed, 5);
    let (mut random, mut defining, mut proj): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..50 {
        let k: [f64; 4] = std::array::from_fn(|_| r.random_range(-3.0..3.0));
        let k2: f64 = k.iter().map(|v| v * v).sum();
        random = random.max(square_identity_residual(&k) / k2);
        defining = defining.max(defining_property(&k, 1e-3)?.0);
        proj = proj.max(worst(&(omega_hat(&k) * transverse_delta_symbol(&k)?)) / k2);
    }
    let sweep = epsilon_sweep(&[1.3, 0.2, -0.7, 0.5], &[1e-2, 1e-3, 1e-4, 1e-5])?;
    let lat = PropagatorLattice::standard(16, 1e-12);
    let (_, rep) = position_space_propagator(&lat)?;
    Ok(vec![
        Check::at_most("greens.square_identity_exact", exact, 0.0),
        Check::at_most("greens.square_identity", random, p.tol.machine),
        Check::at_most("greens.omega_kills_transverse", proj, p.tol.machine),
        Check::at_most("greens.defining_property", defining, p.tol.machine),
        Check::near("greens.epsilon_order", sweep.order, 1.0, p.tol.epsilon_order),
        Check::at_most("greens.lattice_dalembertian", rep.d_alembert_residual, p.tol.lattice),
        Check::at_most("greens.lattice_symmetry", rep.symmetry_residual, p.tol.machine),
        Check::at_most("greens.far_field_change", rep.far_field_change, lat.epsilon),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_constructors() {
        assert!(Check::at_most("a", 0.0, 0.0).pass);
        assert!(!Check::at_most("a", 1e-9, 1e-10).pass);
        assert!(Check::at_most("a", 1e-9, 1e-10).rescaled(100.0).pass);
        assert!(!Check::at_least("b", 1.8, 1.9).rescaled(100.0).pass);
        let n = Check::near("c", 4.1, 4.0, 0.2);
        assert!(n.pass && (n.value - 0.1).abs() < 1e-12);
        assert!(Tolerances::default().validate().is_ok());
        let bad = Tolerances {
            machine: -1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn exact_algebra_suite() {
        assert!(algebra_checks().iter().all(|c| c.pass && c.value == 0.0));
    }
}
