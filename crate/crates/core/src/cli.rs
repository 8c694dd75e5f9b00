//! Batch front end: `photonwave <task> --config <path> [--out <dir>]
//! [--seed <u64>] [--tol-scale <f>]`.
//!
//! Exit status: 0 all checks pass, 1 tolerance failure (summary written),
//! 2 configuration error, 3 desk-scale budget exceeded, 4 I/O failure.
//! Nothing is written unless the configuration validates.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dirac::{analogy_suite, dirac_plane_wave, energy, Spin};
use crate::dynamics::{evolve_spectral, transversality_residual, write_snapshot, EvolutionReport, FieldState};
use crate::greens::{position_space_propagator, write_propagator_csv, PropagatorLattice};
use crate::grid::{l2_norm, BoxSpec};
use crate::lorentz::{delta_l_scaling, InfinitesimalLorentz, EPSILON_LIMIT};
use crate::modes::{dirac_residual, dispersion_spectrum, orthonormality_check, FreqSign, ModeOptions, ModeSpec};
use crate::observables::{decompose, reconstruct, ModeAmplitudes};
use crate::polarization::Helicity;
use crate::quantization::{
    commutator_cutoff_sweep, field_commutator_check, heisenberg_evolution_check, ladder_commutator_check,
    mode_set, spectrum, write_spectrum_csv, FockModel,
};
use crate::suite::{all_checks, Check, SuiteParams, Tolerances};
use crate::{Error, C64};

/// Largest grid size per axis.
pub const GRID_AXIS_LIMIT: usize = 32;
/// Largest grid size per axis for the field-commutator mode sums.
pub const COMMUTATOR_AXIS_LIMIT: usize = 16;
pub const THREADS_ENV: &str = "PHOTONWAVE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Check,
    Evolve,
    Modes,
    Quantize,
    Lorentz,
    Dirac,
    Propagator,
}

#[derive(Debug, Parser)]
#[command(name = "photonwave", version, about = "Photon wave mechanics checks and simulations")]
pub struct Cli {
    pub task: Task,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "tol-scale")]
    pub tol_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub tol_scale: f64,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub evolve: EvolveConfig,
    pub modes: ModesConfig,
    pub quantize: QuantizeConfig,
    pub lorentz: LorentzConfig,
    pub dirac: DiracConfig,
    pub propagator: PropagatorConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol_scale: 1.0,
            out: None,
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            evolve: EvolveConfig::default(),
            modes: ModesConfig::default(),
            quantize: QuantizeConfig::default(),
            lorentz: LorentzConfig::default(),
            dirac: DiracConfig::default(),
            propagator: PropagatorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub lengths: [f64; 3],
    pub points: [usize; 3],
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            lengths: [2.0 * std::f64::consts::PI; 3],
            points: [16; 3],
        }
    }
}

/// A transverse mode `(n, λ)` with complex amplitude `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub n: [i64; 3],
    pub helicity: i32,
    #[serde(default = "unit_amplitude")]
    pub amplitude: [f64; 2],
}

fn unit_amplitude() -> [f64; 2] {
    [1.0, 0.0]
}

impl ModeEntry {
    fn new(n: [i64; 3], helicity: i32) -> Self {
        Self {
            n,
            helicity,
            amplitude: unit_amplitude(),
        }
    }

    fn helicity(&self) -> Result<Helicity, Failure> {
        match self.helicity {
            1 => Ok(Helicity::Plus),
            -1 => Ok(Helicity::Minus),
            h => Err(Failure::Config(format!("mode {:?}: helicity must be ±1, got {h}", self.n))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub modes: Vec<ModeEntry>,
    /// Defaults to one period of the slowest mode.
    pub duration: Option<f64>,
    pub samples: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            modes: vec![ModeEntry::new([1, 0, 0], 1)],
            duration: None,
            samples: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModesConfig {
    pub modes: Vec<ModeEntry>,
}

impl Default for ModesConfig {
    fn default() -> Self {
        Self {
            modes: [[1, 0, 0], [0, 1, 1], [-1, 2, 0], [2, 2, 2]]
                .into_iter()
                .flat_map(|n| [ModeEntry::new(n, 1), ModeEntry::new(n, -1)])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantizeConfig {
    pub n_max: usize,
    pub modes: Vec<ModeEntry>,
    /// Points per axis of the cubic box used for the commutator mode sums.
    pub commutator_points: usize,
    pub cutoffs: Vec<i64>,
}

impl Default for QuantizeConfig {
    fn default() -> Self {
        Self {
            n_max: 4,
            modes: vec![ModeEntry::new([1, 0, 0], 1), ModeEntry::new([0, 1, 1], -1), ModeEntry::new([1, -1, 0], 1)],
            commutator_points: 8,
            cutoffs: vec![1, 2, 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LorentzConfig {
    pub epsilons: Vec<f64>,
    /// Fourier cutoff of the random transverse test field.
    pub field_cutoff: i64,
}

impl Default for LorentzConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![1e-2, 1e-3, 1e-4],
            field_cutoff: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiracConfig {
    pub mass: f64,
    pub boost: f64,
    pub momenta: Vec<[i64; 3]>,
}

impl Default for DiracConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            boost: 1e-3,
            momenta: vec![[1, 0, 0], [0, 2, 1], [3, -2, 1], [5, 5, 5]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagatorConfig {
    pub points: usize,
    pub epsilon: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            points: 16,
            epsilon: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Config(String),
    Budget(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Budget(m) => write!(f, "budget exceeded: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            Error::Io(m) => Failure::Io(m),
            e => Failure::Config(e.to_string()),
        }
    }
}

/// Parses a configuration file, rejecting unknown keys.
pub fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn build_grid(lengths: [f64; 3], points: [usize; 3], limit: usize) -> Result<BoxSpec, Failure> {
    if let Some(&n) = points.iter().find(|&&n| n > limit) {
        return Err(Failure::Budget(format!("{n} grid points per axis > {limit}")));
    }
    Ok(BoxSpec::new(lengths, points)?)
}

fn amplitudes(grid: &BoxSpec, modes: &[ModeEntry]) -> Result<ModeAmplitudes, Failure> {
    if modes.is_empty() {
        return Err(Failure::Config("mode list is empty".into()));
    }
    let mut amps = ModeAmplitudes::new(grid);
    for m in modes {
        if m.amplitude.iter().any(|v| !v.is_finite()) {
            return Err(Failure::Config(format!("mode {:?}: amplitude must be finite", m.n)));
        }
        amps.insert(m.n, m.helicity()?, C64::new(m.amplitude[0], m.amplitude[1]))?;
    }
    Ok(amps)
}

fn check_epsilon(eps: f64, what: &str) -> Result<(), Failure> {
    if eps > 0.0 && eps <= EPSILON_LIMIT {
        Ok(())
    } else {
        Err(Failure::Config(format!("{what} {eps} must be in (0, {EPSILON_LIMIT}]")))
    }
}

/// Task inputs after validation.
enum Plan {
    Check(SuiteParams),
    Evolve { amps: ModeAmplitudes, duration: f64, samples: usize },
    Modes { grid: BoxSpec, modes: Vec<(ModeSpec, ModeEntry)> },
    Quantize { model: FockModel, box8: BoxSpec, cutoffs: Vec<i64> },
    Lorentz { state: FieldState, epsilons: Vec<f64> },
    Dirac { grid: BoxSpec, mass: f64, boost: f64, momenta: Vec<[i64; 3]> },
    Propagator(PropagatorLattice),
}

fn plan(task: Task, cfg: &RunConfig) -> Result<Plan, Failure> {
    cfg.tolerances.validate().map_err(Failure::Config)?;
    if !(cfg.tol_scale > 0.0 && cfg.tol_scale.is_finite()) {
        return Err(Failure::Config(format!("tol_scale {} must be positive", cfg.tol_scale)));
    }
    let grid = build_grid(cfg.grid.lengths, cfg.grid.points, GRID_AXIS_LIMIT)?;
    Ok(match task {
        Task::Check => {
            if grid.points().iter().any(|&n| n < 8) {
                return Err(Failure::Config("check needs at least 8 grid points per axis".into()));
            }
            Plan::Check(SuiteParams {
                grid,
                seed: cfg.seed,
                tol: cfg.tolerances.clone(),
            })
        }
        Task::Evolve => {
            let e = &cfg.evolve;
            let amps = amplitudes(&grid, &e.modes)?;
            let slowest = e
                .modes
                .iter()
                .map(|m| grid.wave_vector_of(m.n).norm())
                .fold(f64::INFINITY, f64::min);
            let duration = e.duration.unwrap_or(std::f64::consts::TAU / slowest);
            if !(duration.is_finite() && duration >= 0.0) || e.samples < 2 {
                return Err(Failure::Config("evolve needs a finite duration ≥ 0 and at least 2 samples".into()));
            }
            Plan::Evolve {
                amps,
                duration,
                samples: e.samples,
            }
        }
        Task::Modes => {
            amplitudes(&grid, &cfg.modes.modes)?;
            let modes = cfg
                .modes
                .modes
                .iter()
                .map(|m| Ok((ModeSpec::new(&grid, m.n, m.helicity()?, FreqSign::Positive), m.clone())))
                .collect::<Result<_, Failure>>()?;
            Plan::Modes { grid, modes }
        }
        Task::Quantize => {
            let q = &cfg.quantize;
            let n = q.commutator_points;
            let box8 = build_grid([cfg.grid.lengths[0]; 3], [n; 3], COMMUTATOR_AXIS_LIMIT)?;
            let modes = q
                .modes
                .iter()
                .map(|m| Ok((m.n, m.helicity()?)))
                .collect::<Result<Vec<_>, Failure>>()?;
            let model = FockModel::new(&box8, &modes, q.n_max)?;
            if q.n_max == 0 {
                return Err(Failure::Config("n_max must be at least 1".into()));
            }
            for &c in &q.cutoffs {
                mode_set(&box8, c)?;
            }
            if q.cutoffs.is_empty() {
                return Err(Failure::Config("cutoff list is empty".into()));
            }
            Plan::Quantize {
                model,
                box8,
                cutoffs: q.cutoffs.clone(),
            }
        }
        Task::Lorentz => {
            let l = &cfg.lorentz;
            if l.epsilons.len() < 2 {
                return Err(Failure::Config("lorentz needs at least two epsilons".into()));
            }
            for &e in &l.epsilons {
                check_epsilon(e, "epsilon")?;
            }
            let state = FieldState::random_transverse(&grid, cfg.seed, l.field_cutoff)?;
            Plan::Lorentz {
                state,
                epsilons: l.epsilons.clone(),
            }
        }
        Task::Dirac => {
            let d = &cfg.dirac;
            if !(d.mass > 0.0 && d.mass.is_finite()) {
                return Err(Failure::Config(format!("mass {} must be positive", d.mass)));
            }
            check_epsilon(d.boost, "boost")?;
            if d.momenta.iter().any(|n| *n == [0, 0, 0]) {
                return Err(Failure::Config("dirac momenta must be nonzero".into()));
            }
            Plan::Dirac {
                grid,
                mass: d.mass,
                boost: d.boost,
                momenta: d.momenta.clone(),
            }
        }
        Task::Propagator => {
            let p = &cfg.propagator;
            let lattice = PropagatorLattice::standard(p.points, p.epsilon);
            lattice.validate()?;
            if p.points % 2 != 0 {
                return Err(Failure::Config(format!("propagator points {} must be even", p.points)));
            }
            Plan::Propagator(lattice)
        }
    })
}

enum Artifact {
    Text(&'static str, String),
    Snapshot(&'static str, FieldState),
}

struct Outcome {
    checks: Vec<Check>,
    notes: Vec<String>,
    artifacts: Vec<Artifact>,
}

impl Outcome {
    fn new(checks: Vec<Check>) -> Self {
        Self {
            checks,
            notes: Vec::new(),
            artifacts: Vec::new(),
        }
    }
}

fn csv<T>(header: &str, rows: impl IntoIterator<Item = T>, line: impl Fn(&mut String, T)) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        line(&mut s, r);
        s.push('\n');
    }
    s
}

fn execute(plan: Plan, tol: &Tolerances) -> Result<Outcome, Failure> {
    Ok(match plan {
        Plan::Check(p) => Outcome::new(all_checks(&p)?),
        Plan::Evolve { amps, duration, samples } => {
            let s0 = reconstruct(&amps)?;
            let times: Vec<f64> = (0..samples).map(|i| duration * i as f64 / (samples - 1) as f64).collect();
            let rep = EvolutionReport::sample(&s0, &times);
            let last = evolve_spectral(&s0, duration);
            let g = s0.grid();
            let n0 = l2_norm(s0.psi(), g.cell_volume());
            let unit = (l2_norm(last.psi(), g.cell_volume()) - n0).abs() / n0;
            let final_amps = decompose(&last)?;
            let energy_amps = (final_amps.energy() - amps.energy()).abs() / amps.energy();
            let checks = vec![
                Check::at_most("evolve.energy_drift", rep.energy_drift(), tol.machine),
                Check::at_most("evolve.momentum_drift", rep.momentum_drift(), tol.machine),
                Check::at_most("evolve.unitarity", unit, tol.machine),
                Check::at_most("evolve.transversality", transversality_residual(&last), tol.machine),
                Check::at_most("evolve.mode_energy", energy_amps, tol.machine),
            ];
            let conserved = csv(
                "t,energy,px,py,pz,jx,jy,jz,transversality",
                0..rep.times.len(),
                |s, i| {
                    let (p, j) = (rep.momentum[i], rep.total_angular_momentum[i]);
                    let _ = write!(
                        s,
                        "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                        rep.times[i], rep.energy[i], p[0], p[1], p[2], j[0], j[1], j[2], rep.transversality_residual[i]
                    );
                },
            );
            let mut amp_csv = Vec::new();
            final_amps.write_csv(&mut amp_csv)?;
            let mut o = Outcome::new(checks);
            o.notes.push(format!("evolved for t = {duration:e} with {} modes", amps.len()));
            o.artifacts = vec![
                Artifact::Text("conserved.csv", conserved),
                Artifact::Text("amplitudes.csv", String::from_utf8_lossy(&amp_csv).into_owned()),
                Artifact::Snapshot("snapshot.bin", last),
            ];
            o
        }
        Plan::Modes { grid, modes } => {
            let opts = ModeOptions::default();
            let specs: Vec<ModeSpec> = modes
                .iter()
                .flat_map(|(m, _)| {
                    [FreqSign::Positive, FreqSign::Negative].map(|sign| ModeSpec { sign, ..m.clone() })
                })
                .collect();
            let ortho = orthonormality_check(&grid, &specs, &opts)?.max_residual;
            let mut rows = Vec::new();
            let (mut worst_dirac, mut worst_disp): (f64, f64) = (0.0, 0.0);
            for m in &specs {
                let r = dirac_residual(m, &opts)?;
                let w = m.omega();
                let ev = dispersion_spectrum(&m.wave_vector());
                let d = [w, w, 0.0, 0.0, -w, -w]
                    .iter()
                    .zip(ev)
                    .map(|(a, b)| (a - b).abs() / w)
                    .fold(0.0, f64::max);
                worst_dirac = worst_dirac.max(r);
                worst_disp = worst_disp.max(d);
                rows.push((m.n, m.helicity.value(), m.sign, w, r));
            }
            let table = csv("n1,n2,n3,lambda,sign,omega,dirac_residual", rows, |s, (n, l, sign, w, r)| {
                let sg = if sign == FreqSign::Positive { 1 } else { -1 };
                let _ = write!(s, "{},{},{},{l},{sg},{w:e},{r:e}", n[0], n[1], n[2]);
            });
            let mut o = Outcome::new(vec![
                Check::at_most("modes.orthonormality", ortho, tol.machine),
                Check::at_most("modes.dirac_residual", worst_dirac, tol.machine),
                Check::at_most("modes.dispersion", worst_disp, tol.machine),
            ]);
            o.artifacts.push(Artifact::Text("modes.csv", table));
            o
        }
        Plan::Quantize { model, box8, cutoffs } => {
            let ladder = ladder_commutator_check(&model);
            let n_max = model.n_max();
            let single = FockModel::new(&box8, &model.modes()[..1], n_max)?;
            let diag = ladder_commutator_check(&single).single_mode_diagonal;
            let diag_err = diag
                .iter()
                .enumerate()
                .map(|(n, v)| (v - if n == n_max { -(n_max as f64) } else { 1.0 }).abs())
                .fold(0.0, f64::max);
            let levels = spectrum(&model);
            let freqs = model.frequencies();
            let zero_point = 0.5 * freqs.iter().sum::<f64>();
            let ground = (levels[0].energy - zero_point).abs() / zero_point;
            let w0 = spectrum(&single);
            let spacing = w0
                .windows(2)
                .map(|l| (l[1].energy - l[0].energy - freqs[0]).abs() / freqs[0])
                .fold(0.0, f64::max);
            let heis = heisenberg_evolution_check(&model)?;
            let full = *cutoffs.iter().max().expect("validated non-empty");
            let comm = field_commutator_check(&box8, &mode_set(&box8, full)?, full)?;
            let sweep = commutator_cutoff_sweep(&box8, &cutoffs)?;
            let mut spec_csv = Vec::new();
            write_spectrum_csv(&levels, &mut spec_csv)?;
            let sweep_csv = csv("cutoff,deviation", &sweep, |s, (c, d)| {
                let _ = write!(s, "{c},{d:e}");
            });
            let mut o = Outcome::new(vec![
                Check::at_most("quantize.single_mode_commutator", diag_err, tol.ladder),
                Check::at_most("quantize.multi_mode_commutator", ladder.safe_block.max(ladder.annihilator_commutator), tol.ladder),
                Check::at_most("quantize.ladder_spacing", spacing, tol.machine),
                Check::at_most("quantize.ground_energy", ground, tol.machine),
                Check::at_most("quantize.heisenberg", heis.residual, tol.machine),
                Check::at_most("quantize.field_commutator", comm.transverse_block, tol.commutator),
                Check::at_most("quantize.field_commutator_cross_block", comm.cross_block, tol.commutator),
                Check::at_most("quantize.field_commutator_translation", comm.translation, tol.commutator),
            ]);
            o.notes.push(format!(
                "field commutator [psi, pi] equals +(i/2) times the transverse delta; deviation from the -(i/2) sign is {:.6e}",
                comm.opposite_sign
            ));
            o.artifacts = vec![
                Artifact::Text("spectrum.csv", String::from_utf8_lossy(&spec_csv).into_owned()),
                Artifact::Text("commutator_sweep.csv", sweep_csv),
            ];
            o
        }
        Plan::Lorentz { state, epsilons } => {
            let mut rows = Vec::new();
            let mut checks = Vec::new();
            for axis in 0..3 {
                for (kind, make) in [
                    ("rotation", InfinitesimalLorentz::rotation as fn(usize, f64) -> crate::Result<InfinitesimalLorentz>),
                    ("boost", InfinitesimalLorentz::boost),
                ] {
                    let r = delta_l_scaling(&state, &epsilons, |a| make(axis, a))?;
                    for (e, v) in r.amplitudes.iter().zip(&r.values) {
                        rows.push((kind, axis, *e, *v));
                    }
                    let name = format!("lorentz.delta_l_order.{kind}_{}", ["x", "y", "z"][axis]);
                    checks.push(Check::at_least(&name, r.order, tol.scaling_order_min));
                }
            }
            let table = csv("kind,axis,epsilon,delta_l", rows, |s, (k, a, e, v)| {
                let _ = write!(s, "{k},{a},{e:e},{v:e}");
            });
            let mut o = Outcome::new(checks);
            o.artifacts.push(Artifact::Text("lorentz_scaling.csv", table));
            o
        }
        Plan::Dirac { grid, mass, boost, momenta } => {
            let r = analogy_suite(&grid, mass, 0, boost)?;
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            for n in &momenta {
                let p = grid.wave_vector_of(*n);
                let e = energy(&p, mass);
                let expected = p.norm() / (e + mass);
                for sign in [FreqSign::Positive, FreqSign::Negative] {
                    for spin in [Spin::Up, Spin::Down] {
                        let s = dirac_plane_wave(&p, spin, sign, mass)?;
                        // positive energy: χ large; negative energy: φ large
                        let small_over_large = match sign {
                            FreqSign::Positive => 1.0 / s.component_ratio(),
                            FreqSign::Negative => s.component_ratio(),
                        };
                        worst = worst.max((small_over_large - expected).abs());
                        rows.push((*n, sign, spin.value(), p.norm(), e, small_over_large, expected));
                    }
                }
            }
            let table = csv(
                "n1,n2,n3,sign,spin,p,energy,small_over_large,expected",
                rows,
                |s, (n, sign, spin, p, e, m, x)| {
                    let sg = if sign == FreqSign::Positive { 1 } else { -1 };
                    let _ = write!(s, "{},{},{},{sg},{spin},{p:e},{e:e},{m:e},{x:e}", n[0], n[1], n[2]);
                },
            );
            let mut o = Outcome::new(vec![
                Check::at_most("dirac.component_ratio", worst.max(r.ratio_error), tol.dirac_ratio),
                Check::at_most("dirac.conservation", r.conservation_drift, tol.dirac_conservation),
                Check::near("dirac.boost_invariant_ratio", r.invariant_ratio, 4.0, tol.ratio),
                Check::near("dirac.boost_density_ratio", r.density_ratio, 2.0, tol.first_order_ratio),
                Check::at_most("dirac.swap_symmetry", r.swap_residual, tol.machine),
                Check::at_most("dirac.dispersion", r.dispersion, tol.machine),
            ]);
            o.notes.push("positive-energy spinors have the upper (chi) block large".into());
            o.artifacts.push(Artifact::Text("dirac_ratio.csv", table));
            o
        }
        Plan::Propagator(lattice) => {
            let (delta, rep) = position_space_propagator(&lattice)?;
            let mut out = Vec::new();
            write_propagator_csv(&lattice, &delta, &mut out)?;
            let mut o = Outcome::new(vec![
                Check::at_most("propagator.dalembertian", rep.d_alembert_residual, tol.lattice),
                Check::at_most("propagator.symmetry", rep.symmetry_residual, tol.machine),
                Check::at_most("propagator.far_field_change", rep.far_field_change, lattice.epsilon),
            ]);
            o.notes.push(format!(
                "{} sites, min |k^2| = {:e}, {} far-field sites",
                rep.sites, rep.min_abs_k2, rep.far_field_sites
            ));
            o.artifacts.push(Artifact::Text("propagator.csv", String::from_utf8_lossy(&out).into_owned()));
            o
        }
    })
}

#[derive(Serialize)]
struct Summary<'a> {
    task: Task,
    seed: u64,
    tol_scale: f64,
    parameters: &'a RunConfig,
    checks: &'a [Check],
    passed: usize,
    failed: usize,
    status: &'static str,
    notes: &'a [String],
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("{THREADS_ENV}={v} is not a positive integer")))?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn write_all(dir: &Path, artifacts: Vec<Artifact>) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    for a in artifacts {
        match a {
            Artifact::Text(name, text) => {
                std::fs::write(dir.join(name), text).map_err(|e| Failure::Io(format!("{name}: {e}")))?
            }
            Artifact::Snapshot(name, state) => write_snapshot(&state, &dir.join(name))?,
        }
    }
    Ok(())
}

/// Runs one task; returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("photonwave: {f}");
            f.exit_code()
        }
    }
}

fn run_inner(cli: Cli) -> Result<i32, Failure> {
    configure_threads()?;
    let mut cfg = load_config(&cli.config)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol_scale {
        cfg.tol_scale = t;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("photonwave-out"));
    let plan = plan(cli.task, &cfg)?;
    let mut outcome = execute(plan, &cfg.tolerances)?;
    outcome.checks = outcome.checks.into_iter().map(|c| c.rescaled(cfg.tol_scale)).collect();

    let failed = outcome.checks.iter().filter(|c| !c.pass).count();
    let status = if failed == 0 { "ok" } else { "tolerance_failure" };
    let summary = Summary {
        task: cli.task,
        seed: cfg.seed,
        tol_scale: cfg.tol_scale,
        parameters: &cfg,
        checks: &outcome.checks,
        passed: outcome.checks.len() - failed,
        failed,
        status,
        notes: &outcome.notes,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Failure::Io(e.to_string()))?;

    let name = cli.task.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let mut log = format!("task {name} seed {} tol_scale {}\n", cfg.seed, cfg.tol_scale);
    for c in &outcome.checks {
        let op = match c.comparison {
            crate::suite::Comparison::Le => "<=",
            crate::suite::Comparison::Ge => ">=",
        };
        let _ = writeln!(
            log,
            "{} {:<48} {:>12.4e} {op} {:.4e}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
    }
    for n in &outcome.notes {
        let _ = writeln!(log, "note: {n}");
    }
    let _ = writeln!(log, "{} passed, {failed} failed: {status}", summary.passed);
    print!("{log}");

    let mut artifacts = outcome.artifacts;
    artifacts.push(Artifact::Text("summary.json", json + "\n"));
    artifacts.push(Artifact::Text("run.log", log));
    write_all(&out, artifacts)?;
    Ok(if failed == 0 { 0 } else { 1 })
}
