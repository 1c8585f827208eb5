//! Config-driven front end: figure scenarios, parameter sweeps, CSV/JSON
//! artifacts.
//!
//! Every scenario is an [`ExperimentConfig`]. `run fig1` … `run fig6` load
//! embedded defaults; `run path/to/config.json` loads a user config with the
//! same schema. Frequencies in configs are laboratory values ν/2π in kHz
//! (the convention used when quoting drive and detuning values) and are
//! converted to angular rad/ms internally. CSV cells carry 12 significant
//! digits so repeated runs are byte-identical.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    bs_coefficient, gate_time, noon_state, tmss_prob, tmss_state_with_tail, SqueezeParams,
};
use crate::error::{Error, Result};
use crate::fock::{HilbertSpace, Label, SpinState, StateVector};
use crate::hamiltonians::{khz_to_rad_per_ms, HamiltonianKind, HamiltonianSpec};
use crate::metrology::{cfi, closed_form_qfi, ClosedFormQfi, DEFAULT_FD_STEP};
use crate::physconst::{derived_params, TrapConfig};
use crate::propagate::{evolve, time_grid, Trajectory};
use crate::verify::{run_all, VerifyOptions};
use crate::C64;

/// Version stamp carried by every config and summary file.
pub const SCHEMA_VERSION: u32 = 1;

/// Emitted probability columns must lie in [0, 1 + slack]; violations abort
/// the run with a tolerance-failure exit code.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// Tail-mass ceiling for squeezed-state fidelity targets in scenario output.
/// Looser than the library default because sweep points at large r are
/// reported with their tail mass rather than rejected.
const TARGET_TAIL_BUDGET: f64 = 0.05;

// ---------------------------------------------------------------------------
// Config schema

/// Named experiment presets plus the `custom` escape hatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "fig1")]
    Fig1,
    #[serde(rename = "fig2a")]
    Fig2a,
    #[serde(rename = "fig2b")]
    Fig2b,
    #[serde(rename = "fig3")]
    Fig3,
    #[serde(rename = "fig4")]
    Fig4,
    #[serde(rename = "fig5")]
    Fig5,
    #[serde(rename = "fig6")]
    Fig6,
    #[serde(rename = "params")]
    Params,
    #[serde(rename = "custom")]
    Custom,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2a => "fig2a",
            Scenario::Fig2b => "fig2b",
            Scenario::Fig3 => "fig3",
            Scenario::Fig4 => "fig4",
            Scenario::Fig5 => "fig5",
            Scenario::Fig6 => "fig6",
            Scenario::Params => "params",
            Scenario::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "fig1" => Some(Scenario::Fig1),
            "fig2a" => Some(Scenario::Fig2a),
            "fig2b" => Some(Scenario::Fig2b),
            "fig3" => Some(Scenario::Fig3),
            "fig4" => Some(Scenario::Fig4),
            "fig5" => Some(Scenario::Fig5),
            "fig6" => Some(Scenario::Fig6),
            "params" => Some(Scenario::Params),
            "custom" => Some(Scenario::Custom),
            _ => None,
        }
    }
}

/// Hamiltonian parameters in figure-caption units (ν/2π in kHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub kind: HamiltonianKind,
    pub n_max: usize,
    #[serde(default)]
    pub xi_khz: f64,
    #[serde(default)]
    pub omega_khz: f64,
    #[serde(default)]
    pub drive_amp_khz: f64,
    #[serde(default)]
    pub g_b_khz: f64,
    #[serde(default)]
    pub eta_b: f64,
    /// Drive phase φ in rad.
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub include_residual: bool,
    #[serde(default)]
    pub include_ac_stark: bool,
}

impl HamiltonianConfig {
    /// Convert caption units to the rad/ms parameter record.
    pub fn to_spec(&self) -> Result<HamiltonianSpec> {
        Ok(HamiltonianSpec::new(self.kind, self.n_max)
            .with_xi(khz_to_rad_per_ms(self.xi_khz)?)
            .with_omega(khz_to_rad_per_ms(self.omega_khz)?)
            .with_drive(khz_to_rad_per_ms(self.drive_amp_khz)?)
            .with_g_b(khz_to_rad_per_ms(self.g_b_khz)?)
            .with_eta_b(self.eta_b)
            .with_phi(self.phi)
            .with_residual(self.include_residual)
            .with_ac_stark(self.include_ac_stark))
    }
}

/// Product Fock initial state: mode occupations plus an optional spin.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    #[serde(default)]
    pub occupations: BTreeMap<Label, usize>,
    #[serde(default)]
    pub spin: Option<SpinConfig>,
}

/// Initial spin: a basis state or the equal superposition (|↓⟩+|↑⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinConfig {
    Down,
    Up,
    Plus,
}

/// Uniform time grid in ms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesConfig {
    pub start_ms: f64,
    pub stop_ms: f64,
    pub count: usize,
}

/// One named output column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutputConfig {
    /// |⟨target ⊗ rest|ψ(t)⟩|² summed over unlisted subsystems.
    BasisProbability {
        name: String,
        occupations: BTreeMap<Label, usize>,
        #[serde(default)]
        spin: Option<SpinState>,
    },
    /// ⟨n̂⟩ of one mode.
    Nbar { name: String, mode: Label },
    /// tanh²ⁿ(r)/cosh²(r) with r = (Ω ξ/ω)t.
    TmssAnalytic { name: String, n: usize },
    /// sinh²(r) with r = (Ω ξ/ω)t.
    NbarAnalytic { name: String },
    /// |C^{n1,n2}_{N1,N2}(εt)|² with (n1, n2) read from the initial state.
    BsAnalytic { name: String, out1: usize, out2: usize },
    /// Squeezed-state fidelity ⟨ψ_t|Tr_a ρ(t)|ψ_t⟩ with the drive-map target.
    SqueezeFidelity { name: String },
    /// N00N-state fidelity after tracing out the b-mode.
    NoonFidelity { name: String, n: usize },
}

impl OutputConfig {
    pub fn name(&self) -> &str {
        match self {
            OutputConfig::BasisProbability { name, .. }
            | OutputConfig::Nbar { name, .. }
            | OutputConfig::TmssAnalytic { name, .. }
            | OutputConfig::NbarAnalytic { name }
            | OutputConfig::BsAnalytic { name, .. }
            | OutputConfig::SqueezeFidelity { name }
            | OutputConfig::NoonFidelity { name, .. } => name,
        }
    }

    /// Whether the column is a probability (bound-checked on emission).
    fn is_probability(&self) -> bool {
        !matches!(
            self,
            OutputConfig::Nbar { .. } | OutputConfig::NbarAnalytic { .. }
        )
    }

    /// Whether the column needs the drive-rate combination Ωξ/ω.
    fn needs_rate(&self) -> bool {
        matches!(
            self,
            OutputConfig::TmssAnalytic { .. }
                | OutputConfig::NbarAnalytic { .. }
                | OutputConfig::BsAnalytic { .. }
                | OutputConfig::SqueezeFidelity { .. }
        )
    }
}

/// Sweep of one Hamiltonian parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    #[serde(default)]
    pub axis: SweepAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    XiKhz,
    OmegaKhz,
    DriveAmpKhz,
    GBKhz,
    EtaB,
    Phi,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::XiKhz => "xi_khz",
            SweepParameter::OmegaKhz => "omega_khz",
            SweepParameter::DriveAmpKhz => "drive_amp_khz",
            SweepParameter::GBKhz => "g_b_khz",
            SweepParameter::EtaB => "eta_b",
            SweepParameter::Phi => "phi",
        }
    }
}

/// `columns` adds one column group per value over the shared time grid;
/// `rows` emits one row per value, evaluated at the final grid time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    #[default]
    Columns,
    Rows,
}

/// A full experiment description; the unit of both embedded scenarios and
/// user config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub hamiltonian: HamiltonianConfig,
    #[serde(default)]
    pub initial_state: InitialStateConfig,
    pub times: TimesConfig,
    #[serde(default)]
    pub outputs: Vec<OutputConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

impl ExperimentConfig {
    /// The embedded default config for a figure scenario.
    pub fn for_scenario(scenario: Scenario) -> Result<Self> {
        match scenario {
            Scenario::Fig1 => Ok(fig1_config()),
            Scenario::Fig2a => Ok(fig2a_config()),
            Scenario::Fig2b => Ok(fig2b_config()),
            Scenario::Fig3 => Ok(fig3_config()),
            Scenario::Fig4 => Ok(fig4_config()),
            Scenario::Fig5 => Ok(fig5_config()),
            Scenario::Fig6 => Ok(fig6_config()),
            Scenario::Params | Scenario::Custom => Err(Error::Config(format!(
                "scenario `{}` has no embedded experiment config",
                scenario.name()
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.hamiltonian.n_max == 0 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        if self.times.count < 2 {
            return Err(Error::Config("times.count must be at least 2".into()));
        }
        if !(self.times.start_ms.is_finite() && self.times.stop_ms.is_finite())
            || self.times.start_ms < 0.0
            || self.times.stop_ms <= self.times.start_ms
        {
            return Err(Error::Config(
                "times must satisfy 0 ≤ start_ms < stop_ms".into(),
            ));
        }
        if self.initial_state.occupations.contains_key(&Label::Spin) {
            return Err(Error::Config(
                "set the spin via initial_state.spin, not occupations".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep.values must be nonempty".into()));
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config("sweep.values must be finite".into()));
            }
        }
        let fixed_outputs = matches!(self.scenario, Scenario::Fig4 | Scenario::Fig5);
        if self.outputs.is_empty() && !fixed_outputs {
            return Err(Error::Config("outputs must be nonempty".into()));
        }
        let mut names = BTreeSet::new();
        for out in &self.outputs {
            if out.name().is_empty() {
                return Err(Error::Config("output names must be nonempty".into()));
            }
            if !names.insert(out.name()) {
                return Err(Error::Config(format!(
                    "duplicate output name `{}`",
                    out.name()
                )));
            }
            if let OutputConfig::BasisProbability {
                occupations, spin, ..
            } = out
            {
                if occupations.is_empty() && spin.is_none() {
                    return Err(Error::Config(
                        "basis_probability needs occupations or a spin".into(),
                    ));
                }
                if occupations.contains_key(&Label::Spin) {
                    return Err(Error::Config(
                        "basis_probability spin goes in the `spin` field".into(),
                    ));
                }
            }
            if out.needs_rate()
                && (self.hamiltonian.drive_amp_khz <= 0.0
                    || self.hamiltonian.xi_khz <= 0.0
                    || self.hamiltonian.omega_khz <= 0.0)
            {
                return Err(Error::Config(format!(
                    "output `{}` needs positive drive_amp_khz, xi_khz and omega_khz",
                    out.name()
                )));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Embedded figure scenarios

fn hamiltonian(kind: HamiltonianKind, n_max: usize) -> HamiltonianConfig {
    HamiltonianConfig {
        kind,
        n_max,
        xi_khz: 0.0,
        omega_khz: 0.0,
        drive_amp_khz: 0.0,
        g_b_khz: 0.0,
        eta_b: 0.0,
        phi: 0.0,
        include_residual: false,
        include_ac_stark: false,
    }
}

fn fig1_config() -> ExperimentConfig {
    let mut outputs: Vec<OutputConfig> = (0..3)
        .map(|n| OutputConfig::BasisProbability {
            name: format!("p_{n}"),
            occupations: BTreeMap::from([(Label::B, n), (Label::C, n)]),
            spin: None,
        })
        .collect();
    outputs.push(OutputConfig::Nbar {
        name: "nbar_b".into(),
        mode: Label::B,
    });
    outputs.extend((0..3).map(|n| OutputConfig::TmssAnalytic {
        name: format!("p_{n}_analytic"),
        n,
    }));
    outputs.push(OutputConfig::NbarAnalytic {
        name: "nbar_analytic".into(),
    });
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        scenario: Scenario::Fig1,
        hamiltonian: HamiltonianConfig {
            xi_khz: 0.2,
            omega_khz: 20.0,
            drive_amp_khz: 3.5,
            ..hamiltonian(HamiltonianKind::DrivenA, 20)
        },
        initial_state: InitialStateConfig::default(),
        times: TimesConfig {
            start_ms: 0.0,
            stop_ms: 4.0,
            count: 81,
        },
        outputs,
        sweep: None,
    }
}

fn fig2a_config() -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        scenario: Scenario::Fig2a,
        hamiltonian: HamiltonianConfig {
            xi_khz: 0.2,
            omega_khz: 20.0,
            drive_amp_khz: 3.5,
            phi: std::f64::consts::FRAC_PI_8,
            ..hamiltonian(HamiltonianKind::DrivenA, 20)
        },
        initial_state: InitialStateConfig::default(),
        times: TimesConfig {
            start_ms: 0.0,
            stop_ms: 4.0,
            count: 81,
        },
        outputs: vec![OutputConfig::SqueezeFidelity {
            name: "fidelity".into(),
        }],
        sweep: Some(SweepConfig {
            parameter: SweepParameter::OmegaKhz,
            values: vec![14.0, 17.0, 20.0],
            axis: SweepAxis::Columns,
        }),
    }
}

fn fig2b_config() -> ExperimentConfig {
    ExperimentConfig {
        sweep: Some(SweepConfig {
            parameter: SweepParameter::DriveAmpKhz,
            values: (1..=12).map(|k| 0.5 * k as f64).collect(),
            axis: SweepAxis::Rows,
        }),
        scenario: Scenario::Fig2b,
        ..fig2a_config()
    }
}

fn fig3_config() -> ExperimentConfig {
    let pairs = [(2usize, 2usize), (3, 1), (1, 3), (4, 0), (0, 4)];
    let mut outputs: Vec<OutputConfig> = pairs
        .iter()
        .map(|&(n1, n2)| OutputConfig::BasisProbability {
            name: format!("p_{n1}_{n2}"),
            occupations: BTreeMap::from([(Label::A, n1), (Label::C, n2)]),
            spin: None,
        })
        .collect();
    outputs.extend(pairs.iter().map(|&(n1, n2)| OutputConfig::BsAnalytic {
        name: format!("p_{n1}_{n2}_analytic"),
        out1: n1,
        out2: n2,
    }));
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        scenario: Scenario::Fig3,
        hamiltonian: HamiltonianConfig {
            xi_khz: 0.2,
            omega_khz: 17.0,
            drive_amp_khz: 6.5,
            ..hamiltonian(HamiltonianKind::DrivenB, 12)
        },
        initial_state: InitialStateConfig {
            occupations: BTreeMap::from([(Label::A, 2), (Label::C, 2)]),
            spin: None,
        },
        times: TimesConfig {
            start_ms: 0.0,
            stop_ms: 6.5,
            count: 131,
        },
        outputs,
        sweep: None,
    }
}

fn fig4_config() -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        scenario: Scenario::Fig4,
        hamiltonian: HamiltonianConfig {
            xi_khz: 0.2,
            omega_khz: 20.0,
            drive_amp_khz: 4.5,
            ..hamiltonian(HamiltonianKind::DrivenB, 12)
        },
        initial_state: InitialStateConfig::default(),
        times: TimesConfig {
            start_ms: 0.0,
            stop_ms: 1.0,
            count: 2,
        },
        outputs: Vec::new(),
        sweep: None,
    }
}

fn fig5_config() -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        scenario: Scenario::Fig5,
        hamiltonian: HamiltonianConfig {
            xi_khz: 0.2,
            omega_khz: 18.0,
            g_b_khz: 5.5,
            eta_b: 0.06,
            ..hamiltonian(HamiltonianKind::SpinConditional, 6)
        },
        initial_state: InitialStateConfig {
            occupations: BTreeMap::from([(Label::A, 1)]),
            spin: Some(SpinConfig::Up),
        },
        times: TimesConfig {
            start_ms: 0.0,
            stop_ms: 4.5,
            count: 91,
        },
        outputs: Vec::new(),
        sweep: None,
    }
}

fn fig6_config() -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        scenario: Scenario::Fig6,
        hamiltonian: HamiltonianConfig {
            xi_khz: 0.3,
            omega_khz: 15.8,
            g_b_khz: 6.3,
            eta_b: 0.05,
            include_ac_stark: true,
            ..hamiltonian(HamiltonianKind::SpinConditional, 8)
        },
        initial_state: InitialStateConfig {
            occupations: BTreeMap::from([(Label::A, 2)]),
            spin: Some(SpinConfig::Plus),
        },
        times: TimesConfig {
            start_ms: 0.0,
            stop_ms: 2.5,
            count: 126,
        },
        outputs: vec![OutputConfig::NoonFidelity {
            name: "fidelity_noon".into(),
            n: 2,
        }],
        sweep: None,
    }
}

// ---------------------------------------------------------------------------
// Engine

/// Flags shared by the `run` subcommand and the library entry points.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Parallel sweep workers; 0 uses all cores, 1 runs serially.
    pub jobs: usize,
    pub n_max_override: Option<usize>,
    /// Propagation error budget per reported time.
    pub tol: f64,
}

/// One propagation's columns plus bookkeeping for the summary.
struct SingleRun {
    columns: Vec<(String, Vec<f64>)>,
    top_level: BTreeMap<String, f64>,
    target_tail_max: f64,
    norm_dev_max: f64,
    advisory: Option<String>,
}

fn check_probability(name: &str, value: f64) -> Result<()> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&value) {
        return Err(Error::ProbabilityOutOfRange {
            name: name.into(),
            value,
        });
    }
    Ok(())
}

/// Build the configured initial state on the spec's space.
fn build_initial(spec: &HamiltonianSpec, init: &InitialStateConfig) -> Result<StateVector> {
    let space = spec.space();
    let pairs: Vec<(Label, usize)> = init.occupations.iter().map(|(&l, &n)| (l, n)).collect();
    match init.spin {
        None => StateVector::fock(&space, &pairs, None),
        Some(SpinConfig::Down) => StateVector::fock(&space, &pairs, Some(SpinState::Down)),
        Some(SpinConfig::Up) => StateVector::fock(&space, &pairs, Some(SpinState::Up)),
        Some(SpinConfig::Plus) => {
            let down = StateVector::fock(&space, &pairs, Some(SpinState::Down))?;
            let up = StateVector::fock(&space, &pairs, Some(SpinState::Up))?;
            let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let amps = down
                .amps()
                .iter()
                .zip(up.amps())
                .map(|(d, u)| (d + u) * w)
                .collect();
            StateVector::from_amplitudes(space, amps)
        }
    }
}

/// Fock target on the sub-space of the listed subsystems, truncations taken
/// from the full space.
fn basis_target(
    full: &HilbertSpace,
    occupations: &BTreeMap<Label, usize>,
    spin: Option<SpinState>,
) -> Result<StateVector> {
    let mut subsystems = Vec::new();
    if spin.is_some() {
        subsystems.push((Label::Spin, 2));
    }
    for &label in occupations.keys() {
        subsystems.push((label, full.dim_of(label)?));
    }
    let sub = HilbertSpace::new(&subsystems)?;
    let pairs: Vec<(Label, usize)> = occupations.iter().map(|(&l, &n)| (l, n)).collect();
    StateVector::fock(&sub, &pairs, spin)
}

/// Propagate one parameter point and evaluate every output column.
fn run_single(
    spec: &HamiltonianSpec,
    init: &InitialStateConfig,
    outputs: &[OutputConfig],
    times: &[f64],
    tol: f64,
) -> Result<SingleRun> {
    let h = spec.build()?;
    let psi0 = build_initial(spec, init)?;
    let traj = evolve(&h, &psi0, times, tol)?;

    let mut run = SingleRun {
        columns: Vec::with_capacity(outputs.len()),
        top_level: BTreeMap::new(),
        target_tail_max: 0.0,
        norm_dev_max: 0.0,
        advisory: spec.weak_coupling_advisory(),
    };
    for psi in traj.states() {
        run.norm_dev_max = run.norm_dev_max.max((psi.norm() - 1.0).abs());
    }
    for &(label, dim) in h.space().subsystems() {
        if label == Label::Spin {
            continue;
        }
        let mut top: f64 = 0.0;
        for psi in traj.states() {
            top = top.max(psi.mode_distribution(label)?[dim - 1]);
        }
        run.top_level.insert(label.to_string(), top);
    }
    for out in outputs {
        let values = eval_output(&traj, spec, init, out, &mut run.target_tail_max)?;
        if out.is_probability() {
            for &v in &values {
                check_probability(out.name(), v)?;
            }
        }
        run.columns.push((out.name().to_string(), values));
    }
    Ok(run)
}

fn eval_output(
    traj: &Trajectory,
    spec: &HamiltonianSpec,
    init: &InitialStateConfig,
    out: &OutputConfig,
    tail_max: &mut f64,
) -> Result<Vec<f64>> {
    let rate = spec.drive_amp * spec.xi / spec.omega;
    match out {
        OutputConfig::BasisProbability {
            occupations, spin, ..
        } => {
            let target = basis_target(traj.states()[0].space(), occupations, *spin)?;
            traj.states()
                .iter()
                .map(|psi| psi.reduced_fidelity(&target))
                .collect()
        }
        OutputConfig::Nbar { mode, .. } => traj
            .states()
            .iter()
            .map(|psi| {
                let dist = psi.mode_distribution(*mode)?;
                Ok(dist.iter().enumerate().map(|(m, &p)| m as f64 * p).sum())
            })
            .collect(),
        OutputConfig::TmssAnalytic { n, .. } => Ok(traj
            .times()
            .iter()
            .map(|&t| tmss_prob(*n, rate * t))
            .collect()),
        OutputConfig::NbarAnalytic { .. } => Ok(traj
            .times()
            .iter()
            .map(|&t| (rate * t).sinh().powi(2))
            .collect()),
        OutputConfig::BsAnalytic { out1, out2, .. } => {
            let n1 = init.occupations.get(&Label::A).copied().unwrap_or(0);
            let n2 = init.occupations.get(&Label::C).copied().unwrap_or(0);
            Ok(traj
                .times()
                .iter()
                .map(|&t| bs_coefficient(n1, n2, *out1, *out2, rate * t).powi(2))
                .collect())
        }
        OutputConfig::SqueezeFidelity { .. } => traj
            .times()
            .iter()
            .zip(traj.states())
            .map(|(&t, psi)| {
                let params =
                    SqueezeParams::from_drive(spec.drive_amp, spec.xi, spec.omega, spec.phi, t)?;
                let target = tmss_state_with_tail(&params, spec.n_max, TARGET_TAIL_BUDGET)?;
                *tail_max = tail_max.max(target.tail_mass);
                let rho = psi.partial_trace(&[Label::B, Label::C])?;
                rho.fidelity(&target.state)
            })
            .collect(),
        OutputConfig::NoonFidelity { n, .. } => {
            let target = noon_state(*n, spec.n_max)?;
            traj.states()
                .iter()
                .map(|psi| {
                    let rho = psi.partial_trace(&[Label::Spin, Label::A, Label::C])?;
                    rho.fidelity(&target)
                })
                .collect()
        }
    }
}

/// Ordered, optionally parallel map over sweep inputs with a deterministic
/// collect; `jobs` bounds the worker count.
fn maybe_parallel<U, T, F>(jobs: usize, inputs: &[U], f: F) -> Result<Vec<T>>
where
    U: Sync,
    T: Send,
    F: Fn(&U) -> Result<T> + Send + Sync,
{
    match jobs {
        1 => inputs.iter().map(f).collect(),
        0 => inputs.par_iter().map(f).collect(),
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| inputs.par_iter().map(f).collect()),
    }
}

fn apply_sweep(base: &HamiltonianConfig, parameter: SweepParameter, value: f64) -> HamiltonianConfig {
    let mut cfg = base.clone();
    match parameter {
        SweepParameter::XiKhz => cfg.xi_khz = value,
        SweepParameter::OmegaKhz => cfg.omega_khz = value,
        SweepParameter::DriveAmpKhz => cfg.drive_amp_khz = value,
        SweepParameter::GBKhz => cfg.g_b_khz = value,
        SweepParameter::EtaB => cfg.eta_b = value,
        SweepParameter::Phi => cfg.phi = value,
    }
    cfg
}

// ---------------------------------------------------------------------------
// CSV / JSON formatting

/// 12-significant-digit scientific notation; byte-stable across runs.
fn fmt_float(value: f64) -> String {
    let v = if value == 0.0 { 0.0 } else { value };
    format!("{v:.11e}")
}

/// Shortest-form value for column suffixes like `[omega_khz=14]`.
fn fmt_param(value: f64) -> String {
    format!("{value}")
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    scenario: &'a str,
    parameters: &'a HamiltonianConfig,
    initial_state: &'a InitialStateConfig,
    times: &'a TimesConfig,
    n_max: usize,
    tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<&'a SweepConfig>,
    advisories: Vec<String>,
    diagnostics: BTreeMap<String, f64>,
    results: BTreeMap<String, f64>,
}

fn write_artifacts(
    stem: &str,
    opts: &RunOptions,
    header: &[String],
    rows: &[Vec<String>],
    summary: &Summary,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&opts.out_dir)?;
    let csv_path = opts.out_dir.join(format!("{stem}.csv"));
    fs::write(&csv_path, csv_text(header, rows))?;
    let summary_path = opts.out_dir.join(format!("{stem}_summary.json"));
    let mut json = serde_json::to_string_pretty(summary)?;
    json.push('\n');
    fs::write(&summary_path, json)?;
    Ok(vec![csv_path, summary_path])
}

// ---------------------------------------------------------------------------
// Scenario runners

/// Fold one run's bookkeeping into the summary maps.
fn absorb_run(
    run: &SingleRun,
    suffix: &str,
    advisories: &mut BTreeSet<String>,
    diagnostics: &mut BTreeMap<String, f64>,
) {
    if let Some(a) = &run.advisory {
        advisories.insert(a.clone());
    }
    for (label, &top) in &run.top_level {
        let key = format!("top_level_population[{label}]{suffix}");
        diagnostics.insert(key, top);
    }
    let tail = diagnostics.entry("target_tail_mass_max".into()).or_insert(0.0);
    *tail = tail.max(run.target_tail_max);
    let dev = diagnostics.entry("norm_deviation_max".into()).or_insert(0.0);
    *dev = dev.max(run.norm_dev_max);
}

fn run_generic(cfg: &ExperimentConfig, stem: &str, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let times = time_grid(cfg.times.start_ms, cfg.times.stop_ms, cfg.times.count)?;
    let mut advisories = BTreeSet::new();
    let mut diagnostics = BTreeMap::new();
    let mut results = BTreeMap::new();

    let (header, rows) = match &cfg.sweep {
        None => {
            let spec = cfg.hamiltonian.to_spec()?;
            let run = run_single(&spec, &cfg.initial_state, &cfg.outputs, &times, opts.tol)?;
            absorb_run(&run, "", &mut advisories, &mut diagnostics);
            for (name, values) in &run.columns {
                results.insert(name.clone(), *values.last().expect("nonempty grid"));
            }
            let mut header = vec!["t".to_string()];
            header.extend(run.columns.iter().map(|(n, _)| n.clone()));
            let rows = (0..times.len())
                .map(|k| {
                    let mut row = vec![fmt_float(times[k])];
                    row.extend(run.columns.iter().map(|(_, v)| fmt_float(v[k])));
                    row
                })
                .collect::<Vec<_>>();
            (header, rows)
        }
        Some(sweep) if sweep.axis == SweepAxis::Columns => {
            let runs = maybe_parallel(opts.jobs, &sweep.values, |&value| {
                let ham = apply_sweep(&cfg.hamiltonian, sweep.parameter, value);
                run_single(
                    &ham.to_spec()?,
                    &cfg.initial_state,
                    &cfg.outputs,
                    &times,
                    opts.tol,
                )
            })?;
            let mut header = vec!["t".to_string()];
            for (value, run) in sweep.values.iter().zip(&runs) {
                let suffix = format!("[{}={}]", sweep.parameter.name(), fmt_param(*value));
                absorb_run(run, &suffix, &mut advisories, &mut diagnostics);
                for (name, values) in &run.columns {
                    header.push(format!("{name}{suffix}"));
                    results.insert(
                        format!("{name}{suffix}"),
                        *values.last().expect("nonempty grid"),
                    );
                }
            }
            let rows = (0..times.len())
                .map(|k| {
                    let mut row = vec![fmt_float(times[k])];
                    for run in &runs {
                        row.extend(run.columns.iter().map(|(_, v)| fmt_float(v[k])));
                    }
                    row
                })
                .collect::<Vec<_>>();
            (header, rows)
        }
        Some(sweep) => {
            // Row sweeps evaluate every output at the final grid time.
            let eval_time = vec![*times.last().expect("nonempty grid")];
            let runs = maybe_parallel(opts.jobs, &sweep.values, |&value| {
                let ham = apply_sweep(&cfg.hamiltonian, sweep.parameter, value);
                run_single(
                    &ham.to_spec()?,
                    &cfg.initial_state,
                    &cfg.outputs,
                    &eval_time,
                    opts.tol,
                )
            })?;
            let mut header = vec![sweep.parameter.name().to_string()];
            header.extend(cfg.outputs.iter().map(|o| o.name().to_string()));
            let mut rows = Vec::with_capacity(runs.len());
            for (value, run) in sweep.values.iter().zip(&runs) {
                let suffix = format!("[{}={}]", sweep.parameter.name(), fmt_param(*value));
                absorb_run(run, &suffix, &mut advisories, &mut diagnostics);
                let mut row = vec![fmt_float(*value)];
                for (name, values) in &run.columns {
                    row.push(fmt_float(values[0]));
                    results.insert(format!("{name}{suffix}"), values[0]);
                }
                rows.push(row);
            }
            (header, rows)
        }
    };

    scenario_extras(cfg, &header, &rows, opts, &mut results)?;

    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        scenario: cfg.scenario.name(),
        parameters: &cfg.hamiltonian,
        initial_state: &cfg.initial_state,
        times: &cfg.times,
        n_max: cfg.hamiltonian.n_max,
        tol: opts.tol,
        sweep: cfg.sweep.as_ref(),
        advisories: advisories.into_iter().collect(),
        diagnostics,
        results,
    };
    write_artifacts(stem, opts, &header, &rows, &summary)
}

/// Scenario-specific summary entries computed after the main table.
fn scenario_extras(
    cfg: &ExperimentConfig,
    header: &[String],
    rows: &[Vec<String>],
    opts: &RunOptions,
    results: &mut BTreeMap<String, f64>,
) -> Result<()> {
    match cfg.scenario {
        Scenario::Fig3 => {
            let spec = cfg.hamiltonian.to_spec()?;
            let eps = spec.drive_amp * spec.xi / spec.omega;
            results.insert("swap_time_ms".into(), std::f64::consts::FRAC_PI_2 / eps);
            // Peak height of each probability column over the grid.
            for (col, name) in header.iter().enumerate().skip(1) {
                if !name.starts_with("p_") || name.ends_with("_analytic") {
                    continue;
                }
                let peak = rows
                    .iter()
                    .map(|row| row[col].parse::<f64>().unwrap_or(f64::NAN))
                    .fold(f64::NEG_INFINITY, f64::max);
                results.insert(format!("peak[{name}]"), peak);
            }
        }
        Scenario::Fig6 => {
            let spec = cfg.hamiltonian.to_spec()?;
            let t_g = gate_time(spec.g_b * spec.xi / spec.omega)?;
            results.insert("t_g_ms".into(), t_g);
            if let Some(OutputConfig::NoonFidelity { name, .. }) = cfg
                .outputs
                .iter()
                .find(|o| matches!(o, OutputConfig::NoonFidelity { .. }))
            {
                let run = run_single(
                    &spec,
                    &cfg.initial_state,
                    cfg.outputs.as_slice(),
                    &[t_g],
                    opts.tol,
                )?;
                for (col_name, values) in &run.columns {
                    if col_name == name {
                        results.insert(format!("{name}_at_tg"), values[0]);
                    }
                }
            }
        }
        _ => {}
    }
    Ok(())
}

/// Conditional-swap scenario: three propagations merged into one table.
fn run_fig5(cfg: &ExperimentConfig, stem: &str, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let spec = cfg.hamiltonian.to_spec()?;
    let times = time_grid(cfg.times.start_ms, cfg.times.stop_ms, cfg.times.count)?;
    let t_g = gate_time(spec.g_b * spec.xi / spec.omega)?;

    // (column, initial occupations, initial spin, target occupations, target spin)
    struct Curve {
        name: &'static str,
        init: [(Label, usize); 2],
        init_spin: SpinConfig,
        target: [(Label, usize); 2],
        target_spin: SpinState,
    }
    let curves = [
        Curve {
            name: "p_up_1_0",
            init: [(Label::A, 1), (Label::C, 0)],
            init_spin: SpinConfig::Up,
            target: [(Label::A, 1), (Label::C, 0)],
            target_spin: SpinState::Up,
        },
        Curve {
            name: "p_up_0_1",
            init: [(Label::A, 1), (Label::C, 0)],
            init_spin: SpinConfig::Up,
            target: [(Label::A, 0), (Label::C, 1)],
            target_spin: SpinState::Up,
        },
        Curve {
            name: "p_down_1_0",
            init: [(Label::A, 1), (Label::C, 0)],
            init_spin: SpinConfig::Down,
            target: [(Label::A, 1), (Label::C, 0)],
            target_spin: SpinState::Down,
        },
        Curve {
            name: "p_up_1_1",
            init: [(Label::A, 1), (Label::C, 1)],
            init_spin: SpinConfig::Up,
            target: [(Label::A, 1), (Label::C, 1)],
            target_spin: SpinState::Up,
        },
    ];

    let mut advisories = BTreeSet::new();
    let mut diagnostics = BTreeMap::new();
    let mut results = BTreeMap::new();
    results.insert("t_g_ms".into(), t_g);

    // Reuse one propagation per distinct initial state.
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let mut cache: Vec<((Vec<(Label, usize)>, SpinConfig), Trajectory, Trajectory)> = Vec::new();
    for curve in &curves {
        let key = (curve.init.to_vec(), curve.init_spin);
        let cached = cache.iter().position(|(k, _, _)| *k == key);
        let idx = match cached {
            Some(idx) => idx,
            None => {
                let init = InitialStateConfig {
                    occupations: curve.init.iter().copied().collect(),
                    spin: Some(curve.init_spin),
                };
                let h = spec.build()?;
                let psi0 = build_initial(&spec, &init)?;
                let traj = evolve(&h, &psi0, &times, opts.tol)?;
                let gate = evolve(&h, &psi0, &[t_g], opts.tol)?;
                let mut run = SingleRun {
                    columns: Vec::new(),
                    top_level: BTreeMap::new(),
                    target_tail_max: 0.0,
                    norm_dev_max: traj
                        .states()
                        .iter()
                        .fold(0.0f64, |m, s| m.max((s.norm() - 1.0).abs())),
                    advisory: spec.weak_coupling_advisory(),
                };
                for &(label, dim) in h.space().subsystems() {
                    if label == Label::Spin {
                        continue;
                    }
                    let mut top: f64 = 0.0;
                    for psi in traj.states() {
                        top = top.max(psi.mode_distribution(label)?[dim - 1]);
                    }
                    run.top_level.insert(label.to_string(), top);
                }
                absorb_run(&run, "", &mut advisories, &mut diagnostics);
                cache.push((key, traj, gate));
                cache.len() - 1
            }
        };
        let occupations: BTreeMap<Label, usize> = curve.target.iter().copied().collect();
        let target = basis_target(
            cache[idx].1.states()[0].space(),
            &occupations,
            Some(curve.target_spin),
        )?;
        let values: Vec<f64> = cache[idx]
            .1
            .states()
            .iter()
            .map(|psi| psi.reduced_fidelity(&target))
            .collect::<Result<_>>()?;
        for &v in &values {
            check_probability(curve.name, v)?;
        }
        let at_gate = cache[idx].2.final_state().reduced_fidelity(&target)?;
        results.insert(format!("{}_at_tg", curve.name), at_gate);
        results.insert(curve.name.to_string(), *values.last().expect("grid"));
        columns.push((curve.name.to_string(), values));
    }

    let mut header = vec!["t".to_string()];
    header.extend(columns.iter().map(|(n, _)| n.clone()));
    let rows = (0..times.len())
        .map(|k| {
            let mut row = vec![fmt_float(times[k])];
            row.extend(columns.iter().map(|(_, v)| fmt_float(v[k])));
            row
        })
        .collect::<Vec<_>>();

    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        scenario: cfg.scenario.name(),
        parameters: &cfg.hamiltonian,
        initial_state: &cfg.initial_state,
        times: &cfg.times,
        n_max: cfg.hamiltonian.n_max,
        tol: opts.tol,
        sweep: None,
        advisories: advisories.into_iter().collect(),
        diagnostics,
        results,
    };
    write_artifacts(stem, opts, &header, &rows, &summary)
}

/// Heisenberg-scaling scenario: one row per initial twin Fock number n,
/// Fisher information in both the dimensionless (λ = εt) and rate (ε)
/// conventions, with F(ε) = t_f² F(λ).
fn run_fig4(cfg: &ExperimentConfig, stem: &str, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let spec = cfg.hamiltonian.to_spec()?;
    let t_f = cfg.times.stop_ms;
    let eps = spec.drive_amp * spec.xi / spec.omega;
    let lambda0 = eps * t_f;

    let ns: Vec<usize> = (0..=5).collect();
    let tol = opts.tol;
    let per_n = maybe_parallel(opts.jobs, &ns, |&n| {
        let psi0 = StateVector::fock(&spec.space(), &[(Label::A, n), (Label::C, n)], None)?;
        // λ is varied through the drive amplitude at fixed interrogation
        // time, matching the estimation protocol; varying t instead would
        // differentiate the detuning-scale micromotion.
        let model = |lambda: f64| -> Result<Vec<f64>> {
            let drive = (lambda / t_f) * spec.omega / spec.xi;
            let h = spec.clone().with_drive(drive).build()?;
            let traj = evolve(&h, &psi0, &[t_f], tol)?;
            traj.final_state().mode_distribution(Label::C)
        };
        let est = cfi(&model, lambda0, DEFAULT_FD_STEP)?;
        Ok((n, est))
    })?;

    let header: Vec<String> = ["n", "cfi_lambda", "qfi_lambda", "cfi_epsilon", "qfi_epsilon"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::with_capacity(per_n.len());
    let mut results = BTreeMap::new();
    let mut diagnostics = BTreeMap::new();
    results.insert("lambda_0".into(), lambda0);
    results.insert("epsilon_rad_per_ms".into(), eps);
    results.insert("t_f_ms".into(), t_f);
    for (n, est) in &per_n {
        let qfi = closed_form_qfi(ClosedFormQfi::BsPhase { n: *n });
        rows.push(vec![
            n.to_string(),
            fmt_float(est.value),
            fmt_float(qfi),
            fmt_float(t_f * t_f * est.value),
            fmt_float(t_f * t_f * qfi),
        ]);
        results.insert(format!("cfi_lambda[n={n}]"), est.value);
        results.insert(format!("qfi_lambda[n={n}]"), qfi);
        let mass = diagnostics.entry("cfi_excluded_mass_max".into()).or_insert(0.0f64);
        *mass = mass.max(est.excluded_mass);
        let deficit = diagnostics
            .entry("cfi_normalization_deficit_max".into())
            .or_insert(0.0f64);
        *deficit = deficit.max(est.normalization_deficit);
    }

    let advisory = spec.weak_coupling_advisory();
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        scenario: cfg.scenario.name(),
        parameters: &cfg.hamiltonian,
        initial_state: &cfg.initial_state,
        times: &cfg.times,
        n_max: cfg.hamiltonian.n_max,
        tol: opts.tol,
        sweep: None,
        advisories: advisory.into_iter().collect(),
        diagnostics,
        results,
    };
    write_artifacts(stem, opts, &header, &rows, &summary)
}

// ---------------------------------------------------------------------------
// Entry points

/// Run a validated config under a stem name; dispatches scenario-specific
/// runners and returns the written paths.
pub fn run_config(cfg: &ExperimentConfig, stem: &str, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let mut cfg = cfg.clone();
    if let Some(n_max) = opts.n_max_override {
        cfg.hamiltonian.n_max = n_max;
    }
    cfg.validate()?;
    match cfg.scenario {
        Scenario::Params => write_params_file(None, &opts.out_dir),
        Scenario::Fig4 => run_fig4(&cfg, stem, opts),
        Scenario::Fig5 => run_fig5(&cfg, stem, opts),
        _ => run_generic(&cfg, stem, opts),
    }
}

/// Resolve a `run` target: a scenario name or a JSON config path.
pub fn run_target(target: &str, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    match Scenario::from_name(target) {
        Some(Scenario::Params) => write_params_file(None, &opts.out_dir),
        Some(Scenario::Custom) => Err(Error::Config(
            "`custom` needs a config file: pass its path instead".into(),
        )),
        Some(scenario) => {
            let cfg = ExperimentConfig::for_scenario(scenario)?;
            run_config(&cfg, scenario.name(), opts)
        }
        None => {
            let path = Path::new(target);
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!(
                    "`{target}` is not a scenario name, and reading it as a config failed: {e}"
                ))
            })?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)?;
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("custom")
                .to_string();
            run_config(&cfg, &stem, opts)
        }
    }
}

/// Derived trap quantities as pretty JSON. With no trap config, both
/// built-in presets are reported.
pub fn params_json(trap: Option<&TrapConfig>) -> Result<String> {
    #[derive(Serialize)]
    struct Entry {
        trap: TrapConfig,
        derived: crate::physconst::DerivedParams,
    }
    let value = match trap {
        Some(cfg) => serde_json::to_value(Entry {
            trap: *cfg,
            derived: derived_params(cfg)?,
        })?,
        None => {
            let reference = TrapConfig::calcium_reference();
            let stiff = TrapConfig::calcium_stiff_transverse();
            serde_json::json!({
                "reference": Entry { trap: reference, derived: derived_params(&reference)? },
                "stiff_transverse": Entry { trap: stiff, derived: derived_params(&stiff)? },
            })
        }
    };
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

fn write_params_file(trap: Option<&TrapConfig>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("params.json");
    fs::write(&path, params_json(trap)?)?;
    Ok(vec![path])
}

/// Run the acceptance suite, print one status line per criterion, optionally
/// write a JSON report, and return whether everything passed.
pub fn run_verify(opts: &VerifyOptions, out_dir: Option<&Path>) -> Result<bool> {
    let reports = run_all(opts)?;
    for report in &reports {
        println!("{}", report.status_line());
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        let mut json = serde_json::to_string_pretty(&reports)?;
        json.push('\n');
        fs::write(dir.join("verify_report.json"), json)?;
    }
    Ok(reports.iter().all(|r| r.passed()))
}

/// Process exit code for an error: 3 for propagation-tolerance failures,
/// 2 for validation, config, and IO problems.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::StepUnderflow { .. }
        | Error::NormDeviation { .. }
        | Error::ProbabilityOutOfRange { .. } => 3,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_float_has_12_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.00000000000e0");
        assert_eq!(fmt_float(0.05), "5.00000000000e-2");
        assert_eq!(fmt_float(0.0), "0.00000000000e0");
        assert_eq!(fmt_float(-0.0), "0.00000000000e0");
        assert_eq!(fmt_float(-1.25e-3), "-1.25000000000e-3");
        assert_eq!(fmt_param(14.0), "14");
        assert_eq!(fmt_param(0.5), "0.5");
    }

    #[test]
    fn scenario_names_round_trip() {
        for scenario in [
            Scenario::Fig1,
            Scenario::Fig2a,
            Scenario::Fig2b,
            Scenario::Fig3,
            Scenario::Fig4,
            Scenario::Fig5,
            Scenario::Fig6,
            Scenario::Params,
            Scenario::Custom,
        ] {
            assert_eq!(Scenario::from_name(scenario.name()), Some(scenario));
            let json = serde_json::to_string(&scenario).unwrap();
            assert_eq!(json, format!("\"{}\"", scenario.name()));
        }
        assert_eq!(Scenario::from_name("fig7"), None);
    }

    #[test]
    fn embedded_configs_validate() {
        for scenario in [
            Scenario::Fig1,
            Scenario::Fig2a,
            Scenario::Fig2b,
            Scenario::Fig3,
            Scenario::Fig4,
            Scenario::Fig5,
            Scenario::Fig6,
        ] {
            let cfg = ExperimentConfig::for_scenario(scenario).unwrap();
            cfg.validate().unwrap();
            cfg.hamiltonian.to_spec().unwrap().validate().unwrap();
        }
        let spec = fig1_config().hamiltonian.to_spec().unwrap();
        assert!((spec.omega - 2.0 * std::f64::consts::PI * 20.0).abs() < 1e-12);
        assert!((spec.drive_amp - 2.0 * std::f64::consts::PI * 3.5).abs() < 1e-12);
    }

    #[test]
    fn config_json_round_trips() {
        let cfg = fig2a_config();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut cfg = fig1_config();
        cfg.schema_version = 99;
        assert!(cfg.validate().is_err());

        let mut cfg = fig1_config();
        cfg.times.count = 1;
        assert!(cfg.validate().is_err());

        let mut cfg = fig1_config();
        let dup = cfg.outputs[0].clone();
        cfg.outputs.push(dup);
        assert!(cfg.validate().is_err());

        let mut cfg = fig1_config();
        cfg.initial_state.occupations.insert(Label::Spin, 1);
        assert!(cfg.validate().is_err());

        let mut cfg = fig1_config();
        cfg.sweep = Some(SweepConfig {
            parameter: SweepParameter::OmegaKhz,
            values: vec![f64::NAN],
            axis: SweepAxis::Columns,
        });
        assert!(cfg.validate().is_err());

        let mut cfg = fig1_config();
        cfg.outputs.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(exit_code(&Error::Config("bad".into())), 2);
        assert_eq!(
            exit_code(&Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "missing",
            ))),
            2
        );
        assert_eq!(exit_code(&Error::StepUnderflow { t: 0.1, dt: 1e-18 }), 3);
        assert_eq!(exit_code(&Error::NormDeviation { norm: 1.5 }), 3);
        assert_eq!(
            exit_code(&Error::ProbabilityOutOfRange {
                name: "p".into(),
                value: 1.1,
            }),
            3
        );
    }

    #[test]
    fn plus_spin_builds_equal_superposition() {
        let spec = HamiltonianSpec::new(HamiltonianKind::SpinConditional, 2)
            .with_xi(khz_to_rad_per_ms(0.2).unwrap())
            .with_omega(khz_to_rad_per_ms(18.0).unwrap())
            .with_g_b(khz_to_rad_per_ms(5.5).unwrap())
            .with_eta_b(0.06);
        let init = InitialStateConfig {
            occupations: BTreeMap::from([(Label::A, 1)]),
            spin: Some(SpinConfig::Plus),
        };
        let psi = build_initial(&spec, &init).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let space = spec.space();
        let down = space.index_of(&[SpinState::Down.index(), 1, 0, 0]);
        let up = space.index_of(&[SpinState::Up.index(), 1, 0, 0]);
        let w = std::f64::consts::FRAC_1_SQRT_2;
        assert!((psi.amp(down).re - w).abs() < 1e-12);
        assert!((psi.amp(up).re - w).abs() < 1e-12);
    }

    #[test]
    fn row_sweep_emits_one_row_per_value() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            scenario: Scenario::Custom,
            hamiltonian: HamiltonianConfig {
                xi_khz: 0.2,
                omega_khz: 17.0,
                drive_amp_khz: 2.0,
                ..hamiltonian(HamiltonianKind::DrivenB, 3)
            },
            initial_state: InitialStateConfig {
                occupations: BTreeMap::from([(Label::A, 1)]),
                spin: None,
            },
            times: TimesConfig {
                start_ms: 0.0,
                stop_ms: 0.2,
                count: 2,
            },
            outputs: vec![OutputConfig::BasisProbability {
                name: "p_1_0".into(),
                occupations: BTreeMap::from([(Label::A, 1), (Label::C, 0)]),
                spin: None,
            }],
            sweep: Some(SweepConfig {
                parameter: SweepParameter::DriveAmpKhz,
                values: vec![1.0, 2.0],
                axis: SweepAxis::Rows,
            }),
        };
        let opts = RunOptions {
            out_dir: dir.path().to_path_buf(),
            jobs: 1,
            n_max_override: None,
            tol: 1e-9,
        };
        let files = run_config(&cfg, "rows", &opts).unwrap();
        let csv = fs::read_to_string(&files[0]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "drive_amp_khz,p_1_0");
        assert!(lines[1].starts_with("1.00000000000e0,"));
        assert!(lines[2].starts_with("2.00000000000e0,"));
    }

    #[test]
    fn params_json_reports_both_presets() {
        let text = params_json(None).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(value["reference"]["derived"]["xi_khz"].is_number());
        assert!(value["stiff_transverse"]["derived"]["eta_b"].is_number());
    }
}
