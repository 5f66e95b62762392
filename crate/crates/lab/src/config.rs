//! Experiment configuration, shared by the command line and JSON config
//! files. A report echoes its config in the same shape, so any report can be
//! re-run from its own `config` field.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use ffwd_core::Tolerances;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceProfile {
    Strict,
    #[default]
    Default,
}

impl ToleranceProfile {
    pub fn tolerances(self) -> Tolerances {
        match self {
            ToleranceProfile::Strict => Tolerances::STRICT,
            ToleranceProfile::Default => Tolerances::DEFAULT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct ShorSeemArgs {
    #[arg(long, default_value_t = 15)]
    pub modulus: u64,
    #[arg(long, default_value_t = 7)]
    pub y: u64,
    /// Trisection iterations.
    #[arg(long, default_value_t = 20)]
    pub ell: u32,
    /// Hadamard-test samples per iteration.
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    /// Only orbits of this size are used.
    #[arg(long, default_value_t = 4)]
    pub orbit_size: usize,
}

impl Default for ShorSeemArgs {
    fn default() -> Self {
        Self { modulus: 15, y: 7, ell: 20, m: 200, orbit_size: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct TernaryPeArgs {
    /// Samples per iteration in the four-case ledger.
    #[arg(long, default_value_t = 160)]
    pub m: usize,
    /// Full estimations per `(l, m)` pair in the confidence check; 0 skips it.
    #[arg(long, default_value_t = 1000)]
    pub estimate_trials: usize,
}

impl Default for TernaryPeArgs {
    fn default() -> Self {
        Self { m: 160, estimate_trials: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct FourierPeArgs {
    /// Eigenphase in turns (fractions of 2 pi).
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub phase_turns: f64,
    #[arg(long, default_value_t = 8)]
    pub ell: u32,
    /// Accuracy exponent of the tail bound.
    #[arg(long, default_value_t = 5)]
    pub b: u32,
}

impl Default for FourierPeArgs {
    fn default() -> Self {
        Self { phase_turns: 1.0 / 3.0, ell: 8, b: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct RoundtripArgs {
    #[arg(long, default_value_t = 4)]
    pub qubits: usize,
    /// Local terms per random commuting Hamiltonian.
    #[arg(long, default_value_t = 6)]
    pub terms: usize,
    /// `log2 T` for the fast-forwarding range.
    #[arg(long, default_value_t = 30)]
    pub range_log2: u32,
    /// Evolution times.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e3, 1e6])]
    pub times: Vec<f64>,
    /// Random input states per Hamiltonian.
    #[arg(long, default_value_t = 4)]
    pub states: usize,
}

impl Default for RoundtripArgs {
    fn default() -> Self {
        Self { qubits: 4, terms: 6, range_log2: 30, times: vec![1e3, 1e6], states: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct CommutingFfArgs {
    #[arg(long, default_value_t = 8)]
    pub qubits: usize,
    #[arg(long, default_value_t = 2)]
    pub locality: usize,
    #[arg(long, default_value_t = 12)]
    pub terms: usize,
    #[arg(long, default_value_t = 1e9)]
    pub time: f64,
    /// Repetitions per timed evolution.
    #[arg(long, default_value_t = 20)]
    pub timing_reps: usize,
}

impl Default for CommutingFfArgs {
    fn default() -> Self {
        Self { qubits: 8, locality: 2, terms: 12, time: 1e9, timing_reps: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct QuadraticFfArgs {
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    #[arg(long, default_value_t = 1e12)]
    pub time: f64,
    /// Matrix file with `A` and `B`; replaces the random instances.
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

impl Default for QuadraticFfArgs {
    fn default() -> Self {
        Self { modes: 4, time: 1e12, instance: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct OeotlArgs {
    /// Bit width of vertex labels.
    #[arg(long, default_value_t = 8)]
    pub n: u32,
    /// Vertices on the line.
    #[arg(long, default_value_t = 64)]
    pub len: u64,
    /// Oracle confidence.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Injected demolition; defaults to `40 / n^2`.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Use phase estimation instead of exact projection (lines up to 32).
    #[arg(long, default_value_t = false)]
    pub phase_estimation: bool,
}

impl Default for OeotlArgs {
    fn default() -> Self {
        Self { n: 8, len: 64, eta: 1.0, beta: None, phase_estimation: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct GroverArgs {
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    /// Sizes for the `||e^{-iH} - U|| N` sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![16, 64, 256, 1024])]
    pub sweep: Vec<usize>,
}

impl Default for GroverArgs {
    fn default() -> Self {
        Self { size: 256, sweep: vec![16, 64, 256, 1024] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct CgaArgs {
    /// Generated instances with an automorphism in the cyclic group.
    #[arg(long, default_value_t = 10)]
    pub yes: usize,
    #[arg(long, default_value_t = 10)]
    pub no: usize,
    /// Instance file (graph and permutation); replaces the generator.
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

impl Default for CgaArgs {
    fn default() -> Self {
        Self { yes: 10, no: 10, instance: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct TeupArgs {
    /// Sweep points strictly inside `(0, pi)`.
    #[arg(long, default_value_t = 32)]
    pub points: usize,
}

impl Default for TeupArgs {
    fn default() -> Self {
        Self { points: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Experiment {
    /// Shor Hamiltonian eigenphases by trisection phase estimation.
    ShorSeem(ShorSeemArgs),
    /// Misclassification ledger of one trisection step, and full-estimate
    /// confidence.
    TernaryPe(TernaryPeArgs),
    /// Tail of textbook phase estimation.
    FourierPe(FourierPeArgs),
    /// Fast-forwarding to energy measurement and back.
    FfSeemRoundtrip(RoundtripArgs),
    /// Commuting local Hamiltonians.
    CommutingFf(CommutingFfArgs),
    /// Quadratic fermionic Hamiltonians.
    QuadraticFf(QuadraticFfArgs),
    /// Other end of this line.
    Oeotl(OeotlArgs),
    /// Grover search as an energy measurement.
    Grover(GroverArgs),
    /// Cyclic graph automorphism.
    Cga(CgaArgs),
    /// Time-energy uncertainty at the discrimination optimum.
    Teup(TeupArgs),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ShorSeem(_) => "shor-seem",
            Experiment::TernaryPe(_) => "ternary-pe",
            Experiment::FourierPe(_) => "fourier-pe",
            Experiment::FfSeemRoundtrip(_) => "ff-seem-roundtrip",
            Experiment::CommutingFf(_) => "commuting-ff",
            Experiment::QuadraticFf(_) => "quadratic-ff",
            Experiment::Oeotl(_) => "oeotl",
            Experiment::Grover(_) => "grover",
            Experiment::Cga(_) => "cga",
            Experiment::Teup(_) => "teup",
        }
    }

    /// Trial count used when none is given.
    pub fn default_trials(&self) -> usize {
        match self {
            Experiment::ShorSeem(_) => 100,
            Experiment::TernaryPe(_) => 10_000,
            Experiment::FourierPe(_) => 10_000,
            Experiment::FfSeemRoundtrip(_) => 3,
            Experiment::CommutingFf(_) => 3,
            Experiment::QuadraticFf(_) => 100,
            Experiment::Oeotl(_) => 50,
            Experiment::Grover(_) => 300,
            Experiment::Cga(_) => 1,
            Experiment::Teup(_) => 1,
        }
    }

    /// Defaults for every experiment, in subcommand order.
    pub fn all_defaults() -> Vec<Experiment> {
        vec![
            Experiment::ShorSeem(Default::default()),
            Experiment::TernaryPe(Default::default()),
            Experiment::FourierPe(Default::default()),
            Experiment::FfSeemRoundtrip(Default::default()),
            Experiment::CommutingFf(Default::default()),
            Experiment::QuadraticFf(Default::default()),
            Experiment::Oeotl(Default::default()),
            Experiment::Grover(Default::default()),
            Experiment::Cga(Default::default()),
            Experiment::Teup(Default::default()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    /// Resolved trial count.
    pub trials: usize,
    #[serde(default)]
    pub tolerance_profile: ToleranceProfile,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        let trials = experiment.default_trials();
        Self { experiment, seed, trials, tolerance_profile: ToleranceProfile::Default }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }
}

/// Shape of a JSON config file: the experiment config plus output options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub experiment: Experiment,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub tolerance_profile: ToleranceProfile,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

pub fn default_seed() -> u64 {
    1
}

impl ConfigFile {
    pub fn resolve(&self) -> ExperimentConfig {
        let trials = self.trials.unwrap_or_else(|| self.experiment.default_trials());
        ExperimentConfig {
            experiment: self.experiment.clone(),
            seed: self.seed,
            trials,
            tolerance_profile: self.tolerance_profile,
        }
    }
}
