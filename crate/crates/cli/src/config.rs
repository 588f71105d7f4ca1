use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "SOSSA_WORKERS";

#[derive(Clone, Debug, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "sossa", version, about = "Sum-of-squares spectral amplification workbench")]
pub struct RunConfig {
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, env = WORKERS_ENV, default_value_t = 0)]
    pub workers: usize,
    /// Largest qubit count handled with dense matrices.
    #[arg(long, global = true, default_value_t = 14)]
    pub dense_cap: usize,
    /// Largest SOS basis size accepted.
    #[arg(long, global = true, default_value_t = 600)]
    pub max_basis: usize,
    /// Master seed; recorded in every artifact.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.dense_cap == 0 || self.max_basis == 0 {
            return Err(CliError::invalid("caps must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Generate a SYK instance.
    GenSyk(GenSykArgs),
    /// Solve the SOS relaxation of a Hamiltonian.
    SosSolve(SosSolveArgs),
    /// Check a certificate against its Hamiltonian.
    Certify(CertifyArgs),
    /// Simulate an energy estimator over many trials.
    PhaseEst(PhaseEstArgs),
    /// SYK normalization scaling sweep.
    Scaling(ScalingArgs),
    /// Hadamard-test sampling estimate of the energy.
    SampleEst(SampleEstArgs),
    /// PARITY∘OR hard instance.
    Gadget(GadgetArgs),
    /// Query-cost comparison of the three representations.
    CostTable(CostTableArgs),
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct GenSykArgs {
    /// Number of Majorana modes.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "syk.json")]
    pub out: PathBuf,
    /// Also write the Hamiltonian in the Majorana text format.
    #[arg(long)]
    pub majorana_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    /// `.json` is a SYK instance, anything else Pauli text.
    Auto,
    Syk,
    Pauli,
    Majorana,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 20000)]
    pub max_iter: usize,
    /// Relative eigenvalue cutoff when extracting generators.
    #[arg(long, default_value_t = sossa_core::sosopt::DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SosSolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: InputFormat,
    /// Mode count for Majorana text input.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Pauli basis degree for Pauli input.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "certificate.json")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub cert: PathBuf,
    /// Relative Frobenius residual accepted.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = sossa_core::sosopt::DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    /// Add the double-factorization section (degree-2 Majorana bases).
    #[arg(long)]
    pub df: bool,
    #[arg(long, default_value = "certify.json")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    WithPrior,
    Adaptive,
    GroundState,
    Sa,
    Aae,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct PhaseEstArgs {
    /// JSON `{eigenvalues, weights, lambda}`.
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum)]
    pub estimator: EstimatorKind,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub q: f64,
    /// Ground-overlap lower bound; defaults to the scenario's overlap.
    #[arg(long)]
    pub p: Option<f64>,
    /// Prior `Δ` for `with-prior` and `sa`.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value = "phase-est.json")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct ScalingArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    /// Seeds `0..seeds` per mode count.
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "report.csv")]
    pub out: PathBuf,
    #[arg(long, default_value = "summary.json")]
    pub summary: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaMode {
    /// `Δ_j = a_j²`.
    Trivial,
    /// `Δ_j` equal to the true expectations.
    Truths,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SampleEstArgs {
    /// Certificate artifact; requires `--truths`.
    #[arg(long, conflicts_with = "syk", requires = "truths")]
    pub cert: Option<PathBuf>,
    /// JSON array of `⟨B_j†B_j⟩`, one per generator.
    #[arg(long)]
    pub truths: Option<PathBuf>,
    /// SYK instance; truths come from its exact ground state.
    #[arg(long, required_unless_present = "cert")]
    pub syk: Option<PathBuf>,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
    #[arg(long, value_enum, default_value = "trivial")]
    pub delta: DeltaMode,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "sample-est.json")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct GadgetArgs {
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub marked: Vec<usize>,
    /// Spectrally amplified phase-estimation trials at ε = 1/(2N); 0 skips them.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.05)]
    pub q: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct CostTableArgs {
    /// SYK instance to measure; otherwise all five normalizations are required.
    #[arg(long)]
    pub syk: Option<PathBuf>,
    #[arg(long, required_unless_present = "syk")]
    pub lambda_lcu: Option<f64>,
    #[arg(long, required_unless_present = "syk")]
    pub lambda_sa: Option<f64>,
    #[arg(long, required_unless_present = "syk")]
    pub lambda_sos: Option<f64>,
    #[arg(long, required_unless_present = "syk")]
    pub delta_lcu: Option<f64>,
    #[arg(long, required_unless_present = "syk")]
    pub delta_sos: Option<f64>,
    #[arg(long)]
    pub epsilon: f64,
    /// Evolution time for the reported time-evolution column.
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "cost-table.json")]
    pub out: PathBuf,
}
