mod commands;
mod error;
mod io;
mod manifest;
mod reproduce;

use std::path::PathBuf;

use anyhow::Result;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::error::{exit_code, InputError, ValidationFailure, EXIT_OK, EXIT_USAGE};
use crate::manifest::{check_inputs, check_outputs, read_manifest, write_manifest, Manifest};

/// Equilibria of Kuramoto oscillator networks from adjacency eigenvectors.
///
/// Outputs default to the directory in KURAMOTO_EQ_OUT (or the current
/// directory). Exit status: 0 success, 1 validation failure, 2 usage error.
#[derive(Debug, Parser)]
#[command(name = "kuramoto-eq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a coupling matrix and write it as CSV with a JSON sidecar.
    Build(BuildArgs),
    /// Eigenvalues (and optionally eigenvectors) of a matrix.
    Spectrum(SpectrumArgs),
    /// Equilibria from eigenvectors with constant-modulus entries.
    Equilibria(EquilibriaArgs),
    /// Check whether a phase vector is an equilibrium.
    Verify(VerifyArgs),
    /// Integrate the nonlinear model and/or propagate the complex one.
    Simulate(SimulateArgs),
    /// Implant a twisted-state equilibrium into a symmetric graph.
    Design(DesignArgs),
    /// Regenerate a figure's data, or rerun a manifest.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Ring,
    Complete,
    Circulant,
    Join,
    Gcirc,
    Er,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Number of nodes (ring, complete, circulant, er).
    #[arg(short, long)]
    pub n: Option<usize>,
    /// Neighbours on each side (ring).
    #[arg(short, long)]
    pub k: Option<usize>,
    /// First row, comma separated (circulant).
    #[arg(long, allow_hyphen_values = true)]
    pub row: Option<String>,
    #[arg(long)]
    pub allow_self_loops: bool,
    /// Diagonal blocks (join): circulant matrix files.
    #[arg(long)]
    pub c: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<PathBuf>,
    /// Upper-right constant block (join).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Lower-left constant block (join).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Cyclic factors of the group, e.g. "2,4" (gcirc).
    #[arg(long)]
    pub group: Option<String>,
    /// Coefficients in lexicographic element order (gcirc).
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// JSON object mapping "g1,g2,..." to a coefficient (gcirc).
    #[arg(long)]
    pub coeff_map: Option<PathBuf>,
    /// Edge probability (er).
    #[arg(short, long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub matrix: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write eigenvectors as CSV (columns v<k>_re, v<k>_im).
    #[arg(long)]
    pub vectors: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EquilibriaArgs {
    pub matrix: PathBuf,
    /// "auto" picks the lag from each eigenvalue; a number certifies every
    /// unimodular eigenvector at that lag instead.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub phase_lag: String,
    #[arg(long, default_value_t = kuramoto_core::equilibria::TOL_MODULUS)]
    pub tol_modulus: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub matrix: PathBuf,
    pub theta: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    /// Per-node lags (one per row), overriding --phi.
    #[arg(long)]
    pub phi_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Original,
    Analytical,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Euler,
    Rk4,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub matrix: PathBuf,
    /// A phase file, or one of twisted:J, multilayer:J:OFFSET, uniform:V,
    /// random:SEED.
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: String,
    #[arg(long, value_enum, default_value_t = ModelChoice::Original)]
    pub model: ModelChoice,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    /// Per-node lags for the nonlinear model.
    #[arg(long)]
    pub phi_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(short = 'T', long = "t-end", default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Euler)]
    pub method: MethodArg,
    #[arg(long, default_value_t = kuramoto_core::dynamics::DEFAULT_STRIDE)]
    pub stride: f64,
    #[arg(long, default_value_t = kuramoto_core::dynamics::DEFAULT_WINDOW)]
    pub window: f64,
    /// Natural frequency, added as omega*t to the written phases only.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long)]
    pub emit_order_parameter: bool,
    /// Also write t,node,phase rows for spatiotemporal plots.
    #[arg(long)]
    pub long_form: Option<PathBuf>,
    /// Run several values of one parameter in parallel: epsilon=V1,V2,...
    /// or phi=V1,V2,...
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Option<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepairArg {
    Project,
    None,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Symmetric matrix to modify; otherwise an Erdos-Renyi graph is drawn.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub er_n: usize,
    #[arg(long, default_value_t = 0.25)]
    pub er_p: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Winding number of the implanted twisted state.
    #[arg(short, default_value_t = 1)]
    pub j: usize,
    /// "keep" or a factor applied to the implanted eigenvalue.
    #[arg(long, default_value = "keep")]
    pub scale: String,
    #[arg(long, value_enum, default_value_t = RepairArg::Project)]
    pub repair: RepairArg,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Example1,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("what").required(true).args(["target", "from_manifest"])))]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Option<Target>,
    /// Rerun the command recorded in a manifest and check its outputs.
    #[arg(long)]
    pub from_manifest: Option<PathBuf>,
    /// Graph seed (fig4).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short = 'T', long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub stride: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn execute(cli: Cli, argv: &[String]) -> Result<Manifest> {
    let record = match cli.command {
        Command::Build(a) => commands::build(a)?,
        Command::Spectrum(a) => commands::spectrum(a)?,
        Command::Equilibria(a) => commands::equilibria(a)?,
        Command::Verify(a) => commands::verify(a)?,
        Command::Simulate(a) => commands::simulate(a)?,
        Command::Design(a) => commands::design(a)?,
        Command::Reproduce(a) => reproduce::run(a)?,
    };
    let manifest = write_manifest(&record, argv)?;
    match record.failure {
        Some(msg) => Err(ValidationFailure(msg).into()),
        None => Ok(manifest),
    }
}

fn rerun(path: &std::path::Path) -> Result<()> {
    let recorded = read_manifest(path)?;
    check_inputs(&recorded)?;
    let argv = std::iter::once(manifest::TOOL.to_string()).chain(recorded.argv.iter().cloned());
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| InputError::new(format!("{}: recorded argv no longer parses: {e}", path.display())))?;
    if let Command::Reproduce(ReproduceArgs { from_manifest: Some(_), .. }) = cli.command {
        return Err(InputError::new("a manifest cannot point at another manifest rerun").into());
    }
    let again = execute(cli, &recorded.argv)?;
    check_outputs(&recorded, &again)?;
    println!("reproduced {} outputs from {}", again.outputs.len(), path.display());
    Ok(())
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let result = match &cli.command {
        Command::Reproduce(ReproduceArgs { from_manifest: Some(path), .. }) => rerun(&path.clone()),
        _ => execute(cli, &argv[1..]).map(|_| ()),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}
