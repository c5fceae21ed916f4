//! `mqe`: Newton polyhedra, multi-quasi-ellipticity and Gevrey wave packets.

mod commands;
mod config;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "mqe", version, about = "Analyze systems of differential-operator symbols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Newton polyhedron, indices and the ellipticity verdict.
    ///
    /// Exit codes: 0 elliptic, 1 input error, 3 not elliptic,
    /// 4 inconclusive, 5 irregular polyhedron.
    Analyze(AnalyzeArgs),
    /// Tables of Gevrey log-bounds for iterates or derivatives.
    Bounds(BoundsArgs),
    /// Build the wave-packet counterexample and test the growth dichotomy.
    ///
    /// Exit codes: 0 dichotomy observed, 3/4/5 as for analyze,
    /// 6 elliptic input, 7 dichotomy not observed.
    Wavepacket(WavepacketArgs),
    /// Run the built-in invariant suites.
    Selfcheck(SelfcheckArgs),
}

/// Input and output flags shared by the analysis commands.
#[derive(Debug, Args)]
struct Common {
    /// System file, or `bundled:<name>` for a built-in example.
    system: String,
    /// Ambient dimension when the file does not fix it.
    #[arg(long)]
    dim: Option<usize>,
    /// TOML file with defaults for any of the numeric flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the JSON report to stdout.
    #[arg(long)]
    json: bool,
    /// Write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    search: SearchFlags,
    /// Skip the sampled inequality estimate.
    #[arg(long)]
    skip_inequality: bool,
}

#[derive(Debug, Args, Default)]
struct SearchFlags {
    /// Smallest margin of the certified search.
    #[arg(long)]
    delta_min: Option<f64>,
    /// Directions per facet for the inequality sampler.
    #[arg(long)]
    samples: Option<usize>,
    /// Radii per direction for the inequality sampler.
    #[arg(long)]
    radii: Option<usize>,
    /// Smallest radius `R` of the inequality sweep.
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// System file or `bundled:<name>`; optional with `--mu` and `--l-range`.
    system: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gevrey index.
    #[arg(long)]
    s: Option<f64>,
    /// Reported only, to name the regime.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long = "C")]
    c: Option<f64>,
    /// Overrides the polyhedron's `mu` for iterate bounds.
    #[arg(long)]
    mu: Option<String>,
    /// Iterate orders, `a..b` or `a..=b`.
    #[arg(long, conflicts_with = "alpha")]
    l_range: Option<String>,
    /// Multi-indices such as `2,0`; repeatable.
    #[arg(long)]
    alpha: Vec<String>,
    /// Also write the table as CSV to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WavepacketArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    /// Constants of the violation sweep; repeatable.
    #[arg(long = "C")]
    c: Vec<f64>,
    /// Explicit facet normal, e.g. `1/2,1/2`; requires `--xi0`.
    #[arg(long, requires = "xi0")]
    q: Option<String>,
    /// Explicit witness direction; requires `--q`.
    #[arg(long, requires = "q")]
    xi0: Option<String>,
    /// Packet center, default the origin.
    #[arg(long)]
    x0: Option<String>,
    /// Facet-attaining direction of the derivative sweep.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    m_max: Option<u32>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Bump radius.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    delta_min: Option<f64>,
    /// Write the derivative sweep as CSV to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Also parse and decide every `.sys` file in this directory.
    #[arg(long)]
    systems: Option<PathBuf>,
    /// Smaller sample counts.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Wavepacket(a) => commands::wavepacket(a),
        Command::Selfcheck(a) => commands::selfcheck(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mqe: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
