use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use psd_sparsify::{emit, run, Algorithm, AlgorithmConfig, InputKind, RunInput};

/// Sparsify a sum of PSD matrices and certify the result.
#[derive(Parser, Debug)]
#[command(name = "sparsify", version)]
struct Cli {
    /// bss, mmwum-wf, mmwum-block, aw-sample or pe
    #[arg(long)]
    algo: Algorithm,
    /// Accuracy in (0, 1); for application kinds, the allowed relative excess.
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    input: PathBuf,
    /// matrices, graph, hypergraph, sdp or simplex
    #[arg(long, default_value = "matrices")]
    kind: InputKind,
    /// Per-edge cost vectors (graph inputs).
    #[arg(long)]
    costs: Option<PathBuf>,
    /// Subgraph family (graph inputs).
    #[arg(long)]
    family: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    psd_tol: Option<f64>,
    #[arg(long)]
    rank_tol: Option<f64>,
    /// Wall-clock budget; SPARSIFY_MAX_MINUTES overrides it.
    #[arg(long)]
    max_minutes: Option<f64>,
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn main_inner(cli: Cli) -> Result<bool, String> {
    let mut config = AlgorithmConfig::new(cli.algo, cli.eps)
        .map_err(|e| e.to_string())?
        .with_seed(cli.seed);
    if let Some(t) = cli.psd_tol {
        config.psd_tol = t;
    }
    config.rank_tol = cli.rank_tol;
    config.max_minutes = cli.max_minutes;

    let mut input = RunInput::new(cli.kind, read(&cli.input)?);
    input.costs = cli.costs.as_deref().map(read).transpose()?;
    input.family = cli.family.as_deref().map(read).transpose()?;

    let report = run(&config, &input).map_err(|e| e.to_string())?;
    fs::write(&cli.output, emit(&report))
        .map_err(|e| format!("cannot write {}: {e}", cli.output.display()))?;
    eprintln!("wall time {:.3} s", report.wall_time.as_secs_f64());
    Ok(report.passed())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("certificate check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
