//! The library side of the `sparsify` binary: parse a text input, run,
//! and render the report.

use psd_sparsify::{emit, run, Algorithm, AlgorithmConfig, InputKind, RunInput};

const GRAPH: &str = "\
# a 5-cycle with two chords
5
1 2 1
2 3 1
3 4 1
4 5 1
5 1 1
1 3 2
2 4 2
";

fn main() -> psd_sparsify::Result<()> {
    let config = AlgorithmConfig::new(Algorithm::Pe, 0.5)?;
    let report = run(&config, &RunInput::new(InputKind::Graph, GRAPH))?;
    print!("{}", emit(&report));
    Ok(())
}
