//! Batch runs: configuration, dispatch by input kind, and the text report
//! the `sparsify` binary writes.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::algorithm::{run_algorithm, Algorithm, RunOptions};
use crate::apps::caratheodory::{caratheodory, lifted_collection};
use crate::apps::graph::{
    cost_collection, family_edge_collection, sparsify_graph, sparsify_with_costs,
    subgraph_family_sparsify,
};
use crate::apps::hypergraph::{cut_sparsifier_report, sparsify_hypergraph, MAX_CUT_VERTICES};
use crate::apps::sdp::sparse_sdp;
use crate::block::BlockParams;
use crate::bss::BssParams;
use crate::collection::{reduce_to_identity, PsdCollection, ReducedInstance, SandwichCertificate};
use crate::error::{Error, Result};
use crate::io;
use crate::linalg::{default_rank_tol, eigenvalues, DEFAULT_PSD_TOL};
use crate::sampling::{pe_params_adaptive, Method, SamplingPlan};
use crate::width_free::WfParams;
use crate::{RunLimits, MAX_MINUTES_VAR};

/// One entry of a parameter dump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Param {
    Int(usize),
    Real(f64),
}

impl Param {
    pub fn as_f64(self) -> f64 {
        match self {
            Param::Int(v) => v as f64,
            Param::Real(v) => v,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Int(v) => write!(f, "{v}"),
            Param::Real(v) => write!(f, "{v:?}"),
        }
    }
}

/// Slack applied to every pass/fail comparison in a report.
pub const REPORT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    pub eps: f64,
    pub seed: u64,
    pub psd_tol: f64,
    /// `None` uses [`default_rank_tol`] for the input dimension.
    pub rank_tol: Option<f64>,
    /// Wall-clock budget; `SPARSIFY_MAX_MINUTES` takes precedence.
    pub max_minutes: Option<f64>,
}

impl AlgorithmConfig {
    pub fn new(algorithm: Algorithm, eps: f64) -> Result<Self> {
        crate::check_eps(eps)?;
        Ok(AlgorithmConfig {
            algorithm,
            eps,
            seed: 0,
            psd_tol: DEFAULT_PSD_TOL,
            rank_tol: None,
            max_minutes: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn limits(&self) -> RunLimits {
        if std::env::var_os(MAX_MINUTES_VAR).is_some() {
            return RunLimits::from_env();
        }
        self.max_minutes
            .map_or_else(RunLimits::unlimited, RunLimits::with_minutes)
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            seed: self.seed,
            limits: self.limits(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Matrices,
    Graph,
    Hypergraph,
    Sdp,
    Simplex,
}

impl InputKind {
    pub const ALL: [InputKind; 5] = [
        InputKind::Matrices,
        InputKind::Graph,
        InputKind::Hypergraph,
        InputKind::Sdp,
        InputKind::Simplex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InputKind::Matrices => "matrices",
            InputKind::Graph => "graph",
            InputKind::Hypergraph => "hypergraph",
            InputKind::Sdp => "sdp",
            InputKind::Simplex => "simplex",
        }
    }
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InputKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown input kind '{s}'")))
    }
}

/// Input texts for one run. `costs` and `family` apply to graphs only.
#[derive(Clone, Debug)]
pub struct RunInput {
    pub kind: InputKind,
    pub text: String,
    pub costs: Option<String>,
    pub family: Option<String>,
}

impl RunInput {
    pub fn new(kind: InputKind, text: impl Into<String>) -> Self {
        RunInput {
            kind,
            text: text.into(),
            costs: None,
            family: None,
        }
    }
}

/// One post-hoc inequality check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound,
            passed: value <= bound,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound,
            passed: value >= bound,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub kind: InputKind,
    /// Dimension of the sparsified collection.
    pub n: usize,
    /// Number of members.
    pub m: usize,
    pub ranks: Vec<usize>,
    /// Dimension of `range(B)`.
    pub rank: usize,
    pub algorithm: Algorithm,
    /// Requested accuracy: the algorithm parameter for `matrices`, the
    /// allowed relative excess otherwise.
    pub eps: f64,
    pub seed: u64,
    /// Derived schedule of the algorithm at its run parameter.
    pub parameters: Vec<(&'static str, Param)>,
    pub rounds: usize,
    pub y: Vec<f64>,
    pub certificate: SandwichCertificate,
    pub checks: Vec<Check>,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Schedule of `algorithm` at parameter `eps` on `reduced`, in the field
/// order of the corresponding params type.
pub fn parameter_dump(
    algorithm: Algorithm,
    eps: f64,
    reduced: &ReducedInstance,
) -> Result<Vec<(&'static str, Param)>> {
    let r = reduced.rank();
    Ok(match algorithm {
        Algorithm::Bss => {
            let p = BssParams::new(eps, r)?;
            vec![
                ("eps", Param::Real(p.eps)),
                ("dim", Param::Int(p.dim)),
                ("delta_l", Param::Real(p.delta_l)),
                ("eps_l", Param::Real(p.eps_l)),
                ("ell_0", Param::Real(p.ell_0)),
                ("delta_u", Param::Real(p.delta_u)),
                ("eps_u", Param::Real(p.eps_u)),
                ("u_0", Param::Real(p.u_0)),
                ("rounds", Param::Int(p.rounds)),
            ]
        }
        Algorithm::MmwumWf => {
            let p = WfParams::new(eps, r)?;
            vec![
                ("eps", Param::Real(p.eps)),
                ("dim", Param::Int(p.dim)),
                ("eta", Param::Real(p.eta)),
                ("delta_u", Param::Real(p.delta_u)),
                ("delta_l", Param::Real(p.delta_l)),
                ("rounds", Param::Int(p.rounds)),
                ("gamma", Param::Real(p.gamma)),
            ]
        }
        Algorithm::MmwumBlock => {
            let p = BlockParams::new(eps, r)?;
            vec![
                ("eps", Param::Real(p.eps)),
                ("dim", Param::Int(p.dim)),
                ("beta", Param::Real(p.beta)),
                ("eta", Param::Real(p.eta)),
                ("ell", Param::Real(p.ell)),
                ("rho", Param::Real(p.rho)),
                ("rounds", Param::Int(p.rounds)),
            ]
        }
        Algorithm::AwSample => {
            let p = SamplingPlan::new(reduced, eps, Method::Random)?;
            vec![
                ("eps", Param::Real(p.eps)),
                ("dim", Param::Int(r)),
                ("mu", Param::Real(p.mu)),
                ("rounds", Param::Int(p.rounds)),
            ]
        }
        Algorithm::Pe => {
            let p = pe_params_adaptive(reduced, eps)?;
            vec![
                ("eps", Param::Real(p.plan.eps)),
                ("dim", Param::Int(r)),
                ("mu", Param::Real(p.plan.mu)),
                ("rounds", Param::Int(p.plan.rounds)),
                ("t_lower", Param::Real(p.t_lower)),
                ("t_upper", Param::Real(p.t_upper)),
            ]
        }
    })
}

fn member_ranks(coll: &PsdCollection, rank_tol: f64) -> Result<Vec<usize>> {
    coll.matrices()
        .iter()
        .map(|m| Ok(eigenvalues(m)?.iter().filter(|&&v| v > rank_tol).count()))
        .collect()
}

/// Pass rule for a bare collection: the guaranteed ratio for bss, the
/// two-sided window `[1 - eps, 1 + eps]` for everything else.
fn matrices_checks(algorithm: Algorithm, eps: f64, cert: &SandwichCertificate) -> Vec<Check> {
    match algorithm {
        Algorithm::Bss => vec![Check::at_most(
            "ratio",
            cert.ratio(),
            algorithm.guaranteed_ratio(eps) + REPORT_TOL,
        )],
        _ => vec![
            Check::at_least("lambda_min", cert.lambda_min, 1.0 - eps - REPORT_TOL),
            Check::at_most("lambda_max", cert.lambda_max, 1.0 + eps + REPORT_TOL),
        ],
    }
}

/// `B <= sum y_i B_i <= (1 + target) B`.
fn sandwich_checks(prefix: &str, target: f64, cert: &SandwichCertificate) -> Vec<Check> {
    vec![
        Check::at_least(
            format!("{prefix}lambda_min"),
            cert.lambda_min,
            1.0 - REPORT_TOL,
        ),
        Check::at_most(
            format!("{prefix}lambda_max"),
            cert.lambda_max,
            (1.0 + target) * (1.0 + REPORT_TOL),
        ),
    ]
}

struct Outcome {
    collection: PsdCollection,
    parameter: f64,
    y: Vec<f64>,
    rounds: usize,
    certificate: SandwichCertificate,
    checks: Vec<Check>,
}

fn run_matrices(config: &AlgorithmConfig, text: &str, rank_tol: Option<f64>) -> Result<Outcome> {
    let coll = io::parse_matrix_collection_with(text, config.psd_tol)?;
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(coll.dim()));
    let reduced = reduce_to_identity(&coll, tol)?;
    let result = run_algorithm(&reduced, config.algorithm, config.eps, &config.options())?;
    Ok(Outcome {
        checks: matrices_checks(config.algorithm, config.eps, &result.certificate),
        collection: coll,
        parameter: config.eps,
        y: result.y,
        rounds: result.rounds,
        certificate: result.certificate,
    })
}

fn run_graph(config: &AlgorithmConfig, input: &RunInput) -> Result<Outcome> {
    let g = io::parse_graph(&input.text)?;
    let target = config.eps;
    let algo = config.algorithm;
    let opts = config.options();
    let parameter = algo.parameter_for_ratio(target);
    let mut checks = Vec::new();
    let (collection, sparsifier) = match (&input.costs, &input.family) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidParameter(
                "costs and family cannot be combined".into(),
            ));
        }
        (Some(text), None) => {
            let costs = io::parse_costs(text, g.len())?;
            let out = sparsify_with_costs(&g, &costs, target, algo, &opts)?;
            checks.extend(sandwich_checks("laplacian_", target, &out.laplacian));
            for (i, c) in out.costs.iter().enumerate() {
                checks.push(Check::at_least(
                    format!("cost_{i}_ratio"),
                    c.ratio(),
                    1.0 - REPORT_TOL,
                ));
                checks.push(Check::at_most(
                    format!("cost_{i}_ratio"),
                    c.ratio(),
                    (1.0 + target) * (1.0 + REPORT_TOL),
                ));
            }
            (cost_collection(&g, &costs)?, out.sparsifier)
        }
        (None, Some(text)) => {
            let family = io::parse_family(text, g.n())?;
            let out = subgraph_family_sparsify(&g, &family, target, algo, &opts)?;
            checks.extend(sandwich_checks("graph_", target, &out.graph));
            for (i, cert) in out.members.iter().enumerate() {
                checks.extend(sandwich_checks(&format!("sub_{i}_"), target, cert));
            }
            (family_edge_collection(&g, &family)?, out.sparsifier)
        }
        (None, None) => {
            let out = sparsify_graph(&g, target, algo, &opts)?;
            checks.extend(sandwich_checks("", target, &out.certificate));
            (g.edge_collection()?, out)
        }
    };
    Ok(Outcome {
        collection,
        parameter,
        y: sparsifier.y,
        rounds: 0,
        certificate: sparsifier.certificate,
        checks,
    })
}

fn run_hypergraph(config: &AlgorithmConfig, text: &str) -> Result<Outcome> {
    let h = io::parse_hypergraph(text)?;
    let target = config.eps;
    let out = sparsify_hypergraph(&h, target, config.algorithm, &config.options())?;
    let mut checks = sandwich_checks("", target, &out.certificate);
    if h.n() <= MAX_CUT_VERTICES {
        let cuts = cut_sparsifier_report(&h, &out.hypergraph, target, REPORT_TOL)?;
        checks.push(Check::at_most(
            "cut_violations",
            cuts.violations.len() as f64,
            0.0,
        ));
    }
    Ok(Outcome {
        collection: h.edge_collection()?,
        parameter: config.algorithm.parameter_for_ratio(target),
        y: out.y,
        rounds: 0,
        certificate: out.certificate,
        checks,
    })
}

fn run_sdp(config: &AlgorithmConfig, text: &str) -> Result<Outcome> {
    let inst = io::parse_sdp(text)?;
    let target = config.eps;
    let sol = sparse_sdp(&inst, target, config.algorithm, &config.options())?;
    let mut checks = sandwich_checks("", target, &sol.certificate);
    checks.push(Check::at_least(
        "feasibility_margin",
        sol.feasibility_margin,
        -REPORT_TOL,
    ));
    checks.push(Check::at_most(
        "cost_sparse",
        sol.cost_sparse,
        (1.0 + target) * sol.cost_original * (1.0 + REPORT_TOL),
    ));
    Ok(Outcome {
        collection: inst.block_collection()?,
        parameter: config.algorithm.parameter_for_ratio(target),
        y: sol.z,
        rounds: 0,
        certificate: sol.certificate,
        checks,
    })
}

fn run_simplex(config: &AlgorithmConfig, text: &str) -> Result<Outcome> {
    let (coll, lambdas) = io::parse_simplex(text, config.psd_tol)?;
    let target = config.eps;
    let out = caratheodory(&lambdas, &coll, target, config.algorithm, &config.options())?;
    let total: f64 = out.mu.iter().sum();
    let cert = &out.certificate;
    let checks = vec![
        Check::at_most("mu_sum_error", (total - 1.0).abs(), 1e-12),
        Check::at_least("lambda_min", cert.lambda_min, 1.0 - target - REPORT_TOL),
        Check::at_most("lambda_max", cert.lambda_max, 1.0 + target + REPORT_TOL),
    ];
    Ok(Outcome {
        collection: lifted_collection(&lambdas, &coll)?,
        parameter: config.algorithm.parameter_for_ratio(target),
        y: out.mu,
        rounds: 0,
        certificate: out.certificate,
        checks,
    })
}

/// Parses `input`, runs the configured algorithm and checks the result.
pub fn run(config: &AlgorithmConfig, input: &RunInput) -> Result<RunReport> {
    crate::check_eps(config.eps)?;
    if input.kind != InputKind::Graph && (input.costs.is_some() || input.family.is_some()) {
        return Err(Error::InvalidParameter(format!(
            "costs and family files need kind graph, got {}",
            input.kind
        )));
    }
    let start = Instant::now();
    let out = match input.kind {
        InputKind::Matrices => run_matrices(config, &input.text, config.rank_tol)?,
        InputKind::Graph => run_graph(config, input)?,
        InputKind::Hypergraph => run_hypergraph(config, &input.text)?,
        InputKind::Sdp => run_sdp(config, &input.text)?,
        InputKind::Simplex => run_simplex(config, &input.text)?,
    };
    let coll = &out.collection;
    let rank_tol = config
        .rank_tol
        .unwrap_or_else(|| default_rank_tol(coll.dim()));
    let reduced = reduce_to_identity(coll, rank_tol)?;
    let parameters = parameter_dump(config.algorithm, out.parameter, &reduced)?;
    let rounds = if out.rounds > 0 {
        out.rounds
    } else {
        parameters
            .iter()
            .find(|(k, _)| *k == "rounds")
            .map_or(0, |(_, v)| v.as_f64() as usize)
    };
    Ok(RunReport {
        kind: input.kind,
        n: coll.dim(),
        m: coll.len(),
        ranks: member_ranks(coll, rank_tol)?,
        rank: reduced.rank(),
        algorithm: config.algorithm,
        eps: config.eps,
        seed: config.seed,
        parameters,
        rounds,
        y: out.y,
        certificate: out.certificate,
        checks: out.checks,
        wall_time: start.elapsed(),
    })
}

/// Renders everything except the wall time, so identical runs give
/// identical text.
pub fn emit(report: &RunReport) -> String {
    let mut out = String::new();
    let ranks: Vec<String> = report.ranks.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "kind {}", report.kind);
    let _ = writeln!(out, "n {}", report.n);
    let _ = writeln!(out, "m {}", report.m);
    let _ = writeln!(out, "ranks {}", ranks.join(" "));
    let _ = writeln!(out, "rank {}", report.rank);
    let _ = writeln!(out, "algorithm {}", report.algorithm);
    let _ = writeln!(out, "eps {:?}", report.eps);
    let _ = writeln!(out, "seed {}", report.seed);
    for (name, value) in &report.parameters {
        let _ = writeln!(out, "param {name} {value}");
    }
    let _ = writeln!(out, "rounds_used {}", report.rounds);
    let _ = writeln!(out, "weights");
    for (i, &v) in report.y.iter().enumerate() {
        if v > 0.0 {
            let _ = writeln!(out, "{i} {v:.16e}");
        }
    }
    let c = &report.certificate;
    let _ = writeln!(out, "certificate");
    let _ = writeln!(out, "lambda_min {:.16e}", c.lambda_min);
    let _ = writeln!(out, "lambda_max {:.16e}", c.lambda_max);
    let _ = writeln!(out, "support_size {}", c.support_size);
    let _ = writeln!(out, "epsilon_achieved {:.16e}", c.epsilon_achieved);
    for check in &report.checks {
        let verdict = if check.passed { "pass" } else { "fail" };
        let _ = writeln!(
            out,
            "check {} {:.16e} {:.16e} {verdict}",
            check.name, check.value, check.bound
        );
    }
    let _ = writeln!(
        out,
        "deterministic: {}",
        report.algorithm.is_deterministic()
    );
    let _ = writeln!(out, "passed: {}", report.passed());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = "2 2\nmat 0\n0 0 1\nmat 1\n1 1 1\n";

    #[test]
    fn bss_on_identity_pair() {
        let config = AlgorithmConfig::new(Algorithm::Bss, 0.5).unwrap();
        let report = run(&config, &RunInput::new(InputKind::Matrices, PAIR)).unwrap();
        assert!(report.passed());
        let text = emit(&report);
        let weights = text
            .lines()
            .skip_while(|l| *l != "weights")
            .skip(1)
            .take_while(|l| *l != "certificate")
            .count();
        assert!(weights <= 32);
        assert!(text.contains("param rounds 32\n"));
    }

    #[test]
    fn parameter_dump_matches_params() {
        let coll = PsdCollection::from_matrices(vec![crate::SymMatrix::identity(3); 4]).unwrap();
        let reduced = reduce_to_identity(&coll, 1e-10).unwrap();
        let dump = parameter_dump(Algorithm::Bss, 0.3, &reduced).unwrap();
        let p = BssParams::new(0.3, 3).unwrap();
        let get = |k: &str| dump.iter().find(|(n, _)| *n == k).unwrap().1.as_f64();
        assert_eq!(get("u_0").to_bits(), p.u_0.to_bits());
        assert_eq!(get("ell_0").to_bits(), p.ell_0.to_bits());
        assert_eq!(get("rounds") as usize, p.rounds);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in InputKind::ALL {
            assert_eq!(k.name().parse::<InputKind>().unwrap(), k);
        }
    }

    #[test]
    fn costs_need_a_graph() {
        let config = AlgorithmConfig::new(Algorithm::Bss, 0.5).unwrap();
        let mut input = RunInput::new(InputKind::Matrices, PAIR);
        input.costs = Some("1\n1\n".into());
        assert!(matches!(
            run(&config, &input),
            Err(Error::InvalidParameter(_))
        ));
    }
}
