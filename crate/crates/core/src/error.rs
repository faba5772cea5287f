use thiserror::Error;

/// Errors raised by the linear algebra layer, the sparsifiers and the
/// application builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    InvalidMatrix,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("the matrices sum to zero; nothing to sparsify")]
    EmptyProblem,

    #[error("member {index} has range outside range(B) (residual {residual:e})")]
    RangeMismatch { index: usize, residual: f64 },

    #[error("matrix exponential would overflow (exponent {exponent:e})")]
    ExpOverflow { exponent: f64 },

    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weight vector has length {found}, collection has {expected} members")]
    WeightLength { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("barrier violated: eigenvalue {eigenvalue} is not strictly inside barrier {barrier}")]
    BarrierViolated { eigenvalue: f64, barrier: f64 },

    #[error("shift direction is zero")]
    ZeroDirection,

    #[error("lower potential {potential} exceeds 1/delta_L = {limit}")]
    PotentialTooLarge { potential: f64, limit: f64 },

    #[error(
        "no admissible step at iteration {iteration} (sum L = {sum_lower:e}, sum U = {sum_upper:e})"
    )]
    StepNotFound {
        iteration: usize,
        sum_lower: f64,
        sum_upper: f64,
    },

    #[error("oracle found no feasible index (best slack {best_slack:e})")]
    OracleInfeasible { best_slack: f64 },

    #[error("potential formulations disagree (multiplicative margin {multiplicative:e}, shifted margin {shifted:e})")]
    EquivalenceBroken { multiplicative: f64, shifted: f64 },

    #[error("phi_0 + psi_0 = {value} is not below 1; increase the number of rounds ({rounds})")]
    TNotLargeEnough { value: f64, rounds: usize },

    #[error("invariant violated at iteration {iteration}: {what}")]
    InvariantViolated { iteration: usize, what: String },

    #[error("run exceeded the time budget after {iterations} iterations")]
    TimeBudgetExceeded { iterations: usize },

    #[error("cost {cost} of edge {edge} is negative or non-finite ({value})")]
    InvalidCost {
        cost: usize,
        edge: usize,
        value: f64,
    },

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("invalid subgraph family: {0}")]
    InvalidFamily(String),

    #[error("point is not on the simplex: {0}")]
    InvalidSimplexPoint(String),

    #[error("infeasible input: {0}")]
    InfeasibleInput(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
