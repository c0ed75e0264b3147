use thiserror::Error;

use crate::mmp::MmpTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector has no primitive representative")]
    ZeroVector,
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("multiplicity defined only for simplicial cones")]
    NonSimplicialCone,
    #[error("fan is not complete")]
    NotComplete,
    #[error("Kleiman–Mori cone requires projectivity")]
    NotProjective,
    #[error("fan is not smooth")]
    NotSmooth,
    #[error("fan is not simplicial")]
    NotSimplicial,
    #[error("{0} is already a ray of the fan")]
    RayExists(String),
    #[error("{0} lies outside the support of the fan")]
    OutsideSupport(String),
    #[error("not a refinement: {0}")]
    NotRefinement(String),
    #[error("invalid support function: {0}")]
    InvalidSupportFunction(String),
    #[error("divisor is not Q-Cartier: {0}")]
    NotQCartier(String),
    #[error("pair requires Q-Cartier K_F+Δ")]
    PairNotQCartier,
    #[error("boundary must be effective (ray {0} has a negative coefficient)")]
    NotEffective(usize),
    #[error("invalid foliation subspace: {0}")]
    InvalidSubspace(String),
    #[error("not a wall of the fan")]
    NotAWall,
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("no perturbation found within depth {depth}; failing wall {wall:?}")]
    PerturbationFailed { depth: u32, wall: Vec<usize> },
    #[error("scan of {cells} lattice points exceeds the cap of {cap}; use a smaller instance or box")]
    BoxOverflow { cells: u128, cap: u128 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("MMP did not terminate within {} steps", trace.steps.len())]
    StepLimit { trace: Box<MmpTrace> },
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
