use num_complex::Complex64;
use thiserror::Error;

/// Every failure mode of the library, named after the operation contract that raises it.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("pole at z = {0}")]
    Pole(Complex64),
    #[error("indeterminate form 0/0 at z = {0}")]
    Indeterminate(Complex64),
    #[error("division by the zero function")]
    DivisionByZeroFunction,
    #[error("operation `{0}` needs the exact backend")]
    BackendUnsupported(&'static str),
    #[error("backends differ between operands")]
    BackendMismatch,
    #[error("degree {0} is too low for this operation")]
    DegreeTooLow(usize),
    #[error("result defines the zero function")]
    ZeroFunction,
    #[error("polynomial defines the zero function and has no reciprocal")]
    NotInvertible,
    #[error("root finding failed: {0}")]
    RootFindingFailure(String),
    #[error("fiber at z = {z} is near-critical (min root separation {separation:e})")]
    NearCritical { z: Complex64, separation: f64 },
    #[error("leading coefficient vanishes at z = {0}")]
    PoleAtBase(Complex64),
    #[error("step size collapsed to {0:e}")]
    StepCollapse(f64),
    #[error("tracked sheets collided near z = {0}")]
    SheetCollision(Complex64),
    #[error("loop around {around} (radius {radius}) encloses other critical points: {others:?}")]
    LoopContainsOtherBranchPoints { around: Complex64, radius: f64, others: Vec<Complex64> },
    #[error("Puiseux expansion diverged (residual {0:e})")]
    ExpansionDiverged(f64),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("path passes within {clearance:e} of critical point {point}")]
    PathCrossesBranchSet { point: Complex64, clearance: f64 },
    #[error("target is attained identically")]
    TargetDegenerate,
    #[error("quadrature budget exceeded ({0} evaluations)")]
    QuadratureBudgetExceeded(usize),
    #[error("circle of radius {0} meets the divisor")]
    BoundaryHitsDivisor(f64),
    #[error("divisor point at the reference point z = 0; shift the base point")]
    DivisorPointAtOrigin,
    #[error("targets are not in general position")]
    DegenerateTargets,
    #[error("characteristic reaches only {0:.3} on the grid; too small to fit slopes")]
    NotTranscendentalEnough(f64),
    #[error("ODE solver failed at t = {0}")]
    SolverFailure(f64),
    #[error("volume growth is parabolic: the tail integral of t/V(t) diverges")]
    NonParabolicityViolated,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse { line: 1, column, message: message.into() }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    /// Short machine-friendly name, used by the CLI when surfacing failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Pole(_) => "Pole",
            Error::Indeterminate(_) => "Indeterminate",
            Error::DivisionByZeroFunction => "DivisionByZeroFunction",
            Error::BackendUnsupported(_) => "BackendUnsupported",
            Error::BackendMismatch => "BackendMismatch",
            Error::DegreeTooLow(_) => "DegreeTooLow",
            Error::ZeroFunction => "ZeroFunction",
            Error::NotInvertible => "NotInvertible",
            Error::RootFindingFailure(_) => "RootFindingFailure",
            Error::NearCritical { .. } => "NearCritical",
            Error::PoleAtBase(_) => "PoleAtBase",
            Error::StepCollapse(_) => "StepCollapse",
            Error::SheetCollision(_) => "SheetCollision",
            Error::LoopContainsOtherBranchPoints { .. } => "LoopContainsOtherBranchPoints",
            Error::ExpansionDiverged(_) => "ExpansionDiverged",
            Error::Inconclusive(_) => "Inconclusive",
            Error::PathCrossesBranchSet { .. } => "PathCrossesBranchSet",
            Error::TargetDegenerate => "TargetDegenerate",
            Error::QuadratureBudgetExceeded(_) => "QuadratureBudgetExceeded",
            Error::BoundaryHitsDivisor(_) => "BoundaryHitsDivisor",
            Error::DivisorPointAtOrigin => "DivisorPointAtOrigin",
            Error::DegenerateTargets => "DegenerateTargets",
            Error::NotTranscendentalEnough(_) => "NotTranscendentalEnough",
            Error::SolverFailure(_) => "SolverFailure",
            Error::NonParabolicityViolated => "NonParabolicityViolated",
            Error::Parse { .. } => "Parse",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
