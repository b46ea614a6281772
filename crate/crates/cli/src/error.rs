use cmc_core::CmcError;
use std::fmt;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Core(CmcError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                CmcError::InvalidConfig(_) | CmcError::GridMismatch(_) => 2,
                CmcError::ConvergenceFailure(_)
                | CmcError::NewtonDiverged(_)
                | CmcError::GraphDegenerate { .. }
                | CmcError::DegenerateMetric { .. }
                | CmcError::PoleInBracket(_) => 3,
                CmcError::NoBifurcation(_) | CmcError::DegenerateKernel(_) | CmcError::NoCriticalLength => 4,
                CmcError::ContinuationStalled { .. } => 5,
            },
        }
    }
}

/// Short variant name, used in status columns.
pub fn error_name(e: &CmcError) -> &'static str {
    match e {
        CmcError::InvalidConfig(_) => "InvalidConfig",
        CmcError::GraphDegenerate { .. } => "GraphDegenerate",
        CmcError::DegenerateMetric { .. } => "DegenerateMetric",
        CmcError::NoCriticalLength => "NoCriticalLength",
        CmcError::NoBifurcation(_) => "NoBifurcation",
        CmcError::PoleInBracket(_) => "PoleInBracket",
        CmcError::ConvergenceFailure(_) => "ConvergenceFailure",
        CmcError::DegenerateKernel(_) => "DegenerateKernel",
        CmcError::NewtonDiverged(_) => "NewtonDiverged",
        CmcError::ContinuationStalled { .. } => "ContinuationStalled",
        CmcError::GridMismatch(_) => "GridMismatch",
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{}: {e}", error_name(e)),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CmcError> for CliError {
    fn from(e: CmcError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
