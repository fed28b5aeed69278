use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Variants are grouped by the layer that raises them; the CLI maps them to
/// exit codes (parse → 2, cap insufficiency → 3, mismatches → 1).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),
    #[error("incompatible truncations: {0}")]
    CapsMismatch(String),
    #[error("monomial {0} lies outside the truncation")]
    OutsideCaps(String),
    #[error("variable t[{d},{mu}] is not valid in dimension {n}")]
    InvalidVariable { d: u32, mu: u32, n: u32 },
    #[error("exp: nonzero constant term {0} at hbar^0")]
    NonzeroConstant(String),
    #[error("log: constant term is {0}, expected 1")]
    LogConstant(String),
    #[error("series is not of log-partition-function shape: {0}")]
    NotTame(String),
    #[error("truncation caps are insufficient: {0}")]
    CapInsufficient(String),
    #[error("iteration did not terminate within {0} steps")]
    NonTerminating(usize),
    #[error("r_{level} violates the {kind} constraint at (mu, nu) = ({mu}, {nu})")]
    Symmetry {
        level: u32,
        mu: u32,
        nu: u32,
        kind: &'static str,
    },
    #[error("division by (z+w) left a nonzero remainder at {0}")]
    DivisionRemainder(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("point lies on the singular locus: {0}")]
    Singular(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
