use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("RM({r},{m}) is out of range: need 0 <= r <= m, 1 <= m <= 16")]
    ParameterOutOfRange { r: usize, m: usize },

    #[error("length mismatch: expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("malformed bit string {0:?}: only '0' and '1' are allowed")]
    MalformedBits(String),

    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("netlist has no cells")]
    NoCells,

    #[error("duplicate cell id `{0}`")]
    DuplicateCell(String),

    #[error("cell `{cell}`: {msg}")]
    Arity { cell: String, msg: String },

    #[error("net `{0}` has more than one driver")]
    MultiDriver(String),

    #[error("net `{0}` is dangling (missing driver or receiver)")]
    Dangling(String),

    #[error("net `{0}` drives more than one receiver; insert a SPLITTER")]
    FanOut(String),

    #[error("clocked cell `{0}` does not receive the clock through the clock tree")]
    Unclocked(String),

    #[error("clock net `{net}` reaches a data port of `{cell}`")]
    ClockOnData { net: String, cell: String },

    #[error("netlist contains a combinational or sequential cycle through `{0}`")]
    Cycle(String),

    #[error("paths are not balanced: {0}")]
    Unbalanced(String),

    #[error("unknown cell id `{0}`")]
    UnknownCell(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("netlist does not fit the experiment arm: {0}")]
    ArmMismatch(String),

    #[error("specs are not comparable: {0}")]
    NonComparable(String),

    #[error("malformed table: {0}")]
    Table(String),

    #[error("line {line}: {inner}")]
    Located {
        line: usize,
        #[source]
        inner: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The underlying error with any source-location wrapper removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Located { inner, .. } => inner.root(),
            other => other,
        }
    }

    /// The netlist source line the error refers to, if known.
    pub fn line(&self) -> Option<usize> {
        match self {
            Error::Located { line, .. } | Error::Syntax { line, .. } => Some(*line),
            _ => None,
        }
    }
}
