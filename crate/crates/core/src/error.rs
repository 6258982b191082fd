use thiserror::Error;

/// Errors produced by the transducer algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter {letter} out of range for alphabet of size {alphabet}")]
    InvalidLetter { letter: usize, alphabet: usize },

    #[error("alphabet size must be between 2 and 36, got {0}")]
    InvalidAlphabet(usize),

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("invalid machine: {0}")]
    InvalidMachine(String),

    #[error("non-productive cycle through state `{state}`: image leaves Cantor space")]
    NonProductiveCycle { state: String },

    #[error("incomplete-response fixpoint diverged at state `{state}` (degenerate image)")]
    FixpointDivergence { state: String },

    #[error("preimage of the cone is empty")]
    EmptyPreimage,

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("initial state is not surjective")]
    NotSurjective,

    #[error("map is not injective")]
    NotInjective,

    #[error("transducer is not synchronizing")]
    NotSynchronizing,

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),

    #[error("words `{0}` and `{1}` are prefix-comparable")]
    ComparableWords(String, String),

    #[error("not a complete prefix code: {0}")]
    NotMaximalAntichain(String),

    #[error("invalid completion: {0}")]
    InvalidCompletion(String),

    #[error("group order exceeds {0}")]
    OrderBudgetExceeded(usize),

    #[error("empty word is not allowed here")]
    EmptyWord,

    #[error("clopen set must be proper and nonempty")]
    ImproperClopen,

    #[error("eventually periodic word needs a nonempty period")]
    EmptyPeriod,

    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded(_) | Error::OrderBudgetExceeded(_))
    }
}
