use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("invalid digit {digit} for a {alphabet} word")]
    InvalidDigit { digit: i64, alphabet: &'static str },

    #[error("lasso period must be nonempty")]
    EmptyPeriod,

    #[error("value {value} lies outside [0, 1]")]
    OutOfUnitInterval { value: String },

    #[error("invalid piecewise-linear function: {0}")]
    InvalidPwl(String),

    #[error("breakpoints are not all dyadic")]
    NonDyadic,

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("symbol {0} is not in the alphabet")]
    UnknownSymbol(String),

    #[error("state cap of {cap} exceeded while building {what}")]
    StateCap { what: &'static str, cap: usize },

    #[error("invalid transducer: {0}")]
    InvalidTransducer(String),

    #[error("deterministic transducer has {successors} successors in state {state} on {symbol}")]
    NotDeterministic {
        state: String,
        symbol: i8,
        successors: usize,
    },

    #[error("exact evaluation did not close a cycle within {bound} input symbols")]
    NoCycle { bound: usize },

    #[error("no valid delay up to cap {cap}")]
    DelayCap { cap: usize },

    #[error("prediction table undefined for a window at delay {delay}")]
    NuUndefined { delay: usize },

    #[error("range assumption violated: first prediction is {found:02b}, expected 01")]
    RangeAssumption { found: u8 },

    #[error("proof invariant violated: {0}")]
    Invariant(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("unknown corpus name {0:?}")]
    UnknownCorpus(String),

    #[error("artifact error: {0}")]
    Artifact(String),
}

pub type Result<T> = std::result::Result<T, Error>;
