use alloc::string::String;

/// Errors raised by the core operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("set has {found} elements, at least {required} required")]
    CardinalityTooSmall { found: usize, required: usize },

    #[error("values are not strictly increasing at index {index}")]
    NotSorted { index: usize },

    #[error("set for N = {n} has {found} elements, expected {expected}")]
    CardinalityMismatch {
        n: u32,
        expected: usize,
        found: usize,
    },

    #[error("cardinality {0} is not a power of two")]
    CardinalityNotPowerOfTwo(usize),

    #[error("slope set contains zero")]
    ContainsZero,

    #[error("slope set mixes positive and negative values")]
    MixedSigns,

    #[error("brute-force search over {size} slopes exceeds the guard of {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("no witnesses supplied")]
    EmptyWitnessList,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("no a <= {max_search} lies in E({level})")]
    NoWitnessFound { level: u32, max_search: u64 },

    #[error("eps map does not cover exactly the elements of the base set")]
    DomainMismatch,

    #[error("eps({element}) lies outside (0, 1)")]
    EpsOutOfRange { element: u64 },

    #[error("exact search budget of {budget} steps exceeded")]
    SearchBudgetExceeded { budget: u64 },

    #[error("raster budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("division by an interval containing zero")]
    DivisionByZero,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse {0:?} as a number")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
