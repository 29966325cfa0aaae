use thiserror::Error;

/// Library-wide error type. Every computation that can fail returns one of
/// these; none of the algorithms panic on user input.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("precision exhausted: {context} (needed {needed}, configured {configured})")]
    PrecisionExhausted {
        context: String,
        needed: i64,
        configured: i64,
    },

    #[error("division by zero")]
    DivisionByZero,

    #[error("chain did not stabilize within max_depth = {max_depth}")]
    NoStabilization { max_depth: usize },

    #[error("compact-part computation failed: {0}")]
    KComputationFailed(String),

    #[error("oracle disagreement in {context}: computed {computed}, oracle {oracle}")]
    OracleDisagreement {
        context: String,
        computed: String,
        oracle: String,
    },

    #[error("generator set is not flat: witness {witness}")]
    NotFlat { witness: String },

    #[error("flat refinement budget of {budget} sweeps exceeded")]
    RefinementBudgetExceeded { budget: usize },

    #[error("compact subgroup is not stable under the supplied automorphisms")]
    KNotStable,

    #[error("index [U : U \u{2229} W] is infinite: {0}")]
    InfiniteIndex(String),

    #[error("scale exponent from the characteristic polynomial is not integral")]
    NonIntegralExponent,

    #[error("annihilator support leaves the window: {0}")]
    SupportOverflow(String),

    #[error("window too small: need half-width at least {needed}")]
    WindowTooSmall { needed: i64 },

    #[error("orbit not saturated within table radius {radius}")]
    OrbitNotSaturated { radius: usize },

    #[error("normal form failure: {0}")]
    NormalFormFailure(String),

    #[error("supplied set is not a transversal: {0}")]
    NotTransversal(String),

    #[error("map is not a homomorphism on the checked domain: {0}")]
    NotHomomorphism(String),

    #[error(
        "witness subgroup is not defined over the base field: {context}; \
         the value can still be computed by the valuation route"
    )]
    IrrationalWitness { context: String },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
