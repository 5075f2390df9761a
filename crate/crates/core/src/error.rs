use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Node and symbol indices carried by errors are 1-based, as in instance files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field mismatch: solver runs over GF({solver}) but the instance declares GF({instance})")]
    FieldMismatch { solver: u32, instance: u32 },

    #[error("unsupported field GF({0}); supported prime fields: 2, 3, 5, 7, 11, 13")]
    UnsupportedField(u32),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("matrix family has nonzero fixed entries; max-rank is only exact for zero-fixed patterns")]
    NonZeroFixed,

    #[error("node {node} transmits outside the symbols it holds")]
    SupportViolation { node: usize },

    #[error("not solvable in one round: node {node} has no in-neighbor holding x{symbol}")]
    NotOneRoundSolvable { node: usize, symbol: usize },

    #[error("search cap exceeded: {0}")]
    SearchCapExceeded(String),

    #[error("node {node} cannot decode x{symbol} from what it receives")]
    NoDecoding { node: usize, symbol: usize },

    #[error("instance is not bipartite")]
    NotBipartite,

    #[error("receiver {0} has no transmitter in-neighbor")]
    ReceiverUncovered(usize),

    #[error("infeasible: no holder of x{symbol} reaches node {node}")]
    Infeasible { node: usize, symbol: usize },

    #[error("network is not strongly connected")]
    NotStronglyConnected,

    #[error("{requested} rounds requested but the network needs r0 = {required}")]
    RoundsTooFew { requested: usize, required: usize },

    #[error("multi-round scheduling needs possess ∪ request = all symbols; node {0} violates it")]
    IncompleteDemand(usize),

    #[error("illegal transmission in round {round}: node {node} sends a vector outside its knowledge")]
    IllegalTransmission { round: usize, node: usize },

    #[error("scheme shape mismatch: {0}")]
    SchemeMismatch(String),

    #[error("lower bound is zero; ratio undefined (nothing needs to be sent)")]
    DivisionByZero,

    #[error("generation failed: {0}")]
    GenerationFailed(String),
}
