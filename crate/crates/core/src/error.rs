use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power in [2, 65536]")]
    NotPrimePower(u64),
    #[error("polynomial {poly} is not primitive of degree {degree} over gf({p})")]
    NotPrimitive { poly: u32, p: u32, degree: u32 },
    #[error("invalid field descriptor {0:?}")]
    BadFieldString(String),
    #[error("element {value} does not belong to gf({q})")]
    NotInField { value: u32, q: u32 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("inversion of zero")]
    InversionOfZero,
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("linear system is underdetermined")]
    UnderdeterminedSystem,
    #[error("linear system is inconsistent")]
    InconsistentSystem,
    #[error("evaluation points must be distinct and nonzero")]
    BadEvaluationPoints,

    #[error("node count {0} outside supported range [3, 10000]")]
    NodeCount(usize),
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("edge ({0}, {1}) is erased")]
    ErasedAccess(usize, usize),
    #[error("graph parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("redundancy columns are rank deficient; code is not systematic on the first {0} nodes")]
    NotSystematic(usize),
    #[error("expected {expected} information symbols, got {got}")]
    InfoLength { expected: usize, got: usize },
    #[error("information map does not cover exactly the edges among the first {0} nodes")]
    InfoEdges(usize),
    #[error("decoding is underdetermined for this erasure pattern")]
    Underdetermined,
    #[error("surviving labels are inconsistent with the code")]
    Inconsistent,
    #[error("decoded word violates the parity constraints")]
    CorruptedInput,
    #[error("decoder schedule read an unresolved edge: {0}")]
    ScheduleViolation(String),

    #[error("n = {0} is not a prime >= 5")]
    NonPrimeN(usize),
    #[error("failure pair ({0}, {1}) is outside the zig-zag decoder domain")]
    OutsideAlgorithmDomain(usize, usize),
    #[error("field of size {q} is too small for n = {n} (need q >= n + 1)")]
    FieldTooSmall { n: usize, q: u32 },
    #[error("no (n-2)-node-erasure-correcting code of dimension 3 exists for n = {n}, q = {q}")]
    NoSuchCode { n: usize, q: u32 },
    #[error("enumeration of {0} candidates exceeds the exhaustive bound")]
    TooLarge(u128),
    #[error("generator columns for nodes {0} and {1} are dependent")]
    SingularSystem(usize, usize),
}
