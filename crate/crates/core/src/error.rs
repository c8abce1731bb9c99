use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("universe size {0} is outside 1..={max}", max = crate::MAX_UNIVERSE)]
    Universe(usize),
    #[error("element {element} is outside [1, {n}]")]
    Element { element: usize, n: usize },
    #[error("cannot compare sets of different cardinalities ({left} vs {right})")]
    InvalidComparison { left: usize, right: usize },
    #[error("{what} = {value} is out of range (expected {expected})")]
    Range {
        what: &'static str,
        value: u128,
        expected: String,
    },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("set {0} is not a member of the host family")]
    Membership(String),
    #[error("cardinality {cardinality} is not allowed by rank set {ranks}")]
    Rank { cardinality: usize, ranks: String },
    #[error("family is not monotone over its rank set")]
    NotMonotone,
    #[error("family is not left-compressed")]
    NotLeftCompressed,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("extent of an empty generating family is undefined")]
    UndefinedExtent,
    #[error("the L-initial reduction is only known for t = 1 (got t = {0})")]
    UnsupportedDepth(usize),
    #[error("instance exceeds the search guard: {0}")]
    ScaleGuard(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("tuple is not maximal: total {total}, bound maximum {maximum}")]
    NotMaximal { total: u128, maximum: u128 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
