use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
}

impl F2Error {
    pub(crate) fn shape(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        F2Error::ShapeMismatch { op, left, right }
    }
}

/// Distinct alist parse failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlistError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("missing section: {0}")]
    MissingSection(&'static str),
    #[error("index {index} out of range 1..={bound} in {section}")]
    IndexOutOfRange {
        section: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("degree mismatch in {section} entry {entry}: declared {declared}, found {found}")]
    DegreeMismatch {
        section: &'static str,
        entry: usize,
        declared: usize,
        found: usize,
    },
    #[error("invalid token {token:?} in {section}")]
    InvalidToken { section: &'static str, token: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{side} index {index} out of range (size {size})")]
    OutOfRange {
        side: &'static str,
        index: usize,
        size: usize,
    },
    #[error("expected a {expected}-side set, got {found}-side")]
    SideMismatch {
        expected: &'static str,
        found: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("classical check matrix must be nonzero")]
    ZeroCheckMatrix,
    #[error(transparent)]
    Shape(#[from] F2Error),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefectError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("puncture sets must be nonempty ({0} is empty)")]
    EmptySet(&'static str),
    #[error("puncture is not correctable: {0}")]
    NotCorrectable(String),
    #[error("wormhole sets overlap: {0}")]
    Overlap(String),
    #[error("deformed code failed validation: {0}")]
    Invalid(String),
}

impl From<F2Error> for DefectError {
    fn from(e: F2Error) -> Self {
        DefectError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeformError {
    #[error("measured operators {0} and {1} anticommute")]
    AnticommutingMeasurements(usize, usize),
    #[error("operator length {found} does not match {expected} qubits")]
    Length { expected: usize, found: usize },
    #[error("target generator {0} is not in the post-measurement stabilizer group")]
    TargetUnreachable(usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("cannot compose step {index}: expected {expected} input logical rows, found {found}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("partition covers {found} logical rows, expected {expected}")]
    Partition { expected: usize, found: usize },
    #[error("stabilizer {0} would leave the group without touching a newly measured qubit")]
    ReleaseRequired(usize),
    #[error("no conjugate error exists for promoted generator {0}")]
    NoConjugate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("operator has Y support on qubit {0}")]
    YSupport(usize),
    #[error("operator must be purely X-type or purely Z-type")]
    MixedType,
    #[error("qubit {qubit} touches {degree} opposite-type stabilizers; only 1 or 2 form a graph edge")]
    Hyperedge { qubit: usize, degree: usize },
    #[error("qubit {0} touches no opposite-type stabilizer")]
    IsolatedQubit(usize),
    #[error("path entries {0} and {1} share no qubit")]
    NotAdjacent(usize, usize),
    #[error("path entry {index} ({check}, {var}) is out of range")]
    OutOfRange { index: usize, check: usize, var: usize },
    #[error(transparent)]
    Deform(#[from] DeformError),
}
