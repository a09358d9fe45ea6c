use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("EMPTY_WORD: operation requires a nontrivial reduced word")]
    EmptyWord,
    #[error("PARSE: {0}")]
    Parse(String),
    #[error("DUPLICATE_IMAGE: generator {generator} maps two vertices onto {vertex}")]
    DuplicateImage { generator: String, vertex: usize },
    #[error("EMPTY_GRAPH: action graph has no vertices")]
    EmptyGraph,
    #[error("MALFORMED_GRAPH: {0}")]
    MalformedGraph(String),
    #[error("EDGE_NOT_ON_CYCLE: edge index {index} is outside the representative of length {len}")]
    EdgeNotOnCycle { index: usize, len: usize },
    #[error("INVALID_SPEC: {0}")]
    InvalidSpec(String),
    #[error("BUDGET_EXCEEDED: {0}")]
    BudgetExceeded(String),
    #[error("PRECONDITION_COMMENSURABLE({0}, {1})")]
    PreconditionCommensurable(usize, usize),
    #[error("P_TOO_SMALL: prime {p} must exceed {bound}")]
    PTooSmall { p: u64, bound: u64 },
    #[error("U_NOT_ALTERNATING: {0}")]
    UNotAlternating(String),
    #[error("ORDER_MISMATCH: |phi(a)| = {a}, |psi(b)| = {b}")]
    OrderMismatch { a: u64, b: u64 },
    #[error("SPEC_INVALID: {0}")]
    SpecInvalid(String),
    #[error("NOT_FREE({side}, {element})")]
    NotFree { side: char, element: usize },
    #[error("AGREEMENT_VIOLATION: images of a and b differ")]
    AgreementViolation,
    #[error("NOT_ACTION({0})")]
    NotAction(char),
    #[error("INVALID_POSITION: {0}")]
    InvalidPosition(String),
    #[error("NOT_CYCLICALLY_REDUCED")]
    NotCyclicallyReduced,
    #[error("UNDECIDED_CONJUGACY")]
    UndecidedConjugacy,
    #[error("CONJUGATE_INPUTS")]
    ConjugateInputs,
    #[error("CAP_EXCEEDED: degree {n} above cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("LENGTH_MISMATCH: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

impl Error {
    /// Stable upper-case code, used by the CLI and the Python bindings.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyWord => "EMPTY_WORD",
            Error::Parse(_) => "PARSE",
            Error::DuplicateImage { .. } => "DUPLICATE_IMAGE",
            Error::EmptyGraph => "EMPTY_GRAPH",
            Error::MalformedGraph(_) => "MALFORMED_GRAPH",
            Error::EdgeNotOnCycle { .. } => "EDGE_NOT_ON_CYCLE",
            Error::InvalidSpec(_) => "INVALID_SPEC",
            Error::BudgetExceeded(_) => "BUDGET_EXCEEDED",
            Error::PreconditionCommensurable(..) => "PRECONDITION_COMMENSURABLE",
            Error::PTooSmall { .. } => "P_TOO_SMALL",
            Error::UNotAlternating(_) => "U_NOT_ALTERNATING",
            Error::OrderMismatch { .. } => "ORDER_MISMATCH",
            Error::SpecInvalid(_) => "SPEC_INVALID",
            Error::NotFree { .. } => "NOT_FREE",
            Error::AgreementViolation => "AGREEMENT_VIOLATION",
            Error::NotAction(_) => "NOT_ACTION",
            Error::InvalidPosition(_) => "INVALID_POSITION",
            Error::NotCyclicallyReduced => "NOT_CYCLICALLY_REDUCED",
            Error::UndecidedConjugacy => "UNDECIDED_CONJUGACY",
            Error::ConjugateInputs => "CONJUGATE_INPUTS",
            Error::CapExceeded { .. } => "CAP_EXCEEDED",
            Error::LengthMismatch(..) => "LENGTH_MISMATCH",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shared work counter for the search routines: every vertex created and
/// every candidate tested costs one unit.
#[derive(Debug, Clone)]
pub struct Budget {
    cap: u64,
    used: u64,
}

impl Budget {
    pub const DEFAULT: u64 = 50_000_000;

    pub fn new(cap: u64) -> Self {
        Budget { cap, used: 0 }
    }

    pub fn charge(&mut self, units: u64, what: &str) -> Result<()> {
        self.used = self.used.saturating_add(units);
        if self.used > self.cap {
            Err(Error::BudgetExceeded(format!("{what} (cap {})", self.cap)))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.cap.saturating_sub(self.used)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT)
    }
}
