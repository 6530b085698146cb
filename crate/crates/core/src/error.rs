use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("capacity exceeded: about {requested} modes requested, budget is {budget}")]
    Capacity { requested: u64, budget: u64 },
    #[error("lambda {lambda} exceeds cutoff {cutoff}")]
    OutOfRange { lambda: f64, cutoff: f64 },
    #[error("cutoffs differ: {0} vs {1}")]
    CutoffMismatch(f64, f64),
    #[error("tail not controlled at t = {t}: bound {bound:e} vs value {value:e}; need cutoff >= {min_cutoff}")]
    TailNotControlled {
        t: f64,
        bound: f64,
        value: f64,
        min_cutoff: f64,
    },
    #[error("smoothing width {sigma} unresolved by cutoff {cutoff} (need sigma <= cutoff/3)")]
    WindowUnresolved { sigma: f64, cutoff: f64 },
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("infeasible signature: {0}")]
    InfeasibleSignature(String),
    #[error("degenerate normalization: N_x(cutoff) = 0")]
    DegenerateNormalization,
    #[error("{0} is not a frequency of the model")]
    NotInSpectrum(f64),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("graph6 parse error at byte {offset}: {message}")]
    Graph6 { offset: usize, message: String },
    #[error("edge list parse error on line {line}: {message}")]
    EdgeList { line: usize, message: String },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),
    #[error("graph too large: {n} vertices, limit {limit}")]
    GraphTooLarge { n: usize, limit: usize },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Stable identifier used on diagnostic streams.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "invalid-model",
            Error::InvalidPoint(_) => "invalid-point",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Capacity { .. } => "capacity",
            Error::OutOfRange { .. } => "out-of-range",
            Error::CutoffMismatch(..) => "cutoff-mismatch",
            Error::TailNotControlled { .. } => "tail-not-controlled",
            Error::WindowUnresolved { .. } => "window-unresolved",
            Error::UnsupportedModel(_) => "unsupported-model",
            Error::InfeasibleSignature(_) => "infeasible-signature",
            Error::DegenerateNormalization => "degenerate-normalization",
            Error::NotInSpectrum(_) => "not-in-spectrum",
            Error::Empty(_) => "empty-input",
            Error::Graph6 { .. } => "graph6-parse",
            Error::EdgeList { .. } => "edge-list-parse",
            Error::Disconnected => "disconnected",
            Error::IsolatedVertex(_) => "isolated-vertex",
            Error::GraphTooLarge { .. } => "graph-too-large",
            Error::Numeric(_) => "numeric",
            Error::Format(_) => "format",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
