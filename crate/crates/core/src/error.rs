use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("division by a jet with zero constant term")]
    SingularDivision,

    #[error("jet is not divisible by Δv: coefficient c[{index},0] = {value:e}")]
    NotExactlyDivisible { index: usize, value: f64 },

    #[error("{primitive} evaluated outside its domain (argument {value})")]
    Domain { primitive: &'static str, value: f64 },

    #[error("partial ({i},{j}) exceeds jet order {order}")]
    OutOfOrder { i: usize, j: usize, order: usize },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("surface `{surface}` failed validation: {reason}")]
    Validation { surface: String, reason: String },

    #[error("while evaluating `{expr}`: {source}")]
    Evaluation {
        expr: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown built-in surface `{0}`")]
    UnknownSurface(String),

    #[error("no unit normal constructible at ({u}, {v}); supply nx, ny, nz")]
    NeedsNormal { u: f64, v: f64 },

    #[error("point ({u}, {v}) is not singular (|λ| = {lambda:e})")]
    NotSingular { u: f64, v: f64, lambda: f64 },

    #[error("degenerate singular point at ({u}, {v}): dλ ≈ 0")]
    DegeneratePoint { u: f64, v: f64 },

    #[error("corank-2 singular point at ({u}, {v}) is not supported")]
    UnsupportedCorank { u: f64, v: f64 },

    #[error("adapted chart construction failed: {0}")]
    ChartFailure(String),

    #[error("chart is not adapted at ({u}, {v}): {reason}")]
    NotAdapted { u: f64, v: f64, reason: String },

    #[error("not a cuspidal edge at u = {u}: {reason}")]
    NotCuspidalEdge { u: f64, reason: String },

    #[error("operation requires a {expected} chart")]
    WrongKind { expected: &'static str },

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("frame degenerate: {0}")]
    FrameDegenerate(String),

    #[error("umbilic point: every direction is principal")]
    Umbilic,

    #[error("bounded principal curvature is not smooth at ({u}, {v})")]
    NotApplicable { u: f64, v: f64 },

    #[error("parabolic point at ({u}, {v}): κ = 0")]
    Parabolic { u: f64, v: f64 },

    #[error("point is not on the focal sheet w = 1/κ (|1 - wκ| = {residual:e})")]
    NotOnFocalSheet { residual: f64 },

    #[error("point ({u}, {v}) lies outside the surface domain")]
    OutsideDomain { u: f64, v: f64 },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
