use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the placement pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    #[error("{file}:{line}: {reason}")]
    MalformedLine {
        file: String,
        line: usize,
        reason: String,
    },

    #[error("net `{net}` references unknown node `{node}`")]
    DanglingPinReference { net: String, node: String },

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("placement has no location for node `{0}`")]
    MissingLocation(String),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("grid cell ({col}, {row}) out of range for {n_cols}x{n_rows} grid")]
    OutOfRange {
        col: usize,
        row: usize,
        n_cols: usize,
        n_rows: usize,
    },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node `{0}` is not movable")]
    NotMovable(String),

    #[error("std cell `{0}` has no initial location")]
    MissingInitialLocation(String),

    #[error("point ({x}, {y}) lies outside the canvas")]
    PointOutsideCanvas { x: f64, y: f64 },

    #[error("net `{0}` has fewer than two pins")]
    DegenerateNet(String),

    #[error("netlist has no nets")]
    EmptyNetlist,

    #[error("empty grid-cell set")]
    EmptyCellSet,

    #[error("macro `{0}` cannot be placed legally")]
    Unplaceable(String),

    #[error("annealer initialization failed: {0}")]
    InitFailed(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("all {0} workers failed; first error: {1}")]
    AllWorkersFailed(usize, Box<Error>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Variant name, used as a stable diagnostic tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingFile(_) => "MissingFile",
            Error::MalformedLine { .. } => "MalformedLine",
            Error::DanglingPinReference { .. } => "DanglingPinReference",
            Error::Io { .. } => "Io",
            Error::MissingLocation(_) => "MissingLocation",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::UnknownNode(_) => "UnknownNode",
            Error::NotMovable(_) => "NotMovable",
            Error::MissingInitialLocation(_) => "MissingInitialLocation",
            Error::PointOutsideCanvas { .. } => "PointOutsideCanvas",
            Error::DegenerateNet(_) => "DegenerateNet",
            Error::EmptyNetlist => "EmptyNetlist",
            Error::EmptyCellSet => "EmptyCellSet",
            Error::Unplaceable(_) => "Unplaceable",
            Error::InitFailed(_) => "InitFailed",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::AllWorkersFailed(..) => "AllWorkersFailed",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub(crate) fn malformed(file: &str, line: usize, reason: impl Into<String>) -> Self {
        Error::MalformedLine {
            file: file.to_string(),
            line,
            reason: reason.into(),
        }
    }
}
