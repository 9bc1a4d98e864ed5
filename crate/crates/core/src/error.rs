use thiserror::Error;

/// Errors produced by parsing, fitting and forecasting.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("requested cells absent from records: {}", format_cells(.0))]
    MissingCells(Vec<(i32, i32)>),

    #[error("no positive rate observed at age {0}; cannot repair zero or missing cells")]
    NoPositiveRate(i32),

    #[error("year window {from}:{to} outside available range {min}:{max}")]
    WindowOutOfRange { from: i32, to: i32, min: i32, max: i32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("singular normal equations ({0}); try a larger penalty or fewer basis functions")]
    Singular(&'static str),

    #[error("x = {x} outside the knot span [{lo}, {hi}]")]
    OutsideKnotSpan { x: f64, lo: f64, hi: f64 },

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate fit: {0}")]
    Degenerate(&'static str),
}

fn format_cells(cells: &[(i32, i32)]) -> String {
    const SHOWN: usize = 20;
    let mut s = cells
        .iter()
        .take(SHOWN)
        .map(|(age, year)| format!("(age {age}, year {year})"))
        .collect::<Vec<_>>()
        .join(", ");
    if cells.len() > SHOWN {
        s.push_str(&format!(" and {} more", cells.len() - SHOWN));
    }
    s
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
