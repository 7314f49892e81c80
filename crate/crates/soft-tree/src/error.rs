//! Error types shared across the crate.

use std::path::PathBuf;

/// Classifies malformed input data so callers can react to (and tests can
/// assert on) the specific failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormatKind {
    /// File magic number did not match the expected format.
    BadMagic,
    /// File ended before the declared payload was read.
    Truncated,
    /// Image and label files declare different example counts.
    CountMismatch,
    /// Unrecognized token in a text record.
    BadToken,
    /// A numeric field fell outside its documented range.
    OutOfRange,
    /// Header line is missing or malformed.
    BadHeader,
    /// Number of data rows disagrees with the header.
    RowCountMismatch,
    /// A row fails a structural check (field count, width, normalization).
    BadRow,
}

impl std::fmt::Display for DataFormatKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DataFormatKind::BadMagic => "bad magic",
            DataFormatKind::Truncated => "truncated payload",
            DataFormatKind::CountMismatch => "count mismatch",
            DataFormatKind::BadToken => "bad token",
            DataFormatKind::OutOfRange => "value out of range",
            DataFormatKind::BadHeader => "bad header",
            DataFormatKind::RowCountMismatch => "row count mismatch",
            DataFormatKind::BadRow => "bad row",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what}: expected length {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("target distribution not normalized: sum = {sum}")]
    UnnormalizedTarget { sum: f64 },

    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },

    #[error("targets misaligned with dataset: {expected} examples expected, got {actual}")]
    MisalignedTargets { expected: usize, actual: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("{kind} in {path}{}: {detail}", line.map(|l| format!(", line {l}")).unwrap_or_default())]
    DataFormat {
        kind: DataFormatKind,
        path: PathBuf,
        line: Option<usize>,
        detail: String,
    },

    #[error("model kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("model file violates schema: {0}")]
    ModelSchema(String),

    #[error("missing filter images: {}", .0.join(", "))]
    MissingImages(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn data(
        kind: DataFormatKind,
        path: impl Into<PathBuf>,
        line: Option<usize>,
        detail: impl Into<String>,
    ) -> Self {
        Error::DataFormat {
            kind,
            path: path.into(),
            line,
            detail: detail.into(),
        }
    }

    /// The format kind, when this is a data-format error.
    pub fn data_format_kind(&self) -> Option<DataFormatKind> {
        match self {
            Error::DataFormat { kind, .. } => Some(*kind),
            _ => None,
        }
    }
}
