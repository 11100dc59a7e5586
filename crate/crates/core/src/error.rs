use std::fmt;

/// Why a computation ran out of budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResourceKind {
    /// Simplex pivot budget exhausted.
    IterationLimit,
    /// Branch-and-bound node budget exhausted.
    NodeLimit,
    /// Too many binary variables for the configured limit.
    BinaryLimit,
    /// Enumeration or exhaustive search larger than the configured limit.
    EnumerationLimit,
    /// A loop guard tripped.
    LoopGuard,
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ResourceKind::IterationLimit => "iteration limit",
            ResourceKind::NodeLimit => "node limit",
            ResourceKind::BinaryLimit => "binary variable limit",
            ResourceKind::EnumerationLimit => "enumeration limit",
            ResourceKind::LoopGuard => "loop guard",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource exhausted ({kind}): {detail}")]
    Resource { kind: ResourceKind, detail: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("query at cell {cell:?} failed: {source}")]
    Cell {
        cell: Vec<i64>,
        #[source]
        source: Box<Error>,
    },

    #[error("external solver: {0}")]
    External(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resource(kind: ResourceKind, detail: impl Into<String>) -> Self {
        Error::Resource {
            kind,
            detail: detail.into(),
        }
    }

    /// True for budget exhaustion, including when wrapped by a cell query.
    pub fn is_resource(&self) -> bool {
        match self {
            Error::Resource { .. } => true,
            Error::Cell { source, .. } => source.is_resource(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
