use crate::distributions::Family;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid {family} parameters: {reason}")]
    InvalidParameter { family: Family, reason: String },

    #[error("density is zero or not representable at support point {at}")]
    ZeroDensity { at: f64 },

    #[error("support point {0} is not finite")]
    NonFiniteSupport(f64),

    #[error("need at least 2 distinct support points, found {found}")]
    InsufficientSupport { found: usize },

    #[error("tables are defined on different supports")]
    SupportMismatch,

    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    #[error("no natural exponential-family form for {0}")]
    UnsupportedFamily(String),

    #[error("outside the parameter domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("selection needs at least 2 evaluable candidates, got {evaluable}")]
    SelectionImpossible { evaluable: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(family: Family, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            family,
            reason: reason.into(),
        }
    }
}
