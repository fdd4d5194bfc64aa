use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("overflow in {what} at argument {arg}")]
    Overflow { what: &'static str, arg: f64 },

    #[error("invalid interval [{a}, {b}]: {reason}")]
    InvalidInterval {
        a: f64,
        b: f64,
        reason: &'static str,
    },

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown inequality `{0}`")]
    UnknownInequality(String),

    #[error("descriptor format version {found} does not match {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("trial descriptor does not reproduce: {0}")]
    DescriptorMismatch(String),

    #[error("generator exhausted {0} redraws without producing a certified function")]
    RedrawLimit(u32),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        what,
        detail: detail.into(),
    }
}
