use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failed to converge after {subdivisions} subdivisions (estimate {estimate:e}, error bound {error:e})")]
    Convergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("invalid parameter `{field}`: {constraint}")]
    InvalidParameter {
        field: &'static str,
        constraint: String,
    },

    #[error("closed form unavailable: {0}")]
    ClosedFormUnavailable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, constraint: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        constraint: constraint.into(),
    }
}
