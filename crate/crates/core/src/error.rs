use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: String, reason: String },

    #[error("angular frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("green's function system is singular at omega = {omega:e} rad/s")]
    SingularSystem { omega: f64 },

    #[error("oracle cannot bound truncation error: {0}")]
    OracleUnbounded(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {value:e}, error {abs_error:e}, tolerance {tolerance:e})"
    )]
    NotConverged {
        value: f64,
        abs_error: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("electric LDOS {ldos:e} at x = {x:e} m is below the floor {floor:e}; photon number undefined")]
    DegenerateLdos { x: f64, ldos: f64, floor: f64 },

    #[error("photon occupation must be positive, got {0}")]
    NonPositiveOccupation(f64),

    #[error("{} grid point(s) failed; first at x = {x:e} m, omega = {omega:e} rad/s: {source}", .count)]
    FieldMap {
        count: usize,
        x: f64,
        omega: f64,
        source: Box<Error>,
    },

    #[error("bisection bracket [{t_lo}, {t_hi}] K does not enclose a root in cell {cell} (residuals {r_lo:e}, {r_hi:e})")]
    BracketFailure {
        cell: usize,
        t_lo: f64,
        t_hi: f64,
        r_lo: f64,
        r_hi: f64,
    },

    #[error("stack has no lossy interior layer to solve for")]
    NoLossyLayer,
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
