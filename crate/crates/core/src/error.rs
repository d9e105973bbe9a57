use num_rational::Ratio;
use thiserror::Error;

/// Errors raised by field construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field description: {0}")]
    InvalidField(String),

    #[error("no primitive {order}-th root of unity in this field")]
    NoRootOfUnity { order: u64 },

    #[error("elements belong to different fields")]
    FieldMismatch,

    #[error("element is indistinguishable from zero at precision p^{prec}")]
    IndistinguishableFromZero { prec: i64 },

    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("element is not integral (ord_p = {ord})")]
    NotIntegral { ord: Ratio<i64> },

    #[error("element is not a unit (ord_p = {ord})")]
    NotUnit { ord: Ratio<i64> },

    #[error("domain violation: {what} (ord_p = {ord}, required {required})")]
    Domain {
        what: &'static str,
        ord: Ratio<i64>,
        required: String,
    },

    #[error("no quadratic convergence: ord f(x0) = {f_ord}, ord f'(x0) = {df_ord}")]
    NoQuadraticConvergence { f_ord: Ratio<i64>, df_ord: Ratio<i64> },

    #[error("trace is not divisible by p^{n} (ord = {ord}); refusing to round")]
    NonIntegralTrace { n: u32, ord: Ratio<i64> },

    #[error("polynomial lift does not evaluate to the given element")]
    LiftMismatch,

    #[error("linear system is singular at the available precision")]
    Singular,

    #[error("Laurent window overflow: exponent {exponent} outside [-{trunc}, {trunc}]")]
    WindowOverflow { exponent: i64, trunc: i64 },

    #[error("input outside the modeled domain: {0}")]
    OutOfModeledDomain(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("oracle failure: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
