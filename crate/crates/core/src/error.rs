use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The target value is not bracketed by the function values at the ends.
    #[error("target {target} not bracketed by f({lo}) = {f_lo} and f({hi}) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        target: f64,
    },

    #[error("no convergence after {iterations} iterations: {what}")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },

    /// `phi_inverse` was asked for a point below `φ_b(0) = b`, where the
    /// best response sits on the zero-allocation boundary.
    #[error("interior-action domain violated: {value} < b = {bias}")]
    InteriorAction { value: f64, bias: f64 },

    /// The requested number of cells exceeds the maximal message count.
    #[error("cells exceeds M*: requested {requested}, at most {max} supported at b = {bias}")]
    Infeasible {
        requested: usize,
        max: usize,
        bias: f64,
    },
}
