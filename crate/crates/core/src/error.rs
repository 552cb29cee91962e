use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A Fock index or factorial argument exceeded a precomputed table.
    #[error("capacity exceeded: {what} = {requested} > {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Both Glauber amplitudes vanish, so the projection onto a
    /// subspace with nonzero weighted quantum number is the zero vector.
    #[error("projection of the vacuum onto subspace (N={n}, p={p}, q={q}) is zero")]
    ZeroProjection { n: usize, p: usize, q: usize },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("circle crosses nodal region: rho = {rho:e} < floor {floor:e} at ({x}, {y})")]
    NodalCrossing { x: f64, y: f64, rho: f64, floor: f64 },

    #[error("accumulated phase {turns} turns is not integral (undersampled circle)")]
    NonIntegralWinding { turns: f64 },

    #[error("grid truncates the state: trapezoid mass {mass} < {required}")]
    MassDeficit { mass: f64, required: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
