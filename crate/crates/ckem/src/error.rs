use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum CkemError {
    /// Malformed polytope input (too few vertices, repeats, collinear or
    /// clockwise data that cannot be repaired by re-sorting).
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    /// A family or operation parameter is outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// The affine function is not strictly positive on the polytope.
    #[error("f is not positive on the polytope: f(vertex {vertex_index} = ({x}, {y})) = {value}")]
    Positivity {
        vertex_index: usize,
        x: f64,
        y: f64,
        value: f64,
    },

    /// A caller-supplied contract (slice residual, certified invariant) is violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An iterative solver failed to converge.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    /// A linear system that should be regular turned out singular.
    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, CkemError>;
