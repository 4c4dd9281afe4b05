use thiserror::Error;

use crate::surface::Defect;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A polygon or tangency configuration could not be constructed.
    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),

    #[error(
        "admissibility check enumerates vertex subsets and supports at most {max} vertices \
         (got {got}); run the flow and use its divergence diagnostics instead"
    )]
    Capacity { got: usize, max: usize },

    /// The adaptive integrator could not find an acceptable step.
    #[error("step size underflow (h = {step:e}) at t = {time}, residual max-norm {residual:e}")]
    Stiffness {
        time: f64,
        step: f64,
        residual: f64,
        state: Vec<f64>,
    },

    #[error("invalid triangulation ({} defect(s)): {}", .0.len(), first_defect(.0))]
    InvalidTriangulation(Vec<Defect>),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("{source_name}: field `{field}` (line {line}, column {column}): {message}")]
    Parse {
        source_name: String,
        field: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn first_defect(defects: &[Defect]) -> String {
    defects.first().map(|d| d.to_string()).unwrap_or_default()
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
