use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("operation not supported for weight family {0}")]
    UnsupportedFamily(String),

    #[error("integration-matrix entry ({row}, {col}) did not reach tolerance (estimate {estimate:e})")]
    EntryAccuracy { row: usize, col: usize, estimate: f64 },

    #[error("eigenvector matrix is ill-conditioned (condition estimate {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("symbol has a pole at the argument derived from eigenvalue {lambda}")]
    PoleEvaluation { lambda: Complex64 },

    #[error("imaginary residue {residue:e} too large for a real result")]
    ComplexResidue { residue: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("singular design matrix: d_{index} = 0")]
    SingularDesign { index: usize },

    #[error("{}", non_contraction_message(*.segment, *.iteration, *.delta))]
    NonContraction {
        segment: Option<usize>,
        iteration: usize,
        delta: f64,
    },

    #[error("oracle failure: {0}")]
    OracleFailure(String),
}

fn non_contraction_message(segment: Option<usize>, iteration: usize, delta: f64) -> String {
    let head = match segment {
        Some(s) => format!("Picard iteration diverged on segment {s}"),
        None => "Picard iteration diverged".to_string(),
    };
    format!("{head} at iteration {iteration} (delta {delta:e}); split the interval into shorter pieces")
}

impl Error {
    /// True for errors raised by the numerics rather than by bad arguments.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::ParameterDomain(_) | Error::UnsupportedFamily(_) | Error::InvalidProblem(_)
        )
    }
}
