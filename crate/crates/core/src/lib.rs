//! Indefinite-integration matrices built from orthogonal-polynomial
//! interpolation, matrix functions through their eigendecomposition, and
//! solvers for transform inversion, indefinite convolution, initial-value
//! problems and Wiener–Hopf equations.

pub mod basis;
pub mod convolve;
pub mod error;
pub mod intmat;
pub mod invert;
pub mod ode;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod verify;
pub mod wiener_hopf;

pub use basis::{build_basis, IntervalMap, QuadratureBasis, WeightFamily};
pub use error::{Error, Result};
pub use intmat::{
    build_integration_matrices, eigen_factorize, Analyticity, EigenFactorization, IntegrationMatrices,
    ScalarSymbol, ScaledMatrix, Side,
};
pub use pipeline::{reference_run, run_pipeline, DemoConfig, PipelineId, REFERENCE_N};
pub use report::{ExactKind, ReportRow, SolveReport};
pub use verify::{conjecture_scan, run_suite, ConjectureReport, VerifyReport};
