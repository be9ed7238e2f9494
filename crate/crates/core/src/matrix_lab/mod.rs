//! Finite-dimensional experiments: symmetric matrices with separated spectra,
//! random perturbations, spectral projections and maximal angles.

pub mod eigen;
pub mod path;
pub mod projection;
pub mod trial;

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use path::{optimal_partition, path_experiment, uniform_partition, PathReport, PathStep};
pub use projection::{maximal_angle, spectral_projection, IntervalSet};
pub use trial::{
    run_experiment, run_trial, sharpness_search, two_by_two_angle, AngleRecord, Layout, SharpnessResult,
    SpectralProblem,
};
