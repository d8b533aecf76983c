//! Symmetric eigensolvers and finite-section spectrum assembly.

mod dense;
mod lanczos;
mod matrix;
mod spectrum;
mod tridiag;

pub use dense::{eig_sym_dense, SymmetricEigen};
pub use lanczos::{lanczos, LanczosRun};
pub use matrix::DenseMatrix;
pub use spectrum::{
    certify_ball_spectrum, cluster_intervals, default_gap, hausdorff, hull_distance, spectrum_approx, SpectrumApproximation,
    StabilityEntry,
};
pub use tridiag::{eig_sym_tridiag, sturm_count};
