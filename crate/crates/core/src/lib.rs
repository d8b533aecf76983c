pub mod eigen;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod herglotz;
pub mod jacobi;
pub mod localization;
pub mod operator;
pub mod rlimit;

pub use error::{Error, Result};
