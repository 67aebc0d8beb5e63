//! Numerical building blocks: finite distributions and their divergences,
//! standard normal functions, and the shifted log-determinant.
//!
//! Every information quantity is in nats.

mod distribution;
mod matrix;
pub mod normal;

pub use distribution::{entropy, kl_divergence, tv_distance, FiniteDistribution, SUM_TOLERANCE};
pub use matrix::{log_det_scaled, SymmetricMatrix, SYMMETRY_TOLERANCE};
pub use normal::{normal_cdf, normal_pdf, normal_quantile};
