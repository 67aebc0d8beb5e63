//! Leakage bounds for selected-target confidence sets.
//!
//! When the object reported by an analysis is picked after looking at the
//! data, a fixed-target interval can lose coverage. The loss is controlled by
//! how much the selected object tells you about the inferential sample:
//!
//! ```text
//! pr{θ_S ∉ C_S(D)} ≤ α + E_S[ d_TV( L(D | S), L(D) ) ] ≤ α + sqrt( I(S; D) / 2 )
//! ```
//!
//! The crate is organised as
//!
//! * [`probkit`]: finite distributions, divergences, entropy, normal special
//!   functions and a positive-definite log-determinant.
//! * [`jointlab`]: exact leakage arithmetic on finite joint laws of the selected
//!   object and the data.
//! * [`sharpness`]: the three-point model on which the total-variation bound is
//!   attained, with an executable certificate.
//! * [`bounds`]: closed-form bounds for Gaussian noisy screening and
//!   finite-message screening, plus noise-scale calibration.
//! * [`simlab`]: a deterministic Monte Carlo harness for coverage of the
//!   selected coordinate mean under four screening designs.

pub mod bounds;
mod error;
pub mod jointlab;
pub mod probkit;
pub mod sharpness;
pub mod simlab;
mod stream;

pub use bounds::{BoundReport, CovarianceSpec, Provenance};
pub use error::{Error, Result};
pub use jointlab::{JointModel, Theorem1Report};
pub use probkit::{FiniteDistribution, SymmetricMatrix};
pub use sharpness::{SharpnessCertificate, SharpnessInstance};
pub use simlab::{CoverageReport, ScreeningDesign, SimulationConfig};
