//! The three-point model on which `α + Λ_TV` is attained.
//!
//! Data space `{a0, a1, b}` with marginal `μ = (α, α, 1 - 2α)`. The selected
//! object is 0 or 1 with probability 1/2 each, and
//!
//! ```text
//! L(D | S = 0) = μ_0 = (α + δ, α - δ, 1 - 2α)
//! L(D | S = 1) = μ_1 = (α - δ, α + δ, 1 - 2α)
//! ```
//!
//! The interval for object `j` is empty exactly at `a_j`, so `E_j = {a_j}`.
//! Every fixed target has noncoverage α, the leakage is δ, and the selected
//! target misses with probability α + δ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jointlab::JointModel;

/// Residual allowed in each certified equality.
pub const CERTIFY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessInstance {
    pub alpha: f64,
    pub delta: f64,
    pub model: JointModel,
}

/// Quantities recomputed from the model, the residual of each equality the
/// construction promises, and the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessCertificate {
    pub quantities: CertifiedQuantities,
    pub residuals: Residuals,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedQuantities {
    pub marginal_data: Vec<f64>,
    pub tv_leakage: f64,
    pub fixed_target_alpha: f64,
    pub selected_noncoverage: f64,
    pub tv_bound_raw: f64,
}

/// Absolute residuals. `marginal_data` is the largest coordinate error;
/// `bound_gap` is `|tv_bound_raw - selected_noncoverage|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub marginal_data: f64,
    pub tv_leakage: f64,
    pub fixed_target_alpha: f64,
    pub selected_noncoverage: f64,
    pub bound_gap: f64,
}

impl Residuals {
    fn max(&self) -> f64 {
        [
            self.marginal_data,
            self.tv_leakage,
            self.fixed_target_alpha,
            self.selected_noncoverage,
            self.bound_gap,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn build_sharpness_instance(alpha: f64, delta: f64) -> Result<SharpnessInstance> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::domain("alpha", alpha, "in (0, 1/2]"));
    }
    if !(delta >= 0.0 && delta <= alpha) {
        return Err(Error::domain("delta", delta, "in [0, alpha]"));
    }
    let rest = 1.0 - 2.0 * alpha;
    let model = JointModel::new(
        vec!["0".into(), "1".into()],
        vec!["a0".into(), "a1".into(), "b".into()],
        vec![
            vec![0.5 * (alpha + delta), 0.5 * (alpha - delta), 0.5 * rest],
            vec![0.5 * (alpha - delta), 0.5 * (alpha + delta), 0.5 * rest],
        ],
        vec![vec![true, false, false], vec![false, true, false]],
    )?;
    Ok(SharpnessInstance {
        alpha,
        delta,
        model,
    })
}

/// Recomputes every quantity from `instance.model` and compares it with
/// what the declared `(alpha, delta)` predict.
pub fn certify_sharpness(instance: &SharpnessInstance) -> SharpnessCertificate {
    let (alpha, delta) = (instance.alpha, instance.delta);
    let model = &instance.model;

    let marginal_data = model.marginal_data().probs().to_vec();
    let tv_leakage = model.tv_leakage();
    let fixed_target_alpha = model.fixed_target_alpha();
    let selected_noncoverage = model.selected_noncoverage();
    let tv_bound_raw = model.theorem1_bound().tv.raw;

    let expected_marginal = [alpha, alpha, 1.0 - 2.0 * alpha];
    let marginal_residual = if marginal_data.len() == expected_marginal.len() {
        marginal_data
            .iter()
            .zip(expected_marginal)
            .map(|(got, want)| (got - want).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };

    let residuals = Residuals {
        marginal_data: marginal_residual,
        tv_leakage: (tv_leakage - delta).abs(),
        fixed_target_alpha: (fixed_target_alpha - alpha).abs(),
        selected_noncoverage: (selected_noncoverage - (alpha + delta)).abs(),
        bound_gap: (tv_bound_raw - selected_noncoverage).abs(),
    };
    let pass = residuals.max() <= CERTIFY_TOLERANCE;
    SharpnessCertificate {
        quantities: CertifiedQuantities {
            marginal_data,
            tv_leakage,
            fixed_target_alpha,
            selected_noncoverage,
            tv_bound_raw,
        },
        residuals,
        pass,
    }
}
