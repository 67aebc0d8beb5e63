//! Closed-form noncoverage bounds for screening channels that are limited by
//! design, and the inverse map from a leakage budget to a noise scale.
//!
//! Gaussian noisy screening: the selector sees `W = T(D) + ξ`,
//! `ξ ~ N(0, τ² I_q)`. Its leakage term is
//! `sqrt( log det(I + Σ_T / τ²) / 4 )`, and when only `tr Σ_T ≤ v` is known,
//! `sqrt( (q/4) log(1 + v / (q τ²)) )`.
//!
//! Finite-message screening: the selector sees a finite summary `W = φ(D)`;
//! the leakage term is `sqrt(H(W) / 2) ≤ sqrt(log |W| / 2)`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::probkit::{log_det_scaled, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "TV")]
    Tv,
    Pinsker,
    GaussianFull,
    GaussianTrace,
    FiniteMessageEntropy,
    FiniteMessageAlphabet,
    AsymptoticTransfer,
}

/// Upper bound on selected-target noncoverage, split into the fixed-target
/// level and the leakage term.
///
/// `raw = alpha + leakage_term` and `value = min(1, raw)`. For the asymptotic
/// transfer bound `alpha` is the fixed-target level including its remainder,
/// `α + r_m`; the separate parts are echoed in `inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub provenance: Provenance,
    pub value: f64,
    pub raw: f64,
    pub alpha: f64,
    pub leakage_term: f64,
    pub inputs: Map<String, Value>,
}

impl BoundReport {
    pub fn new(provenance: Provenance, alpha: f64, leakage_term: f64, inputs: Value) -> Self {
        let raw = alpha + leakage_term;
        let inputs = match inputs {
            Value::Object(map) => map,
            Value::Null => Map::new(),
            other => {
                let mut map = Map::new();
                map.insert("value".into(), other);
                map
            }
        };
        Self {
            provenance,
            value: raw.min(1.0),
            raw,
            alpha,
            leakage_term,
            inputs,
        }
    }
}

/// What is known about the covariance of the screening statistic `T(D)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum CovarianceSpec {
    Full { sigma: SymmetricMatrix },
    TraceBound { q: usize, v: f64 },
}

impl CovarianceSpec {
    pub fn full(sigma: SymmetricMatrix) -> Result<Self> {
        if !sigma.is_psd() {
            return Err(Error::NotPsd);
        }
        Ok(CovarianceSpec::Full { sigma })
    }

    pub fn trace_bound(q: usize, v: f64) -> Result<Self> {
        check_dim(q)?;
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::domain("v", v, "finite and >= 0"));
        }
        Ok(CovarianceSpec::TraceBound { q, v })
    }

    pub fn dim(&self) -> usize {
        match self {
            CovarianceSpec::Full { sigma } => sigma.dim(),
            CovarianceSpec::TraceBound { q, .. } => *q,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            CovarianceSpec::Full { sigma } if !sigma.is_psd() => Err(Error::NotPsd),
            CovarianceSpec::Full { .. } => Ok(()),
            CovarianceSpec::TraceBound { q, v } => Self::trace_bound(*q, *v).map(|_| ()),
        }
    }
}

fn check_dim(q: usize) -> Result<()> {
    if q == 0 {
        return Err(Error::domain("q", 0.0, "at least 1"));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain("alpha", alpha, "in [0, 1]"));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::domain("tau", tau, "positive and finite"));
    }
    Ok(())
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(name, x, "positive and finite"));
    }
    Ok(())
}

fn check_nonnegative(name: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::domain(name, x, "finite and >= 0"));
    }
    Ok(())
}

/// Leakage term of the Gaussian noisy-screening bound.
pub fn gaussian_leakage(spec: &CovarianceSpec, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    spec.validate()?;
    let half_information = match spec {
        CovarianceSpec::Full { sigma } => 0.25 * log_det_scaled(sigma, tau)?,
        CovarianceSpec::TraceBound { q, v } => {
            let q = *q as f64;
            0.25 * q * (v / (q * tau * tau)).ln_1p()
        }
    };
    Ok(half_information.max(0.0).sqrt())
}

pub fn gaussian_noncoverage_bound(
    alpha: f64,
    spec: &CovarianceSpec,
    tau: f64,
) -> Result<BoundReport> {
    check_alpha(alpha)?;
    let leakage = gaussian_leakage(spec, tau)?;
    let (provenance, inputs) = match spec {
        CovarianceSpec::Full { sigma } => (
            Provenance::GaussianFull,
            json!({ "alpha": alpha, "tau": tau, "q": sigma.dim(), "sigma": sigma }),
        ),
        CovarianceSpec::TraceBound { q, v } => (
            Provenance::GaussianTrace,
            json!({ "alpha": alpha, "tau": tau, "q": q, "trace": v }),
        ),
    };
    Ok(BoundReport::new(provenance, alpha, leakage, inputs))
}

/// Noise scale at which the trace-variant leakage equals `epsilon`:
/// `τ = sqrt( v / (q (exp(4ε²/q) - 1)) )`.
pub fn calibrate_tau(q: usize, v: f64, epsilon: f64) -> Result<f64> {
    check_dim(q)?;
    check_positive("v", v)?;
    check_positive("epsilon", epsilon)?;
    let q = q as f64;
    let growth = (4.0 * epsilon * epsilon / q).exp_m1();
    let tau = (v / (q * growth)).sqrt();
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::NoConvergence(format!(
            "calibrated tau = {tau} is not representable"
        )));
    }
    Ok(tau)
}

/// Noise scale at which the full-covariance leakage equals `epsilon`, by
/// bisection on `log τ`. The map `τ ↦ gaussian_leakage(Full Σ, τ)` is strictly
/// decreasing whenever `Σ ≠ 0`.
pub fn calibrate_tau_full(sigma: &SymmetricMatrix, epsilon: f64) -> Result<f64> {
    check_positive("epsilon", epsilon)?;
    if !sigma.is_psd() {
        return Err(Error::NotPsd);
    }
    if sigma.trace() <= 0.0 {
        return Err(Error::domain(
            "trace(sigma)",
            sigma.trace(),
            "positive; a zero covariance leaks nothing at any tau",
        ));
    }
    let spec = CovarianceSpec::Full {
        sigma: sigma.clone(),
    };
    let leak = |log_tau: f64| gaussian_leakage(&spec, log_tau.exp());

    // The trace-variant solution is an upper bound on the answer and a good
    // starting point.
    let start = calibrate_tau(sigma.dim(), sigma.trace(), epsilon)?.ln();
    let (mut lo, mut hi) = (start - 1.0, start);
    let mut widen = 1.0;
    while leak(lo)? < epsilon {
        widen *= 2.0;
        lo = start - widen;
        if widen > 1400.0 {
            return Err(Error::NoConvergence("no lower bracket for tau".into()));
        }
    }
    while leak(hi)? > epsilon {
        widen *= 2.0;
        hi = start + widen;
        if widen > 1400.0 {
            return Err(Error::NoConvergence("no upper bracket for tau".into()));
        }
    }
    // Relative width of τ is exp(hi - lo) - 1.
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if leak(mid)? > epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// `α + sqrt(H(W)/2)` for a selector that sees only a finite message `W` with
/// entropy `entropy_nats`.
pub fn finite_message_bound(alpha: f64, entropy_nats: f64) -> Result<BoundReport> {
    check_alpha(alpha)?;
    check_nonnegative("entropy", entropy_nats)?;
    Ok(BoundReport::new(
        Provenance::FiniteMessageEntropy,
        alpha,
        (0.5 * entropy_nats).sqrt(),
        json!({ "alpha": alpha, "entropy_nats": entropy_nats }),
    ))
}

/// Alphabet-size variant: `α + sqrt(log k / 2)`.
pub fn finite_message_alphabet_bound(alpha: f64, alphabet_size: usize) -> Result<BoundReport> {
    check_alpha(alpha)?;
    if alphabet_size == 0 {
        return Err(Error::domain("alphabet", 0.0, "at least 1"));
    }
    let log_k = (alphabet_size as f64).ln();
    Ok(BoundReport::new(
        Provenance::FiniteMessageAlphabet,
        alpha,
        (0.5 * log_k).sqrt(),
        json!({ "alpha": alpha, "alphabet": alphabet_size }),
    ))
}

/// `α + r_m + sqrt(η_m / 2)` for a sequence of problems whose fixed-target
/// error is `α + r_m` and whose mutual information is at most `η_m`.
pub fn asymptotic_transfer(alpha: f64, r_m: f64, eta_m: f64) -> Result<BoundReport> {
    check_alpha(alpha)?;
    check_nonnegative("r_m", r_m)?;
    check_nonnegative("eta_m", eta_m)?;
    Ok(BoundReport::new(
        Provenance::AsymptoticTransfer,
        alpha + r_m,
        (0.5 * eta_m).sqrt(),
        json!({ "alpha": alpha, "r_m": r_m, "eta_m": eta_m }),
    ))
}

/// Trace cap `Σ B_j² / 4` for statistics whose components lie in intervals
/// of lengths `B_j`.
pub fn interval_trace_cap(lengths: &[f64]) -> Result<f64> {
    if lengths.is_empty() {
        return Err(Error::domain("lengths", 0.0, "at least one interval"));
    }
    for &b in lengths {
        check_positive("length", b)?;
    }
    Ok(0.25 * lengths.iter().map(|b| b * b).sum::<f64>())
}
