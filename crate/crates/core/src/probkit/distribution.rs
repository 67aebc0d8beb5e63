use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a distribution at construction.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A probability vector over a finite, ordered set of labelled atoms.
///
/// Construction validates the vector and renormalises it once, so the stored
/// probabilities sum to one up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct FiniteDistribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl TryFrom<RawDistribution> for FiniteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        FiniteDistribution::new(raw.labels, raw.probs)
    }
}

impl FiniteDistribution {
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        if labels.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels but {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate label {label:?}"
                )));
            }
        }
        let probs = normalize_mass(probs).map_err(Error::InvalidDistribution)?;
        Ok(Self { labels, probs })
    }

    /// Distribution with labels `"0"`, `"1"`, ...
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let labels = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(labels, probs)
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::from_probs(vec![1.0 / k as f64; k])
    }

    pub fn point_mass(k: usize, at: usize) -> Result<Self> {
        if at >= k {
            return Err(Error::InvalidDistribution(format!(
                "atom {at} outside 0..{k}"
            )));
        }
        let mut probs = vec![0.0; k];
        probs[at] = 1.0;
        Self::from_probs(probs)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob_of(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probs[i])
    }

    fn check_same_support(&self, other: &Self) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch(format!(
                "{:?} vs {:?}",
                self.labels, other.labels
            )));
        }
        Ok(())
    }
}

/// Checks a mass vector (finite, nonnegative, total within [`SUM_TOLERANCE`]
/// of one) and divides it by its total.
pub(crate) fn normalize_mass(mut probs: Vec<f64>) -> std::result::Result<Vec<f64>, String> {
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(format!("probability {i} is {p}; must be finite and >= 0"));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(format!("probabilities sum to {total}, not 1"));
    }
    if total != 1.0 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    Ok(probs)
}

/// Total-variation distance, `sup_A |p(A) - q(A)|`, which on a finite space is
/// half the l1 distance.
pub fn tv_distance(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    p.check_same_support(q)?;
    let l1: f64 = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((0.5 * l1).clamp(0.0, 1.0))
}

/// Kullback-Leibler divergence `KL(p || q)` in nats.
///
/// Atoms with `p_i = 0` contribute nothing. If some atom has `p_i > 0` but
/// `q_i = 0` the divergence is `f64::INFINITY`, which is a value, not an
/// error.
pub fn kl_divergence(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    p.check_same_support(q)?;
    let mut kl = 0.0;
    for (&a, &b) in p.probs.iter().zip(&q.probs) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        kl += a * (a / b).ln();
    }
    Ok(kl.max(0.0))
}

/// Shannon entropy in nats.
///
/// Evaluated as `log k - KL(p || uniform_k)`, which is algebraically
/// `-Σ p_i log p_i`. Atoms with `|k p_i - 1|` within rounding of the
/// representation of `1/k` contribute nothing, so the uniform law gets
/// `log k` exactly. The result is clamped to `[0, log k]`.
pub fn entropy(p: &FiniteDistribution) -> f64 {
    let k = p.len() as f64;
    let log_k = k.ln();
    let gap: f64 = p
        .probs
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| {
            let ratio = k * x;
            if (ratio - 1.0).abs() <= 4.0 * f64::EPSILON {
                0.0
            } else {
                x * ratio.ln()
            }
        })
        .sum();
    (log_k - gap).clamp(0.0, log_k)
}
