//! Exact leakage arithmetic on a finite joint law of the selected object `S`
//! and the inferential data `D`.
//!
//! A [`JointModel`] stores the joint probabilities `π(s, d)` together with the
//! noncoverage events `E_s = {d : θ_s ∉ C_s(d)}` as a boolean table. Targets
//! and confidence sets never appear explicitly: the bounds only depend on the
//! events.

use std::collections::HashSet;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::{BoundReport, Provenance};
use crate::error::{Error, Result};
use crate::probkit::{tv_distance, FiniteDistribution, SUM_TOLERANCE};
use crate::stream::open_unit;

/// Finite joint law of `(S, D)` with its noncoverage table.
///
/// JSON form: `selection_labels`, `data_labels`, `joint` (row per selection),
/// `noncoverage` (same shape, booleans).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJointModel")]
pub struct JointModel {
    selection_labels: Vec<String>,
    data_labels: Vec<String>,
    joint: Vec<Vec<f64>>,
    noncoverage: Vec<Vec<bool>>,
}

#[derive(Deserialize)]
struct RawJointModel {
    selection_labels: Vec<String>,
    data_labels: Vec<String>,
    joint: Vec<Vec<f64>>,
    noncoverage: Vec<Vec<bool>>,
}

impl TryFrom<RawJointModel> for JointModel {
    type Error = Error;

    fn try_from(raw: RawJointModel) -> Result<Self> {
        JointModel::new(
            raw.selection_labels,
            raw.data_labels,
            raw.joint,
            raw.noncoverage,
        )
    }
}

/// Both leakage bounds for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub tv: BoundReport,
    pub pinsker: BoundReport,
}

fn check_unique(kind: &str, labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidModel(format!("no {kind} labels")));
    }
    let mut seen = HashSet::with_capacity(labels.len());
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(Error::InvalidModel(format!(
                "duplicate {kind} label {label:?}"
            )));
        }
    }
    Ok(())
}

impl JointModel {
    pub fn new(
        selection_labels: Vec<String>,
        data_labels: Vec<String>,
        mut joint: Vec<Vec<f64>>,
        noncoverage: Vec<Vec<bool>>,
    ) -> Result<Self> {
        check_unique("selection", &selection_labels)?;
        check_unique("data", &data_labels)?;
        let (rows, cols) = (selection_labels.len(), data_labels.len());
        if joint.len() != rows || joint.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidModel(format!(
                "joint must be {rows} x {cols} (selections x data atoms)"
            )));
        }
        if noncoverage.len() != rows || noncoverage.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidModel(format!(
                "noncoverage must have the same {rows} x {cols} shape as joint"
            )));
        }
        let mut total = 0.0;
        for (s, row) in joint.iter().enumerate() {
            for (d, &p) in row.iter().enumerate() {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "joint[{s}][{d}] = {p}; entries must be finite and >= 0"
                    )));
                }
                total += p;
            }
        }
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidModel(format!("joint sums to {total}, not 1")));
        }
        if total != 1.0 {
            joint.iter_mut().flatten().for_each(|p| *p /= total);
        }
        Ok(Self {
            selection_labels,
            data_labels,
            joint,
            noncoverage,
        })
    }

    /// Product law `selection ⊗ data`: selection independent of the data.
    pub fn independent(
        selection: &FiniteDistribution,
        data: &FiniteDistribution,
        noncoverage: Vec<Vec<bool>>,
    ) -> Result<Self> {
        let joint = selection
            .probs()
            .iter()
            .map(|&ps| data.probs().iter().map(|&pd| ps * pd).collect())
            .collect();
        Self::new(
            selection.labels().to_vec(),
            data.labels().to_vec(),
            joint,
            noncoverage,
        )
    }

    pub fn selection_labels(&self) -> &[String] {
        &self.selection_labels
    }

    pub fn data_labels(&self) -> &[String] {
        &self.data_labels
    }

    pub fn joint(&self) -> &[Vec<f64>] {
        &self.joint
    }

    pub fn noncoverage(&self) -> &[Vec<bool>] {
        &self.noncoverage
    }

    fn row_masses(&self) -> Vec<f64> {
        self.joint.iter().map(|row| row.iter().sum()).collect()
    }

    fn column_masses(&self) -> Vec<f64> {
        let mut cols = vec![0.0; self.data_labels.len()];
        for row in &self.joint {
            for (c, p) in cols.iter_mut().zip(row) {
                *c += p;
            }
        }
        cols
    }

    /// Law of the selected object.
    pub fn marginal_selection(&self) -> FiniteDistribution {
        FiniteDistribution::new(self.selection_labels.clone(), self.row_masses())
            .expect("row sums of a valid joint form a distribution")
    }

    /// Law of the data, `μ = L(D)`.
    pub fn marginal_data(&self) -> FiniteDistribution {
        FiniteDistribution::new(self.data_labels.clone(), self.column_masses())
            .expect("column sums of a valid joint form a distribution")
    }

    /// `L(D | S = s)`.
    pub fn conditional_data(&self, selection: &str) -> Result<FiniteDistribution> {
        let s = self
            .selection_labels
            .iter()
            .position(|l| l == selection)
            .ok_or_else(|| Error::UnknownSelection(selection.to_string()))?;
        self.conditional_row(s)
    }

    fn conditional_row(&self, s: usize) -> Result<FiniteDistribution> {
        let row = &self.joint[s];
        let mass: f64 = row.iter().sum();
        if mass <= 0.0 {
            return Err(Error::UndefinedConditional(
                self.selection_labels[s].clone(),
            ));
        }
        let probs = row.iter().map(|p| p / mass).collect();
        FiniteDistribution::new(self.data_labels.clone(), probs)
    }

    /// `Λ_TV = Σ_s pr(s) · d_TV(L(D | S = s), L(D))`. Null selections are
    /// skipped.
    pub fn tv_leakage(&self) -> f64 {
        let marginal = self.marginal_data();
        let leakage: f64 = self
            .row_masses()
            .iter()
            .enumerate()
            .filter(|(_, &mass)| mass > 0.0)
            .map(|(s, &mass)| {
                let conditional = self.conditional_row(s).expect("row has positive mass");
                mass * tv_distance(&conditional, &marginal).expect("same data labels")
            })
            .sum();
        leakage.clamp(0.0, 1.0)
    }

    /// `I(S; D) = KL(L(S, D) || L(S) ⊗ L(D))` in nats.
    pub fn mutual_information(&self) -> f64 {
        let rows = self.row_masses();
        let cols = self.column_masses();
        let mut mi = 0.0;
        for (row, &ps) in self.joint.iter().zip(&rows) {
            for (&p, &pd) in row.iter().zip(&cols) {
                if p > 0.0 {
                    mi += p * (p / (ps * pd)).ln();
                }
            }
        }
        mi.max(0.0)
    }

    /// `sqrt(I(S; D) / 2)`, the Pinsker-Jensen cap on the TV leakage.
    pub fn pinsker_bound(&self) -> f64 {
        (0.5 * self.mutual_information()).sqrt()
    }

    /// Smallest α with `μ(E_s) ≤ α` for every selection `s`.
    pub fn fixed_target_alpha(&self) -> f64 {
        let mu = self.column_masses();
        self.noncoverage
            .iter()
            .map(|events| {
                events
                    .iter()
                    .zip(&mu)
                    .filter(|(&miss, _)| miss)
                    .map(|(_, &m)| m)
                    .sum::<f64>()
            })
            .fold(0.0_f64, f64::max)
            .min(1.0)
    }

    /// `pr(D ∈ E_S)`: the probability that the reported interval misses the
    /// target of the selected object.
    pub fn selected_noncoverage(&self) -> f64 {
        self.joint
            .iter()
            .zip(&self.noncoverage)
            .flat_map(|(row, events)| row.iter().zip(events))
            .filter(|(_, &miss)| miss)
            .map(|(&p, _)| p)
            .sum::<f64>()
            .min(1.0)
    }

    /// `α + Λ_TV` and `α + sqrt(I/2)` with α = [`Self::fixed_target_alpha`].
    pub fn theorem1_bound(&self) -> Theorem1Report {
        self.theorem1_bound_at(self.fixed_target_alpha())
    }

    /// Same as [`Self::theorem1_bound`] for a caller-declared level `alpha`.
    /// Only meaningful when `alpha >= fixed_target_alpha()`.
    pub fn theorem1_bound_at(&self, alpha: f64) -> Theorem1Report {
        let inputs = json!({ "alpha": alpha });
        Theorem1Report {
            tv: BoundReport::new(Provenance::Tv, alpha, self.tv_leakage(), inputs.clone()),
            pinsker: BoundReport::new(Provenance::Pinsker, alpha, self.pinsker_bound(), inputs),
        }
    }
}

/// Random model for property tests: joint entries i.i.d. uniform then
/// normalised, noncoverage entries fair coin flips.
pub fn random_model<R: RngCore + ?Sized>(
    rng: &mut R,
    selections: usize,
    data_atoms: usize,
) -> JointModel {
    let mut joint: Vec<Vec<f64>> = (0..selections)
        .map(|_| (0..data_atoms).map(|_| open_unit(rng.next_u64())).collect())
        .collect();
    let total: f64 = joint.iter().flatten().sum();
    joint.iter_mut().flatten().for_each(|p| *p /= total);
    let noncoverage = (0..selections)
        .map(|_| (0..data_atoms).map(|_| rng.next_u64() >> 63 == 1).collect())
        .collect();
    JointModel::new(
        (0..selections).map(|s| format!("s{s}")).collect(),
        (0..data_atoms).map(|d| format!("d{d}")).collect(),
        joint,
        noncoverage,
    )
    .expect("normalised random joint is valid")
}
