use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check, scaled by the largest entry.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Square symmetric matrix, stored row-major.
///
/// Serialised as `{"dim": q, "entries": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawMatrix {
    dim: usize,
    entries: Vec<Vec<f64>>,
}

impl TryFrom<RawMatrix> for SymmetricMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        if raw.entries.len() != raw.dim {
            return Err(Error::InvalidMatrix(format!(
                "dim is {} but there are {} rows",
                raw.dim,
                raw.entries.len()
            )));
        }
        SymmetricMatrix::new(raw.entries)
    }
}

impl SymmetricMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let dim = entries.len();
        if dim == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            if let Some(x) = row.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidMatrix(format!("row {i} holds {x}")));
            }
        }
        let scale = entries
            .iter()
            .flatten()
            .fold(0.0_f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in 0..i {
                if (entries[i][j] - entries[j][i]).abs() > SYMMETRY_TOLERANCE * scale {
                    return Err(Error::InvalidMatrix(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![vec![0.0; dim]; dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut entries = vec![vec![0.0; dim]; dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i][i] = d;
        }
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[i][i]).sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.entries
                .iter()
                .map(|row| row.iter().map(|x| x * factor).collect())
                .collect(),
        )
    }

    /// Positive semidefiniteness test: Cholesky of `Σ + εI` with `ε` a tiny
    /// multiple of the largest diagonal entry.
    pub fn is_psd(&self) -> bool {
        let max_diag = (0..self.dim).fold(0.0_f64, |m, i| m.max(self.entries[i][i].abs()));
        let jitter = 1e-12 * max_diag.max(f64::MIN_POSITIVE);
        cholesky_log_det(&self.entries, 1.0, jitter).is_some()
    }
}

/// `log det(I + Σ / τ²)`, from the Cholesky factor of the shifted matrix.
pub fn log_det_scaled(sigma: &SymmetricMatrix, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::domain("tau", tau, "positive and finite"));
    }
    if !sigma.is_psd() {
        return Err(Error::NotPsd);
    }
    let inv_tau2 = 1.0 / (tau * tau);
    let log_det = cholesky_log_det(&sigma.entries, inv_tau2, 1.0).ok_or(Error::NotPsd)?;
    Ok(log_det.max(0.0))
}

/// Log-determinant of `scale·A + shift·I` via an in-place Cholesky
/// factorisation. `None` when a pivot is not strictly positive.
fn cholesky_log_det(a: &[Vec<f64>], scale: f64, shift: f64) -> Option<f64> {
    let q = a.len();
    let mut l = vec![vec![0.0; q]; q];
    let mut log_det = 0.0;
    for j in 0..q {
        let mut pivot = scale * a[j][j] + shift;
        for k in 0..j {
            pivot -= l[j][k] * l[j][k];
        }
        if pivot.is_nan() || pivot <= 0.0 {
            return None;
        }
        let d = pivot.sqrt();
        l[j][j] = d;
        log_det += 2.0 * d.ln();
        for i in (j + 1)..q {
            let mut s = scale * a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / d;
        }
    }
    Some(log_det)
}
