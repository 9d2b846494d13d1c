//! Spectral frames: the diagonal unperturbed operator given by its eigenvalues.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Ordered real eigenvalues of the unperturbed operator `A`, together with the
/// derived minimal gap and the set of achieved pairwise differences.
///
/// Eigenvalue order is preserved for matrix indexing. Repeats are allowed; the
/// gap `d` is taken over pairs with distinct values and is `+inf` for a frame
/// whose eigenvalues are all equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFrame {
    eigenvalues: Vec<f64>,
    d: f64,
    difference_set: Vec<f64>,
}

impl SpectralFrame {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::Domain("frame requires at least one eigenvalue".into()));
        }
        if let Some(bad) = eigenvalues.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite eigenvalue {bad}")));
        }
        let mut d = f64::INFINITY;
        let mut diffs = Vec::with_capacity(eigenvalues.len() * eigenvalues.len());
        for &li in &eigenvalues {
            for &lj in &eigenvalues {
                let diff = li - lj;
                diffs.push(diff);
                if diff != 0.0 {
                    d = d.min(diff.abs());
                }
            }
        }
        diffs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        diffs.dedup();
        Ok(Self {
            eigenvalues,
            d,
            difference_set: diffs,
        })
    }

    /// Integer eigenvalues `-half..=half`, a common test frame.
    pub fn integers(half: i64) -> Self {
        Self::new((-half..=half).map(|k| k as f64).collect()).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Minimal gap over pairs of distinct eigenvalues (`+inf` if none).
    pub fn min_gap(&self) -> f64 {
        self.d
    }

    /// Sorted, deduplicated set of achieved differences `l_i - l_j`.
    pub fn difference_set(&self) -> &[f64] {
        &self.difference_set
    }

    /// True iff no achieved difference lies in the open set
    /// `(-2a, -a) ∪ (a, 2a)`; under this condition the band filter `J` is an
    /// idempotent and the coupled-term condition of the idempotent variants
    /// holds. Differences within a relative rounding margin of the interval
    /// endpoints count as boundary points, which the open interval excludes.
    pub fn gap_condition(&self, a: f64) -> bool {
        assert!(a > 0.0, "gap condition needs a > 0");
        !self.difference_set.iter().any(|&l| {
            let m = l.abs();
            let margin = 1e-12 * (1.0 + m);
            m > a + margin && m < 2.0 * a - margin
        })
    }
}
