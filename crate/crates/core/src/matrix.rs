//! Dense complex matrices tied to a spectral frame: norms, resolvents, and
//! Beurling support classification.

use crate::error::{Error, Result};
use crate::frame::SpectralFrame;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Largest singular value.
    Spectral,
    /// Hilbert-Schmidt norm.
    Frobenius,
}

/// Dense complex square matrix representing a perturbation or a transform
/// output, immutable after construction and tied to its frame.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    frame: Arc<SpectralFrame>,
    data: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn new(frame: Arc<SpectralFrame>, data: DMatrix<Complex64>) -> Result<Self> {
        if !data.is_square() || data.nrows() != frame.dim() {
            return Err(Error::Domain(format!(
                "matrix must be square of size {}, got {}x{}",
                frame.dim(),
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { frame, data })
    }

    pub fn zeros(frame: Arc<SpectralFrame>) -> Self {
        let n = frame.dim();
        Self {
            frame,
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(frame: Arc<SpectralFrame>) -> Self {
        let n = frame.dim();
        Self {
            frame,
            data: DMatrix::identity(n, n),
        }
    }

    /// Diagonal matrix of the frame itself (the unperturbed operator `A`).
    pub fn diagonal_of_frame(frame: Arc<SpectralFrame>) -> Self {
        let n = frame.dim();
        let data = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(frame.eigenvalues()[i], 0.0)
            } else {
                Complex64::default()
            }
        });
        Self { frame, data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn frame(&self) -> &Arc<SpectralFrame> {
        &self.frame
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<Complex64> {
        self.data
    }

    /// Same frame (by value) and same dimension.
    pub fn is_tied_to(&self, frame: &SpectralFrame) -> bool {
        self.frame.as_ref() == frame
    }

    pub fn ensure_tied_to(&self, frame: &SpectralFrame) -> Result<()> {
        if self.is_tied_to(frame) {
            Ok(())
        } else {
            Err(Error::FrameMismatch(
                "matrix is tied to a different frame".into(),
            ))
        }
    }

    /// Wrap raw data that is known to share this matrix's frame.
    pub fn with_data(&self, data: DMatrix<Complex64>) -> Result<Self> {
        Self::new(self.frame.clone(), data)
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        operator_norm(self, kind)
    }
}

/// Spectral norm via dense SVD, or the Frobenius norm.
pub fn operator_norm(x: &OperatorMatrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::Spectral => spectral_norm(x.data()),
        NormKind::Frobenius => x.data().norm(),
    }
}

pub(crate) fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.iter().all(|z| z.norm_sqr() == 0.0) {
        return 0.0;
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().fold(0.0, |acc, &s| acc.max(s))
}

/// Diagonal resolvent `(A - z)^{-1}` of the frame.
pub fn resolvent(frame: &Arc<SpectralFrame>, z: Complex64) -> Result<OperatorMatrix> {
    let dist = frame
        .eigenvalues()
        .iter()
        .map(|&l| (Complex64::new(l, 0.0) - z).norm())
        .fold(f64::INFINITY, f64::min);
    if dist <= 1e-14 {
        return Err(Error::SingularResolvent { z, dist });
    }
    let n = frame.dim();
    let data = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (Complex64::new(frame.eigenvalues()[i], 0.0) - z).inv()
        } else {
            Complex64::default()
        }
    });
    OperatorMatrix::new(frame.clone(), data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportClass {
    Zero,
    Memoryless,
    Causal,
    Anticausal,
    Hypercausal,
    Hyperanticausal,
    Mixed,
}

/// Finite-matrix realization of the Beurling spectrum: the achieved
/// eigenvalue differences over entries above the threshold, with the
/// causality class they imply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSet {
    pub offsets: Vec<f64>,
    pub class: SupportClass,
}

impl SupportSet {
    pub fn min_offset(&self) -> Option<f64> {
        self.offsets.first().copied()
    }

    pub fn max_offset(&self) -> Option<f64> {
        self.offsets.last().copied()
    }
}

/// Offsets `{l_i - l_j : |X_ij| > tol * ||X||_F}`, classified.
pub fn beurling_support(frame: &SpectralFrame, x: &OperatorMatrix, tol: f64) -> Result<SupportSet> {
    x.ensure_tied_to(frame)?;
    if tol < 0.0 {
        return Err(Error::Domain(format!("tolerance must be >= 0, got {tol}")));
    }
    let scale = x.data().norm();
    let mut offsets: Vec<f64> = Vec::new();
    for i in 0..x.dim() {
        for j in 0..x.dim() {
            if x.data()[(i, j)].norm() > tol * scale && x.data()[(i, j)].norm() > 0.0 {
                offsets.push(frame.eigenvalues()[i] - frame.eigenvalues()[j]);
            }
        }
    }
    offsets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    offsets.dedup();

    let class = if offsets.is_empty() {
        SupportClass::Zero
    } else if offsets.iter().all(|&o| o == 0.0) {
        SupportClass::Memoryless
    } else if offsets[0] > 0.0 {
        SupportClass::Hypercausal
    } else if *offsets.last().unwrap() < 0.0 {
        SupportClass::Hyperanticausal
    } else if offsets[0] >= 0.0 {
        SupportClass::Causal
    } else if *offsets.last().unwrap() <= 0.0 {
        SupportClass::Anticausal
    } else {
        SupportClass::Mixed
    };
    Ok(SupportSet { offsets, class })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame01() -> Arc<SpectralFrame> {
        Arc::new(SpectralFrame::new(vec![0.0, 1.0]).unwrap())
    }

    fn mat(frame: &Arc<SpectralFrame>, entries: &[[f64; 2]; 2]) -> OperatorMatrix {
        let data = DMatrix::from_fn(2, 2, |i, j| Complex64::new(entries[i][j], 0.0));
        OperatorMatrix::new(frame.clone(), data).unwrap()
    }

    #[test]
    fn norms() {
        let f = frame01();
        let id = OperatorMatrix::identity(f.clone());
        assert!((id.norm(NormKind::Spectral) - 1.0).abs() < 1e-14);

        let ones = mat(&f, &[[1.0, 1.0], [1.0, 1.0]]);
        assert!((ones.norm(NormKind::Frobenius) - 2.0).abs() < 1e-14);
        assert!((ones.norm(NormKind::Spectral) - 2.0).abs() < 1e-13);

        // rank one u v^H has spectral norm ||u|| ||v||
        let u = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.3)];
        let v = [Complex64::new(0.7, -0.1), Complex64::new(2.0, 1.0)];
        let data = DMatrix::from_fn(2, 2, |i, j| u[i] * v[j].conj());
        let m = OperatorMatrix::new(f, data).unwrap();
        let expect = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt()
            * (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        assert!((m.norm(NormKind::Spectral) - expect).abs() < 1e-12);
    }

    #[test]
    fn resolvent_examples() {
        let f = frame01();
        let r = resolvent(&f, Complex64::new(0.0, 1.0)).unwrap();
        // diag(1/(0-i), 1/(1-i)) = diag(i, (1+i)/2)
        assert!((r.data()[(0, 0)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((r.data()[(1, 1)] - Complex64::new(0.5, 0.5)).norm() < 1e-15);

        // norm decreases monotonically to 0 as |Im z| grows
        let mut prev = f64::INFINITY;
        for k in 1..20 {
            let eps = k as f64;
            let nr = resolvent(&f, Complex64::new(0.3, eps))
                .unwrap()
                .norm(NormKind::Spectral);
            assert!(nr < prev);
            prev = nr;
        }

        assert!(matches!(
            resolvent(&f, Complex64::new(0.0, 0.0)),
            Err(Error::SingularResolvent { .. })
        ));
    }

    #[test]
    fn support_classification() {
        let f = frame01();
        let lower = mat(&f, &[[0.0, 0.0], [1.0, 0.0]]);
        let s = beurling_support(&f, &lower, 1e-12).unwrap();
        assert_eq!(s.class, SupportClass::Hypercausal);
        assert_eq!(s.offsets, vec![1.0]);

        let diag = mat(&f, &[[2.0, 0.0], [0.0, -1.0]]);
        assert_eq!(
            beurling_support(&f, &diag, 1e-12).unwrap().class,
            SupportClass::Memoryless
        );

        let zero = OperatorMatrix::zeros(f.clone());
        let s = beurling_support(&f, &zero, 1e-12).unwrap();
        assert_eq!(s.class, SupportClass::Zero);
        assert!(s.offsets.is_empty());

        let upper = mat(&f, &[[0.0, 3.0], [0.0, 0.0]]);
        assert_eq!(
            beurling_support(&f, &upper, 1e-12).unwrap().class,
            SupportClass::Hyperanticausal
        );

        let causal = mat(&f, &[[1.0, 0.0], [1.0, 1.0]]);
        assert_eq!(
            beurling_support(&f, &causal, 1e-12).unwrap().class,
            SupportClass::Causal
        );

        let mixed = mat(&f, &[[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(
            beurling_support(&f, &mixed, 1e-12).unwrap().class,
            SupportClass::Mixed
        );
    }

    #[test]
    fn frame_mismatch_is_rejected() {
        let f = frame01();
        let g = Arc::new(SpectralFrame::new(vec![0.0, 2.0]).unwrap());
        let x = OperatorMatrix::zeros(f);
        assert!(beurling_support(&g, &x, 0.0).is_err());
    }
}
