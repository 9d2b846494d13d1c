//! Shared problem generators for the benchmark suite.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simop_core::{NormKind, OperatorMatrix, SpectralFrame};
use std::sync::Arc;

/// Frame with eigenvalues `-(n-1)/2 .. (n-1)/2` for odd `n`, `0 .. n-1` otherwise.
pub fn integer_frame(n: usize) -> Arc<SpectralFrame> {
    let eigenvalues: Vec<f64> = if n % 2 == 1 {
        let half = (n as i64 - 1) / 2;
        (-half..=half).map(|k| k as f64).collect()
    } else {
        (0..n as i64).map(|k| k as f64).collect()
    };
    Arc::new(SpectralFrame::new(eigenvalues).expect("valid frame"))
}

/// Dense complex perturbation with zero diagonal, rescaled to the requested
/// spectral norm. Deterministic in the seed.
pub fn random_perturbation(frame: &Arc<SpectralFrame>, norm: f64, seed: u64) -> OperatorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = frame.dim();
    let data = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::default()
        } else {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        }
    });
    let raw = OperatorMatrix::new(frame.clone(), data).expect("matching dimensions");
    let scale = norm / raw.norm(NormKind::Spectral).max(f64::MIN_POSITIVE);
    raw.with_data(raw.data() * Complex64::new(scale, 0.0))
        .expect("matching dimensions")
}

/// Strictly lower-triangular perturbation, rescaled in Frobenius norm.
pub fn lower_triangular_perturbation(
    frame: &Arc<SpectralFrame>,
    norm: f64,
    seed: u64,
) -> OperatorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = frame.dim();
    let data = DMatrix::from_fn(n, n, |i, j| {
        if i > j {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        } else {
            Complex64::default()
        }
    });
    let raw = OperatorMatrix::new(frame.clone(), data).expect("matching dimensions");
    let scale = norm / raw.norm(NormKind::Frobenius).max(f64::MIN_POSITIVE);
    raw.with_data(raw.data() * Complex64::new(scale, 0.0))
        .expect("matching dimensions")
}
