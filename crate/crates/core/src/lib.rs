//! Similarity transforms for perturbed diagonal operators `A - B`.
//!
//! The crate builds the transforms `J` (band filter) and `Gamma` (regularized
//! divided difference) from explicit Fourier-multiplier kernels, solves the
//! associated fixed-point equations, assembles the intertwining operator
//! `U = I + Gamma X*`, and verifies similarity and spectral invariance against
//! an independent dense eigensolver.

pub mod engine;
pub mod error;
pub mod frame;
pub mod io;
pub mod kernels;
pub mod matrix;
pub mod oracle;
pub mod potential;
pub mod special;
pub mod transforms;

pub use engine::{
    build_intertwiner, contraction_budget, hypercausal_series, iterate_fixed_point,
    verify_similarity, ContractionBudget, IterationConfig, NormKind, SimilarityReport, Variant,
};
pub use error::{Error, Result};
pub use frame::SpectralFrame;
pub use kernels::{
    phi_kernel_sample, psi_kernel_table, psi_sample, verify_norm_bounds, KernelKind, KernelTable,
    MultiplierPair, NormBoundsReport, PsiTableKind,
};
pub use matrix::{beurling_support, operator_norm, resolvent, OperatorMatrix, SupportClass, SupportSet};
pub use oracle::{dense_spectrum, match_spectra, SpectrumResult};
pub use potential::{
    build_laurent, reduce_hypercausal_potential, reduce_periodic, FourierPotential,
    PeriodicReduction,
};
pub use transforms::{apply_toeplitz_multiplier, homological_residual, MultiplierRole};
