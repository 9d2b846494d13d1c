//! The fixed-point iterations behind the similarity transform `A - B` to
//! `A - JX*`, the norm-free hypercausal series, and the verification of the
//! intertwining identity `(A - B)U = U(A - JX*)` with `U = I + Gamma X*`.

use crate::error::{Error, Result};
use crate::frame::SpectralFrame;
use crate::kernels::{KernelKind, MultiplierPair};
use crate::matrix::{spectral_norm, OperatorMatrix, SupportClass};
pub use crate::matrix::NormKind;
use crate::oracle::{dense_spectrum, match_spectra};
use crate::transforms::{apply_toeplitz_multiplier, MultiplierRole};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `Phi(X) = B Gamma X - (Gamma X)(JX) + B`, budget constant `3 + 2 sqrt 2`.
    Phi,
    /// `Phi1(X) = B Gamma X - (Gamma X)JB - (Gamma X)J(B Gamma X) + B`,
    /// idempotent `J`, budget constant 4.
    Phi1,
    /// `Phi2(X) = B Gamma X - (Gamma X)J(B Gamma X) + B`, requires `JB = 0`,
    /// budget constant 3.
    Phi2,
    /// `Phi3(X) = B Gamma X + B`, Friedrichs case `J = 0`, budget constant 2.
    Phi3,
    /// Hypercausal series, no norm condition.
    Series,
}

impl Variant {
    pub fn budget_constant(self) -> f64 {
        match self {
            Variant::Phi => 3.0 + 2.0 * 2f64.sqrt(),
            Variant::Phi1 => 4.0,
            Variant::Phi2 => 3.0,
            Variant::Phi3 => 2.0,
            Variant::Series => 0.0,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::Phi => "phi",
            Variant::Phi1 => "phi1",
            Variant::Phi2 => "phi2",
            Variant::Phi3 => "phi3",
            Variant::Series => "series",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IterationConfig {
    pub variant: Variant,
    pub a: f64,
    pub kernel_kind: KernelKind,
    pub tol: f64,
    pub max_iter: usize,
    pub norm_kind: NormKind,
    /// Run the iteration even when the sufficient contraction budget fails.
    pub force: bool,
    /// Use the realization-optimal constants (`j = 1` for diagonal `J`,
    /// `gamma = 1/(2a)`) instead of the default published bounds.
    pub tight_constants: bool,
}

impl IterationConfig {
    pub fn new(variant: Variant, a: f64) -> Self {
        IterationConfig {
            variant,
            a,
            kernel_kind: KernelKind::Trapezoid,
            tol: 1e-12,
            max_iter: 10_000,
            norm_kind: NormKind::Spectral,
            force: false,
            tight_constants: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Domain(format!("a must be positive, got {}", self.a)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Domain(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// The sufficient smallness condition `c(variant) * j * gamma * ||B|| < 1`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContractionBudget {
    pub variant: Variant,
    pub j: f64,
    pub gamma: f64,
    pub norm_b: f64,
    pub lhs: f64,
    pub threshold: f64,
    pub satisfied: bool,
}

pub fn contraction_budget(
    frame: &SpectralFrame,
    config: &IterationConfig,
    b: &OperatorMatrix,
) -> Result<ContractionBudget> {
    config.validate()?;
    b.ensure_tied_to(frame)?;
    let a = config.a;
    let diagonal_j = 2.0 * a < frame.min_gap();
    let (j, gamma) = match config.norm_kind {
        NormKind::Frobenius => (1.0, 1.0 / (2.0 * a)),
        NormKind::Spectral => {
            let j = if diagonal_j || config.tight_constants {
                1.0
            } else {
                3f64.sqrt()
            };
            let gamma = if config.tight_constants {
                1.0 / (2.0 * a)
            } else {
                1.35 / a
            };
            (j, gamma)
        }
    };
    let norm_b = b.norm(config.norm_kind);
    let lhs = config.variant.budget_constant() * j * gamma * norm_b;
    Ok(ContractionBudget {
        variant: config.variant,
        j,
        gamma,
        norm_b,
        lhs,
        threshold: 1.0,
        satisfied: lhs < 1.0,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectraComparison {
    pub perturbed: Vec<Complex64>,
    pub reduced: Vec<Complex64>,
    pub max_match_distance: f64,
}

#[derive(Debug, Clone)]
pub struct SimilarityReport {
    pub variant: Variant,
    pub a: f64,
    pub x_star: OperatorMatrix,
    pub jx_star: OperatorMatrix,
    pub u: OperatorMatrix,
    pub u_inverse: OperatorMatrix,
    pub residual_rel: f64,
    pub iterations: usize,
    pub convergence_log: Vec<f64>,
    pub budget: ContractionBudget,
    pub spectra: SpectraComparison,
    /// Recorded `||U U^-1 - I||`.
    pub inverse_error: f64,
}

struct Maps<'a> {
    frame: &'a Arc<SpectralFrame>,
    pair: MultiplierPair,
}

impl Maps<'_> {
    fn gamma(&self, x: &OperatorMatrix) -> Result<OperatorMatrix> {
        apply_toeplitz_multiplier(self.frame, &self.pair, MultiplierRole::Gamma, x)
    }

    fn j(&self, x: &OperatorMatrix) -> Result<OperatorMatrix> {
        apply_toeplitz_multiplier(self.frame, &self.pair, MultiplierRole::J, x)
    }

    fn step(&self, variant: Variant, b: &OperatorMatrix, x: &OperatorMatrix) -> Result<OperatorMatrix> {
        let gx = self.gamma(x)?;
        let bgx = b.with_data(b.data() * gx.data())?;
        let next = match variant {
            Variant::Phi => {
                let jx = self.j(x)?;
                bgx.data() - gx.data() * jx.data() + b.data()
            }
            Variant::Phi1 => {
                let jb = self.j(b)?;
                let jbgx = self.j(&bgx)?;
                bgx.data() - gx.data() * jb.data() - gx.data() * jbgx.data() + b.data()
            }
            Variant::Phi2 => {
                let jbgx = self.j(&bgx)?;
                bgx.data() - gx.data() * jbgx.data() + b.data()
            }
            Variant::Phi3 => bgx.data() + b.data(),
            Variant::Series => {
                return Err(Error::Structural(
                    "the series variant is not a fixed-point map; use hypercausal_series".into(),
                ))
            }
        };
        b.with_data(next)
    }
}

/// Numerical probe of the idempotent-`J` side condition `J((Gamma X) JY) = 0`
/// on deterministic pseudorandom `X`, `Y`.
fn side_condition_holds(maps: &Maps<'_>, norm_kind: NormKind) -> Result<bool> {
    let frame = maps.frame;
    let n = frame.dim();
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for _ in 0..3 {
        let x = OperatorMatrix::new(
            frame.clone(),
            DMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next())),
        )?;
        let y = OperatorMatrix::new(
            frame.clone(),
            DMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next())),
        )?;
        let gx = maps.gamma(&x)?;
        let jy = maps.j(&y)?;
        let probe = maps.j(&x.with_data(gx.data() * jy.data())?)?;
        let scale = x.norm(norm_kind) * y.norm(norm_kind);
        if probe.norm(norm_kind) > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solves `X = Phi(X)` by simple iteration from `X1 = B` and packages the
/// similarity data, verified against the dense eigensolver.
pub fn iterate_fixed_point(
    frame: &Arc<SpectralFrame>,
    b: &OperatorMatrix,
    config: &IterationConfig,
) -> Result<SimilarityReport> {
    config.validate()?;
    b.ensure_tied_to(frame)?;
    if config.variant == Variant::Series {
        return hypercausal_series(frame, b, config);
    }
    let pair = MultiplierPair::new(config.kernel_kind, config.a)?;
    let maps = Maps { frame, pair };
    let norm_b = b.norm(config.norm_kind);

    let mut variant = config.variant;
    match variant {
        Variant::Phi1 | Variant::Phi2 => {
            if !frame.gap_condition(config.a) {
                return Err(Error::Structural(format!(
                    "variant {variant} needs the gap condition: no eigenvalue difference in \
                     ({a}, {two_a}) in modulus",
                    a = config.a,
                    two_a = 2.0 * config.a
                )));
            }
            if !side_condition_holds(&maps, config.norm_kind)? {
                // the side condition J((Gamma X)JY) = 0 failed on probes;
                // fall back to the variant that does not need it
                variant = Variant::Phi;
            }
        }
        Variant::Phi3 => {
            let support = crate::matrix::beurling_support(frame, b, 0.0)?;
            if support
                .offsets
                .iter()
                .any(|&o| o.abs() <= 2.0 * config.a)
            {
                return Err(Error::Structural(format!(
                    "variant phi3 needs supp B outside [-2a, 2a] = [{}, {}]",
                    -2.0 * config.a,
                    2.0 * config.a
                )));
            }
        }
        _ => {}
    }
    if variant == Variant::Phi2 && norm_b > 0.0 {
        let jb = maps.j(b)?.norm(config.norm_kind);
        if jb >= 1e-12 * norm_b {
            return Err(Error::Structural(format!(
                "variant phi2 requires JB = 0, got ||JB|| = {jb:e}"
            )));
        }
    }

    let budget = contraction_budget(frame, &IterationConfig { variant, ..*config }, b)?;
    if !budget.satisfied && !config.force {
        return Err(Error::BudgetFailed {
            variant: variant.to_string(),
            j: budget.j,
            gamma: budget.gamma,
            norm_b: budget.norm_b,
            lhs: budget.lhs,
        });
    }

    if norm_b == 0.0 {
        return finish_report(frame, b, b, variant, config, budget, 1, vec![0.0]);
    }

    let mut x = b.clone();
    let mut log: Vec<f64> = Vec::new();
    let mut iterations = 1; // X1 = B counts as the first iterate
    loop {
        let next = maps.step(variant, b, &x)?;
        let update = x.with_data(next.data() - x.data())?.norm(config.norm_kind);
        log.push(update);
        iterations += 1;
        x = next;
        if update / norm_b < config.tol {
            break;
        }
        if update > 100.0 * norm_b || iterations >= config.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                last_update: update,
                log,
            });
        }
    }

    if budget.satisfied {
        let radius = match variant {
            Variant::Phi => 2f64.sqrt(),
            Variant::Phi1 => 3.0,
            _ => f64::INFINITY,
        };
        let dist = x.with_data(x.data() - b.data())?.norm(config.norm_kind);
        if dist > radius * norm_b * (1.0 + 1e-12) {
            return Err(Error::Structural(format!(
                "fixed point left the invariant ball: ||X* - B|| = {dist:e} > {radius} ||B||"
            )));
        }
    }

    finish_report(frame, b, &x, variant, config, budget, iterations, log)
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    frame: &Arc<SpectralFrame>,
    b: &OperatorMatrix,
    x_star: &OperatorMatrix,
    variant: Variant,
    config: &IterationConfig,
    budget: ContractionBudget,
    iterations: usize,
    convergence_log: Vec<f64>,
) -> Result<SimilarityReport> {
    let pair = MultiplierPair::new(config.kernel_kind, config.a)?;
    let jx_star = apply_toeplitz_multiplier(frame, &pair, MultiplierRole::J, x_star)?;
    let gamma_x = apply_toeplitz_multiplier(frame, &pair, MultiplierRole::Gamma, x_star)?;
    let (u, u_inverse, _cond) = build_intertwiner(&gamma_x)?;
    let inverse_error = spectral_norm(
        &(u.data() * u_inverse.data() - DMatrix::identity(u.dim(), u.dim())),
    );
    let check = verify_similarity(frame, b, x_star, &jx_star, &u)?;
    let a_mat = OperatorMatrix::diagonal_of_frame(frame.clone());
    let perturbed = dense_spectrum(&a_mat.with_data(a_mat.data() - b.data())?)?;
    let reduced = dense_spectrum(&a_mat.with_data(a_mat.data() - jx_star.data())?)?;
    Ok(SimilarityReport {
        variant,
        a: config.a,
        x_star: x_star.clone(),
        jx_star,
        u,
        u_inverse,
        residual_rel: check.residual_rel,
        iterations,
        convergence_log,
        budget,
        spectra: SpectraComparison {
            max_match_distance: match_spectra(&perturbed.eigenvalues, &reduced.eigenvalues)?,
            perturbed: perturbed.eigenvalues,
            reduced: reduced.eigenvalues,
        },
        inverse_error,
    })
}

/// The norm-free reduction `X* = B + B Gamma B + B Gamma(B Gamma B) + ...`
/// for strictly one-sided `B` with support offsets of modulus at least `2a`.
pub fn hypercausal_series(
    frame: &Arc<SpectralFrame>,
    b: &OperatorMatrix,
    config: &IterationConfig,
) -> Result<SimilarityReport> {
    config.validate()?;
    b.ensure_tied_to(frame)?;
    let pair = MultiplierPair::new(config.kernel_kind, config.a)?;
    let support = crate::matrix::beurling_support(frame, b, 0.0)?;
    let one_sided = matches!(
        support.class,
        SupportClass::Zero | SupportClass::Hypercausal | SupportClass::Hyperanticausal
    );
    let min_mod = support
        .offsets
        .iter()
        .map(|o| o.abs())
        .fold(f64::INFINITY, f64::min);
    // same rounding allowance as the frame gap condition
    if !one_sided || min_mod < 2.0 * config.a - 1e-12 * (1.0 + 2.0 * config.a) {
        return Err(Error::Structural(format!(
            "hypercausal series needs strictly one-sided support with offsets of modulus >= 2a, \
             got class {:?} and minimal offset {min_mod}",
            support.class
        )));
    }
    let norm_b = b.norm(config.norm_kind);
    let budget = contraction_budget(frame, config, b)?;

    if norm_b == 0.0 {
        return finish_report(frame, b, b, Variant::Series, config, budget, 1, vec![0.0]);
    }

    let mut x = b.clone();
    let mut term = b.clone();
    let mut log = vec![norm_b];
    let mut n = 1usize;
    loop {
        // B_{n+1} = B Gamma B_n
        let g = apply_toeplitz_multiplier(frame, &pair, MultiplierRole::Gamma, &term)?;
        term = b.with_data(b.data() * g.data())?;
        n += 1;
        let t = term.norm(config.norm_kind);
        let bound = norm_b.powi(n as i32)
            / ((2.0 * config.a).powi(n as i32 - 1) * factorial(n - 1));
        if t > bound * (1.0 + 1e-12) {
            return Err(Error::Structural(format!(
                "series term {n} violates the factorial bound: {t:e} > {bound:e}"
            )));
        }
        if t == 0.0 {
            break;
        }
        log.push(t);
        x = x.with_data(x.data() + term.data())?;
        if t < config.tol * norm_b || n >= config.max_iter {
            break;
        }
    }

    let jx = apply_toeplitz_multiplier(frame, &pair, MultiplierRole::J, &x)?;
    if jx.norm(config.norm_kind) > 1e-14 * norm_b.max(1.0) {
        return Err(Error::Structural(
            "series accumulated mass inside the band: JX* is not zero".into(),
        ));
    }
    finish_report(frame, b, &x, Variant::Series, config, budget, n, log)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product::<f64>().max(1.0)
}

/// `U = I + Gamma X` with its direct inverse and spectral condition number;
/// cross-checked against the Neumann series when the latter converges.
pub fn build_intertwiner(
    gamma_x: &OperatorMatrix,
) -> Result<(OperatorMatrix, OperatorMatrix, f64)> {
    let n = gamma_x.dim();
    let u_data = DMatrix::identity(n, n) + gamma_x.data();
    let svd = u_data.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < 1e12) {
        return Err(Error::SingularIntertwiner(condition));
    }
    let inv = u_data
        .clone()
        .try_inverse()
        .ok_or(Error::SingularIntertwiner(condition))?;

    let g_norm = spectral_norm(gamma_x.data());
    if g_norm < 0.95 {
        // (I + G)^-1 = sum (-1)^k G^k converges; the two inverses must agree
        let mut series = DMatrix::identity(n, n);
        let mut power = DMatrix::identity(n, n);
        let mut sign = -1.0;
        for _ in 0..2000 {
            power *= gamma_x.data();
            let term_norm = spectral_norm(&power);
            series += power.scale(sign);
            sign = -sign;
            if term_norm < 1e-15 {
                break;
            }
        }
        let disagreement = spectral_norm(&(series - &inv));
        if disagreement > 1e-12 * condition.max(1.0) {
            return Err(Error::OracleFailure(format!(
                "direct inverse disagrees with the Neumann series by {disagreement:e}"
            )));
        }
    }

    let u = gamma_x.with_data(u_data)?;
    let u_inverse = gamma_x.with_data(inv)?;
    Ok((u, u_inverse, condition))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SimilarityCheck {
    pub residual_rel: f64,
    pub spectra_distance: f64,
}

/// Recomputes the intertwining residual and the oracle spectra distance from
/// the raw ingredients.
pub fn verify_similarity(
    frame: &Arc<SpectralFrame>,
    b: &OperatorMatrix,
    _x_star: &OperatorMatrix,
    jx_star: &OperatorMatrix,
    u: &OperatorMatrix,
) -> Result<SimilarityCheck> {
    b.ensure_tied_to(frame)?;
    jx_star.ensure_tied_to(frame)?;
    u.ensure_tied_to(frame)?;
    let a_mat = OperatorMatrix::diagonal_of_frame(frame.clone());
    let perturbed = a_mat.data() - b.data();
    let reduced = a_mat.data() - jx_star.data();
    let residual = spectral_norm(&(&perturbed * u.data() - u.data() * &reduced));
    let scale = spectral_norm(&perturbed).max(1.0);
    let sp = dense_spectrum(&a_mat.with_data(perturbed)?)?;
    let sr = dense_spectrum(&a_mat.with_data(reduced)?)?;
    Ok(SimilarityCheck {
        residual_rel: residual / scale,
        spectra_distance: match_spectra(&sp.eigenvalues, &sr.eigenvalues)?,
    })
}
