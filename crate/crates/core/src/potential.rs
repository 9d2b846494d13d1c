//! Reduction of the first-order periodic operator `-i d/dt - V` on the
//! truncated Fourier side: the perturbation becomes a Laurent matrix over the
//! frequency frame `2 pi n / omega`, a constant-reduction fixed point runs
//! directly on coefficient sequences, and one-sided potentials go through the
//! norm-free hypercausal series.

use crate::engine::{
    hypercausal_series, iterate_fixed_point, IterationConfig, NormKind, SimilarityReport, Variant,
};
use crate::error::{Error, Result};
use crate::frame::SpectralFrame;
use crate::kernels::MultiplierPair;
use crate::matrix::{spectral_norm, OperatorMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierPotential {
    omega: f64,
    half_width: i64,
    /// `v_hat[n + half_width]` is the coefficient of `exp(2 pi i n t / omega)`.
    coefficients: Vec<Complex64>,
    sup_norm_estimate: f64,
}

impl FourierPotential {
    /// `coefficients` lists `v_hat_n` for `n = -N ..= N` (odd length `2N + 1`).
    pub fn new(omega: f64, coefficients: Vec<Complex64>) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!("period must be positive, got {omega}")));
        }
        if coefficients.is_empty() || coefficients.len() % 2 == 0 {
            return Err(Error::Domain(format!(
                "coefficient list must have odd length 2N + 1, got {}",
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("coefficients must be finite".into()));
        }
        let half_width = (coefficients.len() as i64 - 1) / 2;
        let mut p = FourierPotential {
            omega,
            half_width,
            coefficients,
            sup_norm_estimate: 0.0,
        };
        p.sup_norm_estimate = p.sample_sup_norm();
        Ok(p)
    }

    /// Builds the potential from sparse `(n, v_hat_n)` terms.
    pub fn from_terms(omega: f64, terms: &[(i64, Complex64)]) -> Result<Self> {
        let half_width = terms.iter().map(|&(n, _)| n.abs()).max().unwrap_or(0).max(1);
        let mut coefficients = vec![Complex64::default(); (2 * half_width + 1) as usize];
        for &(n, v) in terms {
            coefficients[(n + half_width) as usize] += v;
        }
        FourierPotential::new(omega, coefficients)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    pub fn coefficient(&self, n: i64) -> Complex64 {
        if n.abs() > self.half_width {
            Complex64::default()
        } else {
            self.coefficients[(n + self.half_width) as usize]
        }
    }

    pub fn sup_norm_estimate(&self) -> f64 {
        self.sup_norm_estimate
    }

    /// `v(t) = sum v_hat_n exp(2 pi i n t / omega)`.
    pub fn evaluate(&self, t: f64) -> Complex64 {
        let base = 2.0 * PI * t / self.omega;
        (-self.half_width..=self.half_width)
            .map(|n| self.coefficient(n) * Complex64::from_polar(1.0, n as f64 * base))
            .sum()
    }

    fn sample_sup_norm(&self) -> f64 {
        let samples = 512 * (2 * self.half_width as usize + 1);
        (0..samples)
            .map(|k| self.evaluate(self.omega * k as f64 / samples as f64).norm())
            .fold(0.0, f64::max)
    }
}

/// Truncated Laurent matrix of the multiplication operator: frame
/// `lambda_n = 2 pi n / omega` for `n` in `[-M, M]` and entries
/// `B_nm = v_hat_{n-m}`.
pub fn build_laurent(
    potential: &FourierPotential,
    truncation: i64,
) -> Result<(Arc<SpectralFrame>, OperatorMatrix)> {
    if truncation < potential.half_width() {
        return Err(Error::Domain(format!(
            "truncation M = {truncation} must be at least the coefficient width N = {}",
            potential.half_width()
        )));
    }
    let m = truncation;
    let eigenvalues: Vec<f64> = (-m..=m)
        .map(|n| 2.0 * PI * n as f64 / potential.omega())
        .collect();
    let frame = Arc::new(SpectralFrame::new(eigenvalues)?);
    let dim = (2 * m + 1) as usize;
    let data = DMatrix::from_fn(dim, dim, |i, j| {
        potential.coefficient(i as i64 - j as i64)
    });
    let b = OperatorMatrix::new(frame.clone(), data)?;
    Ok((frame, b))
}

#[derive(Debug, Clone)]
pub struct PeriodicReduction {
    /// The reduced constant potential (`n = 0` coefficient of `v_0`).
    pub c: Complex64,
    /// Coefficients of `v_0 = phi_a * v_*` on the band `|2 pi n / omega| <= 2a`.
    pub v0_coefficients: Vec<(i64, Complex64)>,
    /// Matrix-path similarity report for the truncated Laurent problem.
    pub report: SimilarityReport,
    /// Iterations of the coefficient-sequence fixed point.
    pub coefficient_iterations: usize,
    /// Max interior disagreement between the coefficient path and the
    /// diagonal of the matrix-path `JX*`.
    pub path_disagreement: f64,
}

/// Sequence indexed by `n = -M ..= M`.
struct Seq {
    m: i64,
    v: Vec<Complex64>,
}

impl Seq {
    fn zeros(m: i64) -> Seq {
        Seq {
            m,
            v: vec![Complex64::default(); (2 * m + 1) as usize],
        }
    }

    fn get(&self, n: i64) -> Complex64 {
        if n.abs() > self.m {
            Complex64::default()
        } else {
            self.v[(n + self.m) as usize]
        }
    }

    fn norm(&self) -> f64 {
        self.v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Truncated convolution: modes outside `[-M, M]` are discarded.
    fn conv(&self, other: &Seq) -> Seq {
        let m = self.m;
        let mut out = Seq::zeros(m);
        for n in -m..=m {
            let mut acc = Complex64::default();
            for k in -m..=m {
                let l = n - k;
                if l.abs() <= m {
                    acc += self.get(k) * other.get(l);
                }
            }
            out.v[(n + m) as usize] = acc;
        }
        out
    }

    fn scaled_pointwise(&self, weights: &[f64]) -> Seq {
        Seq {
            m: self.m,
            v: self
                .v
                .iter()
                .zip(weights)
                .map(|(z, w)| z * *w)
                .collect(),
        }
    }

    fn combine(terms: &[(&Seq, f64)]) -> Seq {
        let m = terms[0].0.m;
        let mut out = Seq::zeros(m);
        for (s, w) in terms {
            for (o, z) in out.v.iter_mut().zip(&s.v) {
                *o += z * *w;
            }
        }
        out
    }
}

/// Constant reduction of a scalar periodic potential: the coefficient-space
/// fixed point with `a = pi / omega`, cross-validated against the truncated
/// Laurent matrix.
pub fn reduce_periodic(
    potential: &FourierPotential,
    config: &IterationConfig,
    truncation: i64,
) -> Result<PeriodicReduction> {
    config.validate()?;
    if config.variant == Variant::Series {
        return Err(Error::Structural(
            "the series variant applies to one-sided potentials; use reduce_hypercausal_potential"
                .into(),
        ));
    }
    let a = PI / potential.omega();
    let pair = MultiplierPair::new(config.kernel_kind, a)?;
    let sup = potential.sup_norm_estimate();

    // sufficient condition in the multiplication-operator class, with the
    // published constants j = sqrt 3, gamma = 1.35 / a
    let j = 3f64.sqrt();
    let gamma = 1.35 / a;
    let lhs = config.variant.budget_constant() * j * gamma * sup;
    if lhs >= 1.0 && !config.force {
        return Err(Error::BudgetFailed {
            variant: config.variant.to_string(),
            j,
            gamma,
            norm_b: sup,
            lhs,
        });
    }

    let m = truncation.max(potential.half_width());
    let tau: Vec<f64> = (-m..=m)
        .map(|n| pair.tau(2.0 * PI * n as f64 / potential.omega()))
        .collect();
    let omega_w: Vec<f64> = (-m..=m)
        .map(|n| pair.omega(2.0 * PI * n as f64 / potential.omega()))
        .collect();

    let mut b = Seq::zeros(m);
    for n in -potential.half_width()..=potential.half_width() {
        b.v[(n + m) as usize] = potential.coefficient(n);
    }
    let norm_b = b.norm();

    let step = |x: &Seq| -> Seq {
        let gx = x.scaled_pointwise(&omega_w);
        let bgx = b.conv(&gx);
        match config.variant {
            Variant::Phi => {
                let jx = x.scaled_pointwise(&tau);
                Seq::combine(&[(&bgx, 1.0), (&gx.conv(&jx), -1.0), (&b, 1.0)])
            }
            Variant::Phi1 => {
                let jb = b.scaled_pointwise(&tau);
                let jbgx = bgx.scaled_pointwise(&tau);
                Seq::combine(&[
                    (&bgx, 1.0),
                    (&gx.conv(&jb), -1.0),
                    (&gx.conv(&jbgx), -1.0),
                    (&b, 1.0),
                ])
            }
            Variant::Phi2 => {
                let jbgx = bgx.scaled_pointwise(&tau);
                Seq::combine(&[(&bgx, 1.0), (&gx.conv(&jbgx), -1.0), (&b, 1.0)])
            }
            Variant::Phi3 => Seq::combine(&[(&bgx, 1.0), (&b, 1.0)]),
            Variant::Series => unreachable!(),
        }
    };

    let mut x = Seq {
        m,
        v: b.v.clone(),
    };
    let mut coefficient_iterations = 1;
    if norm_b > 0.0 {
        loop {
            let next = step(&x);
            let update = next
                .v
                .iter()
                .zip(&x.v)
                .map(|(p, q)| (p - q).norm_sqr())
                .sum::<f64>()
                .sqrt();
            x = next;
            coefficient_iterations += 1;
            if update / norm_b < config.tol {
                break;
            }
            if update > 100.0 * norm_b || coefficient_iterations >= config.max_iter {
                return Err(Error::NonConvergence {
                    iterations: coefficient_iterations,
                    last_update: update,
                    log: Vec::new(),
                });
            }
        }
    }

    let v0 = x.scaled_pointwise(&tau);
    let c = v0.get(0);
    let v0_coefficients: Vec<(i64, Complex64)> = (-m..=m)
        .filter(|&n| tau[(n + m) as usize] != 0.0)
        .map(|n| (n, v0.get(n)))
        .collect();

    // matrix path on the same truncation
    let (frame, b_mat) = build_laurent(potential, m)?;
    let matrix_config = IterationConfig {
        a,
        ..*config
    };
    let report = iterate_fixed_point(&frame, &b_mat, &matrix_config)?;

    // interior middle half of the index window; truncation perturbs edges
    let dim = (2 * m + 1) as usize;
    let lo = dim / 4;
    let hi = dim - dim / 4;
    let mut path_disagreement: f64 = 0.0;
    for i in lo..hi {
        for j in lo..hi {
            let coeff_value = v0.get(i as i64 - j as i64);
            path_disagreement =
                path_disagreement.max((report.jx_star.data()[(i, j)] - coeff_value).norm());
        }
    }
    if path_disagreement > 1e-9 * (1.0 + sup) {
        return Err(Error::OracleFailure(format!(
            "coefficient and matrix paths disagree by {path_disagreement:e} on interior indices"
        )));
    }

    Ok(PeriodicReduction {
        c,
        v0_coefficients,
        report,
        coefficient_iterations,
        path_disagreement,
    })
}

/// One-sided potential with no smallness condition: Theorem-style reduction
/// all the way to the unperturbed operator through the hypercausal series.
pub fn reduce_hypercausal_potential(
    potential: &FourierPotential,
    truncation: i64,
) -> Result<SimilarityReport> {
    let positive = (1..=potential.half_width()).any(|n| potential.coefficient(n) != Complex64::default());
    let negative = (1..=potential.half_width()).any(|n| potential.coefficient(-n) != Complex64::default());
    if (positive && negative) || potential.coefficient(0) != Complex64::default() {
        return Err(Error::Structural(
            "hypercausal reduction needs v_hat supported strictly on one side of 0".into(),
        ));
    }
    let (frame, b) = build_laurent(potential, truncation)?;
    let mut config = IterationConfig::new(Variant::Series, PI / potential.omega());
    config.norm_kind = NormKind::Frobenius;
    config.max_iter = 2 * truncation as usize + 2;
    let report = hypercausal_series(&frame, &b, &config)?;

    let a_minus_b = OperatorMatrix::diagonal_of_frame(frame.clone())
        .data()
        .clone()
        - b.data();
    let scale = spectral_norm(&a_minus_b);
    let residual = report.residual_rel * scale.max(1.0);
    if residual >= 1e-12 * (1.0 + scale) {
        return Err(Error::OracleFailure(format!(
            "intertwining residual {residual:e} exceeds 1e-12 * (1 + ||A - B||)"
        )));
    }
    // strictly triangular B: the truncated spectrum is the frame itself
    let frame_spectrum: Vec<Complex64> = frame
        .eigenvalues()
        .iter()
        .map(|&l| Complex64::new(l, 0.0))
        .collect();
    let dist = crate::oracle::match_spectra(&report.spectra.perturbed, &frame_spectrum)?;
    if dist >= 1e-8 * (1.0 + scale) {
        return Err(Error::OracleFailure(format!(
            "spectrum of A - B strays from the frame by {dist:e}"
        )));
    }
    Ok(report)
}
