//! JSON exchange formats: matrix problems, potentials, similarity reports,
//! and kernel reports, with a canonical writer (fixed field order, floats at
//! 17 significant digits) so identical runs produce byte-identical output.

use crate::engine::{ContractionBudget, SimilarityReport};
use crate::error::{Error, Result};
use crate::frame::SpectralFrame;
use crate::kernels::NormBoundsReport;
use crate::matrix::OperatorMatrix;
use crate::potential::{FourierPotential, PeriodicReduction};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameDto {
    pub eigenvalues: Vec<f64>,
}

/// Complex matrix as separate real and imaginary planes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixPlanes {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixPlanes {
    pub fn from_matrix(m: &OperatorMatrix) -> MatrixPlanes {
        let n = m.dim();
        let plane = |f: fn(&Complex64) -> f64| {
            (0..n)
                .map(|i| (0..n).map(|j| f(&m.data()[(i, j)])).collect())
                .collect()
        };
        MatrixPlanes {
            re: plane(|z| z.re),
            im: plane(|z| z.im),
        }
    }

    pub fn to_matrix(&self, frame: &Arc<SpectralFrame>) -> Result<OperatorMatrix> {
        let n = frame.dim();
        let square = |p: &Vec<Vec<f64>>, name: &str| -> Result<()> {
            if p.len() != n || p.iter().any(|row| row.len() != n) {
                return Err(Error::Schema(format!(
                    "matrix plane '{name}' must be {n} x {n} to match the frame"
                )));
            }
            Ok(())
        };
        square(&self.re, "re")?;
        square(&self.im, "im")?;
        let data = DMatrix::from_fn(n, n, |i, j| Complex64::new(self.re[i][j], self.im[i][j]));
        OperatorMatrix::new(frame.clone(), data)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixProblem {
    pub frame: FrameDto,
    pub matrix: MatrixPlanes,
}

impl MatrixProblem {
    pub fn into_parts(self) -> Result<(Arc<SpectralFrame>, OperatorMatrix)> {
        let frame = Arc::new(SpectralFrame::new(self.frame.eigenvalues)?);
        let b = self.matrix.to_matrix(&frame)?;
        Ok((frame, b))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientDto {
    pub n: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialProblem {
    pub omega: f64,
    pub coefficients: Vec<CoefficientDto>,
}

impl PotentialProblem {
    pub fn into_potential(self) -> Result<FourierPotential> {
        let terms: Vec<(i64, Complex64)> = self
            .coefficients
            .iter()
            .map(|c| (c.n, Complex64::new(c.re, c.im)))
            .collect();
        FourierPotential::from_terms(self.omega, &terms)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectraDto {
    pub perturbed: Vec<[f64; 2]>,
    pub reduced: Vec<[f64; 2]>,
    pub max_match_distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDto {
    pub variant: String,
    pub a: f64,
    pub iterations: usize,
    pub residual_rel: f64,
    pub budget: ContractionBudget,
    pub spectra: SpectraDto,
    pub x_star: MatrixPlanes,
    pub jx_star: MatrixPlanes,
    pub u: MatrixPlanes,
    pub u_inverse: MatrixPlanes,
    pub inverse_error: f64,
    // embedded problem so `verify` can recompute everything
    pub frame: FrameDto,
    pub b: MatrixPlanes,
}

fn spectrum_pairs(s: &[Complex64]) -> Vec<[f64; 2]> {
    s.iter().map(|z| [z.re, z.im]).collect()
}

pub fn report_to_dto(b: &OperatorMatrix, report: &SimilarityReport) -> ReportDto {
    ReportDto {
        variant: report.variant.to_string(),
        a: report.a,
        iterations: report.iterations,
        residual_rel: report.residual_rel,
        budget: report.budget,
        spectra: SpectraDto {
            perturbed: spectrum_pairs(&report.spectra.perturbed),
            reduced: spectrum_pairs(&report.spectra.reduced),
            max_match_distance: report.spectra.max_match_distance,
        },
        x_star: MatrixPlanes::from_matrix(&report.x_star),
        jx_star: MatrixPlanes::from_matrix(&report.jx_star),
        u: MatrixPlanes::from_matrix(&report.u),
        u_inverse: MatrixPlanes::from_matrix(&report.u_inverse),
        inverse_error: report.inverse_error,
        frame: FrameDto {
            eigenvalues: b.frame().eigenvalues().to_vec(),
        },
        b: MatrixPlanes::from_matrix(b),
    }
}

impl ReportDto {
    /// Rebuilds the matrices needed to recompute the report's claims.
    pub fn ingredients(
        &self,
    ) -> Result<(
        Arc<SpectralFrame>,
        OperatorMatrix,
        OperatorMatrix,
        OperatorMatrix,
        OperatorMatrix,
    )> {
        let frame = Arc::new(SpectralFrame::new(self.frame.eigenvalues.clone())?);
        let b = self.b.to_matrix(&frame)?;
        let x_star = self.x_star.to_matrix(&frame)?;
        let jx_star = self.jx_star.to_matrix(&frame)?;
        let u = self.u.to_matrix(&frame)?;
        Ok((frame, b, x_star, jx_star, u))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialReportDto {
    pub c: [f64; 2],
    pub v0: Vec<CoefficientDto>,
    #[serde(flatten)]
    pub report: ReportDto,
}

pub fn potential_report_to_dto(
    b: &OperatorMatrix,
    reduction: &PeriodicReduction,
) -> PotentialReportDto {
    PotentialReportDto {
        c: [reduction.c.re, reduction.c.im],
        v0: reduction
            .v0_coefficients
            .iter()
            .map(|&(n, z)| CoefficientDto {
                n,
                re: z.re,
                im: z.im,
            })
            .collect(),
        report: report_to_dto(b, &reduction.report),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelSampleDto {
    pub t: f64,
    pub phi: f64,
    pub psi_im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelsReportDto {
    pub a: f64,
    pub phi_l1: f64,
    pub psi_l1: f64,
    pub psitilde_l1: f64,
    pub bounds_hold: bool,
    pub samples: Vec<KernelSampleDto>,
}

pub fn kernels_report_to_dto(
    report: &NormBoundsReport,
    samples: Vec<KernelSampleDto>,
) -> KernelsReportDto {
    KernelsReportDto {
        a: report.a,
        phi_l1: report.phi_l1,
        psi_l1: report.psi_l1,
        psitilde_l1: report.psitilde_l1,
        bounds_hold: report.bounds_hold,
        samples,
    }
}

pub fn from_json_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))
}

/// Canonical JSON: declaration field order, floats printed with 17
/// significant digits so output is byte-identical across runs and every
/// double survives a round trip.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Schema(e.to_string()))?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

fn write_value(v: &serde_json::Value, out: &mut String) {
    match v {
        serde_json::Value::Null => out.push_str("null"),
        serde_json::Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        serde_json::Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    out.push_str(&format_float(f));
                } else {
                    out.push_str(&n.to_string());
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        serde_json::Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization"));
        }
        serde_json::Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        serde_json::Value::Object(map) => {
            out.push('{');
            for (k, (key, item)) in map.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("key serialization"));
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

fn format_float(f: f64) -> String {
    format!("{f:.16e}")
}
