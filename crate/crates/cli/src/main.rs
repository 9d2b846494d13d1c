//! Command-line surface: loads problem files, dispatches to the reduction
//! engine, the potential module, or the kernel verifier, and emits canonical
//! JSON reports. Exit codes: 0 success, 2 precondition or budget failure,
//! 3 non-convergence or failed verification, 4 I/O or schema errors.

use clap::{Parser, Subcommand, ValueEnum};
use simop_core::engine::{IterationConfig, NormKind, Variant};
use simop_core::io::{
    from_json_str, kernels_report_to_dto, potential_report_to_dto, report_to_dto,
    to_canonical_json, KernelSampleDto, MatrixProblem, PotentialProblem, ReportDto,
};
use simop_core::kernels::KernelKind;
use simop_core::potential::{build_laurent, reduce_hypercausal_potential, reduce_periodic};
use simop_core::{
    iterate_fixed_point, phi_kernel_sample, psi_sample, verify_norm_bounds, Error,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "simop", about = "Similarity reductions of perturbed diagonal operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Phi,
    Phi1,
    Phi2,
    Phi3,
    Series,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Phi => Variant::Phi,
            VariantArg::Phi1 => Variant::Phi1,
            VariantArg::Phi2 => Variant::Phi2,
            VariantArg::Phi3 => Variant::Phi3,
            VariantArg::Series => Variant::Series,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Trapezoid,
    Triangle,
}

impl From<KernelArg> for KernelKind {
    fn from(k: KernelArg) -> KernelKind {
        match k {
            KernelArg::Trapezoid => KernelKind::Trapezoid,
            KernelArg::Triangle => KernelKind::Triangle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Spectral,
    Frobenius,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> NormKind {
        match n {
            NormArg::Spectral => NormKind::Spectral,
            NormArg::Frobenius => NormKind::Frobenius,
        }
    }
}

#[derive(clap::Args)]
struct EngineFlags {
    #[arg(long, value_enum, default_value = "phi1")]
    variant: VariantArg,
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[arg(long, value_enum, default_value = "trapezoid")]
    kernel: KernelArg,
    #[arg(long, value_enum, default_value = "spectral")]
    norm: NormArg,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    tight_constants: bool,
}

impl EngineFlags {
    fn config(&self) -> IterationConfig {
        IterationConfig {
            variant: self.variant.into(),
            a: self.a,
            kernel_kind: self.kernel.into(),
            tol: self.tol,
            max_iter: self.max_iter,
            norm_kind: self.norm.into(),
            force: self.force,
            tight_constants: self.tight_constants,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a matrix problem `A - B` to `A - JX*`.
    Reduce {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        flags: EngineFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a periodic potential problem on the Fourier side.
    Potential {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        truncation: i64,
        #[command(flatten)]
        flags: EngineFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify kernel norm bounds and optionally emit kernel samples.
    Kernels {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        emit_samples: bool,
        #[arg(long, default_value_t = 10.0)]
        half_width: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a saved report's residual and spectra from its embedded
    /// matrices and check they match.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Schema(_) => 4,
        Error::NonConvergence { .. } | Error::OracleFailure(_) => 3,
        _ => 2,
    }
}

fn read_input(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(Error::Io)
}

fn emit(text: String, out: Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(Error::Io),
        None => {
            use std::io::Write;
            writeln!(std::io::stdout(), "{text}").map_err(Error::Io)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Reduce { input, flags, out } => {
            let problem: MatrixProblem = from_json_str(&read_input(&input)?)?;
            let (frame, b) = problem.into_parts()?;
            let report = iterate_fixed_point(&frame, &b, &flags.config())?;
            emit(to_canonical_json(&report_to_dto(&b, &report))?, out)
        }
        Command::Potential {
            input,
            truncation,
            flags,
            out,
        } => {
            let problem: PotentialProblem = from_json_str(&read_input(&input)?)?;
            let potential = problem.into_potential()?;
            let config = flags.config();
            if config.variant == Variant::Series {
                let report = reduce_hypercausal_potential(&potential, truncation)?;
                let (_, b) = build_laurent(&potential, truncation)?;
                emit(to_canonical_json(&report_to_dto(&b, &report))?, out)
            } else {
                let reduction = reduce_periodic(&potential, &config, truncation)?;
                let m = truncation.max(potential.half_width());
                let (_, b) = build_laurent(&potential, m)?;
                emit(
                    to_canonical_json(&potential_report_to_dto(&b, &reduction))?,
                    out,
                )
            }
        }
        Command::Kernels {
            a,
            emit_samples,
            half_width,
            step,
            out,
        } => {
            let report = verify_norm_bounds(a)?;
            let samples = if emit_samples {
                let n = (half_width / step).floor() as i64;
                (-n..=n)
                    .map(|k| {
                        let t = k as f64 * step;
                        Ok(KernelSampleDto {
                            t,
                            phi: phi_kernel_sample(a, t)?,
                            psi_im: psi_sample(a, t).im,
                        })
                    })
                    .collect::<Result<Vec<_>, Error>>()?
            } else {
                Vec::new()
            };
            emit(to_canonical_json(&kernels_report_to_dto(&report, samples))?, out)
        }
        Command::Verify { input, out } => {
            let report: ReportDto = from_json_str(&read_input(&input)?)?;
            let (frame, b, x_star, jx_star, u) = report.ingredients()?;
            let check =
                simop_core::verify_similarity(&frame, &b, &x_star, &jx_star, &u)?;
            let matches = (check.residual_rel - report.residual_rel).abs() <= 1e-12;
            let summary = serde_json::json!({
                "residual_rel": check.residual_rel,
                "spectra_distance": check.spectra_distance,
                "stored_residual_rel": report.residual_rel,
                "matches_report": matches,
            });
            emit(to_canonical_json(&summary)?, out)?;
            if matches {
                Ok(())
            } else {
                Err(Error::OracleFailure(format!(
                    "recomputed residual {:e} does not match the stored value {:e}",
                    check.residual_rel, report.residual_rel
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
