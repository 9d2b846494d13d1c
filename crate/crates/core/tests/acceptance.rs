//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line (run with `--nocapture` to see the lines live).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simop_core::engine::{IterationConfig, NormKind, Variant};
use simop_core::kernels::{KernelKind, MultiplierPair};
use simop_core::{
    build_laurent, dense_spectrum, homological_residual, iterate_fixed_point,
    reduce_hypercausal_potential, reduce_periodic, verify_norm_bounds, Error, FourierPotential,
    OperatorMatrix, SpectralFrame,
};
use std::sync::Arc;
use std::time::{Duration, Instant};

fn criterion(name: &str, budget: Duration, body: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    match &outcome {
        Ok(()) => println!("criterion {name}: pass ({elapsed:.2?})"),
        Err(msg) => println!("criterion {name}: FAIL ({msg})"),
    }
    if let Err(msg) = outcome {
        panic!("criterion {name} failed: {msg}");
    }
    assert!(
        elapsed <= budget,
        "criterion {name} took {elapsed:.2?}, budget {budget:.2?}"
    );
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn integer_frame(lo: i64, hi: i64) -> Arc<SpectralFrame> {
    Arc::new(SpectralFrame::new((lo..=hi).map(|k| k as f64).collect()).unwrap())
}

fn random_matrix(frame: &Arc<SpectralFrame>, rng: &mut ChaCha8Rng) -> OperatorMatrix {
    let n = frame.dim();
    let data = DMatrix::from_fn(n, n, |_, _| {
        cx(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    OperatorMatrix::new(frame.clone(), data).unwrap()
}

fn scaled_to(m: &OperatorMatrix, kind: NormKind, norm: f64) -> OperatorMatrix {
    let s = norm / m.norm(kind);
    m.with_data(m.data() * cx(s, 0.0)).unwrap()
}

#[test]
fn criterion_1_homological_identity_on_random_frames() {
    criterion("1 homological identity", Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for trial in 0..100 {
            let n = rng.gen_range(2..=32);
            let eigenvalues: Vec<f64> =
                (0..n).map(|_| 40.0 * (rng.gen::<f64>() - 0.5)).collect();
            let frame = Arc::new(SpectralFrame::new(eigenvalues).map_err(|e| e.to_string())?);
            let a = 0.2 + 4.8 * rng.gen::<f64>();
            let pair = MultiplierPair::new(KernelKind::Trapezoid, a).map_err(|e| e.to_string())?;
            let x = random_matrix(&frame, &mut rng);
            let norm_x = x.norm(NormKind::Spectral);
            let res = homological_residual(&frame, &pair, &x, NormKind::Spectral)
                .map_err(|e| e.to_string())?;
            if res >= 1e-13 * norm_x {
                return Err(format!(
                    "trial {trial}: residual {res:e} >= 1e-13 * {norm_x:e}"
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_2_kernel_norm_bounds() {
    criterion("2 kernel norm bounds", Duration::from_secs(30), || {
        for &a in &[0.5, 1.0, 2.0, 8.0] {
            let r = verify_norm_bounds(a).map_err(|e| e.to_string())?;
            if r.phi_l1 > 3f64.sqrt() * 1.02 {
                return Err(format!("a={a}: ||phi||_1 = {} exceeds sqrt(3)*1.02", r.phi_l1));
            }
            if r.psi_l1 > (1.35 / a) * 1.02 {
                return Err(format!("a={a}: ||psi||_1 = {} exceeds 1.35/a*1.02", r.psi_l1));
            }
            if !r.bounds_hold {
                return Err(format!("a={a}: bounds_hold is false"));
            }
        }
        for &b in &[0.5, 1.0, 4.0] {
            let r = verify_norm_bounds(b).map_err(|e| e.to_string())?;
            let target = 1.0 / (2.0 * b);
            if (r.psitilde_l1 - target).abs() > 0.02 * target {
                return Err(format!(
                    "b={b}: ||psitilde||_1 = {} not within 2% of {target}",
                    r.psitilde_l1
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_3_diagonalization_of_small_perturbations() {
    criterion("3 diagonalization", Duration::from_secs(30), || {
        let frame = integer_frame(-10, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let config = IterationConfig::new(Variant::Phi1, 0.5);
        let target_norm = 0.9 / (10.8 * 3f64.sqrt());
        for trial in 0..20 {
            let b = scaled_to(&random_matrix(&frame, &mut rng), NormKind::Spectral, target_norm);
            let report = iterate_fixed_point(&frame, &b, &config)
                .map_err(|e| format!("trial {trial}: {e}"))?;
            if report.iterations >= 200 {
                return Err(format!("trial {trial}: {} iterations", report.iterations));
            }
            let off_diag = report
                .jx_star
                .data()
                .iter()
                .enumerate()
                .any(|(k, z)| k / 21 != k % 21 && *z != Complex64::default());
            if off_diag {
                return Err(format!("trial {trial}: JX* has off-diagonal entries"));
            }
            if report.residual_rel >= 1e-10 {
                return Err(format!("trial {trial}: residual {:e}", report.residual_rel));
            }
            if report.spectra.max_match_distance >= 1e-8 {
                return Err(format!(
                    "trial {trial}: spectra distance {:e}",
                    report.spectra.max_match_distance
                ));
            }
            let drift = report
                .x_star
                .with_data(report.x_star.data() - b.data())
                .unwrap()
                .norm(NormKind::Spectral);
            if drift > 3.0 * target_norm {
                return Err(format!("trial {trial}: ||X*-B|| = {drift} exceeds 3||B||"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_4_banded_reduction_at_unit_norm() {
    criterion("4 banded reduction", Duration::from_secs(120), || {
        let frame = integer_frame(0, 63);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = scaled_to(&random_matrix(&frame, &mut rng), NormKind::Spectral, 1.0);
        let config = IterationConfig::new(Variant::Phi, 14.0);
        let report = iterate_fixed_point(&frame, &b, &config).map_err(|e| e.to_string())?;
        let jx = report.jx_star.data();
        for i in 0..64 {
            for j in 0..64 {
                if (i as f64 - j as f64).abs() > 28.0 && jx[(i, j)] != Complex64::default() {
                    return Err(format!("JX*[{i},{j}] nonzero outside the 2a band"));
                }
            }
        }
        let drift = report
            .x_star
            .with_data(report.x_star.data() - b.data())
            .unwrap()
            .norm(NormKind::Spectral);
        if drift > 2f64.sqrt() {
            return Err(format!("||X*-B|| = {drift} exceeds sqrt(2)||B||"));
        }
        if report.residual_rel >= 1e-10 {
            return Err(format!("residual {:e}", report.residual_rel));
        }
        if report.spectra.max_match_distance >= 1e-7 {
            return Err(format!(
                "spectra distance {:e}",
                report.spectra.max_match_distance
            ));
        }
        Ok(())
    });
}

#[test]
fn criterion_5_hypercausal_series_without_smallness() {
    criterion("5 hypercausal series", Duration::from_secs(10), || {
        let frame = integer_frame(0, 31);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let raw = random_matrix(&frame, &mut rng);
        let lower = raw
            .with_data(DMatrix::from_fn(32, 32, |i, j| {
                if i > j { raw.data()[(i, j)] } else { Complex64::default() }
            }))
            .unwrap();
        let b = scaled_to(&lower, NormKind::Frobenius, 5.0);

        let mut config = IterationConfig::new(Variant::Series, 0.5);
        config.norm_kind = NormKind::Frobenius;
        // the factorial bound is checked term by term inside the series
        let report = iterate_fixed_point(&frame, &b, &config).map_err(|e| e.to_string())?;
        if report.iterations > 32 {
            return Err(format!("series needed {} terms", report.iterations));
        }
        let a_minus_b = OperatorMatrix::diagonal_of_frame(frame.clone())
            .with_data(
                OperatorMatrix::diagonal_of_frame(frame.clone()).data() - b.data(),
            )
            .unwrap();
        let scale = a_minus_b.norm(NormKind::Spectral);
        let absolute = report.residual_rel * scale.max(1.0);
        if absolute >= 1e-11 * (1.0 + scale) {
            return Err(format!("intertwining residual {absolute:e}"));
        }
        // A - B is strictly lower triangular below its diagonal, so its
        // spectrum is the diagonal itself; it must equal the frame exactly
        for (k, &l) in frame.eigenvalues().iter().enumerate() {
            if a_minus_b.data()[(k, k)] != cx(l, 0.0) {
                return Err(format!("diagonal entry {k} differs from the frame"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_6_periodic_potential_constant_reduction() {
    criterion("6 periodic potential", Duration::from_secs(30), || {
        let omega = 2.0 * std::f64::consts::PI;
        let v = FourierPotential::from_terms(
            omega,
            &[(0, cx(0.02, 0.0)), (1, cx(0.01, 0.0)), (-1, cx(0.01, 0.0))],
        )
        .map_err(|e| e.to_string())?;
        let config = IterationConfig::new(Variant::Phi1, 0.5);
        let reduction = reduce_periodic(&v, &config, 40).map_err(|e| e.to_string())?;
        if (reduction.c - cx(0.02, 0.0)).norm() > 1e-6 {
            return Err(format!("c = {} not within 1e-6 of 0.02", reduction.c));
        }

        let (frame, b) = build_laurent(&v, 40).map_err(|e| e.to_string())?;
        let a_mat = OperatorMatrix::diagonal_of_frame(frame.clone());
        let perturbed = a_mat.with_data(a_mat.data() - b.data()).unwrap();
        let spectrum = dense_spectrum(&perturbed).map_err(|e| e.to_string())?;
        for n in -20..=20i64 {
            let target = cx(n as f64, 0.0) - reduction.c;
            let dist = spectrum
                .eigenvalues
                .iter()
                .map(|z| (z - target).norm())
                .fold(f64::INFINITY, f64::min);
            if dist > 1e-6 {
                return Err(format!("no eigenvalue within 1e-6 of {n} - c (dist {dist:e})"));
            }
        }

        let refined = reduce_periodic(&v, &config, 80).map_err(|e| e.to_string())?;
        if (refined.c - reduction.c).norm() >= 1e-8 {
            return Err(format!(
                "c moved by {:e} when doubling the truncation",
                (refined.c - reduction.c).norm()
            ));
        }
        Ok(())
    });
}

#[test]
fn criterion_7_hypercausal_potential() {
    criterion("7 hypercausal potential", Duration::from_secs(10), || {
        let omega = 2.0 * std::f64::consts::PI;
        let v = FourierPotential::from_terms(omega, &[(1, cx(5.0, 0.0))])
            .map_err(|e| e.to_string())?;
        // the reduction itself enforces residual < 1e-12 * (1 + ||A-B||)
        // and matches the spectrum against the frame
        let report = reduce_hypercausal_potential(&v, 40).map_err(|e| e.to_string())?;
        let mut frame: Vec<f64> = report.jx_star.frame().eigenvalues().to_vec();
        frame.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let expected: Vec<f64> = (-40..=40).map(|n| n as f64).collect();
        let max_dev = frame
            .iter()
            .zip(&expected)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if max_dev > 1e-12 {
            return Err(format!("frame deviates from -40..40 by {max_dev:e}"));
        }
        Ok(())
    });
}

#[test]
fn criterion_8_negative_controls() {
    criterion("8 negative controls", Duration::from_secs(30), || {
        let frame = integer_frame(-10, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let target_norm = 2.0 / (10.8 * 3f64.sqrt());
        let b = scaled_to(&random_matrix(&frame, &mut rng), NormKind::Spectral, target_norm);
        let config = IterationConfig::new(Variant::Phi1, 0.5);
        match iterate_fixed_point(&frame, &b, &config) {
            Err(Error::BudgetFailed { lhs, .. }) => {
                if (lhs - 2.0).abs() > 0.05 {
                    return Err(format!("budget lhs = {lhs}, expected about 2"));
                }
            }
            Err(e) => return Err(format!("expected a budget failure, got: {e}")),
            Ok(_) => return Err("budget-violating problem was accepted".into()),
        }

        let mut forced = config.clone();
        forced.force = true;
        match iterate_fixed_point(&frame, &b, &forced) {
            Ok(report) => {
                if report.residual_rel > 1e-6 {
                    return Err(format!(
                        "forced run reported success with residual {:e}",
                        report.residual_rel
                    ));
                }
            }
            Err(Error::NonConvergence { .. }) => {}
            Err(e) => return Err(format!("forced run failed unexpectedly: {e}")),
        }

        // triangle multiplier pair: the homological identity genuinely fails
        // when some spectral difference lies strictly inside (0, a)
        let small_gap = Arc::new(SpectralFrame::new(vec![0.0, 0.5]).unwrap());
        let pair = MultiplierPair::new(KernelKind::Triangle, 1.0).map_err(|e| e.to_string())?;
        let x = OperatorMatrix::new(
            small_gap.clone(),
            DMatrix::from_row_slice(2, 2, &[
                cx(0.0, 0.0), cx(1.0, 0.0),
                cx(1.0, 0.0), cx(0.0, 0.0),
            ]),
        )
        .unwrap();
        let res = homological_residual(&small_gap, &pair, &x, NormKind::Spectral)
            .map_err(|e| e.to_string())?;
        if res <= 1e-3 {
            return Err(format!("triangle residual {res:e} unexpectedly small"));
        }
        Ok(())
    });
}
