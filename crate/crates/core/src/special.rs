//! Sine and cosine integrals.
//!
//! `Si(x) = ∫_0^x sin t / t dt`, `Ci(x) = γ + ln x + ∫_0^x (cos t - 1)/t dt`.
//! Power series for small arguments, a complex continued fraction for the
//! exponential integral `E1(ix)` otherwise. Accuracy is close to machine
//! precision over the ranges exercised here.

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 400;
const SERIES_CUTOFF: f64 = 2.0;

/// Both integrals at once; `x` may be any finite real. `Ci` of a negative
/// argument returns `Ci(|x|)` (the real part of the principal branch).
pub fn sici(x: f64) -> (f64, f64) {
    assert!(x.is_finite(), "sici: non-finite argument");
    let ax = x.abs();
    if ax == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let (si, ci) = if ax <= SERIES_CUTOFF {
        sici_series(ax)
    } else {
        sici_cf(ax)
    };
    (si * x.signum(), ci)
}

pub fn si(x: f64) -> f64 {
    sici(x).0
}

pub fn ci(x: f64) -> f64 {
    sici(x).1
}

fn sici_series(x: f64) -> (f64, f64) {
    // Si: sum (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    // Ci: gamma + ln x + sum (-1)^k x^(2k) / ((2k)(2k)!)
    let x2 = x * x;
    let mut si_sum = x;
    let mut term = x;
    let mut k = 1usize;
    loop {
        // advance from x^(2k-1)/(2k-1)! to x^(2k+1)/(2k+1)!
        term *= -x2 / ((2 * k) as f64 * (2 * k + 1) as f64);
        let add = term / (2 * k + 1) as f64;
        si_sum += add;
        if add.abs() < EPS * si_sum.abs().max(1.0) || k > MAX_ITER {
            break;
        }
        k += 1;
    }
    let mut ci_sum = 0.0;
    let mut even_term = 1.0; // x^0/0!
    let mut k = 1usize;
    loop {
        even_term *= -x2 / ((2 * k - 1) as f64 * (2 * k) as f64);
        let add = even_term / (2 * k) as f64;
        ci_sum += add;
        if add.abs() < EPS * ci_sum.abs().max(1.0) || k > MAX_ITER {
            break;
        }
        k += 1;
    }
    (si_sum, EULER_GAMMA + x.ln() + ci_sum)
}

/// Modified Lentz continued fraction for E1(ix); then
/// `Ci(x) = -Re h`, `Si(x) = pi/2 + Im h` with `h = E1(ix) e^{ix}`-free form.
fn sici_cf(x: f64) -> (f64, f64) {
    let fpmin = f64::MIN_POSITIVE / EPS;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / fpmin, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut converged = false;
    for i in 1..MAX_ITER {
        let a = -((i * i) as f64);
        b += Complex64::new(2.0, 0.0);
        d = (a * d + b).inv();
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - Complex64::new(1.0, 0.0)).norm() < EPS {
            converged = true;
            break;
        }
    }
    debug_assert!(converged, "sici continued fraction stalled at x = {x}");
    h *= Complex64::new(x.cos(), -x.sin());
    (std::f64::consts::FRAC_PI_2 + h.im, -h.re)
}
