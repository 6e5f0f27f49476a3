use super::{ln_gamma, recip_gamma};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest |z| accepted by [`mittag_leffler`].
pub const ML_ARGUMENT_BOUND: f64 = 50.0;

const MAX_TERMS: usize = 20_000;
/// Estimated absolute rounding error above which the alternating series is
/// abandoned in favour of the contour integral.
const CANCELLATION_BUDGET: f64 = 1e-12;
const TALBOT_NODES: usize = 32;

/// Two-parameter Mittag-Leffler function E_{α,β}(z) for real arguments,
/// α > 0 and |z| ≤ 50.
///
/// The power series is summed with Neumaier compensation. For negative z
/// where the series would cancel catastrophically the value is recovered
/// instead by inverting its Laplace transform s^{α-β}/(s^α - z) along a
/// fixed Talbot contour.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Parameter(format!(
            "Mittag-Leffler parameters alpha={alpha}, beta={beta} (need alpha > 0)"
        )));
    }
    if !z.is_finite() || z.abs() > ML_ARGUMENT_BOUND {
        return Err(Error::OutOfRange {
            what: "Mittag-Leffler argument",
            value: z,
            bound: "|z| <= 50",
        });
    }
    if z == 0.0 {
        return Ok(recip_gamma(beta));
    }
    match series(alpha, beta, z) {
        Some(SeriesSum { value, max_term }) => {
            let noise = max_term * 4.0 * f64::EPSILON;
            if z < 0.0 && noise > CANCELLATION_BUDGET && alpha < 2.0 {
                Ok(talbot(alpha, beta, z))
            } else if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonFinite(z))
            }
        }
        None if z < 0.0 && alpha < 2.0 => Ok(talbot(alpha, beta, z)),
        None => Err(Error::OutOfRange {
            what: "Mittag-Leffler argument (series does not settle)",
            value: z,
            bound: "|z| <= 50",
        }),
    }
}

struct SeriesSum {
    value: f64,
    max_term: f64,
}

fn term(alpha: f64, beta: f64, z: f64, k: usize, zk: f64) -> f64 {
    let arg = alpha * k as f64 + beta;
    if zk.is_finite() && zk.abs() < 1e300 && arg < 170.0 {
        return zk * recip_gamma(arg);
    }
    if arg <= 0.0 {
        return zk * recip_gamma(arg);
    }
    let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    sign * (k as f64 * z.abs().ln() - ln_gamma(arg)).exp()
}

fn series(alpha: f64, beta: f64, z: f64) -> Option<SeriesSum> {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut max_term = 0.0f64;
    let mut zk = 1.0f64;
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let t = term(alpha, beta, z, k, zk);
        if !t.is_finite() {
            return None;
        }
        max_term = max_term.max(t.abs());
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
        // past the peak of the terms and below the stopping threshold
        let past_peak = alpha * k as f64 + beta > 1.0 && t.abs() < max_term;
        if past_peak && t.abs() < 1e-17 * (sum + comp).abs().max(1e-300) {
            quiet += 1;
            if quiet >= 2 {
                return Some(SeriesSum {
                    value: sum + comp,
                    max_term,
                });
            }
        } else {
            quiet = 0;
        }
        zk *= z;
    }
    None
}

fn laplace_image(alpha: f64, beta: f64, z: f64, s: Complex64) -> Complex64 {
    let sa = s.powf(alpha);
    s.powf(alpha - beta) / (sa - z)
}

/// Fixed Talbot inversion at t = 1.
fn talbot(alpha: f64, beta: f64, z: f64) -> f64 {
    let m = TALBOT_NODES as f64;
    let r = 2.0 * m / 5.0;
    let mut acc = 0.5 * (laplace_image(alpha, beta, z, Complex64::new(r, 0.0)) * r.exp()).re;
    for k in 1..TALBOT_NODES {
        let theta = k as f64 * PI / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let val = s.exp() * laplace_image(alpha, beta, z, s) * Complex64::new(1.0, sigma);
        acc += val.re;
    }
    r / m * acc
}
