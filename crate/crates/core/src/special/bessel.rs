use super::dd::Dd;
use super::recip_gamma;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 400;

/// Σ_m (sign·q)^m / (m! (ν+1)_m) summed in double-double.
///
/// With q = x²/4 this is the bracket of the ascending series
/// J_ν(x) = (x/2)^ν/Γ(ν+1) · Σ ... (sign = -1) and I_ν (sign = +1).
/// The alternating case loses no digits to cancellation for x ≤ 20.
pub(crate) fn bessel_regular_series(nu: f64, q: f64, sign: f64) -> f64 {
    let step = Dd::new(sign * q);
    let mut term = Dd::new(1.0);
    let mut sum = Dd::new(1.0);
    for m in 0..MAX_TERMS {
        let k = (m + 1) as f64;
        // (m + 1)(ν + 1 + m), with ν + m + 1 formed exactly
        let denom = Dd::sum(nu, k) * k;
        term = term * step / denom;
        sum = sum + term;
        if term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
    }
    sum.to_f64()
}

fn check_args(nu: f64, x: f64) -> Result<()> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(Error::Parameter(format!("Bessel order {nu} must exceed -1")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Parameter(format!("Bessel argument {x} must be >= 0")));
    }
    Ok(())
}

fn prefactor(nu: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return match nu {
            0.0 => Ok(1.0),
            n if n > 0.0 => Ok(0.0),
            _ => Err(Error::NonFinite(0.0)),
        };
    }
    Ok((0.5 * x).powf(nu) * recip_gamma(nu + 1.0))
}

/// Bessel function of the first kind J_ν(x), ν > -1, x ≥ 0.
/// Ascending series; accurate to about 1e-13 absolute for x ≤ 20.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    let pre = prefactor(nu, x)?;
    if pre == 0.0 {
        return Ok(0.0);
    }
    Ok(pre * bessel_regular_series(nu, 0.25 * x * x, -1.0))
}

/// Modified Bessel function of the first kind I_ν(x), ν > -1, x ≥ 0.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    let pre = prefactor(nu, x)?;
    if pre == 0.0 {
        return Ok(0.0);
    }
    Ok(pre * bessel_regular_series(nu, 0.25 * x * x, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(0.7, 0.0).unwrap(), 0.0);
        assert!(bessel_j(-0.5, 0.0).is_err());
    }

    #[test]
    fn half_integer_closed_forms() {
        assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-15);
        let j = bessel_j(-0.5, 1.0).unwrap();
        assert!((j - (2.0 / PI).sqrt() * 1f64.cos()).abs() < 1e-15);
        assert!((j - 0.431_098_868_0).abs() < 1e-10);
        let i = bessel_i(0.5, 1.0).unwrap();
        assert!((i - 0.937_674_888_2).abs() < 1e-10);
        let i = bessel_i(-0.5, 2.0).unwrap();
        assert!((i - (1.0 / PI).sqrt() * 2f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(bessel_j(-1.0, 1.0).is_err());
        assert!(bessel_i(0.0, -1.0).is_err());
    }
}
