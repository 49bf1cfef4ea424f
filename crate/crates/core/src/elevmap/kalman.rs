//! Scalar Kalman fusion of two height estimates.

use crate::{Error, Result};

/// Fuses prior `(h_p, var_p)` with measurement `(h_i, var_i)`.
pub fn kalman_update(h_p: f64, var_p: f64, h_i: f64, var_i: f64) -> Result<(f64, f64)> {
    if !(var_p > 0.0 && var_i > 0.0) || !var_p.is_finite() || !var_i.is_finite() {
        return Err(Error::NonPositiveVariance {
            prior: var_p,
            measurement: var_i,
        });
    }
    Ok(fuse(h_p, var_p, h_i, var_i))
}

/// Unchecked update used on the hot path once variances are known positive.
#[inline]
pub(crate) fn fuse(h_p: f64, var_p: f64, h_i: f64, var_i: f64) -> (f64, f64) {
    let s = var_p + var_i;
    ((h_p * var_i + h_i * var_p) / s, var_p * var_i / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn examples() {
        assert_eq!(kalman_update(2.0, 1.0, 4.0, 1.0).unwrap(), (3.0, 0.5));
        let (h, v) = kalman_update(1.0, 0.04, 1.2, 0.01).unwrap();
        assert_relative_eq!(h, 1.16, epsilon = 1e-12);
        assert_relative_eq!(v, 0.008, epsilon = 1e-12);
        let (h, v) = kalman_update(1.5, 0.2, 1.5, 0.2).unwrap();
        assert_relative_eq!(h, 1.5, max_relative = 1e-15);
        assert_relative_eq!(v, 0.1, max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_variance() {
        assert!(matches!(kalman_update(0.0, 0.0, 1.0, 1.0), Err(Error::NonPositiveVariance { .. })));
        assert!(kalman_update(0.0, 1.0, 1.0, -1.0).is_err());
        assert!(kalman_update(0.0, f64::NAN, 1.0, 1.0).is_err());
    }
}
