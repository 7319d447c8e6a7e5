//! Yeo-Johnson power transform and its maximum-likelihood exponent.

use crate::error::{Error, Result};

const LAMBDA_EPS: f64 = 1e-12;

/// Forward Yeo-Johnson transform.
pub fn yeo_johnson(x: f64, lambda: f64) -> f64 {
    if x >= 0.0 {
        if lambda.abs() < LAMBDA_EPS {
            x.ln_1p()
        } else {
            (lambda * x.ln_1p()).exp_m1() / lambda
        }
    } else {
        let mu = 2.0 - lambda;
        if mu.abs() < LAMBDA_EPS {
            -(-x).ln_1p()
        } else {
            -(mu * (-x).ln_1p()).exp_m1() / mu
        }
    }
}

/// Exclusive bounds `(lo, hi)` of the transform's image for `lambda`.
pub fn image_bounds(lambda: f64) -> (f64, f64) {
    let hi = if lambda < -LAMBDA_EPS {
        -1.0 / lambda
    } else {
        f64::INFINITY
    };
    let mu = 2.0 - lambda;
    let lo = if mu < -LAMBDA_EPS { 1.0 / mu } else { f64::NEG_INFINITY };
    (lo, hi)
}

/// Inverse of [`yeo_johnson`]. Values outside the image are a domain error.
pub fn inverse_yeo_johnson(y: f64, lambda: f64) -> Result<f64> {
    let (lo, hi) = image_bounds(lambda);
    if !(y > lo && y < hi) {
        return Err(Error::Domain(format!(
            "{y} is outside the Yeo-Johnson image ({lo}, {hi}) for lambda {lambda}"
        )));
    }
    Ok(if y >= 0.0 {
        if lambda.abs() < LAMBDA_EPS {
            y.exp_m1()
        } else {
            ((lambda * y).ln_1p() / lambda).exp_m1()
        }
    } else {
        let mu = 2.0 - lambda;
        if mu.abs() < LAMBDA_EPS {
            -(-y).exp_m1()
        } else {
            -((-mu * y).ln_1p() / mu).exp_m1()
        }
    })
}

/// Profile log-likelihood of `lambda` under a normal model of the
/// transformed data.
pub fn log_likelihood(data: &[f64], lambda: f64) -> f64 {
    let n = data.len() as f64;
    let transformed: Vec<f64> = data.iter().map(|&x| yeo_johnson(x, lambda)).collect();
    let mean = transformed.iter().sum::<f64>() / n;
    let var = transformed.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
    let jacobian: f64 = data.iter().map(|&x| x.signum() * x.abs().ln_1p()).sum();
    -0.5 * n * var.ln() + (lambda - 1.0) * jacobian
}

/// Maximises [`log_likelihood`] by golden-section search on `[lo, hi]`
/// until the bracket is narrower than `tol`.
pub fn fit_lambda(data: &[f64], lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = log_likelihood(data, c);
    let mut fd = log_likelihood(data, d);
    while b - a > tol {
        // NaN likelihoods (zero variance) compare false and shrink from above.
        if fc > fd || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = log_likelihood(data, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = log_likelihood(data, d);
        }
    }
    0.5 * (a + b)
}
