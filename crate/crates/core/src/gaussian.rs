//! Scalar Gaussian helpers for the probit likelihood.
//!
//! Everything the classifier needs from the standard normal lives here: the
//! density, the CDF `Ψ`, the hazard ratio `N(z)/Ψ(z)` and the moments of a
//! Gaussian tilted by a probit factor. The hazard ratio is the workhorse; it
//! stays finite and accurate far into the lower tail where `Ψ` underflows.

use crate::{Error, Label, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this point the hazard ratio is evaluated by continued fraction.
const TAIL_SWITCH: f64 = -6.0;
const TAIL_TERMS: u32 = 80;

/// Standard normal density `N(z; 0, 1)`.
pub fn std_normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal CDF `Ψ(z)`.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// `ln Ψ(z)`, finite for every finite `z`.
pub fn log_std_normal_cdf(z: f64) -> f64 {
    if z < TAIL_SWITCH {
        -0.5 * z * z - LN_SQRT_2PI - hazard_ratio(z).ln()
    } else {
        std_normal_cdf(z).ln()
    }
}

/// The ratio `N(z)/Ψ(z)`.
///
/// Direct division for `z >= -6`; below that a continued fraction for the
/// Mills ratio, which behaves like `-z + 1/(-z)` as `z -> -inf`.
pub fn hazard_ratio(z: f64) -> f64 {
    if z >= TAIL_SWITCH {
        return std_normal_pdf(z) / std_normal_cdf(z);
    }
    // Ψ(-x)/N(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))), evaluated bottom-up.
    let x = -z;
    let mut f = x;
    for k in (1..=TAIL_TERMS).rev() {
        f = x + f64::from(k) / f;
    }
    f
}

/// Moments of `N(u; mu, var) * Ψ(t u)` expressed as corrections to `(mu, var)`.
///
/// The matched Gaussian has mean `mu + alpha * var` and variance
/// `var - beta * var^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbitMoments {
    /// `ln Z`, the log normaliser of the tilted density.
    pub log_partition: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ProbitMoments {
    pub fn matched_mean(&self, mu: f64, var: f64) -> f64 {
        mu + self.alpha * var
    }

    pub fn matched_var(&self, var: f64) -> f64 {
        var * (1.0 - self.beta * var)
    }
}

pub fn probit_moments(mu: f64, var: f64, label: Label) -> Result<ProbitMoments> {
    if var.is_nan() || var <= 0.0 {
        return Err(Error::NonPositiveVariance(var));
    }
    let t = label.sign();
    let s = (var + 1.0).sqrt();
    let z = t * mu / s;
    let h = hazard_ratio(z);
    let alpha = t * h / s;
    // h (z + h) / s^2, written through alpha so the label sign cancels.
    let beta = alpha * (alpha + t * z / s);
    Ok(ProbitMoments {
        log_partition: log_std_normal_cdf(z),
        alpha,
        beta: beta.max(0.0),
    })
}
