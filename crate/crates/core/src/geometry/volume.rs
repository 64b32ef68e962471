use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::error::{Error, Result};

/// Volume `c_d` of the Euclidean unit ball together with the bracket obtained
/// from `sqrt(2 pi x) (x/e)^x <= Gamma(x+1) <= e sqrt(x) (x/e)^x` at `x = d/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallVolume {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn unit_ball_volume(d: usize) -> Result<BallVolume> {
    if d == 0 {
        return Err(Error::domain("unit ball volume needs d >= 1"));
    }
    let x = d as f64 / 2.0;
    let ln_pi_pow = x * PI.ln();
    let value = (ln_pi_pow - libm::lgamma(x + 1.0)).exp();

    // Log-space Stirling terms; the upper Gamma bound gives the lower c_d bound.
    let ln_gamma_lo = 0.5 * (2.0 * PI * x).ln() + x * (x.ln() - 1.0);
    let ln_gamma_hi = 1.0 + 0.5 * x.ln() + x * (x.ln() - 1.0);
    Ok(BallVolume {
        value,
        lower: (ln_pi_pow - ln_gamma_hi).exp(),
        upper: (ln_pi_pow - ln_gamma_lo).exp(),
    })
}

/// Side of the smallest axis-aligned cube containing `cube(side) ⊕ B_2(0, inflate)`.
pub fn inflated_cube_side(side: f64, inflate: f64) -> Result<f64> {
    if !(side > 0.0) || !(inflate >= 0.0) {
        return Err(Error::domain(format!(
            "inflated cube needs side > 0 and inflate >= 0, got side={side}, inflate={inflate}"
        )));
    }
    Ok(side + 2.0 * inflate)
}

/// Stirling form of `c_d` used throughout the bounds: `(1/sqrt(pi d)) (2 pi e / d)^{d/2}`.
pub fn stirling_ball_volume(d: f64) -> f64 {
    (2.0 * PI * E / d).powf(d / 2.0) / (PI * d).sqrt()
}
