use alloc::format;

use serde::{Deserialize, Serialize};

use super::normal::{normal_cdf, normal_quantile};
use crate::error::{Error, Result};

/// Signed arcsine effect size `2 asin(sqrt(p1)) - 2 asin(sqrt(p2))`.
pub fn cohens_h(p1: f64, p2: f64) -> Result<f64> {
    for p in [p1, p2] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidStatistic(format!("proportion {p} outside [0, 1]")));
        }
    }
    Ok(2.0 * libm::asin(libm::sqrt(p1)) - 2.0 * libm::asin(libm::sqrt(p2)))
}

/// Conventional interpretation bands of `|h|` (0.2 / 0.5 / 0.8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectBand {
    Negligible,
    Small,
    Medium,
    Large,
}

impl EffectBand {
    pub fn of(h: f64) -> Self {
        match libm::fabs(h) {
            x if x >= 0.8 => EffectBand::Large,
            x if x >= 0.5 => EffectBand::Medium,
            x if x >= 0.2 => EffectBand::Small,
            _ => EffectBand::Negligible,
        }
    }
}

/// Normal-approximation power of a two-proportion test with effect size `h`.
///
/// Unequal groups use the harmonic-mean size `n' = 2 n1 n2 / (n1 + n2)`, so
/// the one-tailed power is `Phi(|h| sqrt(n'/2) - z_{1-alpha})`.
pub fn power_two_prop(h: f64, n1: u64, n2: u64, alpha: f64, one_tailed: bool) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidStatistic(format!("alpha {alpha} outside (0, 1)")));
    }
    if n1 < 2 || n2 < 2 {
        return Err(Error::InvalidStatistic(format!("group sizes ({n1}, {n2}) below 2")));
    }
    if !h.is_finite() {
        return Err(Error::InvalidStatistic(format!("effect size {h}")));
    }
    let harmonic = 2.0 * n1 as f64 * n2 as f64 / (n1 + n2) as f64;
    let shift = libm::fabs(h) * libm::sqrt(harmonic / 2.0);
    Ok(if one_tailed {
        normal_cdf(shift - normal_quantile(1.0 - alpha))
    } else {
        let z = normal_quantile(1.0 - alpha / 2.0);
        normal_cdf(shift - z) + normal_cdf(-shift - z)
    })
}
