use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least-squares line with Pearson correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// 0 when every `y` is equal.
    pub r: f64,
}

pub fn linreg(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidStatistic("x and y lengths differ".into()));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidStatistic("need at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidStatistic("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let r = if syy == 0.0 { 0.0 } else { sxy / libm::sqrt(sxx * syy) };
    Ok(LinearFit { slope, intercept: my - slope * mx, r })
}
