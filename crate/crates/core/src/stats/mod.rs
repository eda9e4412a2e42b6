//! Exact and approximate statistics for comparing two proportions.

mod boschloo;
mod effect;
mod fisher;
pub mod normal;
mod regression;

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use boschloo::{boschloo_one_sided, DEFAULT_GRID_SIZE, MIN_GRID_SIZE};
pub use effect::{cohens_h, power_two_prop, EffectBand};
pub use fisher::{fisher_one_sided, hypergeometric_ln_pmf};
pub use regression::{linreg, LinearFit};

/// Successes and failures of two groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contingency2x2 {
    pub s1: u64,
    pub f1: u64,
    pub s2: u64,
    pub f2: u64,
}

impl Contingency2x2 {
    pub fn new(s1: u64, f1: u64, s2: u64, f2: u64) -> Result<Self> {
        if s1 + f1 == 0 || s2 + f2 == 0 {
            return Err(Error::InvalidStatistic(format!(
                "both groups need at least one observation, got ({s1}, {f1}, {s2}, {f2})"
            )));
        }
        Ok(Self { s1, f1, s2, f2 })
    }

    pub fn n1(&self) -> u64 {
        self.s1 + self.f1
    }

    pub fn n2(&self) -> u64 {
        self.s2 + self.f2
    }

    pub fn p1(&self) -> f64 {
        self.s1 as f64 / self.n1() as f64
    }

    pub fn p2(&self) -> f64 {
        self.s2 as f64 / self.n2() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Fisher,
    Boschloo,
}

/// Result of a one-sided test of `H1: p1 > p2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub p_value: f64,
    pub statistic: f64,
    pub method: TestMethod,
}
