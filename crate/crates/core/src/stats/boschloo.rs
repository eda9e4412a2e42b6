//! One-sided Boschloo exact unconditional test.
//!
//! The Fisher p-value is used as the test statistic. The p-value is the
//! largest probability, over the common success rate `pi`, of drawing a
//! table whose Fisher p-value is at most the observed one, with each group
//! binomial in `pi`. `pi` is scanned on the open uniform grid
//! `i / (grid_size + 1)` for `i = 1..=grid_size`.

use alloc::format;
use alloc::vec::Vec;

use super::fisher::{lower_tail, upper_tail};
use super::{Contingency2x2, TestMethod, TestResult};
use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 2000;
pub const MIN_GRID_SIZE: usize = 10;

/// Relative slack when comparing Fisher p-values, so that tables with
/// mathematically equal p-values are not split by rounding.
const TIE_TOLERANCE: f64 = 1e-12;

enum Region {
    /// `b` in `0..=m`.
    Prefix(usize),
    Empty,
    Scattered { inside: Vec<usize>, outside: Vec<usize> },
}

/// Both tails of a table, so that p-values near 1 compare through their
/// complements.
#[derive(Clone, Copy)]
struct Tails {
    upper: f64,
    lower: f64,
}

impl Tails {
    fn of(a: u64, n1: u64, b: u64, n2: u64) -> Self {
        Tails { upper: upper_tail(a, n1, b, n2), lower: lower_tail(a, n1, b, n2) }
    }

    /// Whether this table is at least as extreme as `observed`.
    fn as_extreme_as(&self, observed: &Tails) -> bool {
        if self.upper <= 0.5 || observed.upper <= 0.5 {
            self.upper <= observed.upper * (1.0 + TIE_TOLERANCE)
        } else {
            self.lower >= observed.lower * (1.0 - TIE_TOLERANCE)
        }
    }
}

fn ln_choose_row(n: u64) -> Vec<f64> {
    let ln_n = libm::lgamma(n as f64 + 1.0);
    (0..=n).map(|k| ln_n - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)).collect()
}

fn binomial_pmf(ln_choose: &[f64], ln_p: f64, ln_q: f64, out: &mut [f64]) {
    let n = ln_choose.len() - 1;
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = libm::exp(ln_choose[k] + k as f64 * ln_p + (n - k) as f64 * ln_q);
    }
}

pub fn boschloo_one_sided(table: &Contingency2x2, grid_size: usize) -> Result<TestResult> {
    if grid_size < MIN_GRID_SIZE {
        return Err(Error::InvalidConfig(format!("grid size {grid_size} below {MIN_GRID_SIZE}")));
    }
    let (n1, n2) = (table.n1(), table.n2());
    let observed = Tails::of(table.s1, n1, table.s2, n2);

    let regions: Vec<Region> = (0..=n1)
        .map(|a| {
            let (inside, outside): (Vec<usize>, Vec<usize>) =
                (0..=n2 as usize).partition(|&b| Tails::of(a, n1, b as u64, n2).as_extreme_as(&observed));
            match inside.last() {
                None => Region::Empty,
                Some(&m) if inside.len() == m + 1 => Region::Prefix(m),
                Some(_) => Region::Scattered { inside, outside },
            }
        })
        .collect();

    let (c1, c2) = (ln_choose_row(n1), ln_choose_row(n2));
    let mut pmf1 = alloc::vec![0.0; c1.len()];
    let mut pmf2 = alloc::vec![0.0; c2.len()];
    // cdf2[k] sums pmf2[..=k]; sf2[k] sums pmf2[k..], with sf2[n2 + 1] = 0
    let mut cdf2 = alloc::vec![0.0; c2.len()];
    let mut sf2 = alloc::vec![0.0; c2.len() + 1];
    let mut best: f64 = 0.0;
    for i in 1..=grid_size {
        let pi = i as f64 / (grid_size + 1) as f64;
        let (ln_p, ln_q) = (libm::log(pi), libm::log1p(-pi));
        binomial_pmf(&c1, ln_p, ln_q, &mut pmf1);
        binomial_pmf(&c2, ln_p, ln_q, &mut pmf2);
        let mut acc = 0.0;
        for (slot, p) in cdf2.iter_mut().zip(&pmf2) {
            acc += p;
            *slot = acc;
        }
        for k in (0..pmf2.len()).rev() {
            sf2[k] = sf2[k + 1] + pmf2[k];
        }
        let (mut inside, mut outside) = (0.0, 0.0);
        for (region, p1) in regions.iter().zip(&pmf1) {
            let (i, o) = match region {
                Region::Prefix(m) => (cdf2[*m], sf2[*m + 1]),
                Region::Empty => (0.0, sf2[0]),
                Region::Scattered { inside, outside } => {
                    (inside.iter().map(|&b| pmf2[b]).sum(), outside.iter().map(|&b| pmf2[b]).sum::<f64>())
                }
            };
            inside += p1 * i;
            outside += p1 * o;
        }
        let size = if inside > 0.5 { 1.0 - outside } else { inside };
        best = best.max(size);
    }
    Ok(TestResult { p_value: best.clamp(0.0, 1.0), statistic: observed.upper, method: TestMethod::Boschloo })
}
