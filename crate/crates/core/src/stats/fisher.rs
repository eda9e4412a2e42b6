//! One-sided Fisher exact test via log-space hypergeometric tails.

use super::{Contingency2x2, TestMethod, TestResult};

fn ln_choose(n: u64, k: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// `ln P(X = x)` for `X ~ Hypergeometric(total, successes, draws)`.
pub fn hypergeometric_ln_pmf(total: u64, successes: u64, draws: u64, x: u64) -> f64 {
    if x > successes || x > draws || draws - x > total - successes {
        return f64::NEG_INFINITY;
    }
    ln_choose(successes, x) + ln_choose(total - successes, draws - x) - ln_choose(total, draws)
}

fn log_sum_exp(total: u64, successes: u64, draws: u64, xs: core::ops::RangeInclusive<u64>) -> f64 {
    let terms = xs.map(|x| hypergeometric_ln_pmf(total, successes, draws, x));
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return 0.0;
    }
    let sum: f64 = terms.map(|t| libm::exp(t - max)).sum();
    (libm::exp(max) * sum).clamp(0.0, 1.0)
}

/// Upper tail `P(X >= s1)` with both margins fixed, i.e. evidence for `p1 > p2`.
pub(crate) fn upper_tail(s1: u64, n1: u64, s2: u64, n2: u64) -> f64 {
    let successes = s1 + s2;
    if s1 <= successes.saturating_sub(n2) {
        return 1.0;
    }
    log_sum_exp(n1 + n2, successes, n1, s1..=successes.min(n1))
}

/// Complement of [`upper_tail`], `P(X < s1)`, accurate when the upper tail is close to 1.
pub(crate) fn lower_tail(s1: u64, n1: u64, s2: u64, n2: u64) -> f64 {
    let successes = s1 + s2;
    let lo = successes.saturating_sub(n2);
    if s1 <= lo {
        return 0.0;
    }
    log_sum_exp(n1 + n2, successes, n1, lo..=s1 - 1)
}

pub fn fisher_one_sided(table: &Contingency2x2) -> TestResult {
    let p = upper_tail(table.s1, table.n1(), table.s2, table.n2());
    // Conditional on the margins the test statistic is the group-1 success count.
    TestResult { p_value: p, statistic: table.s1 as f64, method: TestMethod::Fisher }
}
