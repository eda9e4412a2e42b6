//! Aggregation of human judgments into a per-source results table.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{
    boschloo_one_sided, cohens_h, fisher_one_sided, power_two_prop, Contingency2x2, EffectBand, DEFAULT_GRID_SIZE,
};

/// Where a shown sequence came from. Never revealed to evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Random,
    Real,
    #[serde(rename = "beam_n")]
    BeamN,
    #[serde(rename = "beam_3")]
    Beam3,
}

impl SourceKind {
    /// Row order of the results table.
    pub const ALL: [SourceKind; 4] = [SourceKind::Random, SourceKind::Real, SourceKind::BeamN, SourceKind::Beam3];

    pub fn as_str(&self) -> &'static str {
        match self {
            SourceKind::Random => "random",
            SourceKind::Real => "real",
            SourceKind::BeamN => "beam_n",
            SourceKind::Beam3 => "beam_3",
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SourceKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown sequence source `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HumanGenerated,
    ComputerGenerated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultsRow {
    pub source: SourceKind,
    pub judged_human: u64,
    pub judged_computer: u64,
    pub samples: u64,
    /// Rounded to the nearest percent; the two add up to 100 when `samples > 0`.
    pub human_pct: u32,
    pub computer_pct: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairStats {
    pub first: SourceKind,
    pub second: SourceKind,
    /// Successes are "judged human generated"; group 1 is `first`.
    pub table: Contingency2x2,
    pub fisher_p: f64,
    pub boschloo_p: f64,
    pub cohens_h: f64,
    pub effect: EffectBand,
    /// Absent when a group has fewer than two judgments.
    pub power: Option<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub rows: Vec<ResultsRow>,
    pub pair: Option<PairStats>,
}

impl ResultsTable {
    pub fn row(&self, source: SourceKind) -> &ResultsRow {
        self.rows.iter().find(|r| r.source == source).expect("every source has a row")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTestConfig {
    pub grid_size: usize,
    pub alpha: f64,
}

impl Default for PairTestConfig {
    fn default() -> Self {
        Self { grid_size: DEFAULT_GRID_SIZE, alpha: 0.05 }
    }
}

fn percent(part: u64, whole: u64) -> u32 {
    if whole == 0 {
        0
    } else {
        libm::round(100.0 * part as f64 / whole as f64) as u32
    }
}

/// Folds `(true source, verdict)` pairs into the results table and, when a
/// pair of sources is given, tests whether the first fooled evaluators more
/// often than the second.
pub fn tally<I>(judgments: I, pair: Option<(SourceKind, SourceKind)>, config: &PairTestConfig) -> Result<ResultsTable>
where
    I: IntoIterator<Item = (SourceKind, Verdict)>,
{
    let mut counts = [(0u64, 0u64); 4];
    for (source, verdict) in judgments {
        let slot = &mut counts[SourceKind::ALL.iter().position(|k| *k == source).expect("known source")];
        match verdict {
            Verdict::HumanGenerated => slot.0 += 1,
            Verdict::ComputerGenerated => slot.1 += 1,
        }
    }
    let rows: Vec<ResultsRow> = SourceKind::ALL
        .iter()
        .zip(counts)
        .map(|(&source, (human, computer))| {
            let samples = human + computer;
            let human_pct = percent(human, samples);
            ResultsRow {
                source,
                judged_human: human,
                judged_computer: computer,
                samples,
                human_pct,
                computer_pct: if samples == 0 { 0 } else { 100 - human_pct },
            }
        })
        .collect();

    let pair = match pair {
        Some((first, second)) => pair_stats(&rows, first, second, config)?,
        None => None,
    };
    Ok(ResultsTable { rows, pair })
}

fn pair_stats(rows: &[ResultsRow], first: SourceKind, second: SourceKind, config: &PairTestConfig) -> Result<Option<PairStats>> {
    let a = rows.iter().find(|r| r.source == first).expect("row");
    let b = rows.iter().find(|r| r.source == second).expect("row");
    if a.samples == 0 || b.samples == 0 {
        return Ok(None);
    }
    let table = Contingency2x2::new(a.judged_human, a.judged_computer, b.judged_human, b.judged_computer)?;
    let h = cohens_h(table.p1(), table.p2())?;
    let power = if table.n1() >= 2 && table.n2() >= 2 {
        Some(power_two_prop(h, table.n1(), table.n2(), config.alpha, true)?)
    } else {
        None
    };
    Ok(Some(PairStats {
        first,
        second,
        table,
        fisher_p: fisher_one_sided(&table).p_value,
        boschloo_p: boschloo_one_sided(&table, config.grid_size)?.p_value,
        cohens_h: h,
        effect: EffectBand::of(h),
        power,
        alpha: config.alpha,
    }))
}
