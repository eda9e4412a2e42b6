//! Descriptive statistics over demonstrations.
//!
//! Standard deviations are population standard deviations (divide by `n`).

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::catalog::Demonstration;
use crate::error::{Error, Result};
use crate::stats::{linreg, LinearFit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    /// `counts[i]` covers `[i * bin_width, (i + 1) * bin_width)`.
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub scenes: usize,
    /// Total number of packed objects over all scenes.
    pub manipulations: usize,
    pub duration_mean_s: f64,
    pub duration_std_s: f64,
    pub duration_histogram: Histogram,
    /// Duration as a linear function of scene size; absent when every scene
    /// has the same number of objects.
    pub duration_per_object: Option<LinearFit>,
}

pub fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Some((mean, libm::sqrt(var)))
}

pub fn dataset_stats(demos: &[Demonstration], bin_width: f64) -> Result<DatasetSummary> {
    if demos.is_empty() {
        return Err(Error::EmptyInput("no demonstrations"));
    }
    if !(bin_width > 0.0) {
        return Err(Error::InvalidConfig("histogram bin width must be positive".into()));
    }
    let durations: Vec<f64> = demos.iter().map(|d| d.duration_s).collect();
    let (mean, std) = mean_std(&durations).expect("non-empty");
    let max = durations.iter().copied().fold(0.0, f64::max);
    let bins = libm::floor(max / bin_width) as usize + 1;
    let mut counts = alloc::vec![0usize; bins];
    for d in &durations {
        let i = (libm::floor(d / bin_width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let sizes: Vec<f64> = demos.iter().map(|d| d.len() as f64).collect();
    Ok(DatasetSummary {
        scenes: demos.len(),
        manipulations: demos.iter().map(Demonstration::len).sum(),
        duration_mean_s: mean,
        duration_std_s: std,
        duration_histogram: Histogram { bin_width, counts },
        duration_per_object: linreg(&sizes, &durations).ok(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementSummary {
    pub object_id: alloc::string::String,
    pub mean: (f64, f64),
    pub std: (f64, f64),
    pub samples: usize,
}

/// Top-down placement statistics of one object (height is ignored).
pub fn placement_stats(demos: &[Demonstration], object_id: &str) -> Result<PlacementSummary> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = demos
        .iter()
        .filter_map(|d| d.placements.as_ref())
        .flatten()
        .filter(|p| p.object_id.as_str() == object_id)
        .map(|p| (p.x, p.y))
        .unzip();
    let ((mx, sx), (my, sy)) = match (mean_std(&xs), mean_std(&ys)) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::NoPlacements(object_id.into())),
    };
    Ok(PlacementSummary { object_id: object_id.into(), mean: (mx, my), std: (sx, sy), samples: xs.len() })
}
