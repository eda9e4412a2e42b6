//! Scene sampling and synthetic demonstrations.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{ContainerSpec, Demonstration, ObjectCatalog, ObjectId, PlacementRecord};
use crate::error::{Error, Result};
use crate::markov::{MarkovChain, StateId};

/// Lower and upper fill ratios of a sampled scene.
pub const FILL_BAND: (f64, f64) = (0.70, 0.90);

pub const MAX_SCENE_ATTEMPTS: usize = 10_000;

/// Draws a subset of the catalog whose summed bounding-box volume fills
/// 70-90% of the container. Subsets are drawn uniformly and rejected until
/// one falls inside the band.
pub fn sample_scene(catalog: &ObjectCatalog, container: &ContainerSpec, seed: u64) -> Result<BTreeSet<ObjectId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_scene_with(catalog, container, &mut rng)
}

fn sample_scene_with(catalog: &ObjectCatalog, container: &ContainerSpec, rng: &mut impl Rng) -> Result<BTreeSet<ObjectId>> {
    if catalog.is_empty() {
        return Err(Error::InvalidCatalog("empty catalog".into()));
    }
    let capacity = container.volume();
    let smallest = catalog.objects().iter().map(|o| o.volume()).fold(f64::INFINITY, f64::min);
    if !(capacity > smallest) {
        return Err(Error::InvalidContainer(format!(
            "container volume {capacity} does not exceed the smallest object volume {smallest}"
        )));
    }
    let (lo, hi) = (FILL_BAND.0 * capacity, FILL_BAND.1 * capacity);
    for _ in 0..MAX_SCENE_ATTEMPTS {
        let mut volume = 0.0;
        let mut scene = BTreeSet::new();
        for obj in catalog.objects() {
            if rng.gen::<bool>() {
                volume += obj.volume();
                scene.insert(obj.id.clone());
            }
        }
        if volume >= lo && volume <= hi {
            return Ok(scene);
        }
    }
    Err(Error::SamplingFailure { attempts: MAX_SCENE_ATTEMPTS })
}

/// Fill ratio of a scene inside the container.
pub fn fill_ratio(catalog: &ObjectCatalog, container: &ContainerSpec, scene: &BTreeSet<ObjectId>) -> f64 {
    catalog.total_volume(scene) / container.volume()
}

/// A step of a synthetic walk where no chain edge led to an unpacked object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FallbackStep {
    pub demo: usize,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Synthesis {
    pub demos: Vec<Demonstration>,
    pub fallbacks: Vec<FallbackStep>,
}

/// Seconds a synthetic scene takes: a fixed overhead plus a per-object cost
/// and uniform jitter.
const SYNTH_BASE_S: f64 = 20.0;
const SYNTH_PER_OBJECT_S: f64 = 4.0;
const SYNTH_JITTER_S: f64 = 10.0;

/// Generates `n` demonstrations by sampling a scene and walking the ground
/// truth chain over it. At each step the outgoing probabilities are
/// renormalized over the objects still unpacked; when none remain reachable
/// the next object is drawn uniformly and the step is flagged.
pub fn synth_demos(
    ground_truth: &MarkovChain,
    catalog: &ObjectCatalog,
    container: &ContainerSpec,
    n: usize,
    seed: u64,
) -> Result<Synthesis> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Synthesis::default();
    for demo_idx in 0..n {
        let scene = sample_scene_with(catalog, container, &mut rng)?;
        let (sequence, flagged) = walk(ground_truth, &scene, &mut rng);
        out.fallbacks.extend(flagged.into_iter().map(|step| FallbackStep { demo: demo_idx, step }));
        let jitter = rng.gen_range(-SYNTH_JITTER_S..=SYNTH_JITTER_S);
        let duration_s = (SYNTH_BASE_S + SYNTH_PER_OBJECT_S * sequence.len() as f64 + jitter).max(0.0);
        let placements = sequence
            .iter()
            .map(|id| PlacementRecord {
                object_id: id.clone(),
                x: rng.gen_range(0.0..=1.0),
                y: rng.gen_range(0.0..=1.0),
                z: 0.0,
                rx: 0.0,
                ry: 0.0,
                rz: rng.gen_range(0.0..360.0),
            })
            .collect();
        out.demos.push(Demonstration {
            scene_id: format!("synth-{demo_idx:05}"),
            participant_id: format!("synth-p{:02}", demo_idx % 43),
            duration_s,
            sequence,
            placements: Some(placements),
        });
    }
    Ok(out)
}

fn walk(chain: &MarkovChain, scene: &BTreeSet<ObjectId>, rng: &mut impl Rng) -> (Vec<ObjectId>, Vec<usize>) {
    let mut remaining = scene.clone();
    let mut state = StateId::Start;
    let mut sequence = Vec::with_capacity(scene.len());
    let mut flagged = Vec::new();
    while !remaining.is_empty() {
        let options: Vec<_> = chain.successors(&state).iter().filter(|e| remaining.contains(&e.target)).collect();
        let next = if options.is_empty() {
            flagged.push(sequence.len());
            remaining.iter().choose(rng).cloned().expect("non-empty")
        } else {
            let total: f64 = options.iter().map(|e| e.prob).sum();
            let mut u = rng.gen::<f64>() * total;
            let mut pick = &options[options.len() - 1].target;
            for e in &options {
                if u < e.prob {
                    pick = &e.target;
                    break;
                }
                u -= e.prob;
            }
            pick.clone()
        };
        remaining.remove(&next);
        state = StateId::Object(next.clone());
        sequence.push(next);
    }
    (sequence, flagged)
}
