//! Shared generators and brute-force references for integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use packseq_core::levels::LevelTable;
use packseq_core::{BBox, ContainerSpec, MarkovChain, ObjectCatalog, ObjectId, ObjectSpec, StateId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn object(i: usize) -> ObjectId {
    ObjectId::new(format!("o{i}")).unwrap()
}

/// Random chain over `<start>` plus `objects` objects. Each possible edge is
/// kept with probability `density`; weights are uniform in `[0.05, 1)`.
pub fn random_chain(rng: &mut impl Rng, objects: usize, density: f64) -> MarkovChain {
    let mut weights = Vec::new();
    let sources: Vec<StateId> =
        std::iter::once(StateId::Start).chain((0..objects).map(|i| StateId::Object(object(i)))).collect();
    for from in &sources {
        let mut any = false;
        for j in 0..objects {
            if from.object() == Some(&object(j)) {
                continue;
            }
            if rng.gen_bool(density) {
                weights.push((from.clone(), object(j), rng.gen_range(0.05..1.0)));
                any = true;
            }
        }
        if from.is_start() && !any {
            weights.push((StateId::Start, object(rng.gen_range(0..objects)), 1.0));
        }
    }
    MarkovChain::from_weights(weights).unwrap().with_states((0..objects).map(|i| StateId::Object(object(i))))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Level table by exhaustive simple-path enumeration:
/// level = fewest hops, prob = best product among paths with that many hops
/// (multiplied left to right), path = lexicographically smallest among those.
pub fn brute_force_levels(chain: &MarkovChain, source: &StateId) -> BTreeMap<ObjectId, (usize, f64, Vec<ObjectId>)> {
    let mut best: BTreeMap<ObjectId, (usize, f64, Vec<ObjectId>)> = BTreeMap::new();
    let mut visited = BTreeSet::new();
    visited.insert(source.clone());
    dfs(chain, source, 1.0, &mut Vec::new(), &mut visited, &mut best);
    best
}

fn dfs(
    chain: &MarkovChain,
    at: &StateId,
    prob: f64,
    path: &mut Vec<ObjectId>,
    visited: &mut BTreeSet<StateId>,
    best: &mut BTreeMap<ObjectId, (usize, f64, Vec<ObjectId>)>,
) {
    for e in chain.successors(at) {
        let next = StateId::Object(e.target.clone());
        if visited.contains(&next) {
            continue;
        }
        let p = prob * e.prob;
        let len = path.len() + 1;
        let replace = match best.get(&e.target) {
            None => true,
            Some((l, bp, bpath)) => len < *l || (len == *l && (p > *bp || (p == *bp && path[..] < bpath[..]))),
        };
        if replace {
            best.insert(e.target.clone(), (len, p, path.clone()));
        }
        visited.insert(next.clone());
        path.push(e.target.clone());
        dfs(chain, &next, p, path, visited, best);
        path.pop();
        visited.remove(&next);
    }
}

/// Flattens a level table row into the brute-force shape.
pub fn table_row(table: &LevelTable, source: &StateId) -> BTreeMap<ObjectId, (usize, f64, Vec<ObjectId>)> {
    table
        .levels(source)
        .iter()
        .enumerate()
        .flat_map(|(i, slice)| slice.iter().map(move |e| (e.target.clone(), (i + 1, e.prob, e.path.clone()))))
        .collect()
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Equal cubes that together fill 80% of a unit container. With at most seven
/// objects, dropping any one falls below 70%, so every sampled scene is the
/// full set.
pub fn full_scene_setup(ids: &[&str]) -> (ObjectCatalog, ContainerSpec) {
    let side = (0.8 / ids.len() as f64).cbrt();
    let catalog = ObjectCatalog::new(
        ids.iter()
            .map(|id| ObjectSpec { id: (*id).into(), name: (*id).into(), bbox: BBox::new(side, side, side) })
            .collect(),
    )
    .unwrap();
    (catalog, ContainerSpec::new(1.0, 1.0, 1.0).unwrap())
}

/// Ground-truth chains whose random walk over the full scene never needs
/// renormalization or a uniform fallback, so the learned conditionals are
/// unbiased estimates of the true ones.
pub fn walk_consistent_chains() -> Vec<(MarkovChain, Vec<&'static str>)> {
    let rotation = MarkovChain::from_edges([
        ("<start>", "A", 0.4),
        ("<start>", "B", 0.25),
        ("<start>", "C", 0.2),
        ("<start>", "D", 0.1),
        ("<start>", "E", 0.05),
        ("A", "B", 1.0),
        ("B", "C", 1.0),
        ("C", "D", 1.0),
        ("D", "E", 1.0),
        ("E", "A", 1.0),
    ])
    .unwrap();
    let fork = MarkovChain::from_edges([
        ("<start>", "X", 1.0),
        ("X", "Y", 0.7),
        ("X", "Z", 0.3),
        ("Y", "Z", 1.0),
        ("Z", "Y", 1.0),
    ])
    .unwrap();
    vec![(rotation, vec!["A", "B", "C", "D", "E"]), (fork, vec!["X", "Y", "Z"])]
}

/// Largest absolute difference between ground-truth and learned conditionals,
/// counting edges missing on either side as probability 0.
pub fn max_conditional_error(truth: &MarkovChain, learned: &MarkovChain) -> f64 {
    let mut keys: BTreeSet<(StateId, ObjectId)> = BTreeSet::new();
    keys.extend(truth.edges().map(|(f, t, _)| (f.clone(), t.clone())));
    keys.extend(learned.edges().map(|(f, t, _)| (f.clone(), t.clone())));
    keys.iter()
        .map(|(f, t)| (truth.prob(f, t.as_str()).unwrap_or(0.0) - learned.prob(f, t.as_str()).unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}
