//! Level table: every target reachable from a state, grouped by hop count.
//!
//! Level `k` of a state holds the targets whose shortest path from that state
//! takes exactly `k` transitions. Each entry carries the best product of edge
//! probabilities over the `k`-hop paths and the intermediates of the path that
//! attains it. Equal products resolve to the lexicographically smaller path.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::catalog::ObjectId;
use crate::markov::{MarkovChain, StateId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub target: ObjectId,
    pub prob: f64,
    /// States strictly between the source and the target.
    pub path: Vec<ObjectId>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LevelTable {
    /// `levels[source][k - 1]` holds the level-`k` entries sorted by target.
    levels: BTreeMap<StateId, Vec<Vec<LevelEntry>>>,
}

impl LevelTable {
    pub fn levels(&self, source: &StateId) -> &[Vec<LevelEntry>] {
        self.levels.get(source).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Deepest level stored for `source`.
    pub fn depth(&self, source: &StateId) -> usize {
        self.levels(source).len()
    }

    pub fn level(&self, source: &StateId, level: usize) -> &[LevelEntry] {
        match level.checked_sub(1) {
            Some(i) => self.levels(source).get(i).map(Vec::as_slice).unwrap_or(&[]),
            None => &[],
        }
    }

    pub fn sources(&self) -> impl Iterator<Item = &StateId> {
        self.levels.keys()
    }

    /// The level at which `target` sits for `source`, with its entry.
    pub fn find(&self, source: &StateId, target: &str) -> Option<(usize, &LevelEntry)> {
        self.levels(source).iter().enumerate().find_map(|(i, slice)| {
            slice
                .binary_search_by(|e| e.target.as_str().cmp(target))
                .ok()
                .map(|j| (i + 1, &slice[j]))
        })
    }

    pub fn entry_count(&self) -> usize {
        self.levels.values().flatten().map(Vec::len).sum()
    }
}

/// Builds the table by layered dynamic programming over shortest paths.
///
/// `max_level` defaults to `|S| - 1`, which already covers every simple path.
pub fn build_level_table(chain: &MarkovChain, max_level: Option<usize>) -> LevelTable {
    let max_level = max_level.unwrap_or_else(|| chain.states().len().saturating_sub(1));
    let levels = chain
        .states()
        .iter()
        .map(|source| (source.clone(), levels_from(chain, source, max_level)))
        .collect();
    LevelTable { levels }
}

fn levels_from(chain: &MarkovChain, source: &StateId, max_level: usize) -> Vec<Vec<LevelEntry>> {
    let mut visited: BTreeSet<StateId> = BTreeSet::new();
    visited.insert(source.clone());
    // (state, probability of the best path to it, intermediates of that path)
    let mut frontier: Vec<(StateId, f64, Vec<ObjectId>)> = alloc::vec![(source.clone(), 1.0, Vec::new())];
    let mut out = Vec::new();

    while out.len() < max_level && !frontier.is_empty() {
        let mut layer: BTreeMap<ObjectId, (f64, Vec<ObjectId>)> = BTreeMap::new();
        for (state, prob, path) in &frontier {
            for edge in chain.successors(state) {
                let next = StateId::Object(edge.target.clone());
                if visited.contains(&next) {
                    continue;
                }
                let cand = prob * edge.prob;
                let better = match layer.get(&edge.target) {
                    None => true,
                    Some((best, best_path)) => {
                        cand > *best || (cand == *best && extended(path, state, source) < *best_path)
                    }
                };
                if better {
                    layer.insert(edge.target.clone(), (cand, extended(path, state, source)));
                }
            }
        }
        if layer.is_empty() {
            break;
        }
        visited.extend(layer.keys().cloned().map(StateId::Object));
        frontier = layer
            .iter()
            .map(|(t, (p, path))| (StateId::Object(t.clone()), *p, path.clone()))
            .collect();
        out.push(
            layer
                .into_iter()
                .map(|(target, (prob, path))| LevelEntry { target, prob, path })
                .collect(),
        );
    }
    out
}

fn extended(path: &[ObjectId], via: &StateId, source: &StateId) -> Vec<ObjectId> {
    let mut p = path.to_vec();
    if via != source {
        p.extend(via.object().cloned());
    }
    p
}

/// Entries of one level whose target is not excluded. Intermediates may be
/// excluded objects: a hop may pass through something already packed or
/// absent from the scene.
pub fn transitions_at<'a>(
    table: &'a LevelTable,
    state: &StateId,
    level: usize,
    exclude: &BTreeSet<ObjectId>,
) -> Vec<&'a LevelEntry> {
    table.level(state, level).iter().filter(|e| !exclude.contains(&e.target)).collect()
}
