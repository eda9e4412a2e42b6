//! Packing-plan generation: modified beam search over a level table, a
//! chunked fixed-length variant, a uniform random baseline and an exhaustive
//! oracle for small scenes.
//!
//! The search only ever targets objects that are still unpacked. From a
//! beam's current state it looks for valid targets at level 1 first and only
//! moves to deeper levels when no beam in the open list can be extended at
//! the current one. After every successful round the open list is ranked and
//! pruned, and the next round starts again at level 1.
//!
//! Beams are ranked by `(expandable desc, length desc, log-prob desc,
//! sequence asc)` both when pruning and when picking the final plan, so a
//! longer plan always beats a more probable shorter one.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::ObjectId;
use crate::error::{Error, Result};
use crate::levels::{LevelEntry, LevelTable};
use crate::markov::StateId;

pub const DEFAULT_BEAM_WIDTH: usize = 5;

/// Chunk length of the Beam-3 generator.
pub const BEAM3_MAX_LEN: usize = 3;

/// Largest scene the exhaustive oracle accepts.
pub const ORACLE_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub beam_width: usize,
    pub max_len: Option<usize>,
    /// Only used by the random baseline.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { beam_width: DEFAULT_BEAM_WIDTH, max_len: None, seed: 0 }
    }
}

impl SearchConfig {
    pub fn beam_n() -> Self {
        Self::default()
    }

    pub fn beam_3() -> Self {
        Self { max_len: Some(BEAM3_MAX_LEN), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beam_width == 0 {
            return Err(Error::InvalidConfig("beam width must be at least 1".into()));
        }
        if self.max_len == Some(0) {
            return Err(Error::InvalidConfig("max length must be at least 1".into()));
        }
        Ok(())
    }
}

/// How one object of a plan was reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub object: ObjectId,
    pub level: usize,
    /// Intermediate states the hop passed through (never packed).
    pub path: Vec<ObjectId>,
    pub prob: f64,
}

/// One call of the underlying search inside a chunked plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub start: StateId,
    pub objects: Vec<ObjectId>,
}

/// One outer iteration of the search: levels are scanned from `first_level`
/// upward until some beam extends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub first_level: usize,
    pub extended_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PackingPlan {
    pub sequence: Vec<ObjectId>,
    /// Sum of log transition probabilities; absent for the random baseline.
    pub log_prob: Option<f64>,
    pub steps: Vec<Step>,
    pub chunks: Vec<Chunk>,
    pub rounds: Vec<Round>,
    /// Unpacked objects the chain could not reach, appended in id order.
    pub leftovers: Vec<ObjectId>,
}

impl PackingPlan {
    pub fn is_complete(&self) -> bool {
        self.leftovers.is_empty()
    }

    /// The packed sequence followed by the fallback leftovers.
    pub fn full_order(&self) -> Vec<ObjectId> {
        self.sequence.iter().chain(&self.leftovers).cloned().collect()
    }
}

#[derive(Debug, Clone)]
struct Beam {
    state: StateId,
    packed: Vec<ObjectId>,
    log_prob: f64,
    remaining: BTreeSet<ObjectId>,
    steps: Vec<Step>,
}

impl Beam {
    fn initial(start: StateId, unpacked: &BTreeSet<ObjectId>) -> Self {
        Beam { state: start, packed: Vec::new(), log_prob: 0.0, remaining: unpacked.clone(), steps: Vec::new() }
    }

    fn can_grow(&self, max_len: Option<usize>) -> bool {
        !self.remaining.is_empty() && max_len.map_or(true, |m| self.packed.len() < m)
    }

    fn valid<'a>(&'a self, table: &'a LevelTable, level: usize) -> impl Iterator<Item = &'a LevelEntry> + 'a {
        table.level(&self.state, level).iter().filter(|e| self.remaining.contains(&e.target))
    }

    fn expandable(&self, table: &LevelTable, max_len: Option<usize>) -> bool {
        self.can_grow(max_len)
            && (1..=table.depth(&self.state)).any(|l| self.valid(table, l).next().is_some())
    }

    fn extend(&self, entry: &LevelEntry, level: usize) -> Beam {
        let mut next = self.clone();
        next.state = StateId::Object(entry.target.clone());
        next.packed.push(entry.target.clone());
        next.log_prob += libm::log(entry.prob);
        next.remaining.remove(&entry.target);
        next.steps.push(Step { object: entry.target.clone(), level, path: entry.path.clone(), prob: entry.prob });
        next
    }
}

/// Ranking on `(length desc, log-prob desc, sequence asc)`.
fn rank_sequences(a_len: usize, a_lp: f64, a: &[ObjectId], b_len: usize, b_lp: f64, b: &[ObjectId]) -> Ordering {
    b_len.cmp(&a_len).then_with(|| b_lp.total_cmp(&a_lp)).then_with(|| a.cmp(b))
}

fn rank_beams(a: &(bool, Beam), b: &(bool, Beam)) -> Ordering {
    b.0.cmp(&a.0).then_with(|| {
        rank_sequences(a.1.packed.len(), a.1.log_prob, &a.1.packed, b.1.packed.len(), b.1.log_prob, &b.1.packed)
    })
}

fn check_unpacked(unpacked: &BTreeSet<ObjectId>) -> Result<()> {
    if unpacked.is_empty() {
        Err(Error::EmptyInput("no objects to pack"))
    } else {
        Ok(())
    }
}

/// Modified beam search from the empty box.
pub fn predict(table: &LevelTable, unpacked: &BTreeSet<ObjectId>, config: &SearchConfig) -> Result<PackingPlan> {
    predict_from(table, &StateId::Start, unpacked, config)
}

/// Modified beam search starting from an arbitrary state.
pub fn predict_from(
    table: &LevelTable,
    start: &StateId,
    unpacked: &BTreeSet<ObjectId>,
    config: &SearchConfig,
) -> Result<PackingPlan> {
    check_unpacked(unpacked)?;
    config.validate()?;
    let max_len = config.max_len;
    let mut open = alloc::vec![Beam::initial(start.clone(), unpacked)];
    let mut rounds = Vec::new();

    loop {
        let depth = open
            .iter()
            .filter(|b| b.can_grow(max_len))
            .map(|b| table.depth(&b.state))
            .max()
            .unwrap_or(0);
        let mut extended_at = None;
        for level in 1..=depth {
            let extends = |b: &Beam| b.can_grow(max_len) && b.valid(table, level).next().is_some();
            if !open.iter().any(extends) {
                continue;
            }
            let mut next = Vec::with_capacity(open.len() * 2);
            for beam in open.drain(..) {
                if extends(&beam) {
                    next.extend(beam.valid(table, level).map(|e| beam.extend(e, level)));
                } else {
                    next.push(beam);
                }
            }
            let mut ranked: Vec<(bool, Beam)> =
                next.into_iter().map(|b| (b.expandable(table, max_len), b)).collect();
            ranked.sort_by(rank_beams);
            ranked.truncate(config.beam_width);
            open = ranked.into_iter().map(|(_, b)| b).collect();
            extended_at = Some(level);
            break;
        }
        rounds.push(Round { first_level: 1, extended_at });
        if extended_at.is_none() {
            break;
        }
    }

    let mut ranked: Vec<(bool, Beam)> = open.into_iter().map(|b| (b.expandable(table, max_len), b)).collect();
    ranked.sort_by(rank_beams);
    let best = ranked.swap_remove(0).1;
    Ok(PackingPlan {
        chunks: alloc::vec![Chunk { start: start.clone(), objects: best.packed.clone() }],
        sequence: best.packed,
        log_prob: Some(best.log_prob),
        steps: best.steps,
        rounds,
        leftovers: best.remaining.into_iter().collect(),
    })
}

/// Covers the whole scene with repeated length-limited searches, each one
/// restarting from the last packed object.
pub fn predict_full(table: &LevelTable, unpacked: &BTreeSet<ObjectId>, config: &SearchConfig) -> Result<PackingPlan> {
    check_unpacked(unpacked)?;
    config.validate()?;
    if config.max_len.is_none() {
        return Err(Error::InvalidConfig("chunked search needs a max length".into()));
    }
    let mut plan = PackingPlan { log_prob: Some(0.0), ..PackingPlan::default() };
    let mut state = StateId::Start;
    let mut remaining = unpacked.clone();
    while !remaining.is_empty() {
        let chunk = predict_from(table, &state, &remaining, config)?;
        plan.rounds.extend(chunk.rounds);
        if chunk.sequence.is_empty() {
            break;
        }
        for id in &chunk.sequence {
            remaining.remove(id);
        }
        state = StateId::Object(chunk.sequence[chunk.sequence.len() - 1].clone());
        plan.log_prob = Some(plan.log_prob.unwrap_or(0.0) + chunk.log_prob.unwrap_or(0.0));
        plan.sequence.extend(chunk.sequence);
        plan.steps.extend(chunk.steps);
        plan.chunks.extend(chunk.chunks);
    }
    plan.leftovers = remaining.into_iter().collect();
    Ok(plan)
}

/// Uniformly random order of the scene, deterministic per seed.
pub fn random_sequence(unpacked: &BTreeSet<ObjectId>, seed: u64) -> Result<PackingPlan> {
    check_unpacked(unpacked)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sequence: Vec<ObjectId> = unpacked.iter().cloned().collect();
    sequence.shuffle(&mut rng);
    Ok(PackingPlan { sequence, ..PackingPlan::default() })
}

/// The three sequence generators compared in the evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Random,
    BeamN,
    /// Chunked search with the given chunk length.
    BeamLimited(usize),
}

pub fn plan(table: &LevelTable, unpacked: &BTreeSet<ObjectId>, strategy: Strategy, config: &SearchConfig) -> Result<PackingPlan> {
    match strategy {
        Strategy::Random => random_sequence(unpacked, config.seed),
        Strategy::BeamN => predict(table, unpacked, &SearchConfig { max_len: None, ..*config }),
        Strategy::BeamLimited(len) => predict_full(table, unpacked, &SearchConfig { max_len: Some(len), ..*config }),
    }
}

/// Exhaustive reference: scores every ordering of every subset of the scene
/// under the same hop rule as the search (each hop must use the shallowest
/// level that still reaches an unpacked object) and returns the best.
pub fn oracle_best_sequence(table: &LevelTable, unpacked: &BTreeSet<ObjectId>) -> Result<PackingPlan> {
    check_unpacked(unpacked)?;
    if unpacked.len() > ORACLE_LIMIT {
        return Err(Error::OracleGuard { size: unpacked.len(), limit: ORACLE_LIMIT });
    }
    let items: Vec<ObjectId> = unpacked.iter().cloned().collect();
    let mut best: Option<(Vec<ObjectId>, f64, Vec<Step>)> = None;
    let mut order = Vec::with_capacity(items.len());
    let mut used = alloc::vec![false; items.len()];
    enumerate_orderings(&items, &mut used, &mut order, &mut |ordering| {
        let (seq, lp, steps) = score_ordering(table, unpacked, ordering);
        let better = match &best {
            None => true,
            Some((b, blp, _)) => rank_sequences(seq.len(), lp, &seq, b.len(), *blp, b) == Ordering::Less,
        };
        if better {
            best = Some((seq, lp, steps));
        }
    });
    let (sequence, log_prob, steps) = best.unwrap_or_default();
    let leftovers = unpacked.iter().filter(|id| !sequence.contains(id)).cloned().collect();
    Ok(PackingPlan {
        chunks: alloc::vec![Chunk { start: StateId::Start, objects: sequence.clone() }],
        sequence,
        log_prob: Some(log_prob),
        steps,
        rounds: Vec::new(),
        leftovers,
    })
}

fn enumerate_orderings(
    items: &[ObjectId],
    used: &mut Vec<bool>,
    order: &mut Vec<ObjectId>,
    visit: &mut dyn FnMut(&[ObjectId]),
) {
    for i in 0..items.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        order.push(items[i].clone());
        visit(order);
        enumerate_orderings(items, used, order, visit);
        order.pop();
        used[i] = false;
    }
}

/// Walks the ordering hop by hop and truncates at the first hop that is not
/// a shallowest-level transition.
fn score_ordering(
    table: &LevelTable,
    scene: &BTreeSet<ObjectId>,
    ordering: &[ObjectId],
) -> (Vec<ObjectId>, f64, Vec<Step>) {
    let mut remaining = scene.clone();
    let mut state = StateId::Start;
    let mut lp = 0.0;
    let mut steps = Vec::new();
    for id in ordering {
        let shallowest = table
            .levels(&state)
            .iter()
            .position(|slice| slice.iter().any(|e| remaining.contains(&e.target)))
            .map(|i| i + 1);
        match (table.find(&state, id.as_str()), shallowest) {
            (Some((level, entry)), Some(min)) if level == min => {
                lp += libm::log(entry.prob);
                steps.push(Step { object: id.clone(), level, path: entry.path.clone(), prob: entry.prob });
                remaining.remove(id);
                state = StateId::Object(id.clone());
            }
            _ => break,
        }
    }
    (steps.iter().map(|s| s.object.clone()).collect(), lp, steps)
}

impl core::fmt::Display for Strategy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Strategy::Random => f.write_str("random"),
            Strategy::BeamN => f.write_str("beam-n"),
            Strategy::BeamLimited(n) => f.write_str(&format!("beam-{n}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levels::build_level_table;
    use crate::markov::MarkovChain;
    use alloc::vec;

    fn set(xs: &[&str]) -> BTreeSet<ObjectId> {
        xs.iter().map(|s| ObjectId::from(*s)).collect()
    }

    fn seq(xs: &[&str]) -> Vec<ObjectId> {
        xs.iter().map(|s| ObjectId::from(*s)).collect()
    }

    fn three_object_table() -> LevelTable {
        let chain = MarkovChain::from_edges([
            ("<start>", "A", 1.0),
            ("A", "B", 0.6),
            ("A", "C", 0.4),
            ("B", "C", 1.0),
            ("C", "B", 0.5),
            ("C", "D", 0.5),
        ])
        .unwrap();
        build_level_table(&chain, None)
    }

    #[test]
    fn forced_singleton() {
        let chain = MarkovChain::from_edges([("<start>", "A", 1.0)]).unwrap();
        let table = build_level_table(&chain, None);
        let plan = predict(&table, &set(&["A"]), &SearchConfig::default()).unwrap();
        assert_eq!(plan.sequence, seq(&["A"]));
        assert!(plan.is_complete());
        assert_eq!(plan.log_prob, Some(0.0));
    }

    #[test]
    fn three_object_best_plan() {
        let table = three_object_table();
        let plan = predict(&table, &set(&["A", "B", "C"]), &SearchConfig::default()).unwrap();
        assert_eq!(plan.sequence, seq(&["A", "B", "C"]));
        assert!((plan.log_prob.unwrap() - libm::log(1.0 * 0.6 * 1.0)).abs() < 1e-12);
        let oracle = oracle_best_sequence(&table, &set(&["A", "B", "C"])).unwrap();
        assert_eq!(oracle.sequence, plan.sequence);
        assert_eq!(oracle.log_prob, plan.log_prob);
    }

    #[test]
    fn empty_scene_rejected() {
        let table = three_object_table();
        assert!(predict(&table, &BTreeSet::new(), &SearchConfig::default()).is_err());
        assert!(random_sequence(&BTreeSet::new(), 1).is_err());
        assert!(oracle_best_sequence(&table, &BTreeSet::new()).is_err());
    }

    #[test]
    fn bad_config_rejected() {
        let table = three_object_table();
        let cfg = SearchConfig { beam_width: 0, ..SearchConfig::default() };
        assert!(predict(&table, &set(&["A"]), &cfg).is_err());
        let cfg = SearchConfig { max_len: Some(0), ..SearchConfig::default() };
        assert!(predict(&table, &set(&["A"]), &cfg).is_err());
        assert!(predict_full(&table, &set(&["A"]), &SearchConfig::default()).is_err());
    }

    #[test]
    fn multi_hop_through_unavailable_child() {
        // B is not in the scene, so C is reached through it at level 2.
        let chain = MarkovChain::from_edges([("<start>", "A", 1.0), ("A", "B", 1.0), ("B", "C", 1.0)]).unwrap();
        let table = build_level_table(&chain, None);
        let plan = predict(&table, &set(&["A", "C"]), &SearchConfig::default()).unwrap();
        assert_eq!(plan.sequence, seq(&["A", "C"]));
        assert_eq!(plan.steps[1].level, 2);
        assert_eq!(plan.steps[1].path, seq(&["B"]));
    }

    #[test]
    fn longer_plan_beats_more_probable_shorter() {
        // <start> -> X (0.9) dead-ends; <start> -> Y (0.1) -> Z continues.
        let chain =
            MarkovChain::from_edges([("<start>", "X", 0.9), ("<start>", "Y", 0.1), ("Y", "Z", 1.0)]).unwrap();
        let table = build_level_table(&chain, None);
        let plan = predict(&table, &set(&["X", "Y", "Z"]), &SearchConfig::default()).unwrap();
        assert_eq!(plan.sequence, seq(&["Y", "Z"]));
        assert_eq!(plan.leftovers, seq(&["X"]));
    }

    #[test]
    fn max_len_stops_expansion() {
        let chain = MarkovChain::from_edges([
            ("<start>", "A", 1.0),
            ("A", "B", 1.0),
            ("B", "C", 1.0),
            ("C", "D", 1.0),
            ("D", "E", 1.0),
        ])
        .unwrap();
        let table = build_level_table(&chain, None);
        let scene = set(&["A", "B", "C", "D", "E"]);
        let plan = predict(&table, &scene, &SearchConfig::beam_3()).unwrap();
        assert_eq!(plan.sequence, seq(&["A", "B", "C"]));
        let full = predict_full(&table, &scene, &SearchConfig::beam_3()).unwrap();
        assert_eq!(full.sequence, seq(&["A", "B", "C", "D", "E"]));
        assert_eq!(full.chunks.len(), 2);
        assert_eq!(full.chunks[0].objects, seq(&["A", "B", "C"]));
        assert_eq!(full.chunks[1].start, StateId::from("C"));
        assert_eq!(full.chunks[1].objects, seq(&["D", "E"]));
        assert!(full.is_complete());
    }

    #[test]
    fn single_chunk_matches_predict() {
        let table = three_object_table();
        let scene = set(&["A", "B", "C"]);
        let one = predict(&table, &scene, &SearchConfig::beam_3()).unwrap();
        let full = predict_full(&table, &scene, &SearchConfig::beam_3()).unwrap();
        assert_eq!(one.sequence, full.sequence);
        assert_eq!(one.log_prob, full.log_prob);
    }

    #[test]
    fn unreachable_objects_become_leftovers() {
        let chain = MarkovChain::from_edges([("<start>", "A", 1.0), ("A", "B", 1.0)]).unwrap();
        let table = build_level_table(&chain, None);
        let scene = set(&["A", "B", "Q", "P"]);
        let full = predict_full(&table, &scene, &SearchConfig::beam_3()).unwrap();
        assert_eq!(full.sequence, seq(&["A", "B"]));
        assert_eq!(full.leftovers, seq(&["P", "Q"]));
        assert_eq!(full.full_order().len(), 4);
        let plan = predict(&table, &scene, &SearchConfig::default()).unwrap();
        assert_eq!(plan.leftovers, seq(&["P", "Q"]));
    }

    #[test]
    fn uncovered_scene_is_all_leftovers() {
        let chain = MarkovChain::from_edges([("<start>", "A", 1.0)]).unwrap();
        let table = build_level_table(&chain, None);
        let plan = predict(&table, &set(&["Z"]), &SearchConfig::default()).unwrap();
        assert!(plan.sequence.is_empty());
        assert_eq!(plan.leftovers, seq(&["Z"]));
    }

    #[test]
    fn rounds_restart_at_level_one() {
        let chain = MarkovChain::from_edges([("<start>", "A", 1.0), ("A", "B", 1.0), ("B", "C", 1.0)]).unwrap();
        let table = build_level_table(&chain, None);
        let plan = predict(&table, &set(&["A", "C"]), &SearchConfig::default()).unwrap();
        assert!(plan.rounds.iter().all(|r| r.first_level == 1));
        let levels: Vec<_> = plan.rounds.iter().map(|r| r.extended_at).collect();
        assert_eq!(levels, vec![Some(1), Some(2), None]);
    }

    #[test]
    fn random_is_a_deterministic_permutation() {
        let scene = set(&["A", "B", "C", "D"]);
        let a = random_sequence(&scene, 7).unwrap();
        let b = random_sequence(&scene, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sequence.iter().cloned().collect::<BTreeSet<_>>(), scene);
        assert_eq!(a.log_prob, None);
        assert_eq!(random_sequence(&set(&["A"]), 3).unwrap().sequence, seq(&["A"]));
    }

    #[test]
    fn oracle_guard() {
        let table = three_object_table();
        let big: BTreeSet<ObjectId> = (0..9).map(|i| ObjectId::new(format!("o{i}")).unwrap()).collect();
        assert!(matches!(oracle_best_sequence(&table, &big), Err(Error::OracleGuard { .. })));
        assert_eq!(oracle_best_sequence(&table, &set(&["A"])).unwrap().sequence, seq(&["A"]));
    }
}
