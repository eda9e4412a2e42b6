//! Pair mining and first-order Markov chain construction.
//!
//! Each demonstration contributes its ordered adjacent pairs, including the
//! pair from the empty-box state to the first packed object. A pair's support
//! is the fraction of demonstrations in which it occurs at least once. Pairs
//! below the support threshold are dropped and the survivors are normalized
//! per source state into transition probabilities.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::catalog::{Demonstration, ObjectCatalog, ObjectId, START_TOKEN};
use crate::error::{Error, Result};

/// Default minimum support for a pair to become a chain edge.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 0.032;

/// Tolerance on the per-state probability sum.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// The identity of the last packed object, or `Start` for an empty box.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateId {
    Start,
    Object(ObjectId),
}

impl StateId {
    pub fn object(&self) -> Option<&ObjectId> {
        match self {
            StateId::Start => None,
            StateId::Object(id) => Some(id),
        }
    }

    pub fn is_start(&self) -> bool {
        matches!(self, StateId::Start)
    }
}

impl From<ObjectId> for StateId {
    fn from(id: ObjectId) -> Self {
        StateId::Object(id)
    }
}

impl From<&str> for StateId {
    fn from(s: &str) -> Self {
        s.parse().expect("valid state id")
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateId::Start => f.write_str(START_TOKEN),
            StateId::Object(id) => write!(f, "{id}"),
        }
    }
}

impl FromStr for StateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == START_TOKEN {
            Ok(StateId::Start)
        } else {
            ObjectId::new(s).map(StateId::Object)
        }
    }
}

impl Serialize for StateId {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            StateId::Start => serializer.serialize_str(START_TOKEN),
            StateId::Object(id) => serializer.serialize_str(id.as_str()),
        }
    }
}

impl<'de> Deserialize<'de> for StateId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Support statistics of one ordered adjacent pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSupport {
    pub from: StateId,
    pub to: ObjectId,
    /// Fraction of demonstrations containing the pair at least once.
    pub support: f64,
    /// Number of occurrences over all demonstrations.
    pub count: usize,
}

/// What the surviving pairs are normalized from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeWeighting {
    #[default]
    Support,
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiningConfig {
    pub support_threshold: f64,
    pub weighting: EdgeWeighting,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self { support_threshold: DEFAULT_SUPPORT_THRESHOLD, weighting: EdgeWeighting::Support }
    }
}

impl MiningConfig {
    pub fn with_threshold(support_threshold: f64) -> Self {
        Self { support_threshold, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if (0.0..=1.0).contains(&self.support_threshold) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "support threshold {} outside [0, 1]",
                self.support_threshold
            )))
        }
    }
}

/// Emits every distinct ordered adjacent pair with its support and count,
/// sorted by `(from, to)`.
pub fn extract_pairs(demos: &[Demonstration]) -> Result<Vec<PairSupport>> {
    if demos.is_empty() {
        return Err(Error::EmptyInput("no demonstrations to mine"));
    }
    let mut demo_hits: BTreeMap<(StateId, ObjectId), usize> = BTreeMap::new();
    let mut occurrences: BTreeMap<(StateId, ObjectId), usize> = BTreeMap::new();
    for demo in demos {
        let mut seen = BTreeSet::new();
        let mut prev = StateId::Start;
        for id in &demo.sequence {
            let key = (prev, id.clone());
            *occurrences.entry(key.clone()).or_insert(0) += 1;
            if seen.insert(key.clone()) {
                *demo_hits.entry(key).or_insert(0) += 1;
            }
            prev = StateId::Object(id.clone());
        }
    }
    let total = demos.len() as f64;
    Ok(demo_hits
        .into_iter()
        .map(|((from, to), hits)| {
            let count = occurrences[&(from.clone(), to.clone())];
            PairSupport { from, to, support: hits as f64 / total, count }
        })
        .collect())
}

/// Keeps exactly the pairs whose support reaches the threshold.
pub fn mine(pairs: &[PairSupport], config: &MiningConfig) -> Vec<PairSupport> {
    pairs.iter().filter(|p| p.support >= config.support_threshold).cloned().collect()
}

/// One outgoing transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub target: ObjectId,
    pub prob: f64,
}

/// A normalized first-order chain over `{<start>} ∪ objects`.
///
/// Outgoing edges are kept sorted by target id. States without outgoing
/// edges are leaves.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MarkovChain {
    states: BTreeSet<StateId>,
    edges: BTreeMap<StateId, Vec<Edge>>,
}

impl MarkovChain {
    /// Builds a chain from explicit probabilities. Every state that has edges
    /// must sum to one.
    pub fn from_edges<I, F, T>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (F, T, f64)>,
        F: Into<StateId>,
        T: Into<ObjectId>,
    {
        let mut chain = Self::from_raw(edges.into_iter().map(|(f, t, p)| (f.into(), t.into(), p)))?;
        chain.states.insert(StateId::Start);
        chain.check_normalized()?;
        Ok(chain)
    }

    /// Builds a chain from non-negative weights, normalizing per source state.
    pub fn from_weights<I, F, T>(weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (F, T, f64)>,
        F: Into<StateId>,
        T: Into<ObjectId>,
    {
        let mut chain =
            Self::from_raw(weights.into_iter().map(|(f, t, w)| (f.into(), t.into(), w)))?;
        for out in chain.edges.values_mut() {
            let total: f64 = out.iter().map(|e| e.prob).sum();
            for e in out.iter_mut() {
                e.prob /= total;
            }
        }
        chain.states.insert(StateId::Start);
        Ok(chain)
    }

    /// Adds isolated states (e.g. catalog objects that never occur).
    pub fn with_states(mut self, states: impl IntoIterator<Item = StateId>) -> Self {
        self.states.extend(states);
        self
    }

    fn from_raw(edges: impl Iterator<Item = (StateId, ObjectId, f64)>) -> Result<Self> {
        let mut chain = MarkovChain::default();
        for (from, to, p) in edges {
            if from.object() == Some(&to) {
                return Err(Error::InvalidChain(format!("self-loop on `{to}`")));
            }
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::InvalidChain(format!("edge {from} -> {to} has weight {p}")));
            }
            chain.states.insert(from.clone());
            chain.states.insert(StateId::Object(to.clone()));
            let out = chain.edges.entry(from.clone()).or_default();
            match out.binary_search_by(|e| e.target.cmp(&to)) {
                Ok(_) => {
                    return Err(Error::InvalidChain(format!("duplicate edge {from} -> {to}")))
                }
                Err(pos) => out.insert(pos, Edge { target: to, prob: p }),
            }
        }
        Ok(chain)
    }

    fn check_normalized(&self) -> Result<()> {
        for (from, out) in &self.edges {
            let total: f64 = out.iter().map(|e| e.prob).sum();
            if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::InvalidChain(format!(
                    "outgoing probabilities of {from} sum to {total}"
                )));
            }
        }
        Ok(())
    }

    pub fn states(&self) -> &BTreeSet<StateId> {
        &self.states
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObjectId> {
        self.states.iter().filter_map(StateId::object)
    }

    pub fn successors(&self, state: &StateId) -> &[Edge] {
        self.edges.get(state).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn prob(&self, from: &StateId, to: &str) -> Option<f64> {
        let out = self.successors(from);
        out.binary_search_by(|e| e.target.as_str().cmp(to)).ok().map(|i| out[i].prob)
    }

    /// All edges as `(from, to, prob)`, sorted by `(from, to)`.
    pub fn edges(&self) -> impl Iterator<Item = (&StateId, &ObjectId, f64)> {
        self.edges.iter().flat_map(|(from, out)| out.iter().map(move |e| (from, &e.target, e.prob)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// States with no outgoing edge.
    pub fn leaf_states(&self) -> Vec<StateId> {
        self.states.iter().filter(|s| self.successors(s).is_empty()).cloned().collect()
    }

    /// Objects reachable from `<start>`.
    pub fn reachable_objects(&self) -> BTreeSet<ObjectId> {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![StateId::Start];
        while let Some(state) = stack.pop() {
            for e in self.successors(&state) {
                if seen.insert(e.target.clone()) {
                    stack.push(StateId::Object(e.target.clone()));
                }
            }
        }
        seen
    }
}

/// Normalizes the surviving pairs into a chain.
pub fn build_chain(pairs: &[PairSupport], weighting: EdgeWeighting) -> Result<MarkovChain> {
    if pairs.is_empty() {
        return Err(Error::DegenerateModel("no pair survived the support threshold".into()));
    }
    MarkovChain::from_weights(pairs.iter().map(|p| {
        let w = match weighting {
            EdgeWeighting::Support => p.support,
            EdgeWeighting::Count => p.count as f64,
        };
        (p.from.clone(), p.to.clone(), w)
    }))
}

/// Mining and normalization in one step.
pub fn train(demos: &[Demonstration], config: &MiningConfig) -> Result<MarkovChain> {
    let pairs = extract_pairs(demos)?;
    build_chain(&mine(&pairs, config), config.weighting)
}

/// Informational coverage report for a chain.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChainReport {
    /// States with no outgoing transition.
    pub leaf_states: Vec<StateId>,
    /// Catalog objects that are not states of the chain at all.
    pub absent_objects: Vec<ObjectId>,
    /// Chain objects that cannot be reached from `<start>`.
    pub unreachable_objects: Vec<ObjectId>,
}

impl ChainReport {
    pub fn is_clean(&self) -> bool {
        self.leaf_states.is_empty()
            && self.absent_objects.is_empty()
            && self.unreachable_objects.is_empty()
    }
}

pub fn validate_chain(chain: &MarkovChain, catalog: &ObjectCatalog) -> ChainReport {
    let reachable = chain.reachable_objects();
    ChainReport {
        leaf_states: chain.leaf_states(),
        absent_objects: catalog
            .ids()
            .filter(|id| !chain.states.contains(&StateId::Object((*id).clone())))
            .cloned()
            .collect(),
        unreachable_objects: chain.objects().filter(|id| !reachable.contains(*id)).cloned().collect(),
    }
}

impl fmt::Display for ChainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |items: Vec<String>| if items.is_empty() { "-".into() } else { items.join(", ") };
        writeln!(f, "leaf states:         {}", join(self.leaf_states.iter().map(ToString::to_string).collect()))?;
        writeln!(f, "absent objects:      {}", join(self.absent_objects.iter().map(ToString::to_string).collect()))?;
        write!(f, "unreachable objects: {}", join(self.unreachable_objects.iter().map(ToString::to_string).collect()))
    }
}
