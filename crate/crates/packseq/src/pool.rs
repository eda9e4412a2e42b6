//! Trial pools for the evaluation service.
//!
//! A pool holds pre-generated trials: for sampled scenes of a dataset, the
//! recorded human order or an order produced by one of the generators. Trial
//! ids are assigned after shuffling so that they carry no hint of the source.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use packseq_core::evaluation::SourceKind;
use packseq_core::levels::LevelTable;
use packseq_core::planner::{plan, SearchConfig, Strategy, BEAM3_MAX_LEN};
use packseq_core::{Demonstration, ObjectCatalog, ObjectId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{io, Error, Result};
use crate::formats::CatalogRecord;

pub const POOL_FORMAT: &str = "packseq-pool/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub trial_id: String,
    /// Objects of the scene in id order.
    pub scene: Vec<ObjectId>,
    pub sequence: Vec<ObjectId>,
    pub source: SourceKind,
    /// Unix seconds.
    pub created_at: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pool {
    pub format: String,
    pub catalog: Vec<CatalogRecord>,
    pub trials: Vec<Trial>,
}

impl Pool {
    pub fn new(catalog: &ObjectCatalog, trials: Vec<Trial>) -> Result<Self> {
        let pool = Pool {
            format: POOL_FORMAT.into(),
            catalog: catalog.objects().iter().map(CatalogRecord::from).collect(),
            trials,
        };
        pool.validate()?;
        Ok(pool)
    }

    /// Checks unique trial ids, known objects, and that each sequence orders
    /// exactly its scene.
    pub fn validate(&self) -> Result<()> {
        if self.format != POOL_FORMAT {
            return Err(Error::Version { what: "pool", found: self.format.clone() });
        }
        let known: BTreeSet<&ObjectId> = self.catalog.iter().map(|r| &r.id).collect();
        let mut ids = BTreeSet::new();
        for t in &self.trials {
            if !ids.insert(t.trial_id.as_str()) {
                return Err(Error::Pool(format!("duplicate trial id `{}`", t.trial_id)));
            }
            let scene: BTreeSet<&ObjectId> = t.scene.iter().collect();
            let seq: BTreeSet<&ObjectId> = t.sequence.iter().collect();
            if scene.len() != t.scene.len() || seq != scene || seq.len() != t.sequence.len() {
                return Err(Error::Pool(format!("trial `{}` does not order exactly its scene", t.trial_id)));
            }
            if let Some(bad) = t.scene.iter().find(|id| !known.contains(id)) {
                return Err(Error::Pool(format!("trial `{}` uses unknown object `{bad}`", t.trial_id)));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io(path))?;
        let pool: Pool = serde_json::from_str(&text).map_err(|source| Error::Document { what: "pool", source })?;
        pool.validate()?;
        Ok(pool)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("pool serializes");
        fs::write(path, text + "\n").map_err(io(path))
    }

    pub fn count(&self, source: SourceKind) -> usize {
        self.trials.iter().filter(|t| t.source == source).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolConfig {
    /// Trials generated for each of the four sources.
    pub per_source: usize,
    pub beam_width: usize,
    pub seed: u64,
    pub created_at: u64,
}

/// Builds `per_source` trials of every source from the scenes of `demos`.
///
/// Scenes are visited in a seeded random order, each source starting at a
/// different offset so that sources tend to use different scenes. Generated
/// plans with leftovers are skipped.
pub fn build_pool(demos: &[Demonstration], catalog: &ObjectCatalog, table: &LevelTable, config: &PoolConfig) -> Result<Pool> {
    if demos.is_empty() {
        return Err(Error::Pool("no demonstrations to build trials from".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..demos.len()).collect();
    order.shuffle(&mut rng);

    let mut trials = Vec::new();
    for (k, source) in SourceKind::ALL.into_iter().enumerate() {
        let mut made = 0;
        for i in 0..order.len() {
            if made == config.per_source {
                break;
            }
            let demo = &demos[order[(i + k * config.per_source) % order.len()]];
            let scene = demo.object_set();
            let search = SearchConfig { beam_width: config.beam_width, max_len: None, seed: rng.gen() };
            let sequence = match source {
                SourceKind::Real => demo.sequence.clone(),
                SourceKind::Random => plan(table, &scene, Strategy::Random, &search)?.sequence,
                SourceKind::BeamN | SourceKind::Beam3 => {
                    let strategy =
                        if source == SourceKind::BeamN { Strategy::BeamN } else { Strategy::BeamLimited(BEAM3_MAX_LEN) };
                    let p = plan(table, &scene, strategy, &search)?;
                    if !p.is_complete() {
                        continue;
                    }
                    p.sequence
                }
            };
            trials.push(Trial {
                trial_id: String::new(),
                scene: scene.into_iter().collect(),
                sequence,
                source,
                created_at: config.created_at,
            });
            made += 1;
        }
        if made < config.per_source {
            return Err(Error::Pool(format!(
                "only {made} of {} {source} trials could be built from {} scenes",
                config.per_source,
                demos.len()
            )));
        }
    }
    trials.shuffle(&mut rng);
    for (i, t) in trials.iter_mut().enumerate() {
        t.trial_id = format!("t{:04}", i + 1);
    }
    Pool::new(catalog, trials)
}
