use std::collections::BTreeSet;

use packseq::pool::{build_pool, Pool, PoolConfig};
use packseq_core::evaluation::SourceKind;
use packseq_core::fixtures::{grocery_catalog, grocery_container};
use packseq_core::levels::build_level_table;
use packseq_core::markov::train;
use packseq_core::scene::synth_demos;
use packseq_core::{MarkovChain, MiningConfig, ObjectId, StateId};

fn setup() -> (Vec<packseq_core::Demonstration>, packseq_core::levels::LevelTable) {
    let catalog = grocery_catalog();
    let ids: Vec<ObjectId> = catalog.ids().cloned().collect();
    // a dense ground truth so the learned chain reaches every object
    let mut weights = Vec::new();
    for (i, from) in std::iter::once(StateId::Start).chain(ids.iter().cloned().map(StateId::Object)).enumerate() {
        for (j, to) in ids.iter().enumerate() {
            if from.object() != Some(to) {
                weights.push((from.clone(), to.clone(), 1.0 + ((i * 31 + j * 17) % 7) as f64));
            }
        }
    }
    let truth = MarkovChain::from_weights(weights).unwrap();
    let demos = synth_demos(&truth, &catalog, &grocery_container(), 200, 4).unwrap().demos;
    let chain = train(&demos, &MiningConfig::default()).unwrap();
    (demos, build_level_table(&chain, None))
}

fn config(seed: u64) -> PoolConfig {
    PoolConfig { per_source: 6, beam_width: 5, seed, created_at: 1_700_000_000 }
}

#[test]
fn balanced_complete_and_opaque() {
    let (demos, table) = setup();
    let pool = build_pool(&demos, &grocery_catalog(), &table, &config(1)).unwrap();
    for k in SourceKind::ALL {
        assert_eq!(pool.count(k), 6);
    }
    let ids: BTreeSet<&str> = pool.trials.iter().map(|t| t.trial_id.as_str()).collect();
    assert_eq!(ids.len(), 24);
    for t in &pool.trials {
        for name in ["random", "real", "beam"] {
            assert!(!t.trial_id.contains(name));
        }
        let scene: BTreeSet<_> = t.scene.iter().collect();
        assert_eq!(scene, t.sequence.iter().collect::<BTreeSet<_>>());
        assert_eq!(t.created_at, 1_700_000_000);
    }
    let real: Vec<_> = pool.trials.iter().filter(|t| t.source == SourceKind::Real).collect();
    assert!(real.iter().all(|t| demos.iter().any(|d| d.sequence == t.sequence)));
}

#[test]
fn seeded_and_round_trips() {
    let (demos, table) = setup();
    let a = build_pool(&demos, &grocery_catalog(), &table, &config(9)).unwrap();
    let b = build_pool(&demos, &grocery_catalog(), &table, &config(9)).unwrap();
    assert_eq!(a, b);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pool.json");
    a.save(&path).unwrap();
    assert_eq!(Pool::load(&path).unwrap(), a);
}

#[test]
fn too_few_scenes() {
    let (demos, table) = setup();
    let cfg = PoolConfig { per_source: 500, ..config(1) };
    assert!(build_pool(&demos, &grocery_catalog(), &table, &cfg).is_err());
    assert!(build_pool(&[], &grocery_catalog(), &table, &config(1)).is_err());
}

#[test]
fn malformed_pools_rejected() {
    let (demos, table) = setup();
    let good = build_pool(&demos, &grocery_catalog(), &table, &config(2)).unwrap();

    let mut dup = good.clone();
    dup.trials[1].trial_id = dup.trials[0].trial_id.clone();
    assert!(dup.validate().is_err());

    let mut partial = good.clone();
    partial.trials[0].sequence.pop();
    assert!(partial.validate().is_err());

    let mut version = good;
    version.format = "other".into();
    assert!(version.validate().is_err());
}
