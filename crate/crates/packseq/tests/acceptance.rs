//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.
//!
//! The optional published-dataset check runs when `PACKSEQ_BOXED_DATASET`
//! points at a dataset converted to this crate's JSON Lines format, with
//! `PACKSEQ_BOXED_CATALOG` giving its catalog.

#[path = "../../core/tests/common/mod.rs"]
mod common;
mod support;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use packseq::formats::{load_catalog, load_dataset};
use packseq_core::describe::dataset_stats;
use packseq_core::fixtures::{grocery_catalog, grocery_container};
use packseq_core::levels::build_level_table;
use packseq_core::markov::train;
use packseq_core::planner::{oracle_best_sequence, predict, SearchConfig};
use packseq_core::scene::{fill_ratio, sample_scene, synth_demos};
use packseq_core::stats::{boschloo_one_sided, cohens_h, fisher_one_sided, power_two_prop, Contingency2x2};
use packseq_core::{MiningConfig, ObjectId, StateId};
use rand::seq::IteratorRandom;
use rand::Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn cohens_h_criterion() -> Outcome {
    let (h, took) = timed(|| cohens_h(15.0 / 17.0, 8.0 / 16.0).unwrap());
    check(
        (h - 0.86).abs() <= 0.01 && took < Duration::from_millis(1),
        format!("h(15/17, 8/16) = {h:.4}, want 0.86 +/- 0.01; {took:?} (< 1 ms)"),
    )
}

fn boschloo_criterion() -> Outcome {
    let t = Contingency2x2::new(15, 2, 8, 8).unwrap();
    let (p, took) = timed(|| boschloo_one_sided(&t, 2000).unwrap().p_value);
    check(
        (p - 0.0099).abs() <= 0.0015 && took < Duration::from_secs(5),
        format!("p(15,2,8,8) = {p:.5}, want 0.0099 +/- 0.0015; {took:.2?} (< 5 s)"),
    )
}

fn power_criterion() -> Outcome {
    let p = power_two_prop(0.863, 17, 16, 0.05, true).unwrap();
    check((p - 0.79).abs() <= 0.03, format!("power(0.863, 17, 16) = {p:.4}, want 0.79 +/- 0.03"))
}

fn boschloo_vs_fisher_criterion() -> Outcome {
    let mut r = common::rng(500);
    let mut violations = 0;
    let tables = 500;
    for _ in 0..tables {
        let (n1, n2) = (r.gen_range(1..=30u64), r.gen_range(1..=30u64));
        let (s1, s2) = (r.gen_range(0..=n1), r.gen_range(0..=n2));
        let t = Contingency2x2::new(s1, n1 - s1, s2, n2 - s2).unwrap();
        if boschloo_one_sided(&t, 2000).unwrap().p_value > fisher_one_sided(&t).p_value {
            violations += 1;
        }
    }
    check(violations == 0, format!("{violations} violations on {tables} random tables"))
}

fn choose(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

fn exact_fisher(s1: u64, n1: u64, s2: u64, n2: u64) -> f64 {
    let k = s1 + s2;
    let (mut tail, mut total) = (BigUint::zero(), BigUint::zero());
    for a in k.saturating_sub(n2)..=k.min(n1) {
        let w = choose(n1, a) * choose(n2, k - a);
        if a >= s1 {
            tail += &w;
        }
        total += w;
    }
    BigRational::new(tail.into(), total.into()).to_f64().unwrap()
}

fn fisher_oracle_criterion() -> Outcome {
    let (mut worst, mut tables) = (0.0f64, 0);
    for n1 in 1..=12 {
        for n2 in 1..=12 {
            for s1 in 0..=n1 {
                for s2 in 0..=n2 {
                    let t = Contingency2x2::new(s1, n1 - s1, s2, n2 - s2).unwrap();
                    worst = worst.max((fisher_one_sided(&t).p_value - exact_fisher(s1, n1, s2, n2)).abs());
                    tables += 1;
                }
            }
        }
    }
    check(worst <= 1e-12, format!("max error {worst:.2e} over {tables} tables (<= 1e-12)"))
}

fn partial_orderings(n: usize) -> usize {
    (1..=n).map(|k| (n - k + 1..=n).product::<usize>()).sum()
}

fn planner_oracle_criterion() -> Outcome {
    let mut r = common::rng(0x0ac1e);
    let (result, took) = timed(|| {
        let mut mismatches = 0;
        for case in 0..100 {
            let objects = 1 + case % 7;
            let chain = common::random_chain(&mut r, objects, [0.25, 0.4, 0.6][case % 3]);
            let table = build_level_table(&chain, None);
            let k = r.gen_range(1..=6.min(objects + 1));
            // index `objects` is an object the chain has never seen
            let scene: BTreeSet<ObjectId> = (0..=objects).choose_multiple(&mut r, k).into_iter().map(common::object).collect();
            let config = SearchConfig { beam_width: partial_orderings(scene.len()), ..SearchConfig::default() };
            let plan = predict(&table, &scene, &config).unwrap();
            let oracle = oracle_best_sequence(&table, &scene).unwrap();
            if plan.sequence != oracle.sequence
                || plan.log_prob.map(f64::to_bits) != oracle.log_prob.map(f64::to_bits)
                || plan.leftovers != oracle.leftovers
            {
                mismatches += 1;
            }
        }
        mismatches
    });
    check(result == 0 && took < Duration::from_secs(60), format!("{result} mismatches in 100 cases; {took:.2?} (< 60 s)"))
}

fn learning_criterion() -> Outcome {
    let mut worst = 0.0f64;
    let mut fallbacks = 0;
    for (i, (truth, ids)) in common::walk_consistent_chains().into_iter().enumerate() {
        let (catalog, container) = common::full_scene_setup(&ids);
        let synth = synth_demos(&truth, &catalog, &container, 10_000, 1000 + i as u64).unwrap();
        fallbacks += synth.fallbacks.len();
        let learned = train(&synth.demos, &MiningConfig::with_threshold(0.0)).unwrap();
        worst = worst.max(common::max_conditional_error(&truth, &learned));
    }
    check(
        worst <= 0.03 && fallbacks == 0,
        format!("max conditional error {worst:.4} (<= 0.03) from 10000 demonstrations per chain"),
    )
}

fn level_table_criterion() -> Outcome {
    let mut r = common::rng(0x1e7e1);
    let (mut mismatched, mut entries) = (0, 0);
    for case in 0..50 {
        let objects = 1 + case % 7;
        let chain = common::random_chain(&mut r, objects, [0.3, 0.5, 0.8][case % 3]);
        let table = build_level_table(&chain, None);
        for source in chain.states() {
            let got = common::table_row(&table, source);
            entries += got.len();
            if got != common::brute_force_levels(&chain, source) {
                mismatched += 1;
            }
        }
        if table.level(&StateId::Start, 1).len() != chain.successors(&StateId::Start).len() {
            mismatched += 1;
        }
    }
    check(mismatched == 0, format!("{mismatched} mismatching sources; {entries} entries on 50 chains"))
}

fn scene_criterion() -> Outcome {
    let (catalog, container) = (grocery_catalog(), grocery_container());
    let (mut lo, mut hi, mut outside) = (f64::INFINITY, 0.0f64, 0);
    for seed in 0..1000 {
        let r = fill_ratio(&catalog, &container, &sample_scene(&catalog, &container, seed).unwrap());
        lo = lo.min(r);
        hi = hi.max(r);
        if !(0.70..=0.90).contains(&r) {
            outside += 1;
        }
    }
    check(outside == 0, format!("1000 scenes, fill ratio in [{lo:.3}, {hi:.3}], {outside} outside [0.70, 0.90]"))
}

fn table_one_criterion() -> Outcome {
    let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap();
    rt.block_on(async {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("judgments.jsonl");
        let pool = support::fixture_pool(1);
        let (_, app) = support::open(pool.clone(), &log);
        support::submit_table_one(&app, &pool).await;
        drop(app);
        // results after a restart come from the replayed log alone
        let (_, app) = support::open(pool, &log);
        let (_, v) = support::call(&app, "GET", "/api/results", None).await;
        let got: Vec<String> = v["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| format!("{}/{}", r["human_pct"], r["computer_pct"]))
            .collect();
        check(got == ["7/93", "79/21", "50/50", "88/12"], format!("random, real, beam_n, beam_3 = {}", got.join(", ")))
    })
}

fn published_dataset_criterion() -> Outcome {
    let Some(data) = std::env::var_os("PACKSEQ_BOXED_DATASET").map(PathBuf::from) else {
        return Outcome::Skip("PACKSEQ_BOXED_DATASET not set".into());
    };
    let catalog = match std::env::var_os("PACKSEQ_BOXED_CATALOG") {
        Some(p) => load_catalog(&PathBuf::from(p)).unwrap(),
        None => grocery_catalog(),
    };
    let demos = load_dataset(&data, &catalog).unwrap();
    let s = dataset_stats(&demos, 10.0).unwrap();
    let slope = s.duration_per_object.map(|f| f.slope).unwrap_or(f64::NAN);
    check(
        s.scenes == 263
            && s.manipulations == 4644
            && (s.duration_mean_s - 77.0).abs() <= 2.0
            && (s.duration_std_s - 36.0).abs() <= 2.0
            && (slope - 4.0).abs() <= 1.0,
        format!(
            "{} scenes, {} manipulations, mean {:.1} s, std {:.1} s, slope {:.2} s/object",
            s.scenes, s.manipulations, s.duration_mean_s, s.duration_std_s, slope
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("cohens-h", cohens_h_criterion),
        ("boschloo-reference", boschloo_criterion),
        ("power", power_criterion),
        ("boschloo-le-fisher", boschloo_vs_fisher_criterion),
        ("fisher-exact-oracle", fisher_oracle_criterion),
        ("planner-oracle", planner_oracle_criterion),
        ("learning-recovery", learning_criterion),
        ("level-table-oracle", level_table_criterion),
        ("scene-fill-band", scene_criterion),
        ("results-table-replay", table_one_criterion),
        ("published-dataset", published_dataset_criterion),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Outcome::Pass(d) => println!("PASS  {name:<22} {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL  {name:<22} {d}");
            }
            Outcome::Skip(d) => println!("SKIP  {name:<22} {d}"),
        }
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
