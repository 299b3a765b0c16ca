use std::collections::BTreeSet;

use dyncolour::params::{first_copy_for, Overrides};
use dyncolour::pipeline::{BackendChoice, Mode, Pipeline, PipelineConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn drive(p: &mut Pipeline, n: usize, cap: usize, steps: usize, seed: u64, check_every: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present: Vec<(usize, usize)> = Vec::new();
    let mut set = BTreeSet::new();
    let mut deg = vec![0usize; n];
    let mut done = 0;
    while done < steps {
        if present.is_empty() || rng.gen_bool(0.6) {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let key = (u.min(v), u.max(v));
            if u == v || set.contains(&key) || deg[u] >= cap || deg[v] >= cap {
                continue;
            }
            p.insert(u, v).unwrap_or_else(|e| panic!("step {done}: insert {u}-{v}: {e}"));
            set.insert(key);
            present.push(key);
            deg[u] += 1;
            deg[v] += 1;
        } else {
            let (u, v) = present.swap_remove(rng.gen_range(0..present.len()));
            p.delete(u, v).unwrap_or_else(|e| panic!("step {done}: delete {u}-{v}: {e}"));
            set.remove(&(u, v));
            deg[u] -= 1;
            deg[v] -= 1;
        }
        done += 1;
        if done % check_every == 0 {
            assert_eq!(p.validate(), Ok(()), "step {done}");
            assert_eq!(p.current_colouring().edges.len(), set.len());
        }
    }
}

#[test]
fn full_mode_stays_proper_and_within_palette() {
    let mut p = Pipeline::new(PipelineConfig::new(60, 0.5, 0, Mode::Full));
    drive(&mut p, 60, 12, 3000, 1, 1);
    let m = p.metrics();
    assert!(m.scheduler.switches > 1);
    assert_eq!(m.updates, 3000);
}

#[test]
fn full_mode_with_stepping_overrides() {
    let cfg = PipelineConfig {
        overrides: Overrides { ell: Some(6), a: Some(2), levels: Some(2), ..Overrides::default() },
        audit: true,
        ..PipelineConfig::new(80, 0.5, 0, Mode::Full)
    };
    let mut p = Pipeline::new(cfg);
    drive(&mut p, 80, 6, 1500, 2, 1);
}

#[test]
fn full_mode_with_forced_hierarchy() {
    let cfg = PipelineConfig {
        backend: BackendChoice::Hierarchy,
        overrides: Overrides {
            t1: Some(2),
            t2: Some(2),
            threshold: Some(6),
            mu: Some(0.5),
            eta: Some(4),
            ..Overrides::default()
        },
        ..PipelineConfig::new(64, 0.5, 0, Mode::Full)
    };
    let mut p = Pipeline::new(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut present = Vec::new();
    for step in 0..1500 {
        if present.is_empty() || rng.gen_bool(0.6) {
            let (u, v) = (rng.gen_range(0..8usize), rng.gen_range(8..64usize));
            if p.insert(u, v).is_ok() {
                present.push((u, v));
            }
        } else {
            let (u, v) = present.swap_remove(rng.gen_range(0..present.len()));
            p.delete(u, v).unwrap();
        }
        // The hierarchy's palette is not bounded at these degrees; properness is.
        let c = p.current_colouring();
        let edges: Vec<_> = c.edges.iter().map(|&(u, v, k)| (u, v, Some(k))).collect();
        assert!(dyncolour::oracle::verify_proper(&edges, c.palette).passed(), "step {step}");
    }
    assert!(p.uses_hierarchy());
}

#[test]
fn hierarchy_mode_stays_proper() {
    let cfg = PipelineConfig {
        overrides: Overrides {
            t1: Some(2),
            t2: Some(2),
            threshold: Some(10),
            mu: Some(0.5),
            eta: Some(16),
            ..Overrides::default()
        },
        ..PipelineConfig::new(100, 0.5, 24, Mode::Hierarchy)
    };
    let mut p = Pipeline::new(cfg);
    assert!(p.uses_hierarchy());
    drive(&mut p, 100, 24, 2000, 4, 1);
}

#[test]
fn splitter_mode_validates_its_invariant() {
    let cfg = PipelineConfig {
        overrides: Overrides { t2: Some(4), eta: Some(16), ..Overrides::default() },
        ..PipelineConfig::new(100, 0.5, 40, Mode::Splitter)
    };
    let mut p = Pipeline::new(cfg);
    drive(&mut p, 100, 40, 2000, 5, 1);
    assert_eq!(p.current_colouring().palette, 4);
}

#[test]
fn degree_drop_readmits_edges() {
    let mut p = Pipeline::new(PipelineConfig::new(40, 0.7, 0, Mode::Full));
    for v in 1..=30 {
        p.insert(0, v).unwrap();
    }
    p.insert(31, 32).unwrap();
    let before = p.metrics().scheduler.admissions;
    for v in 6..=30 {
        p.delete(0, v).unwrap();
    }
    // The spoke edges fall from degree 30 to 5 and re-enter the low copies.
    let m = p.metrics();
    assert!(m.scheduler.admissions > before);
    assert!(m.scheduler.switches >= 2);
    assert_eq!(p.validate(), Ok(()));
    assert_eq!(first_copy_for(5, 0.7), 17);
}

#[test]
fn replaying_a_seed_reproduces_metrics() {
    let run = || {
        let mut p = Pipeline::new(PipelineConfig::new(50, 0.5, 0, Mode::Full));
        drive(&mut p, 50, 10, 800, 9, 100);
        let mut m = p.metrics();
        m.wall_ns_total = 0;
        m.wall_ns_max = 0;
        (m, p.current_colouring())
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn direct_mode_random_streams(ops in prop::collection::vec((0usize..10, 0usize..10), 1..60)) {
        let mut p = Pipeline::new(PipelineConfig::new(10, 0.5, 4, Mode::Direct));
        let mut set = BTreeSet::new();
        let mut deg = [0usize; 10];
        for (u, v) in ops {
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if set.remove(&key) {
                p.delete(u, v).unwrap();
                deg[u] -= 1;
                deg[v] -= 1;
            } else if deg[u] < 4 && deg[v] < 4 {
                p.insert(u, v).unwrap();
                set.insert(key);
                deg[u] += 1;
                deg[v] += 1;
            }
            prop_assert_eq!(p.validate(), Ok(()));
            prop_assert!(p.current_colouring().edges.iter().all(|e| e.2 >= 1 && e.2 <= 5));
        }
    }
}
