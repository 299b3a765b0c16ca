mod common;

use common::stepping_audit;
use dyncolour::colourer::{ColourerConfig, DirectColourer};
use dyncolour::graph_core::ColourView;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fuzz(n: usize, delta_max: usize, ell: usize, a: usize, updates: usize, p_insert: f64, seed: u64) -> (DirectColourer, u64) {
    fuzz_from(n, delta_max, ell, a, updates, p_insert, seed, &[])
}

#[allow(clippy::too_many_arguments)]
fn fuzz_from(
    n: usize,
    delta_max: usize,
    ell: usize,
    a: usize,
    updates: usize,
    p_insert: f64,
    seed: u64,
    spine: &[(usize, usize)],
) -> (DirectColourer, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = ((n as f64).log2().sqrt()).ceil() as usize;
    let mut c = DirectColourer::new(ColourerConfig { n, delta_max, ell, a, levels, audit: true });
    let mut present: Vec<(usize, usize)> = Vec::new();
    let mut nonempty = 0;
    for step in 0..updates {
        let insert = present.is_empty() || rng.gen_bool(p_insert);
        if let Some(&(u, v)) = spine.get(step) {
            c.insert(u, v).unwrap_or_else(|e| panic!("update {step}: {e}"));
            present.push((u, v));
        } else if insert {
            let g = c.graph();
            let open: Vec<usize> = (0..n).filter(|&x| g.degree(x) < delta_max).collect();
            if open.len() < 2 {
                continue;
            }
            let u = open[rng.gen_range(0..open.len())];
            let v = open[rng.gen_range(0..open.len())];
            if u == v || g.edge_between(u, v).is_some() || g.degree(u) >= delta_max || g.degree(v) >= delta_max {
                continue;
            }
            c.insert(u, v).unwrap_or_else(|e| panic!("update {step}: {e}"));
            present.push((u, v));
        } else {
            let (u, v) = present.swap_remove(rng.gen_range(0..present.len()));
            c.delete(u, v).unwrap_or_else(|e| panic!("update {step}: {e}"));
        }
        if let Err(msg) = stepping_audit(&c) {
            panic!("update {step}: {msg}");
        }
        nonempty += c.sets().unwrap().all_sets().values().filter(|s| !s.is_empty()).count() as u64;
    }
    (c, nonempty)
}

#[test]
fn small_fuzz_keeps_sets_sound() {
    let (c, nonempty) = fuzz(60, 3, 4, 4, 600, 0.7, 7);
    eprintln!("counters {:?} nonempty {nonempty}", c.counters());
}

#[test]
fn dense_fuzz_keeps_sets_sound() {
    let (c, nonempty) = fuzz(80, 3, 5, 4, 800, 0.85, 11);
    eprintln!("counters {:?} nonempty {nonempty}", c.counters());
}

#[test]
fn tiny_step_lengths_across_seeds() {
    let mut lookups = 0;
    let mut hits = 0;
    for seed in 0..40 {
        for ell in 1..=3 {
            let (c, _) = fuzz(12, 4, ell, 2, 120, 0.8, seed);
            lookups += c.counters().lookups;
            hits += c.counters().lookup_hits;
        }
    }
    assert!(hits <= lookups);
}
