//! Helpers shared by the integration targets.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dyncolour::colourer::DirectColourer;
use dyncolour::graph_core::ColourView;
use dyncolour::oracle::{replay_process, trie_is_good};
use dyncolour::splitter_hierarchy::SplitterHierarchy;
use dyncolour::stepping_sets::{SteppingProcess, SteppingSets};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Key = (usize, usize);

/// Checks exact partition, and degree caps when `caps` is set, level by level against `truth`.
pub fn hierarchy_audit(h: &SplitterHierarchy, truth: &BTreeSet<Key>, caps: bool) -> Result<(), String> {
    let p = h.params();
    for level in 0..=p.depth() {
        let mut seen = BTreeSet::new();
        for (prefix, edges) in h.level_graphs(level) {
            if prefix.len() != level {
                return Err(format!("graph {prefix:?} listed at level {level}"));
            }
            let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
            for &(u, v) in &edges {
                if !seen.insert((u, v)) {
                    return Err(format!("edge {u}-{v} twice at level {level}"));
                }
                if h.profile(u, v).map(|c| &c[..level]) != Some(&prefix[..]) {
                    return Err(format!("edge {u}-{v} in {prefix:?} against profile {:?}", h.profile(u, v)));
                }
                *deg.entry(u).or_default() += 1;
                *deg.entry(v).or_default() += 1;
            }
            if let Some((&v, &d)) = deg.iter().max_by_key(|(_, &d)| d) {
                if caps && d as f64 > p.caps[level] {
                    return Err(format!("vertex {v} degree {d} in {prefix:?} over {}", p.caps[level]));
                }
            }
        }
        if &seen != truth {
            return Err(format!("level {level} covers {} edges, graph has {}", seen.len(), truth.len()));
        }
    }
    Ok(())
}

/// Insert-heavy stream whose edges all touch one of the first `hubs` vertices.
pub fn hub_stream(n: usize, hubs: usize, cap: usize, steps: usize, seed: u64) -> Vec<(bool, Key)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deg = vec![0usize; n];
    let mut present: Vec<Key> = Vec::new();
    let mut set = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < steps {
        if present.is_empty() || rng.gen_bool(0.65) {
            let u = rng.gen_range(0..hubs);
            let v = rng.gen_range(0..n);
            let key = (u.min(v), u.max(v));
            if u == v || set.contains(&key) || deg[u] >= cap || deg[v] >= cap {
                continue;
            }
            deg[u] += 1;
            deg[v] += 1;
            set.insert(key);
            present.push(key);
            out.push((true, key));
        } else {
            let key = present.swap_remove(rng.gen_range(0..present.len()));
            deg[key.0] -= 1;
            deg[key.1] -= 1;
            set.remove(&key);
            out.push((false, key));
        }
    }
    out
}

/// Replays every stored string, checks spread, and compares emptiness with a rebuild.
pub fn stepping_audit(c: &DirectColourer) -> Result<(), String> {
    let g = c.graph();
    let sk = c.skeleton().unwrap();
    let sets = c.sets().unwrap();
    let p = sets.params();
    let edges = g.coloured_edges();
    for (w, s, level) in sets.all_strings() {
        let proc_ = SteppingProcess { start: w, paths: s.clone(), augmenting: true };
        let v = replay_process(g.vertex_count(), g.palette(), &edges, &proc_, p.ell);
        if !v.passed() {
            return Err(format!("level {level} string from {w} failed: {v:?} {s:?}"));
        }
    }
    let stored = sets.all_sets();
    for (key, set) in &stored {
        if set.len() > 1
            && !(trie_is_good(set, p.a.div_ceil(2), 1) && trie_is_good(set, p.a.div_ceil(4), 2))
        {
            return Err(format!("set {key:?} is not spread"));
        }
    }
    let mut fresh = SteppingSets::new(p);
    fresh.rebuild_everything(g, sk);
    let fresh_sets = fresh.all_sets();
    for (key, set) in &fresh_sets {
        let mine = stored.get(key).map_or(true, Vec::is_empty);
        if mine != set.is_empty() {
            return Err(format!("emptiness differs at {key:?}: incremental {} fresh {}", !mine, !set.is_empty()));
        }
    }
    for (key, set) in &stored {
        if !set.is_empty() && fresh_sets.get(key).map_or(true, Vec::is_empty) {
            return Err(format!("stale non-empty set at {key:?}"));
        }
    }
    Ok(())
}
