use std::collections::BTreeMap;

use dyncolour::oracle::SplitterTruth;
use dyncolour::tsplitter::{Recolour, SplitterConfig, TSplitter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Replays recolourings on a plain map and measures each against a fresh truth.
fn audit_recolours(
    replica: &mut BTreeMap<(usize, usize), u32>,
    recolours: &[Recolour],
    t: u32,
    dm: u64,
    min_diff: &mut i64,
) {
    for r in recolours {
        let edges: Vec<_> = replica.iter().map(|(&(u, v), &c)| (u, v, c)).collect();
        let truth = SplitterTruth::new(&edges, t, dm);
        let d = truth.sum(r.edge.0, r.edge.1, r.from) - truth.sum(r.edge.0, r.edge.1, r.to);
        *min_diff = (*min_diff).min(d);
        replica.insert(r.edge, r.to);
    }
}

// At η = 16 the hub stream never triggers a recolouring, so the flip
// threshold is exercised here with η = 2.
#[test]
fn small_eta_recolours_clear_the_flip_threshold() {
    let (n, t, dm, eta) = (512usize, 4u32, 128u64, 2u64);
    let mut s = TSplitter::new(SplitterConfig::new(n, t, dm, 0.5, Some(eta)));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut present: Vec<(usize, usize)> = Vec::new();
    let mut replica = BTreeMap::new();
    let mut min_diff = i64::MAX;
    for _ in 0..10_000 {
        if present.is_empty() || rng.gen_bool(0.7) {
            let (u, v) = (rng.gen_range(0..32), rng.gen_range(0..n));
            if u == v || s.colour_of(u, v).is_some() || s.degree(u) >= dm || s.degree(v) >= dm {
                continue;
            }
            let log = s.insert(u, v).unwrap();
            let (k, c) = log.placed.unwrap();
            replica.insert(k, c);
            audit_recolours(&mut replica, &log.recolours, t, dm, &mut min_diff);
            present.push((u, v));
        } else {
            let (u, v) = present.swap_remove(rng.gen_range(0..present.len()));
            let log = s.delete(u, v).unwrap();
            replica.remove(&(u.min(v), u.max(v)));
            audit_recolours(&mut replica, &log.recolours, t, dm, &mut min_diff);
        }
    }
    assert!(s.counters().recolourings > 0);
    // Scaled by t: η/4 becomes t·η/4.
    assert!(4 * min_diff >= (t as u64 * eta) as i64, "min difference {min_diff}");
    assert!(s.check_invariant().is_empty());
}
