//! Recursive hierarchy of t-splitters.
//!
//! Level `i` holds graphs addressed by colour prefixes of length `i`; the
//! splitter of `G_j` sends each edge to the child `[j, c]`. Leaves sit at
//! level `h` and carry no splitter. Deletions clear the deepest instance
//! first and insertions enter from the top, so every splitter sees degrees
//! within its cap at the moment it processes an insertion.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::HierarchyError;
use crate::graph_core::{Colour, Vertex};
use crate::params::{self, Overrides};
use crate::tsplitter::{edge_key, EdgeKey, SplitterConfig, TSplitter};

/// Levels beyond this are refused even if the stop threshold is never met.
const LEVEL_LIMIT: usize = 64;

pub type Prefix = Vec<Colour>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyParams {
    pub n: usize,
    pub delta_max: u64,
    pub epsilon: f64,
    pub mu: f64,
    pub t1: u64,
    pub t2: u64,
    pub base: u64,
    pub threshold: u64,
    /// `t(i)` for `i < h`.
    pub arities: Vec<u32>,
    /// `Δ̂_i` for `i ≤ h`.
    pub caps: Vec<f64>,
    pub i1: usize,
    pub i2: usize,
    pub eta: Option<u64>,
}

impl HierarchyParams {
    pub fn depth(&self) -> usize {
        self.arities.len()
    }

    /// Integer degree cap of a level-`i` graph.
    pub fn int_cap(&self, level: usize) -> u64 {
        self.caps[level].floor() as u64
    }

    /// `t1^{i1} t2^{i2}`, the most leaves there can be.
    pub fn leaf_count_bound(&self) -> f64 {
        (self.t1 as f64).powi(self.i1 as i32) * (self.t2 as f64).powi(self.i2 as i32)
    }

    fn splitter_config(&self, level: usize) -> SplitterConfig {
        SplitterConfig::new(self.n, self.arities[level], self.int_cap(level), self.mu, self.eta)
    }
}

fn saturate(x: u128) -> u64 {
    x.min(u64::MAX as u128) as u64
}

/// Runs the level-assignment loop with formula defaults where `ov` is silent.
pub fn initialize_parameters(n: usize, delta_max: u64, epsilon: f64, ov: &Overrides) -> HierarchyParams {
    let t1 = ov.t1.unwrap_or_else(|| saturate(params::t1(n)));
    let t2 = ov.t2.unwrap_or_else(|| saturate(params::t2(n, epsilon)));
    let base = ov.base.unwrap_or_else(|| saturate(params::level_base(n)));
    let threshold = ov
        .threshold
        .unwrap_or_else(|| params::hierarchy_threshold(n, epsilon).min(u64::MAX as u128) as u64);
    let mu = ov.mu.unwrap_or_else(|| params::hierarchy_mu(n, epsilon));
    let mut p = HierarchyParams {
        n,
        delta_max,
        epsilon,
        mu,
        t1,
        t2,
        base,
        threshold,
        arities: Vec::new(),
        caps: vec![delta_max as f64],
        i1: 0,
        i2: 0,
        eta: ov.eta,
    };
    let dm = delta_max as f64;
    while p.caps[p.depth()] >= threshold as f64 && p.depth() < LEVEL_LIMIT {
        let reach = dm * (base as f64).powi(1 - p.i1 as i32);
        let t = if reach >= t1 as f64 { t1 } else { t2 };
        if t < 2 || t > u32::MAX as u64 {
            break;
        }
        if t == t1 && reach >= t1 as f64 {
            p.i1 += 1;
        } else {
            p.i2 += 1;
        }
        p.arities.push(t as u32);
        let h = p.depth() as i32;
        let split = (t1 as f64).powi(p.i1 as i32) * (t2 as f64).powi(p.i2 as i32);
        p.caps.push((1.0 + mu).powi(h) * dm / split);
    }
    p
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LeafEvent {
    Added { leaf: Prefix, edge: EdgeKey },
    Removed { leaf: Prefix, edge: EdgeKey },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LevelCounters {
    pub insertions: u64,
    pub deletions: u64,
    pub recolourings: u64,
}

#[derive(Debug, Clone)]
pub struct SplitterHierarchy {
    params: HierarchyParams,
    splitters: BTreeMap<Prefix, TSplitter>,
    leaves: BTreeMap<Prefix, BTreeSet<EdgeKey>>,
    /// Colours of each edge at the levels it currently occupies.
    profiles: BTreeMap<EdgeKey, Prefix>,
    events: Vec<LeafEvent>,
    levels: Vec<LevelCounters>,
    /// `cascades[d]` counts splitter updates made at recursion depth `d`.
    cascades: Vec<u64>,
    depth: usize,
}

impl SplitterHierarchy {
    pub fn new(params: HierarchyParams) -> Self {
        let h = params.depth();
        SplitterHierarchy {
            params,
            splitters: BTreeMap::new(),
            leaves: BTreeMap::new(),
            profiles: BTreeMap::new(),
            events: Vec::new(),
            levels: vec![LevelCounters::default(); h + 1],
            cascades: Vec::new(),
            depth: 0,
        }
    }

    pub fn params(&self) -> &HierarchyParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn level_counters(&self) -> &[LevelCounters] {
        &self.levels
    }

    pub fn cascade_histogram(&self) -> &[u64] {
        &self.cascades
    }

    /// Full profile `χ(e)` of a present edge.
    pub fn profile(&self, u: Vertex, v: Vertex) -> Option<&[Colour]> {
        self.profiles.get(&edge_key(u, v)).map(Vec::as_slice)
    }

    /// Leaf changes since the last call, in the order they happened.
    pub fn take_events(&mut self) -> Vec<LeafEvent> {
        std::mem::take(&mut self.events)
    }

    /// Non-empty level-`h` graphs.
    pub fn leaf_partition(&self) -> Vec<(&Prefix, &BTreeSet<EdgeKey>)> {
        self.leaves.iter().collect()
    }

    /// Every non-empty graph at `level` with its edges, read from the
    /// splitters (or leaf sets at the bottom) rather than the profiles.
    pub fn level_graphs(&self, level: usize) -> Vec<(Prefix, Vec<EdgeKey>)> {
        if level == self.params.depth() {
            return self
                .leaves
                .iter()
                .map(|(p, s)| (p.clone(), s.iter().copied().collect()))
                .collect();
        }
        self.splitters
            .iter()
            .filter(|(p, _)| p.len() == level)
            .map(|(p, s)| (p.clone(), s.coloured_edges().into_iter().map(|(u, v, _)| (u, v)).collect()))
            .collect()
    }

    /// The splitter of `G_j`, if allocated.
    pub fn splitter(&self, prefix: &[Colour]) -> Option<&TSplitter> {
        self.splitters.get(prefix)
    }

    pub fn insert(&mut self, u: Vertex, v: Vertex) -> Result<(), HierarchyError> {
        let key = edge_key(u, v);
        if self.profiles.contains_key(&key) {
            return Err(HierarchyError::Duplicate(key.0, key.1));
        }
        self.profiles.insert(key, Vec::new());
        self.depth = 0;
        let out = self.insert_at(key);
        if out.is_err() && self.profiles.get(&key).is_some_and(|p| p.is_empty()) {
            self.profiles.remove(&key);
        }
        out
    }

    pub fn delete(&mut self, u: Vertex, v: Vertex) -> Result<(), HierarchyError> {
        let key = edge_key(u, v);
        if !self.profiles.contains_key(&key) {
            return Err(HierarchyError::Missing(key.0, key.1));
        }
        self.depth = 0;
        self.remove_from(key, 0)?;
        self.profiles.remove(&key);
        Ok(())
    }

    /// Inserts `key` into the graph named by its current profile and below.
    fn insert_at(&mut self, key: EdgeKey) -> Result<(), HierarchyError> {
        let prefix = self.profiles[&key].clone();
        let level = prefix.len();
        if level == self.params.depth() {
            self.leaves.entry(prefix.clone()).or_default().insert(key);
            self.levels[level].insertions += 1;
            self.events.push(LeafEvent::Added { leaf: prefix, edge: key });
            return Ok(());
        }
        self.note_cascade();
        let cfg = self.params.splitter_config(level);
        let splitter = self.splitters.entry(prefix.clone()).or_insert_with(|| TSplitter::new(cfg));
        let log = splitter
            .insert(key.0, key.1)
            .map_err(|source| HierarchyError::Splitter { level, source })?;
        let colour = splitter.colour_of(key.0, key.1).expect("just inserted");
        self.levels[level].insertions += 1;
        self.levels[level].recolourings += log.recolours.len() as u64;
        self.follow_recolours(key, level, &log.recolours)?;
        self.profiles.get_mut(&key).expect("tracked").push(colour);
        self.depth += 1;
        let out = self.insert_at(key);
        self.depth -= 1;
        out
    }

    /// Removes `key` from every level `≥ from`, deepest first, repairing
    /// after each splitter deletion.
    fn remove_from(&mut self, key: EdgeKey, from: usize) -> Result<(), HierarchyError> {
        let profile = self.profiles[&key].clone();
        let h = self.params.depth();
        if profile.len() == h && from <= h {
            if let Some(set) = self.leaves.get_mut(&profile) {
                if set.remove(&key) {
                    self.levels[h].deletions += 1;
                    if set.is_empty() {
                        self.leaves.remove(&profile);
                    }
                    self.events.push(LeafEvent::Removed { leaf: profile.clone(), edge: key });
                }
            }
        }
        for level in (from..profile.len()).rev() {
            let prefix = &profile[..level];
            self.note_cascade();
            let splitter = self.splitters.get_mut(prefix).expect("allocated along the profile");
            let log = splitter
                .delete(key.0, key.1)
                .map_err(|source| HierarchyError::Splitter { level, source })?;
            if splitter.is_empty() {
                self.splitters.remove(prefix);
            }
            self.profiles.get_mut(&key).expect("tracked").truncate(level);
            self.levels[level].deletions += 1;
            self.levels[level].recolourings += log.recolours.len() as u64;
            self.follow_recolours(key, level, &log.recolours)?;
        }
        Ok(())
    }

    /// Moves each recoloured edge's subtree under its new colour.
    fn follow_recolours(
        &mut self,
        skip: EdgeKey,
        level: usize,
        recolours: &[crate::tsplitter::Recolour],
    ) -> Result<(), HierarchyError> {
        self.depth += 1;
        for r in recolours.iter().filter(|r| r.edge != skip) {
            let stored = self.profiles[&r.edge][level];
            if stored != r.from {
                return Err(HierarchyError::ProfileMismatch {
                    edge: r.edge,
                    level,
                    stored,
                    reported: r.from,
                });
            }
            self.remove_from(r.edge, level + 1)?;
            let profile = self.profiles.get_mut(&r.edge).expect("tracked");
            profile.truncate(level);
            profile.push(r.to);
            self.insert_at(r.edge)?;
        }
        self.depth -= 1;
        Ok(())
    }

    fn note_cascade(&mut self) {
        if self.cascades.len() <= self.depth {
            self.cascades.resize(self.depth + 1, 0);
        }
        self.cascades[self.depth] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> HierarchyParams {
        let ov = Overrides {
            t1: Some(4),
            t2: Some(2),
            base: Some(16),
            threshold: Some(3),
            mu: Some(0.25),
            eta: Some(16),
            ..Overrides::default()
        };
        initialize_parameters(64, 48, 0.5, &ov)
    }

    #[test]
    fn below_threshold_gives_no_levels() {
        let p = initialize_parameters(1 << 10, 1000, 0.5, &Overrides::default());
        assert_eq!(p.depth(), 0);
        assert_eq!(p.caps, vec![1000.0]);
    }

    #[test]
    fn flat_hierarchy_is_a_single_leaf() {
        let p = initialize_parameters(8, 4, 0.5, &Overrides::default());
        let mut h = SplitterHierarchy::new(p);
        h.insert(0, 1).unwrap();
        assert_eq!(h.profile(1, 0), Some(&[][..]));
        assert_eq!(h.take_events(), vec![LeafEvent::Added { leaf: vec![], edge: (0, 1) }]);
    }

    #[test]
    fn single_insertion_reaches_every_level() {
        let mut h = SplitterHierarchy::new(small());
        h.insert(2, 5).unwrap();
        assert_eq!(h.profile(2, 5), Some(&[1, 1, 1][..]));
        for level in 0..=3 {
            assert_eq!(h.level_graphs(level).len(), 1);
        }
    }

    #[test]
    fn deletion_frees_every_graph() {
        let mut h = SplitterHierarchy::new(small());
        h.insert(2, 5).unwrap();
        h.insert(2, 6).unwrap();
        h.delete(5, 2).unwrap();
        h.delete(2, 6).unwrap();
        assert!(h.is_empty());
        assert!(h.leaf_partition().is_empty());
        assert!((0..=3).all(|l| h.level_graphs(l).is_empty()));
        assert_eq!(h.delete(2, 6), Err(HierarchyError::Missing(2, 6)));
    }
}
