//! Dynamic t-splitter: a t-colouring whose colour classes have small degree.
//!
//! Surpluses are kept as integers scaled by `t`, so `S = max(t·d − Δmax, 0)`
//! and every threshold on `η` is compared against `t·η`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::SplitterError;
use crate::graph_core::{Colour, Vertex};
use crate::params::MIN_DERIVED_ETA;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitterConfig {
    pub n: usize,
    pub t: u32,
    pub delta_max: u64,
    pub epsilon: f64,
    pub eta: u64,
    pub stride: u64,
}

impl SplitterConfig {
    /// Config with the derived `η` and stride; `eta` overrides the formula.
    /// A derived `η` is raised to [`MIN_DERIVED_ETA`]; an override is taken as given.
    pub fn new(n: usize, t: u32, delta_max: u64, epsilon: f64, eta: Option<u64>) -> Self {
        let eta = eta.unwrap_or_else(|| crate::params::eta(n, t, delta_max, epsilon).max(MIN_DERIVED_ETA));
        SplitterConfig {
            n,
            t,
            delta_max,
            epsilon,
            eta,
            stride: crate::params::stride(delta_max, eta),
        }
    }

    fn scaled_eta(&self) -> i64 {
        self.eta as i64 * self.t as i64
    }
}

pub type EdgeKey = (Vertex, Vertex);

pub fn edge_key(u: Vertex, v: Vertex) -> EdgeKey {
    (u.min(v), u.max(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Recolour {
    pub edge: EdgeKey,
    pub from: Colour,
    pub to: Colour,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UpdateLog {
    /// Colour first given to an inserted edge.
    pub placed: Option<(EdgeKey, Colour)>,
    pub recolours: Vec<Recolour>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SplitterCounters {
    pub insertions: u64,
    pub deletions: u64,
    pub recolourings: u64,
    pub queue_pops: u64,
    pub refreshes: u64,
}

#[derive(Debug, Clone)]
struct EdgeRec {
    key: EdgeKey,
    colour: Colour,
    /// Stored estimate of `S_κ(u) + S_κ(v)` per colour, index `κ − 1`.
    sums: Vec<i64>,
}

type Entry = (i64, Reverse<usize>);

#[derive(Debug, Clone)]
pub struct TSplitter {
    cfg: SplitterConfig,
    degree: Vec<u64>,
    lists: Vec<Vec<usize>>,
    cursor: Vec<usize>,
    msd: Vec<BTreeSet<Entry>>,
    edges: Vec<Option<EdgeRec>>,
    spare: Vec<usize>,
    index: HashMap<EdgeKey, usize>,
    total_degree: Vec<u64>,
    queue: VecDeque<(Vertex, Colour)>,
    queued: HashSet<(Vertex, Colour)>,
    counters: SplitterCounters,
}

impl TSplitter {
    pub fn new(cfg: SplitterConfig) -> Self {
        assert!(cfg.t >= 1, "need at least one colour");
        let slots = cfg.n * cfg.t as usize;
        TSplitter {
            cfg,
            degree: vec![0; slots],
            lists: vec![Vec::new(); slots],
            cursor: vec![0; slots],
            msd: vec![BTreeSet::new(); slots],
            edges: Vec::new(),
            spare: Vec::new(),
            index: HashMap::new(),
            total_degree: vec![0; cfg.n],
            queue: VecDeque::new(),
            queued: HashSet::new(),
            counters: SplitterCounters::default(),
        }
    }

    pub fn config(&self) -> &SplitterConfig {
        &self.cfg
    }

    pub fn counters(&self) -> SplitterCounters {
        self.counters
    }

    fn slot(&self, v: Vertex, c: Colour) -> usize {
        v * self.cfg.t as usize + (c as usize - 1)
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn degree(&self, v: Vertex) -> u64 {
        self.total_degree[v]
    }

    pub fn class_degree(&self, v: Vertex, c: Colour) -> u64 {
        self.degree[self.slot(v, c)]
    }

    pub fn max_class_degree(&self) -> u64 {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    pub fn colour_of(&self, u: Vertex, v: Vertex) -> Option<Colour> {
        let id = *self.index.get(&edge_key(u, v))?;
        self.edges[id].as_ref().map(|r| r.colour)
    }

    /// `(u, v, colour)` for every edge, sorted.
    pub fn coloured_edges(&self) -> Vec<(Vertex, Vertex, Colour)> {
        let mut out: Vec<_> = self.edges.iter().flatten().map(|r| (r.key.0, r.key.1, r.colour)).collect();
        out.sort_unstable();
        out
    }

    fn surplus(&self, v: Vertex, c: Colour) -> i64 {
        (self.cfg.t as i64 * self.class_degree(v, c) as i64 - self.cfg.delta_max as i64).max(0)
    }

    fn true_sum(&self, key: EdgeKey, c: Colour) -> i64 {
        self.surplus(key.0, c) + self.surplus(key.1, c)
    }

    /// Stored per-colour surplus sums of an edge (scaled).
    pub fn stored_sums(&self, u: Vertex, v: Vertex) -> Option<&[i64]> {
        let id = *self.index.get(&edge_key(u, v))?;
        self.edges[id].as_ref().map(|r| r.sums.as_slice())
    }

    /// Stored differences at `w` against colour `c`, as `(edge, value)` (scaled).
    pub fn stored_differences(&self, w: Vertex, c: Colour) -> Vec<(EdgeKey, i64)> {
        self.msd[self.slot(w, c)]
            .iter()
            .map(|&(d, Reverse(id))| (self.edges[id].as_ref().expect("live edge").key, d))
            .collect()
    }

    /// `Δs̃_κ(w)` and the edge attaining it (smallest id on ties).
    pub fn max_difference(&self, w: Vertex, c: Colour) -> Option<(i64, EdgeKey)> {
        self.msd[self.slot(w, c)]
            .last()
            .map(|&(d, Reverse(id))| (d, self.edges[id].as_ref().expect("live edge").key))
    }

    /// Every `(edge, colour)` pair violating the local invariant, by full scan.
    pub fn check_invariant(&self) -> Vec<(EdgeKey, Colour)> {
        let slack = self.cfg.scaled_eta();
        let mut out = Vec::new();
        for r in self.edges.iter().flatten() {
            let own = self.true_sum(r.key, r.colour);
            for i in 1..=self.cfg.t {
                if own > slack + self.true_sum(r.key, i) {
                    out.push((r.key, i));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// `2t²Φ` from the true surpluses.
    pub fn potential_scaled(&self) -> u128 {
        let t = self.cfg.t as i128;
        let mut total = 0u128;
        for v in 0..self.cfg.n {
            for c in 1..=self.cfg.t {
                let s = self.surplus(v, c) as i128;
                total += (s * (s + t)) as u128;
            }
        }
        total
    }

    pub fn insert(&mut self, u: Vertex, v: Vertex) -> Result<UpdateLog, SplitterError> {
        if u == v {
            return Err(SplitterError::SelfLoop(u));
        }
        let key = edge_key(u, v);
        if self.index.contains_key(&key) {
            return Err(SplitterError::Duplicate(key.0, key.1));
        }
        for w in [u, v] {
            if self.total_degree[w] + 1 > self.cfg.delta_max {
                return Err(SplitterError::DegreeCap {
                    vertex: w,
                    cap: self.cfg.delta_max,
                });
            }
        }
        let sums = (1..=self.cfg.t).map(|c| self.true_sum(key, c)).collect();
        let rec = EdgeRec { key, colour: 0, sums };
        let id = match self.spare.pop() {
            Some(id) => {
                self.edges[id] = Some(rec);
                id
            }
            None => {
                self.edges.push(Some(rec));
                self.edges.len() - 1
            }
        };
        self.index.insert(key, id);
        self.total_degree[u] += 1;
        self.total_degree[v] += 1;
        self.counters.insertions += 1;
        let mut log = UpdateLog::default();
        let c = self.recolour(id, &mut log);
        log.placed = Some((key, c));
        self.drain(&mut log);
        Ok(log)
    }

    pub fn delete(&mut self, u: Vertex, v: Vertex) -> Result<UpdateLog, SplitterError> {
        let key = edge_key(u, v);
        let id = *self.index.get(&key).ok_or(SplitterError::Missing(key.0, key.1))?;
        let colour = self.edges[id].as_ref().expect("indexed edge").colour;
        self.detach(id, colour);
        self.edges[id] = None;
        self.spare.push(id);
        self.index.remove(&key);
        self.total_degree[u] -= 1;
        self.total_degree[v] -= 1;
        self.counters.deletions += 1;
        self.round_robin(key);
        self.push_violations(key);
        let mut log = UpdateLog::default();
        self.drain(&mut log);
        Ok(log)
    }

    fn drain(&mut self, log: &mut UpdateLog) {
        let eta = self.cfg.scaled_eta();
        while let Some((w, c)) = self.queue.pop_front() {
            self.queued.remove(&(w, c));
            self.counters.queue_pops += 1;
            let Some(&(d, Reverse(id))) = self.msd[self.slot(w, c)].last() else { continue };
            if 2 * d > eta {
                self.recolour(id, log);
            }
        }
    }

    /// Gives edge `id` its minimum stored-sum colour and runs the follow-up
    /// refreshes. Returns the new colour.
    fn recolour(&mut self, id: usize, log: &mut UpdateLog) -> Colour {
        let rec = self.edges[id].as_ref().expect("live edge");
        let (key, old) = (rec.key, rec.colour);
        let new = rec
            .sums
            .iter()
            .enumerate()
            .min_by_key(|&(i, &s)| (s, i))
            .map(|(i, _)| i as Colour + 1)
            .expect("t ≥ 1");
        if old != 0 {
            self.detach(id, old);
            self.counters.recolourings += 1;
            log.recolours.push(Recolour { edge: key, from: old, to: new });
        }
        self.attach(id, new);
        self.refresh(id);
        self.round_robin(key);
        self.push_violations(key);
        new
    }

    fn attach(&mut self, id: usize, c: Colour) {
        let key = self.edges[id].as_ref().unwrap().key;
        self.edges[id].as_mut().unwrap().colour = c;
        for w in [key.0, key.1] {
            let s = self.slot(w, c);
            self.degree[s] += 1;
            let at = self.cursor[s].min(self.lists[s].len());
            self.lists[s].insert(at, id);
            self.cursor[s] = at + 1;
            if self.cursor[s] >= self.lists[s].len() {
                self.cursor[s] = 0;
            }
        }
    }

    /// Withdraws the edge from its colour's lists and from every MSD.
    fn detach(&mut self, id: usize, c: Colour) {
        let rec = self.edges[id].as_ref().unwrap();
        let key = rec.key;
        let entries: Vec<Entry> = (1..=self.cfg.t)
            .map(|k| (rec.sums[c as usize - 1] - rec.sums[k as usize - 1], Reverse(id)))
            .collect();
        for w in [key.0, key.1] {
            for k in 1..=self.cfg.t {
                let s = self.slot(w, k);
                self.msd[s].remove(&entries[k as usize - 1]);
            }
            let s = self.slot(w, c);
            self.degree[s] -= 1;
            let pos = self.lists[s].iter().position(|&e| e == id).expect("edge listed");
            self.lists[s].remove(pos);
            if pos < self.cursor[s] {
                self.cursor[s] -= 1;
            }
            if self.cursor[s] >= self.lists[s].len() {
                self.cursor[s] = 0;
            }
        }
    }

    /// Recomputes an edge's stored sums and its MSD entries at both ends.
    fn refresh(&mut self, id: usize) {
        self.counters.refreshes += 1;
        let rec = self.edges[id].as_ref().unwrap();
        let (key, c) = (rec.key, rec.colour);
        let old: Vec<Entry> = (1..=self.cfg.t)
            .map(|k| (rec.sums[c as usize - 1] - rec.sums[k as usize - 1], Reverse(id)))
            .collect();
        let sums: Vec<i64> = (1..=self.cfg.t).map(|k| self.true_sum(key, k)).collect();
        for w in [key.0, key.1] {
            for k in 1..=self.cfg.t {
                let s = self.slot(w, k);
                self.msd[s].remove(&old[k as usize - 1]);
                self.msd[s].insert((sums[c as usize - 1] - sums[k as usize - 1], Reverse(id)));
            }
        }
        self.edges[id].as_mut().unwrap().sums = sums;
    }

    fn round_robin(&mut self, key: EdgeKey) {
        for w in [key.0, key.1] {
            for c in 1..=self.cfg.t {
                let s = self.slot(w, c);
                let d = self.lists[s].len();
                if d == 0 {
                    self.cursor[s] = 0;
                    continue;
                }
                let start = self.cursor[s] % d;
                let steps = self.cfg.stride.min(d as u64) as usize;
                for j in 0..steps {
                    let id = self.lists[s][(start + j) % d];
                    self.refresh(id);
                }
                self.cursor[s] = ((start as u64 + self.cfg.stride) % d as u64) as usize;
            }
        }
    }

    fn push_violations(&mut self, key: EdgeKey) {
        let eta = self.cfg.scaled_eta();
        for w in [key.0, key.1] {
            for c in 1..=self.cfg.t {
                let s = self.slot(w, c);
                if let Some(&(d, _)) = self.msd[s].last() {
                    if 2 * d > eta && self.queued.insert((w, c)) {
                        self.queue.push_back((w, c));
                    }
                }
            }
        }
    }

    /// Cursor of `LL(w, c)`, for tests of the list bookkeeping.
    pub fn cursor(&self, w: Vertex, c: Colour) -> usize {
        self.cursor[self.slot(w, c)]
    }

    /// `LL(w, c)` as edge keys in list order.
    pub fn list(&self, w: Vertex, c: Colour) -> Vec<EdgeKey> {
        self.lists[self.slot(w, c)]
            .iter()
            .map(|&id| self.edges[id].as_ref().unwrap().key)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, t: u32, delta_max: u64, eta: u64) -> SplitterConfig {
        SplitterConfig::new(n, t, delta_max, 0.5, Some(eta))
    }

    #[test]
    fn first_edge_gets_colour_one() {
        let mut s = TSplitter::new(cfg(4, 3, 6, 16));
        let log = s.insert(0, 1).unwrap();
        assert_eq!(log.placed, Some(((0, 1), 1)));
        assert!(log.recolours.is_empty());
    }

    #[test]
    fn saturated_colour_is_avoided() {
        // Δmax/t = 2: three edges at 0 tie into colour 1 and leave it one over,
        // so the fourth edge sees sums (1, 0) and takes colour 2.
        let mut s = TSplitter::new(cfg(6, 2, 4, 16));
        for v in 1..=3 {
            s.insert(0, v).unwrap();
        }
        assert_eq!(s.class_degree(0, 1), 3);
        let log = s.insert(0, 4).unwrap();
        assert_eq!(log.placed, Some(((0, 4), 2)));
    }

    #[test]
    fn deleting_only_edge_empties_everything() {
        let mut s = TSplitter::new(cfg(3, 2, 4, 16));
        s.insert(0, 1).unwrap();
        s.delete(0, 1).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.max_class_degree(), 0);
        assert_eq!(s.potential_scaled(), 0);
        assert!(s.stored_differences(0, 1).is_empty());
    }

    #[test]
    fn deleting_before_cursor_moves_it_back() {
        // Stride 4 on lists of length 4 and 3 keeps the arithmetic visible.
        let mut s = TSplitter::new(SplitterConfig { stride: 4, ..cfg(6, 1, 5, 16) });
        for v in 1..=4 {
            s.insert(0, v).unwrap();
        }
        let before = s.cursor(0, 1);
        let list = s.list(0, 1);
        assert!(before > 0, "cursor {before} list {list:?}");
        let (a, b) = list[before - 1];
        s.delete(a, b).unwrap();
        assert_eq!(s.cursor(0, 1), (before - 1 + 4) % 3);
    }

    #[test]
    fn degree_cap_rejects_before_mutation() {
        let mut s = TSplitter::new(cfg(3, 2, 1, 16));
        s.insert(0, 1).unwrap();
        assert_eq!(s.insert(0, 2), Err(SplitterError::DegreeCap { vertex: 0, cap: 1 }));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn fresh_state_has_no_violations() {
        let s = TSplitter::new(cfg(5, 4, 8, 16));
        assert!(s.check_invariant().is_empty());
        assert_eq!(s.potential_scaled(), 0);
    }
}
