//! Spread sets of augmenting stepping processes, kept per skeleton endpoint
//! edge and neighbour.
//!
//! Only long paths (more than `ell` vertices) are stored, and only for levels
//! two and up. Everything else is derived on demand: a short path is its own
//! augmenting one-step process, and a long path at level one has none.
//!
//! A process is stored as a string of [`PathCode`]s without its start vertex;
//! the start is the `w` the entry is keyed by.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bicomp_skeleton::{alternating_walk, pair, BicompSkeleton, ChangeReport, Pair, PathId};
use crate::chains::{next_step_plan, Overlay, StepPlan};
use crate::graph_core::{Colour, ColourView, DynamicGraph, Vertex};

/// A truncated alternating path: walk `len` vertices from `anchor`, leaving
/// along `first`. `low == high` marks the fan-only terminal step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathCode {
    pub low: Colour,
    pub high: Colour,
    pub anchor: Vertex,
    pub first: Option<Colour>,
    pub len: usize,
}

impl PathCode {
    /// Code for an explicit vertex run under colouring `g`.
    pub fn of_walk<G: ColourView>(g: &G, p: Pair, vertices: &[Vertex]) -> Option<PathCode> {
        let first = match vertices {
            [] => return None,
            [_] => None,
            [a, b, ..] => Some(g.colour(g.edge_between(*a, *b)?)?),
        };
        Some(PathCode {
            low: p.0,
            high: p.1,
            anchor: vertices[0],
            first,
            len: vertices.len(),
        })
    }

    /// Re-walks the code; `None` when the colouring no longer supports it.
    pub fn vertices<G: ColourView>(&self, g: &G) -> Option<Vec<Vertex>> {
        match self.first {
            None => (self.len == 1).then(|| vec![self.anchor]),
            Some(f) => {
                if f != self.low && f != self.high {
                    return None;
                }
                let other = if f == self.low { self.high } else { self.low };
                let w = alternating_walk(g, self.anchor, f, other, self.len);
                (w.len() == self.len).then_some(w)
            }
        }
    }

    pub fn pair(&self) -> Pair {
        (self.low, self.high)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SteppingProcess {
    pub start: Vertex,
    pub paths: Vec<PathCode>,
    pub augmenting: bool,
}

pub type ProcessString = Vec<PathCode>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepParams {
    pub ell: usize,
    pub a: usize,
    pub levels: usize,
}

impl StepParams {
    pub fn points_needed(&self) -> usize {
        self.a.div_ceil(2).max(1)
    }
    pub fn second_threshold(&self) -> usize {
        self.a.div_ceil(8).max(1)
    }
    pub fn third_threshold(&self) -> usize {
        (self.a * self.a).div_ceil(32).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockLevel {
    One,
    Two,
    Three,
}

impl BlockLevel {
    fn of_step(step: usize) -> Self {
        match step {
            0..=2 => BlockLevel::One,
            3 => BlockLevel::Two,
            _ => BlockLevel::Three,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockVerdict {
    pub blocked: bool,
    pub counts: [usize; 3],
    /// Strings of the candidate set that stay valid behind the prefix.
    pub usable: Vec<ProcessString>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SetStats {
    pub rebuilds: u64,
    pub marks: u64,
    pub nonempty: u64,
}

type Entry = BTreeMap<Vertex, Vec<Vec<ProcessString>>>;

/// Identity of the maximal path a code lies on, for the distinctness rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum MaxKey {
    Stored(PathId),
    Lone(Vertex, Pair),
}

fn max_key(sk: &BicompSkeleton, code: &PathCode) -> MaxKey {
    match sk.component_at(code.anchor, code.pair()) {
        Some(id) if code.low != code.high => MaxKey::Stored(id),
        _ => MaxKey::Lone(code.anchor, code.pair()),
    }
}

pub fn two_hop(g: &DynamicGraph, v: Vertex) -> Vec<Vertex> {
    let mut out = vec![v];
    for (w, _) in g.incident(v) {
        out.push(w);
        for (x, _) in g.incident(w) {
            out.push(x);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Data for one extension point: the first `m` vertices of a long path.
#[derive(Debug, Clone)]
struct PointData {
    centre: Vertex,
    plan: Option<StepPlan>,
    candidates: CandidateSource,
}

#[derive(Debug, Clone)]
enum CandidateSource {
    None,
    Single(ProcessString),
    Stored { y: Vertex, path: PathId },
}

/// Per-path data shared by every neighbour and level during one repair pass.
#[derive(Debug, Clone)]
struct PathData {
    pair: Pair,
    from_y: Vec<Vertex>,
    position: HashMap<Vertex, usize>,
    near_from: HashMap<Vertex, usize>,
    points: Vec<PointData>,
    key: MaxKey,
}

#[derive(Debug, Clone)]
pub struct SteppingSets {
    params: StepParams,
    store: HashMap<(PathId, Vertex), Entry>,
    marks: HashMap<(PathId, Vertex), usize>,
    stats: SetStats,
}

impl SteppingSets {
    pub fn new(params: StepParams) -> Self {
        assert!(params.ell >= 1 && params.levels >= 1);
        SteppingSets {
            params,
            store: HashMap::new(),
            marks: HashMap::new(),
            stats: SetStats::default(),
        }
    }

    pub fn params(&self) -> StepParams {
        self.params
    }

    pub fn stats(&self) -> SetStats {
        self.stats
    }

    pub fn pending_marks(&self) -> &HashMap<(PathId, Vertex), usize> {
        &self.marks
    }

    fn is_long(&self, sk: &BicompSkeleton, id: PathId) -> bool {
        sk.component(id).is_some_and(|c| c.is_path() && c.seq.len() > self.params.ell)
    }

    fn put_mark(&mut self, sk: &BicompSkeleton, id: PathId, y: Vertex, level: usize) {
        if !self.is_long(sk, id) {
            return;
        }
        self.stats.marks += 1;
        let m = self.marks.entry((id, y)).or_insert(level);
        *m = (*m).min(level);
    }

    /// Marks every entry a change around `seeds` may have invalidated.
    /// Returns the frontier sizes per level.
    pub fn mark_dirty(
        &mut self,
        g: &DynamicGraph,
        sk: &BicompSkeleton,
        seeds: &[Vertex],
        report: &ChangeReport,
    ) -> Vec<usize> {
        for r in &report.removed {
            self.store.remove(&(r.id, r.ends.0));
            self.store.remove(&(r.id, r.ends.1));
            self.marks.remove(&(r.id, r.ends.0));
            self.marks.remove(&(r.id, r.ends.1));
        }
        let mut frontier: HashSet<Vertex> = HashSet::new();
        for &s in seeds {
            frontier.extend(two_hop(g, s));
        }
        for r in &report.removed {
            frontier.insert(r.ends.0);
            frontier.insert(r.ends.1);
        }
        for &id in &report.added {
            if let Some((a, b)) = sk.component(id).and_then(|c| c.ends()) {
                frontier.insert(a);
                frontier.insert(b);
                self.put_mark(sk, id, a, 1);
                self.put_mark(sk, id, b, 1);
            }
        }
        let mut sizes = vec![frontier.len()];
        let mut seen: HashSet<Vertex> = frontier.clone();
        let mut level_set: Vec<Vertex> = frontier.into_iter().collect();
        level_set.sort_unstable();
        for &x in &level_set {
            for &id in sk.paths_ending_at(x) {
                self.put_mark(sk, id, x, 1);
            }
        }
        for level in 1..self.params.levels {
            let mut via_neighbours: HashSet<Vertex> = HashSet::new();
            for &x in &level_set {
                for (w, e) in g.incident(x) {
                    if g.colour(e).is_some() {
                        via_neighbours.insert(w);
                    }
                }
            }
            let mut paths: HashSet<PathId> = HashSet::new();
            for x in via_neighbours {
                paths.extend(sk.paths_near(x).iter().copied());
            }
            let mut next: Vec<Vertex> = Vec::new();
            let mut sorted: Vec<PathId> = paths.into_iter().collect();
            sorted.sort_unstable();
            for id in sorted {
                let (a, b) = sk.component(id).and_then(|c| c.ends()).expect("indexed path");
                for end in [a, b] {
                    self.put_mark(sk, id, end, level + 1);
                    if seen.insert(end) {
                        next.push(end);
                    }
                }
            }
            sizes.push(next.len());
            if next.is_empty() {
                break;
            }
            level_set = next;
        }
        sizes
    }

    /// Rebuilds every marked entry, lowest level first, then clears the marks.
    pub fn repair_all(&mut self, g: &DynamicGraph, sk: &BicompSkeleton) {
        if self.marks.is_empty() {
            return;
        }
        let mut marked: Vec<((PathId, Vertex), usize)> = self.marks.drain().collect();
        marked.sort_unstable();
        let ell = self.params.ell;
        let mut cache: HashMap<(PathId, Vertex), PathData> = HashMap::new();
        for level in 2..=self.params.levels {
            for &((id, y), m) in &marked {
                if m > level || !self.is_long(sk, id) {
                    continue;
                }
                let data = cache.entry((id, y)).or_insert_with(|| path_data(g, sk, id, y, ell));
                self.rebuild_entry(g, sk, level, id, y, data);
            }
        }
    }

    /// Replaces the stored state by a from-scratch build over every long path.
    pub fn rebuild_everything(&mut self, g: &DynamicGraph, sk: &BicompSkeleton) {
        self.store.clear();
        self.marks.clear();
        let mut ends: Vec<(PathId, Vertex)> = Vec::new();
        for v in 0..g.vertex_count() {
            for &id in sk.paths_ending_at(v) {
                if self.is_long(sk, id) {
                    ends.push((id, v));
                }
            }
        }
        ends.sort_unstable();
        for (id, y) in ends {
            self.marks.insert((id, y), 1);
        }
        self.repair_all(g, sk);
    }

    fn rebuild_entry(&mut self, g: &DynamicGraph, sk: &BicompSkeleton, level: usize, id: PathId, y: Vertex, data: &PathData) {
        let neighbours: Vec<Vertex> = g.incident(y).map(|(w, _)| w).collect();
        let levels = self.params.levels;
        let mut built: Vec<(Vertex, Vec<ProcessString>)> = Vec::new();
        for &w in &neighbours {
            self.stats.rebuilds += 1;
            let set = self.fuse(g, sk, level, data, w);
            if !set.is_empty() {
                self.stats.nonempty += 1;
            }
            built.push((w, set));
        }
        let entry = self.store.entry((id, y)).or_default();
        entry.retain(|w, _| neighbours.contains(w));
        for (w, set) in built {
            let slots = entry.entry(w).or_insert_with(|| vec![Vec::new(); levels - 1]);
            slots[level - 2] = set;
        }
    }

    /// Stored or derived set for the path `id` entered at endpoint `y`, from `w`.
    pub fn set_for(&self, g: &DynamicGraph, sk: &BicompSkeleton, level: usize, id: PathId, y: Vertex, w: Vertex) -> Vec<ProcessString> {
        let Some(comp) = sk.component(id) else { return Vec::new() };
        if comp.seq.len() <= self.params.ell {
            let seq = comp.from_end(y);
            return PathCode::of_walk(g, comp.pair, &seq).map(|c| vec![vec![c]]).unwrap_or_default();
        }
        if level <= 1 {
            return Vec::new();
        }
        self.stored(id, y, w, level).to_vec()
    }

    fn stored(&self, id: PathId, y: Vertex, w: Vertex, level: usize) -> &[ProcessString] {
        self.store
            .get(&(id, y))
            .and_then(|e| e.get(&w))
            .and_then(|slots| slots.get(level - 2))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Every stored `(start, string, level)` triple, for auditing.
    pub fn all_strings(&self) -> Vec<(Vertex, ProcessString, usize)> {
        let mut keys: Vec<&(PathId, Vertex)> = self.store.keys().collect();
        keys.sort_unstable();
        let mut out = Vec::new();
        for k in keys {
            for (&w, slots) in &self.store[k] {
                for (i, set) in slots.iter().enumerate() {
                    for s in set {
                        out.push((w, s.clone(), i + 2));
                    }
                }
            }
        }
        out
    }

    /// Every stored set with its key, for shape and emptiness audits.
    pub fn all_sets(&self) -> BTreeMap<(PathId, Vertex, Vertex, usize), Vec<ProcessString>> {
        let mut out = BTreeMap::new();
        for (&(id, y), entry) in &self.store {
            for (&w, slots) in entry {
                for (i, set) in slots.iter().enumerate() {
                    out.insert((id, y, w, i + 2), set.clone());
                }
            }
        }
        out
    }

    /// Top-level lookup for a blank edge at `w` whose first path starts at `y`.
    pub fn lookup_augmenting(&self, g: &DynamicGraph, sk: &BicompSkeleton, w: Vertex, y: Vertex, p: Pair) -> Option<SteppingProcess> {
        let id = sk.path_from(y, p)?;
        let set = self.set_for(g, sk, self.params.levels, id, y, w);
        set.into_iter().next().map(|paths| SteppingProcess {
            start: w,
            paths,
            augmenting: true,
        })
    }

    /// Blockedness of extension point `m` (1-based) of `data` for start `w`.
    pub fn is_blocked(&self, g: &DynamicGraph, sk: &BicompSkeleton, level: usize, data_key: (PathId, Vertex), m: usize, w: Vertex) -> BlockVerdict {
        let data = path_data(g, sk, data_key.0, data_key.1, self.params.ell);
        let near_w: HashSet<Vertex> = two_hop(g, w).into_iter().collect();
        self.block_verdict(g, sk, level, &data, m, &near_w)
    }

    fn candidates(&self, level: usize, point: &PointData) -> Vec<ProcessString> {
        match &point.candidates {
            CandidateSource::None => Vec::new(),
            CandidateSource::Single(s) => vec![s.clone()],
            CandidateSource::Stored { y, path } => {
                if level < 3 {
                    Vec::new()
                } else {
                    self.stored(*path, *y, point.centre, level - 1).to_vec()
                }
            }
        }
    }

    fn block_verdict(
        &self,
        g: &DynamicGraph,
        sk: &BicompSkeleton,
        level: usize,
        data: &PathData,
        m: usize,
        near_w: &HashSet<Vertex>,
    ) -> BlockVerdict {
        let point = &data.points[m - 1];
        let mut verdict = BlockVerdict::default();
        for s in self.candidates(level, point) {
            match check_behind(g, sk, data, m, point, near_w, &s) {
                Ok(()) => verdict.usable.push(s),
                Err(step) => verdict.counts[BlockLevel::of_step(step) as usize] += 1,
            }
        }
        verdict.blocked = verdict.counts[0] >= 1
            || verdict.counts[1] >= self.params.second_threshold()
            || verdict.counts[2] >= self.params.third_threshold();
        verdict
    }

    fn fuse(&self, g: &DynamicGraph, sk: &BicompSkeleton, level: usize, data: &PathData, w: Vertex) -> Vec<ProcessString> {
        let near_w: HashSet<Vertex> = two_hop(g, w).into_iter().collect();
        let need = self.params.points_needed();
        let mut out = Vec::new();
        for m in 1..=data.points.len() {
            let v = self.block_verdict(g, sk, level, data, m, &near_w);
            if v.blocked {
                continue;
            }
            if let Some(best) = v.usable.into_iter().min() {
                let head = PathCode::of_walk(g, data.pair, &data.from_y[..m]).expect("live path");
                let mut s = vec![head];
                s.extend(best);
                out.push(s);
                if out.len() == need {
                    return out;
                }
            }
        }
        Vec::new()
    }
}

fn path_data(g: &DynamicGraph, sk: &BicompSkeleton, id: PathId, y: Vertex, ell: usize) -> PathData {
    let comp = sk.component(id).expect("live path");
    let from_y = comp.from_end(y);
    let reach = ell.min(from_y.len() - 1);
    let mut position = HashMap::new();
    let mut near_from = HashMap::new();
    for (i, &x) in from_y.iter().take(reach).enumerate() {
        position.insert(x, i);
        for z in two_hop(g, x) {
            near_from.entry(z).or_insert(i);
        }
    }
    let points = (1..=reach).map(|m| point_data(g, sk, comp.pair, &from_y, m, ell)).collect();
    PathData {
        pair: comp.pair,
        key: MaxKey::Stored(id),
        from_y,
        position,
        near_from,
        points,
    }
}

/// The extension at the end of the first `m` vertices, on the colouring with
/// the next edge blanked and the prefix's two colours swapped.
fn point_data(g: &DynamicGraph, sk: &BicompSkeleton, p: Pair, from_y: &[Vertex], m: usize, ell: usize) -> PointData {
    let centre = from_y[m - 1];
    let next = from_y[m];
    let none = |plan| PointData {
        centre,
        plan,
        candidates: CandidateSource::None,
    };
    let Some(leave) = g.edge_between(centre, next) else { return none(None) };
    let Some(k2) = g.colour(leave) else { return none(None) };
    let k1 = if k2 == p.0 { p.1 } else { p.0 };
    let mut o = Overlay::new(g);
    o.paint(leave, None);
    let prefix: Vec<_> = from_y[..m]
        .windows(2)
        .map(|w| {
            let e = g.edge_between(w[0], w[1]).expect("path edge");
            let c = g.colour(e).expect("coloured path edge");
            (e, if c == k1 { k2 } else { k1 })
        })
        .collect();
    for &(e, _) in &prefix {
        o.paint(e, None);
    }
    for &(e, c) in &prefix {
        o.paint(e, Some(c));
    }
    let Ok(plan) = next_step_plan(&o, centre, next, k1, k2) else { return none(None) };
    let full = plan.realise(None);
    let candidates = if full.path.len() <= ell {
        let p2 = pair(full.pair.0, full.pair.1);
        match PathCode::of_walk(g, p2, &full.path) {
            Some(code) => CandidateSource::Single(vec![code]),
            None => CandidateSource::None,
        }
    } else {
        let trunc = plan.realise(Some(ell));
        let y2 = trunc.path[0];
        match sk.path_from(y2, trunc.pair) {
            Some(path) => CandidateSource::Stored { y: y2, path },
            None => CandidateSource::None,
        }
    };
    PointData {
        centre,
        plan: Some(plan),
        candidates,
    }
}

/// Checks the constraints that appear when `s` is placed behind the first `m`
/// vertices of `data`. `s` itself is assumed valid as a process from the
/// extension point. Returns the first violating step (1-based, the prefix is
/// step 1).
fn check_behind(
    g: &DynamicGraph,
    sk: &BicompSkeleton,
    data: &PathData,
    m: usize,
    point: &PointData,
    near_w: &HashSet<Vertex>,
    s: &[PathCode],
) -> Result<(), usize> {
    let plan = point.plan.as_ref().ok_or(2usize)?;
    let in_prefix = |x: &Vertex| data.position.get(x).is_some_and(|&i| i < m);
    let near_prefix = |x: &Vertex| data.near_from.get(x).is_some_and(|&i| i < m);
    if near_w.contains(&point.centre) {
        return Err(2);
    }
    let mut prev_last = point.centre;
    for (k, code) in s.iter().enumerate() {
        let step = k + 2;
        let verts = code.vertices(g).ok_or(step)?;
        if k == 0 {
            let ext = plan.realise(Some(code.len));
            let (path, _) = ext.process_path();
            if path != verts.as_slice() || ext.pair != code.pair() {
                return Err(step);
            }
            let prefix_edges: HashSet<(Vertex, Vertex)> = data.from_y[..m]
                .windows(2)
                .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
                .collect();
            if verts
                .windows(2)
                .any(|w| prefix_edges.contains(&(w[0].min(w[1]), w[0].max(w[1]))))
            {
                return Err(step);
            }
        } else {
            if near_w.contains(&prev_last) || near_prefix(&prev_last) {
                return Err(step);
            }
            if verts.iter().any(|x| in_prefix(x) || near_prefix(x)) {
                return Err(step);
            }
        }
        if verts.iter().any(|x| near_w.contains(x)) {
            return Err(step);
        }
        if code.low != code.high && max_key(sk, code) == data.key {
            return Err(step);
        }
        prev_last = *verts.last().unwrap();
    }
    Ok(())
}
