//! Per colour pair decomposition into alternating paths and even cycles, and
//! the skeleton relations built on top of it.
//!
//! Each component is an explicit vertex sequence. A cycle keeps its closing
//! edge in a slot, so the sequence is always a path. Components get a fresh
//! id whenever they change, which makes "removed" and "added" well defined
//! for the change reports.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::SkeletonError;
use crate::graph_core::{Colour, ColourView, Vertex};
use crate::oracle::{canonical_path, CanonicalSkeleton};

pub type PathId = u64;
pub type Pair = (Colour, Colour);

pub fn pair(a: Colour, b: Colour) -> Pair {
    (a.min(b), a.max(b))
}

/// Alternating walk from `start`, leaving along `first`, capped at `max_vertices`.
pub fn alternating_walk<G: ColourView>(
    g: &G,
    start: Vertex,
    first: Colour,
    other: Colour,
    max_vertices: usize,
) -> Vec<Vertex> {
    let mut out = vec![start];
    let (mut at, mut want) = (start, first);
    while out.len() < max_vertices {
        match g.step(at, want) {
            Some(next) if next != start => {
                out.push(next);
                at = next;
                want = if want == first { other } else { first };
            }
            _ => break,
        }
    }
    out
}

/// Maximal `(k1, k2)` walk from `v` cut after `limit` edges. An interior start
/// leaves along `k1`.
pub fn maximal_path_walk<G: ColourView>(g: &G, v: Vertex, k1: Colour, k2: Colour, limit: usize) -> Vec<Vertex> {
    let first = if g.is_free(v, k1) { k2 } else { k1 };
    let other = if first == k1 { k2 } else { k1 };
    alternating_walk(g, v, first, other, limit.saturating_add(1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub pair: Pair,
    pub seq: Vec<Vertex>,
    pub slot: Option<(Vertex, Vertex)>,
}

impl Component {
    pub fn is_path(&self) -> bool {
        self.slot.is_none()
    }

    pub fn ends(&self) -> Option<(Vertex, Vertex)> {
        self.is_path().then(|| (self.seq[0], *self.seq.last().unwrap()))
    }

    /// Vertices of the path starting from endpoint `y`.
    pub fn from_end(&self, y: Vertex) -> Vec<Vertex> {
        let mut s = self.seq.clone();
        if s[0] != y {
            s.reverse();
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedPath {
    pub id: PathId,
    pub pair: Pair,
    pub ends: (Vertex, Vertex),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChangeReport {
    pub removed: Vec<RemovedPath>,
    pub added: Vec<PathId>,
}

#[derive(Debug, Clone)]
pub struct BicompSkeleton {
    palette: Colour,
    ell: usize,
    next_id: PathId,
    comps: HashMap<PathId, Component>,
    comp_of: HashMap<(Vertex, Pair), PathId>,
    y1_out: Vec<BTreeSet<PathId>>,
    y3_in: Vec<BTreeSet<PathId>>,
}

impl BicompSkeleton {
    pub fn new(n: usize, palette: Colour, ell: usize) -> Self {
        BicompSkeleton {
            palette,
            ell,
            next_id: 0,
            comps: HashMap::new(),
            comp_of: HashMap::new(),
            y1_out: vec![BTreeSet::new(); n],
            y3_in: vec![BTreeSet::new(); n],
        }
    }

    /// Skeleton of an existing colouring, built edge by edge.
    pub fn from_view<G: ColourView>(g: &G, edges: &[(Vertex, Vertex)], ell: usize) -> Self {
        let mut s = BicompSkeleton::new(g.vertex_count(), g.palette(), ell);
        for &(u, v) in edges {
            let e = g.edge_between(u, v).expect("listed edge");
            if let Some(c) = g.colour(e) {
                s.colour(u, v, c).expect("proper input");
            }
        }
        s
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn component(&self, id: PathId) -> Option<&Component> {
        self.comps.get(&id)
    }

    pub fn component_at(&self, v: Vertex, p: Pair) -> Option<PathId> {
        self.comp_of.get(&(v, p)).copied()
    }

    /// Path id of the maximal path with endpoint `y` in colour pair `p`.
    pub fn path_from(&self, y: Vertex, p: Pair) -> Option<PathId> {
        let id = self.component_at(y, p)?;
        let c = &self.comps[&id];
        let (a, b) = c.ends()?;
        (a == y || b == y).then_some(id)
    }

    pub fn paths_ending_at(&self, v: Vertex) -> &BTreeSet<PathId> {
        &self.y1_out[v]
    }

    pub fn paths_near(&self, v: Vertex) -> &BTreeSet<PathId> {
        &self.y3_in[v]
    }

    pub fn path_count(&self) -> usize {
        self.comps.values().filter(|c| c.is_path()).count()
    }

    fn near_vertices(&self, c: &Component) -> Vec<Vertex> {
        let len = c.seq.len();
        if len <= 2 * self.ell {
            return c.seq.clone();
        }
        let mut v = c.seq[..self.ell].to_vec();
        v.extend_from_slice(&c.seq[len - self.ell..]);
        v
    }

    fn insert_comp(&mut self, comp: Component, report: &mut ChangeReport) -> PathId {
        let id = self.next_id;
        self.next_id += 1;
        for &x in &comp.seq {
            self.comp_of.insert((x, comp.pair), id);
        }
        if let Some((a, b)) = comp.ends() {
            self.y1_out[a].insert(id);
            self.y1_out[b].insert(id);
            for x in self.near_vertices(&comp) {
                self.y3_in[x].insert(id);
            }
            report.added.push(id);
        }
        self.comps.insert(id, comp);
        id
    }

    fn remove_comp(&mut self, id: PathId, report: &mut ChangeReport) -> Component {
        let comp = self.comps.remove(&id).expect("live component");
        for &x in &comp.seq {
            self.comp_of.remove(&(x, comp.pair));
        }
        if let Some((a, b)) = comp.ends() {
            self.y1_out[a].remove(&id);
            self.y1_out[b].remove(&id);
            for x in self.near_vertices(&comp) {
                self.y3_in[x].remove(&id);
            }
            report.removed.push(RemovedPath {
                id,
                pair: comp.pair,
                ends: (a, b),
            });
        }
        comp
    }

    /// Records that `uv` just received colour `kappa`.
    pub fn colour(&mut self, u: Vertex, v: Vertex, kappa: Colour) -> Result<ChangeReport, SkeletonError> {
        let mut report = ChangeReport::default();
        for other in (1..=self.palette).filter(|&c| c != kappa) {
            let p = pair(kappa, other);
            let cu = self.component_at(u, p);
            let cv = self.component_at(v, p);
            if cu.is_some() && cu == cv {
                let mut comp = self.remove_comp(cu.unwrap(), &mut report);
                let bad = SkeletonError::NotEndpoint { vertex: u, pair: p };
                let (a, b) = comp.ends().ok_or(bad.clone())?;
                if !((a == u && b == v) || (a == v && b == u)) {
                    return Err(bad);
                }
                comp.slot = Some((u, v));
                self.insert_comp(comp, &mut report);
                continue;
            }
            let mut left = match cu {
                Some(id) => self.remove_comp(id, &mut report).from_end(u),
                None => vec![u],
            };
            left.reverse();
            let right = match cv {
                Some(id) => self.remove_comp(id, &mut report).from_end(v),
                None => vec![v],
            };
            if left.last() != Some(&u) {
                return Err(SkeletonError::NotEndpoint { vertex: u, pair: p });
            }
            if right.first() != Some(&v) {
                return Err(SkeletonError::NotEndpoint { vertex: v, pair: p });
            }
            left.extend(right);
            self.insert_comp(
                Component {
                    pair: p,
                    seq: left,
                    slot: None,
                },
                &mut report,
            );
        }
        Ok(report)
    }

    /// Records that `uv`, previously coloured `kappa`, is now blank.
    pub fn uncolour(&mut self, u: Vertex, v: Vertex, kappa: Colour) -> Result<ChangeReport, SkeletonError> {
        let mut report = ChangeReport::default();
        for other in (1..=self.palette).filter(|&c| c != kappa) {
            let p = pair(kappa, other);
            let id = self.component_at(u, p).ok_or(SkeletonError::MissingEdge(u, v))?;
            let comp = self.remove_comp(id, &mut report);
            let is_edge = |a: Vertex, b: Vertex| (a == u && b == v) || (a == v && b == u);
            if let Some((a, b)) = comp.slot {
                let seq = if is_edge(a, b) {
                    comp.seq
                } else {
                    let i = comp
                        .seq
                        .windows(2)
                        .position(|w| is_edge(w[0], w[1]))
                        .ok_or(SkeletonError::MissingEdge(u, v))?;
                    let mut s = comp.seq[i + 1..].to_vec();
                    s.extend_from_slice(&comp.seq[..=i]);
                    s
                };
                self.insert_comp(Component { pair: p, seq, slot: None }, &mut report);
                continue;
            }
            let i = comp
                .seq
                .windows(2)
                .position(|w| is_edge(w[0], w[1]))
                .ok_or(SkeletonError::MissingEdge(u, v))?;
            for piece in [&comp.seq[..=i], &comp.seq[i + 1..]] {
                if piece.len() > 1 {
                    self.insert_comp(
                        Component {
                            pair: p,
                            seq: piece.to_vec(),
                            slot: None,
                        },
                        &mut report,
                    );
                }
            }
        }
        Ok(report)
    }

    /// Per-pair component count (isolated vertices excluded).
    pub fn component_counts(&self) -> BTreeMap<Pair, usize> {
        let mut out = BTreeMap::new();
        for c in self.comps.values() {
            *out.entry(c.pair).or_insert(0) += 1;
        }
        out
    }

    /// Export in the oracle's canonical form. Neighbour relations come from `g`.
    pub fn canonical<G: ColourView>(&self, g: &G) -> CanonicalSkeleton {
        let mut sk = CanonicalSkeleton::default();
        for v in 0..g.vertex_count() {
            for w in g.neighbours(v) {
                let e = g.edge_between(v, w).unwrap();
                if g.colour(e).is_some() {
                    sk.neighbour_edges.insert((v, w));
                }
            }
        }
        let key = |c: &Component| canonical_path(c.pair.0, c.pair.1, c.seq.clone());
        for (v, ids) in self.y1_out.iter().enumerate() {
            for id in ids {
                sk.endpoint_edges.insert((v, key(&self.comps[id])));
            }
        }
        for (v, ids) in self.y3_in.iter().enumerate() {
            for id in ids {
                sk.near_edges.insert((key(&self.comps[id]), v));
            }
        }
        for c in self.comps.values().filter(|c| c.is_path()) {
            sk.paths.insert(key(c));
        }
        sk.components = self.component_counts();
        sk
    }

    /// Largest in-degree and largest out-degree of a vertex node.
    pub fn degree_extremes<G: ColourView>(&self, g: &G) -> (usize, usize) {
        let mut max_in = 2;
        let mut max_out = 0;
        for v in 0..g.vertex_count() {
            let coloured = g
                .neighbours(v)
                .into_iter()
                .filter(|&w| g.colour(g.edge_between(v, w).unwrap()).is_some())
                .count();
            max_in = max_in.max(self.y3_in[v].len() + coloured);
            max_out = max_out.max(self.y1_out[v].len() + coloured);
        }
        (max_in, max_out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::DynamicGraph;

    #[test]
    fn isolated_vertex_walk_is_itself() {
        let g = DynamicGraph::new(3, 3);
        assert_eq!(maximal_path_walk(&g, 1, 1, 2, 5), vec![1]);
    }

    #[test]
    fn walk_limit_counts_edges() {
        let mut g = DynamicGraph::new(6, 2);
        for i in 0..5 {
            let e = g.add_edge(i, i + 1).unwrap();
            g.set_colour(e, Some(1 + (i % 2) as Colour)).unwrap();
        }
        assert_eq!(maximal_path_walk(&g, 0, 1, 2, 3), vec![0, 1, 2, 3]);
    }

    #[test]
    fn first_colour_adds_one_path_per_pair() {
        let mut s = BicompSkeleton::new(2, 3, 4);
        let r = s.colour(0, 1, 2).unwrap();
        assert!(r.removed.is_empty());
        assert_eq!(r.added.len(), 2);
        assert_eq!(s.paths_ending_at(0).len(), 2);
    }

    #[test]
    fn uncolouring_a_lone_edge_removes_its_paths() {
        let mut s = BicompSkeleton::new(2, 3, 4);
        s.colour(0, 1, 2).unwrap();
        let r = s.uncolour(0, 1, 2).unwrap();
        assert_eq!((r.removed.len(), r.added.len()), (2, 0));
        assert_eq!(s.path_count(), 0);
    }
}
