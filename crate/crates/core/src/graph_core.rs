//! Simple dynamic graph with an attached proper partial edge colouring.
//!
//! Colours are `1..=palette`; a blank edge is `None`. Per-vertex colour slots
//! double as the `d_κ(v)` counters, since properness keeps them in {0, 1}.

use std::collections::BTreeMap;

use crate::error::GraphError;

pub type Vertex = usize;
pub type EdgeId = usize;
pub type Colour = u32;

/// Read access to a (possibly virtual) coloured graph.
pub trait ColourView {
    fn vertex_count(&self) -> usize;
    fn palette(&self) -> Colour;
    fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex);
    fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId>;
    fn colour(&self, e: EdgeId) -> Option<Colour>;
    fn edge_with(&self, v: Vertex, c: Colour) -> Option<EdgeId>;
    fn neighbours(&self, v: Vertex) -> Vec<Vertex>;

    fn is_free(&self, v: Vertex, c: Colour) -> bool {
        self.edge_with(v, c).is_none()
    }

    fn free_colours(&self, v: Vertex) -> Vec<Colour> {
        (1..=self.palette()).filter(|&c| self.is_free(v, c)).collect()
    }

    fn other_end(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.endpoints(e);
        if a == v {
            b
        } else {
            a
        }
    }

    /// Neighbour of `v` along its `c`-coloured edge.
    fn step(&self, v: Vertex, c: Colour) -> Option<Vertex> {
        self.edge_with(v, c).map(|e| self.other_end(e, v))
    }
}

#[derive(Debug, Clone)]
pub struct DynamicGraph {
    n: usize,
    palette: Colour,
    adj: Vec<BTreeMap<Vertex, EdgeId>>,
    ends: Vec<Option<(Vertex, Vertex)>>,
    colours: Vec<Option<Colour>>,
    slots: Vec<Option<EdgeId>>,
    blank_at: Vec<usize>,
    spare_ids: Vec<EdgeId>,
    edge_count: usize,
}

impl DynamicGraph {
    pub fn new(n: usize, palette: Colour) -> Self {
        assert!(n > 0, "graph needs at least one vertex");
        assert!(palette > 0, "palette must be non-empty");
        Self {
            n,
            palette,
            adj: vec![BTreeMap::new(); n],
            ends: Vec::new(),
            colours: Vec::new(),
            slots: vec![None; n * (palette as usize + 1)],
            blank_at: vec![0; n],
            spare_ids: Vec::new(),
            edge_count: 0,
        }
    }

    fn slot(&self, v: Vertex, c: Colour) -> usize {
        v * (self.palette as usize + 1) + c as usize
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange(v))
        }
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<EdgeId, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.adj[u].contains_key(&v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        let id = match self.spare_ids.pop() {
            Some(id) => {
                self.ends[id] = Some((u, v));
                self.colours[id] = None;
                id
            }
            None => {
                self.ends.push(Some((u, v)));
                self.colours.push(None);
                self.ends.len() - 1
            }
        };
        self.adj[u].insert(v, id);
        self.adj[v].insert(u, id);
        self.blank_at[u] += 1;
        self.blank_at[v] += 1;
        self.edge_count += 1;
        Ok(id)
    }

    /// Removes an edge, uncolouring it first if needed. Returns its last colour.
    pub fn remove_edge(&mut self, e: EdgeId) -> Result<Option<Colour>, GraphError> {
        let (u, v) = self.try_endpoints(e)?;
        let old = self.colours[e];
        self.set_colour(e, None)?;
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
        self.blank_at[u] -= 1;
        self.blank_at[v] -= 1;
        self.ends[e] = None;
        self.spare_ids.push(e);
        self.edge_count -= 1;
        Ok(old)
    }

    pub fn set_colour(&mut self, e: EdgeId, colour: Option<Colour>) -> Result<(), GraphError> {
        let (u, v) = self.try_endpoints(e)?;
        let old = self.colours[e];
        if old == colour {
            return Ok(());
        }
        if let Some(c) = colour {
            if c == 0 || c > self.palette {
                return Err(GraphError::ColourOutOfRange {
                    colour: c,
                    palette: self.palette,
                });
            }
            for w in [u, v] {
                if let Some(other) = self.slots[self.slot(w, c)] {
                    return Err(GraphError::Conflict {
                        edge: e,
                        colour: c,
                        conflict: other,
                    });
                }
            }
        }
        match old {
            Some(c) => {
                let (su, sv) = (self.slot(u, c), self.slot(v, c));
                self.slots[su] = None;
                self.slots[sv] = None;
            }
            None => {
                self.blank_at[u] -= 1;
                self.blank_at[v] -= 1;
            }
        }
        match colour {
            Some(c) => {
                let (su, sv) = (self.slot(u, c), self.slot(v, c));
                self.slots[su] = Some(e);
                self.slots[sv] = Some(e);
            }
            None => {
                self.blank_at[u] += 1;
                self.blank_at[v] += 1;
            }
        }
        self.colours[e] = colour;
        Ok(())
    }

    pub fn try_endpoints(&self, e: EdgeId) -> Result<(Vertex, Vertex), GraphError> {
        self.ends
            .get(e)
            .copied()
            .flatten()
            .ok_or(GraphError::UnknownEdge(e))
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        matches!(self.ends.get(e), Some(Some(_)))
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn colour_degree(&self, v: Vertex, c: Colour) -> usize {
        usize::from(self.slots[self.slot(v, c)].is_some())
    }

    pub fn blank_degree(&self, v: Vertex) -> usize {
        self.blank_at[v]
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn incident(&self, v: Vertex) -> impl Iterator<Item = (Vertex, EdgeId)> + '_ {
        self.adj[v].iter().map(|(&w, &e)| (w, e))
    }

    /// Live edges in increasing id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Vertex, Vertex)> + '_ {
        self.ends
            .iter()
            .enumerate()
            .filter_map(|(id, ends)| ends.map(|(u, v)| (id, u, v)))
    }

    /// Largest colour index currently in use (0 when nothing is coloured).
    pub fn max_colour_used(&self) -> Colour {
        self.colours.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn distinct_colours_used(&self) -> usize {
        let mut seen = vec![false; self.palette as usize + 1];
        for c in self.colours.iter().flatten() {
            seen[*c as usize] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }

    /// Plain edge list `(u, v, colour)` for the independent checkers.
    pub fn coloured_edges(&self) -> Vec<(Vertex, Vertex, Option<Colour>)> {
        self.edges()
            .map(|(id, u, v)| (u, v, self.colours[id]))
            .collect()
    }
}

impl ColourView for DynamicGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn palette(&self) -> Colour {
        self.palette
    }

    fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.ends[e].expect("live edge")
    }

    fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.adj.get(u)?.get(&v).copied()
    }

    fn colour(&self, e: EdgeId) -> Option<Colour> {
        self.colours[e]
    }

    fn edge_with(&self, v: Vertex, c: Colour) -> Option<EdgeId> {
        if c == 0 || c > self.palette {
            return None;
        }
        self.slots[self.slot(v, c)]
    }

    fn neighbours(&self, v: Vertex) -> Vec<Vertex> {
        self.adj[v].keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_insertion_gets_id_zero() {
        let mut g = DynamicGraph::new(3, 3);
        assert_eq!(g.add_edge(0, 1), Ok(0));
        assert_eq!((g.degree(0), g.degree(1)), (1, 1));
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        let mut g = DynamicGraph::new(3, 3);
        assert_eq!(g.add_edge(0, 0), Err(GraphError::SelfLoop(0)));
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.add_edge(1, 0), Err(GraphError::DuplicateEdge(1, 0)));
    }

    #[test]
    fn colour_and_uncolour_update_counters() {
        let mut g = DynamicGraph::new(3, 3);
        let e = g.add_edge(0, 1).unwrap();
        g.set_colour(e, Some(3)).unwrap();
        assert_eq!((g.colour_degree(0, 3), g.colour_degree(1, 3)), (1, 1));
        g.set_colour(e, None).unwrap();
        assert_eq!((g.colour_degree(0, 3), g.colour_degree(1, 3)), (0, 0));
        assert_eq!(g.blank_degree(0), 1);
    }

    #[test]
    fn conflict_names_the_clashing_edge() {
        let mut g = DynamicGraph::new(3, 3);
        let e = g.add_edge(0, 1).unwrap();
        let f = g.add_edge(1, 2).unwrap();
        g.set_colour(f, Some(3)).unwrap();
        assert_eq!(
            g.set_colour(e, Some(3)),
            Err(GraphError::Conflict {
                edge: e,
                colour: 3,
                conflict: f
            })
        );
    }

    #[test]
    fn free_colours_are_sorted() {
        let mut g = DynamicGraph::new(4, 3);
        assert_eq!(g.free_colours(3), vec![1, 2, 3]);
        let mut g4 = DynamicGraph::new(3, 4);
        let a = g4.add_edge(0, 1).unwrap();
        let b = g4.add_edge(0, 2).unwrap();
        g4.set_colour(a, Some(1)).unwrap();
        g4.set_colour(b, Some(3)).unwrap();
        assert_eq!(g4.free_colours(0), vec![2, 4]);
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.free_colours(0), vec![1, 2, 3]);
    }

    #[test]
    fn ids_are_recycled_after_removal() {
        let mut g = DynamicGraph::new(3, 2);
        let e = g.add_edge(0, 1).unwrap();
        g.set_colour(e, Some(2)).unwrap();
        assert_eq!(g.remove_edge(e), Ok(Some(2)));
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.add_edge(1, 2), Ok(e));
    }
}
