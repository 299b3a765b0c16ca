//! The (Δmax+1)-colourer for a single low-degree graph.
//!
//! Insertions add the edge blank, find an augmenting chain on it, shift the
//! chain and colour the final blank edge. Every colour change goes through
//! the skeleton so the stepping sets stay in sync; the sets are repaired once
//! per public update.

use serde::Serialize;

use crate::bicomp_skeleton::{BicompSkeleton, ChangeReport};
use crate::chains::{common_free, find_augmenting_chain, Chain, ChainSource};
use crate::error::{ChainError, PipelineError};
use crate::graph_core::{Colour, ColourView, DynamicGraph, EdgeId, Vertex};
use crate::oracle::{replay_process, verify_partial_proper};
use crate::stepping_sets::{StepParams, SteppingSets};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColourerConfig {
    pub n: usize,
    pub delta_max: usize,
    pub ell: usize,
    pub a: usize,
    pub levels: usize,
    /// Replays every looked-up process and checks properness after each shift.
    pub audit: bool,
}

impl ColourerConfig {
    pub fn palette(&self) -> Colour {
        (self.delta_max + 1) as Colour
    }

    /// Whether any maximal path can exceed the step length, so the skeleton is needed.
    pub fn needs_skeleton(&self) -> bool {
        self.ell + 1 < self.n
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ColourerCounters {
    pub insertions: u64,
    pub deletions: u64,
    pub recolourings: u64,
    pub uncolourings: u64,
    pub short_chains: u64,
    pub lookups: u64,
    pub lookup_hits: u64,
    pub fallbacks: u64,
    pub chain_edges: u64,
}

#[derive(Debug, Clone)]
struct Stepping {
    skeleton: BicompSkeleton,
    sets: SteppingSets,
}

#[derive(Debug, Clone)]
pub struct DirectColourer {
    config: ColourerConfig,
    graph: DynamicGraph,
    stepping: Option<Stepping>,
    counters: ColourerCounters,
}

impl DirectColourer {
    pub fn new(config: ColourerConfig) -> Self {
        let graph = DynamicGraph::new(config.n, config.palette());
        let stepping = config.needs_skeleton().then(|| Stepping {
            skeleton: BicompSkeleton::new(config.n, config.palette(), config.ell),
            sets: SteppingSets::new(StepParams {
                ell: config.ell,
                a: config.a,
                levels: config.levels,
            }),
        });
        DirectColourer {
            config,
            graph,
            stepping,
            counters: ColourerCounters::default(),
        }
    }

    pub fn config(&self) -> &ColourerConfig {
        &self.config
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    pub fn counters(&self) -> ColourerCounters {
        self.counters
    }

    pub fn skeleton(&self) -> Option<&BicompSkeleton> {
        self.stepping.as_ref().map(|s| &s.skeleton)
    }

    pub fn sets(&self) -> Option<&SteppingSets> {
        self.stepping.as_ref().map(|s| &s.sets)
    }

    pub fn colour_of(&self, u: Vertex, v: Vertex) -> Option<Colour> {
        self.graph.edge_between(u, v).and_then(|e| self.graph.colour(e))
    }

    pub fn insert(&mut self, u: Vertex, v: Vertex) -> Result<(), PipelineError> {
        for w in [u, v] {
            if w < self.config.n && self.graph.degree(w) >= self.config.delta_max {
                return Err(PipelineError::DegreeCap {
                    vertex: w,
                    degree: self.graph.degree(w) + 1,
                    cap: self.config.delta_max,
                });
            }
        }
        let e = self.graph.add_edge(u, v)?;
        self.counters.insertions += 1;
        self.mark(&[u, v], &ChangeReport::default());
        self.repair();
        let chain = self.find_chain(e, u)?;
        self.counters.chain_edges += chain.len() as u64;
        self.apply(&chain)?;
        self.repair();
        Ok(())
    }

    pub fn delete(&mut self, u: Vertex, v: Vertex) -> Result<(), PipelineError> {
        let e = self
            .graph
            .edge_between(u, v)
            .ok_or(crate::error::GraphError::MissingEdge(u, v))?;
        if self.graph.colour(e).is_some() {
            self.set(e, None)?;
            self.counters.uncolourings += 1;
        }
        self.mark(&[u, v], &ChangeReport::default());
        self.graph.remove_edge(e)?;
        self.counters.deletions += 1;
        self.repair();
        Ok(())
    }

    fn find_chain(&mut self, e: EdgeId, centre: Vertex) -> Result<Chain, PipelineError> {
        let ell = self.config.ell;
        let graph = &self.graph;
        let stepping = self.stepping.as_ref();
        let mut lookups = 0;
        let mut audit_failure = None;
        let audit = self.config.audit;
        let found = find_augmenting_chain(graph, e, centre, ell, |fan, pair| {
            let st = stepping?;
            lookups += 1;
            let p = st
                .sets
                .lookup_augmenting(graph, &st.skeleton, centre, fan.last_leaf(), pair)?;
            if audit {
                let verdict = replay_process(
                    graph.vertex_count(),
                    graph.palette(),
                    &graph.coloured_edges(),
                    &p,
                    ell,
                );
                if !verdict.passed() {
                    audit_failure = Some(format!("stored process failed replay: {verdict:?}"));
                }
            }
            Some(p)
        });
        self.counters.lookups += lookups;
        if let Some(msg) = audit_failure {
            return Err(PipelineError::Internal(msg));
        }
        let (chain, source) = found.map_err(|err| match err {
            ChainError::NotFound => PipelineError::Internal("no augmenting chain on a blank edge".into()),
            other => other.into(),
        })?;
        match source {
            ChainSource::Short => self.counters.short_chains += 1,
            ChainSource::Lookup => self.counters.lookup_hits += 1,
            ChainSource::Fallback => self.counters.fallbacks += 1,
        }
        Ok(chain)
    }

    /// Shifts the whole chain, then colours its final edge.
    fn apply(&mut self, chain: &Chain) -> Result<(), PipelineError> {
        for w in chain.edges.windows(2) {
            let c = self.graph.colour(w[1]);
            self.set(w[1], None)?;
            self.set(w[0], c)?;
            self.counters.recolourings += 1;
            if self.config.audit {
                self.audit_proper()?;
            }
        }
        let last = *chain.edges.last().expect("chain has the blank edge");
        let c = common_free(&self.graph, last)
            .ok_or_else(|| PipelineError::Internal("shifted chain is not augmenting".into()))?;
        self.set(last, Some(c))?;
        if self.config.audit {
            self.audit_proper()?;
        }
        Ok(())
    }

    fn audit_proper(&self) -> Result<(), PipelineError> {
        let v = verify_partial_proper(&self.graph.coloured_edges(), self.graph.palette());
        if v.passed() {
            Ok(())
        } else {
            Err(PipelineError::Internal(format!("improper intermediate colouring: {v:?}")))
        }
    }

    fn set(&mut self, e: EdgeId, c: Option<Colour>) -> Result<(), PipelineError> {
        let old = self.graph.colour(e);
        if old == c {
            return Ok(());
        }
        let (u, v) = self.graph.endpoints(e);
        if let Some(k) = old {
            self.graph.set_colour(e, None)?;
            self.sync(u, v, k, false)?;
        }
        if let Some(k) = c {
            self.graph.set_colour(e, Some(k))?;
            self.sync(u, v, k, true)?;
        }
        Ok(())
    }

    fn sync(&mut self, u: Vertex, v: Vertex, k: Colour, coloured: bool) -> Result<(), PipelineError> {
        let Some(st) = self.stepping.as_mut() else { return Ok(()) };
        let report = if coloured {
            st.skeleton.colour(u, v, k)
        } else {
            st.skeleton.uncolour(u, v, k)
        }
        .map_err(|err| PipelineError::Internal(err.to_string()))?;
        st.sets.mark_dirty(&self.graph, &st.skeleton, &[u, v], &report);
        Ok(())
    }

    fn mark(&mut self, seeds: &[Vertex], report: &ChangeReport) {
        if let Some(st) = self.stepping.as_mut() {
            st.sets.mark_dirty(&self.graph, &st.skeleton, seeds, report);
        }
    }

    fn repair(&mut self) {
        if let Some(st) = self.stepping.as_mut() {
            st.sets.repair_all(&self.graph, &st.skeleton);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: usize, delta_max: usize, ell: usize) -> ColourerConfig {
        ColourerConfig {
            n,
            delta_max,
            ell,
            a: 4,
            levels: 2,
            audit: true,
        }
    }

    #[test]
    fn star_uses_distinct_colours() {
        let mut c = DirectColourer::new(config(6, 5, 6));
        for v in 1..6 {
            c.insert(0, v).unwrap();
        }
        let mut seen: Vec<_> = (1..6).map(|v| c.colour_of(0, v).unwrap()).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 5);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let mut c = DirectColourer::new(config(4, 1, 4));
        c.insert(0, 1).unwrap();
        assert!(matches!(c.insert(0, 2), Err(PipelineError::DegreeCap { vertex: 0, .. })));
    }

    #[test]
    fn delete_after_insert_uncolours() {
        let mut c = DirectColourer::new(config(3, 2, 3));
        c.insert(0, 1).unwrap();
        c.delete(0, 1).unwrap();
        assert_eq!(c.counters().uncolourings, 1);
        assert_eq!(c.graph().edge_count(), 0);
    }

    #[test]
    fn odd_cycle_with_skeleton_stays_proper() {
        let mut c = DirectColourer::new(config(9, 2, 2));
        for i in 0..9 {
            c.insert(i, (i + 1) % 9).unwrap_or_else(|e| panic!("edge {i}: {e}"));
        }
        assert!(verify_partial_proper(&c.graph().coloured_edges(), 3).passed());
    }
}
