//! Chains, shifts, the two fan constructions and consistent Vizing-chain
//! extension.
//!
//! Constructions are pure functions of a [`ColourView`]; only [`shift_pair`]
//! and [`shift_chain`] mutate a colouring. Multi-step extension runs on an
//! [`Overlay`] holding the shifted colouring, so the real graph is never
//! touched until the whole chain is known.

use std::collections::HashMap;

use crate::bicomp_skeleton::alternating_walk;
use crate::error::{ChainError, GraphError};
use crate::graph_core::{Colour, ColourView, DynamicGraph, EdgeId, Vertex};
use crate::stepping_sets::{PathCode, SteppingProcess};

/// A colouring that differs from `base` on a handful of edges.
#[derive(Debug, Clone)]
pub struct Overlay<'a, G: ColourView> {
    base: &'a G,
    colour: HashMap<EdgeId, Option<Colour>>,
    slot: HashMap<(Vertex, Colour), Option<EdgeId>>,
}

impl<'a, G: ColourView> Overlay<'a, G> {
    pub fn new(base: &'a G) -> Self {
        Overlay {
            base,
            colour: HashMap::new(),
            slot: HashMap::new(),
        }
    }

    /// Unchecked recolouring; callers keep the overlay proper.
    pub fn paint(&mut self, e: EdgeId, c: Option<Colour>) {
        let (u, v) = self.base.endpoints(e);
        if let Some(old) = self.colour(e) {
            self.slot.insert((u, old), None);
            self.slot.insert((v, old), None);
        }
        if let Some(c) = c {
            self.slot.insert((u, c), Some(e));
            self.slot.insert((v, c), Some(e));
        }
        self.colour.insert(e, c);
    }

    /// Shift of a blank `e1` and coloured `e2`, checked like [`shift_pair`].
    pub fn shift(&mut self, e1: EdgeId, e2: EdgeId) -> Result<(), ChainError> {
        check_pattern(self, e1, e2)?;
        let c = self.colour(e2).expect("checked");
        self.paint(e2, None);
        let (a, b) = self.base.endpoints(e1);
        for x in [a, b] {
            if let Some(other) = self.edge_with(x, c) {
                self.paint(e2, Some(c));
                return Err(GraphError::Conflict {
                    edge: e1,
                    colour: c,
                    conflict: other,
                }
                .into());
            }
        }
        self.paint(e1, Some(c));
        Ok(())
    }
}

impl<G: ColourView> ColourView for Overlay<'_, G> {
    fn vertex_count(&self) -> usize {
        self.base.vertex_count()
    }
    fn palette(&self) -> Colour {
        self.base.palette()
    }
    fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.base.endpoints(e)
    }
    fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.base.edge_between(u, v)
    }
    fn colour(&self, e: EdgeId) -> Option<Colour> {
        match self.colour.get(&e) {
            Some(c) => *c,
            None => self.base.colour(e),
        }
    }
    fn edge_with(&self, v: Vertex, c: Colour) -> Option<EdgeId> {
        match self.slot.get(&(v, c)) {
            Some(e) => *e,
            None => self.base.edge_with(v, c),
        }
    }
    fn neighbours(&self, v: Vertex) -> Vec<Vertex> {
        self.base.neighbours(v)
    }
}

fn adjacent_pair<G: ColourView>(g: &G, e1: EdgeId, e2: EdgeId) -> bool {
    let (a, b) = g.endpoints(e1);
    let (c, d) = g.endpoints(e2);
    e1 != e2 && (a == c || a == d || b == c || b == d)
}

fn check_pattern<G: ColourView>(g: &G, e1: EdgeId, e2: EdgeId) -> Result<(), ChainError> {
    if !adjacent_pair(g, e1, e2) {
        return Err(ChainError::NotAdjacent(e1, e2));
    }
    if g.colour(e1).is_some() || g.colour(e2).is_none() {
        return Err(ChainError::BlankPattern(e1, e2));
    }
    Ok(())
}

/// `c(e1) ← c(e2)`, `c(e2) ← blank`, uncolouring first.
pub fn shift_pair(g: &mut DynamicGraph, e1: EdgeId, e2: EdgeId) -> Result<(), ChainError> {
    for e in [e1, e2] {
        g.try_endpoints(e)?;
    }
    check_pattern(g, e1, e2)?;
    let c = g.colour(e2);
    g.set_colour(e2, None)?;
    if let Err(err) = g.set_colour(e1, c) {
        g.set_colour(e2, c).expect("restoring a just-removed colour");
        return Err(err.into());
    }
    Ok(())
}

/// Performs the first `j` pairwise shifts of `chain`, rolling back on failure.
pub fn shift_chain(g: &mut DynamicGraph, chain: &[EdgeId], j: usize) -> Result<(), ChainError> {
    assert!(j < chain.len().max(1), "shift count beyond chain length");
    let mut done = 0;
    while done < j {
        if let Err(err) = shift_pair(g, chain[done], chain[done + 1]) {
            for i in (0..done).rev() {
                shift_pair(g, chain[i + 1], chain[i]).expect("reversing a logged shift");
            }
            let source = match err {
                ChainError::Graph(e) => e,
                other => return Err(other),
            };
            return Err(ChainError::ShiftFailed { step: done + 1, source });
        }
        done += 1;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FanCase {
    SharedWithCentre,
    RepeatedRepresentative,
    SecondColourTerminal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanResult {
    pub centre: Vertex,
    pub leaves: Vec<Vertex>,
    pub alphas: Vec<Colour>,
    pub case: FanCase,
}

impl FanResult {
    pub fn last_alpha(&self) -> Colour {
        *self.alphas.last().expect("fan has a leaf")
    }
    pub fn last_leaf(&self) -> Vertex {
        *self.leaves.last().expect("fan has a leaf")
    }
}

fn blank_edge<G: ColourView>(g: &G, u: Vertex, v: Vertex) -> Result<EdgeId, ChainError> {
    let e = g
        .edge_between(u, v)
        .ok_or(GraphError::MissingEdge(u, v))?;
    if g.colour(e).is_some() {
        return Err(ChainError::NotBlank(e));
    }
    Ok(e)
}

fn build_fan<G: ColourView>(g: &G, u: Vertex, v: Vertex, avoid: Option<Colour>) -> Result<FanResult, ChainError> {
    let mut leaves = vec![v];
    let mut alphas: Vec<Colour> = Vec::new();
    loop {
        let w = *leaves.last().unwrap();
        let free = g.free_colours(w);
        let done = |alphas: Vec<Colour>, leaves: Vec<Vertex>, case| {
            Ok(FanResult {
                centre: u,
                leaves,
                alphas,
                case,
            })
        };
        if let Some(&c) = free.iter().find(|&&c| g.is_free(u, c)) {
            alphas.push(c);
            return done(alphas, leaves, FanCase::SharedWithCentre);
        }
        if let Some(&c) = alphas.iter().find(|a| free.contains(a)) {
            alphas.push(c);
            return done(alphas, leaves, FanCase::RepeatedRepresentative);
        }
        match free.iter().copied().find(|&c| Some(c) != avoid) {
            Some(c) => {
                let next = g
                    .step(u, c)
                    .ok_or(ChainError::FanPrecondition("representative colour missing at centre"))?;
                if leaves.contains(&next) {
                    return Err(ChainError::FanPrecondition("fan revisits a leaf"));
                }
                alphas.push(c);
                leaves.push(next);
            }
            None => match avoid {
                Some(k2) => {
                    alphas.push(k2);
                    return done(alphas, leaves, FanCase::SecondColourTerminal);
                }
                None => return Err(ChainError::FanPrecondition("no available colour at leaf")),
            },
        }
    }
}

/// The unique consistent maximal fan on blank `uv` centred at `u`.
pub fn build_primary_fan<G: ColourView>(g: &G, u: Vertex, v: Vertex) -> Result<FanResult, ChainError> {
    blank_edge(g, u, v)?;
    build_fan(g, u, v, None)
}

/// Fan for extending a chain: `k1` must be free at `u`, `k2` free at `v`.
pub fn build_second_fan<G: ColourView>(
    g: &G,
    u: Vertex,
    v: Vertex,
    k1: Colour,
    k2: Colour,
) -> Result<FanResult, ChainError> {
    blank_edge(g, u, v)?;
    if !g.is_free(u, k1) {
        return Err(ChainError::FanPrecondition("first colour not free at centre"));
    }
    if !g.is_free(v, k2) {
        return Err(ChainError::FanPrecondition("second colour not free at leaf"));
    }
    build_fan(g, u, v, Some(k2))
}

/// One fan plus its bichromatic path. `path` lists `q1, q2, …` (the centre is
/// `q0`); a single-vertex path with `pair.0 == pair.1` is the fan-only
/// terminal step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub centre: Vertex,
    pub fan: Vec<Vertex>,
    pub path: Vec<Vertex>,
    pub pair: (Colour, Colour),
    pub budget: Option<usize>,
}

impl ChainStep {
    pub fn is_fan_terminal(&self) -> bool {
        self.pair.0 == self.pair.1
    }

    /// Path of the stepping process this step induces, and whether it is augmenting.
    pub fn process_path(&self) -> (&[Vertex], bool) {
        match self.budget {
            Some(t) if self.path.len() > t => (&self.path[..self.path.len() - 1], false),
            _ => (&self.path, true),
        }
    }

    fn vertex_pairs(&self) -> Vec<(Vertex, Vertex)> {
        let mut out: Vec<_> = self.fan.iter().map(|&w| (self.centre, w)).collect();
        out.extend(self.path.windows(2).map(|w| (w[0], w[1])));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Fan { centre: Vertex, edges: usize },
    Path { pair: (Colour, Colour), edges: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chain {
    pub edges: Vec<EdgeId>,
    pub steps: Vec<ChainStep>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Fan and path runs in chain order. The first fan edge of every later
    /// step is the previous step's final edge and is not counted twice.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        for (j, s) in self.steps.iter().enumerate() {
            let shared = usize::from(j > 0);
            out.push(Segment::Fan {
                centre: s.centre,
                edges: s.fan.len() - shared,
            });
            if s.path.len() > 1 {
                out.push(Segment::Path {
                    pair: s.pair,
                    edges: s.path.len() - 1,
                });
            }
        }
        out
    }

    /// True when shifting the whole chain leaves a final edge with a common free colour.
    pub fn is_augmenting<G: ColourView>(&self, g: &G) -> bool {
        let mut o = Overlay::new(g);
        if shift_overlay(&mut o, &self.edges).is_err() {
            return false;
        }
        let last = *self.edges.last().expect("non-empty chain");
        common_free(&o, last).is_some()
    }

    fn push_step<G: ColourView>(&mut self, g: &G, step: ChainStep) -> Result<(), ChainError> {
        let pairs = step.vertex_pairs();
        let skip = usize::from(!self.steps.is_empty());
        for (a, b) in pairs.into_iter().skip(skip) {
            let e = g
                .edge_between(a, b)
                .ok_or(GraphError::MissingEdge(a, b))?;
            self.edges.push(e);
        }
        self.steps.push(step);
        Ok(())
    }
}

/// Smallest colour free at both ends of `e`.
pub fn common_free<G: ColourView>(g: &G, e: EdgeId) -> Option<Colour> {
    let (a, b) = g.endpoints(e);
    (1..=g.palette()).find(|&c| g.is_free(a, c) && g.is_free(b, c))
}

fn shift_overlay<G: ColourView>(o: &mut Overlay<'_, G>, edges: &[EdgeId]) -> Result<(), ChainError> {
    for (i, w) in edges.windows(2).enumerate() {
        o.shift(w[0], w[1]).map_err(|err| match err {
            ChainError::Graph(source) => ChainError::ShiftFailed { step: i + 1, source },
            other => other,
        })?;
    }
    Ok(())
}

/// Everything a step needs before its length budget is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepPlan {
    FanOnly {
        fan: FanResult,
    },
    Walk {
        fan: FanResult,
        first: Colour,
        second: Colour,
        full: Vec<Vertex>,
        may_return: bool,
    },
}

impl StepPlan {
    fn walk<G: ColourView>(g: &G, fan: FanResult, first: Colour, second: Colour, may_return: bool) -> Self {
        let full = alternating_walk(g, fan.last_leaf(), first, second, usize::MAX);
        StepPlan::Walk {
            fan,
            first,
            second,
            full,
            may_return,
        }
    }

    pub fn fan(&self) -> &FanResult {
        match self {
            StepPlan::FanOnly { fan } | StepPlan::Walk { fan, .. } => fan,
        }
    }

    /// Vertex count of the maximal path followed from the last fan leaf.
    pub fn walk_len(&self) -> usize {
        match self {
            StepPlan::FanOnly { .. } => 1,
            StepPlan::Walk { full, .. } => full.len(),
        }
    }

    /// The step for length budget `budget` (`None` is unbounded).
    pub fn realise(&self, budget: Option<usize>) -> ChainStep {
        let (fan, first, second, full, may_return) = match self {
            StepPlan::FanOnly { fan } => {
                let a = fan.last_alpha();
                return ChainStep {
                    centre: fan.centre,
                    path: vec![fan.last_leaf()],
                    fan: fan.leaves.clone(),
                    pair: (a, a),
                    budget,
                };
            }
            StepPlan::Walk {
                fan,
                first,
                second,
                full,
                may_return,
            } => (fan, *first, *second, full, *may_return),
        };
        let u = fan.centre;
        let k = fan.leaves.len();
        let tp = full.len();
        let pair = (first.min(second), first.max(second));
        let last = full[tp - 1];
        let fan_pos = |x: Vertex| fan.leaves[..k - 1].iter().position(|&w| w == x);
        let into_centre = may_return && tp >= 2 && last == u && fan_pos(full[tp - 2]).is_some();
        let step = |leaves: &[Vertex], path: Vec<Vertex>| ChainStep {
            centre: u,
            fan: leaves.to_vec(),
            path,
            pair,
            budget,
        };
        if let Some(t) = budget {
            if t + 1 < tp && !(into_centre && t + 2 == tp) {
                return step(&fan.leaves, full[..=t].to_vec());
            }
        }
        if may_return {
            if let Some(i) = fan_pos(last) {
                return step(&fan.leaves[..=i], full.iter().rev().copied().collect());
            }
            if into_centre {
                let s = fan_pos(full[tp - 2]).expect("checked above");
                let stop = usize::from(budget.is_some_and(|t| t + 2 == tp));
                return step(&fan.leaves[..=s], full[stop..tp - 1].iter().rev().copied().collect());
            }
        }
        step(&fan.leaves, full.clone())
    }
}

/// Plan of the consistent 1-step Vizing chain on blank `uv` centred at `u`.
pub fn first_step_plan<G: ColourView>(g: &G, u: Vertex, v: Vertex) -> Result<StepPlan, ChainError> {
    let fan = build_primary_fan(g, u, v)?;
    if fan.case == FanCase::SharedWithCentre {
        return Ok(StepPlan::FanOnly { fan });
    }
    let k1 = *g
        .free_colours(u)
        .first()
        .ok_or(ChainError::FanPrecondition("centre has no free colour"))?;
    let k2 = fan.last_alpha();
    Ok(StepPlan::walk(g, fan, k1, k2, true))
}

/// Plan of the extension step on blank `uv` after a `(k1, k2)` path whose last edge was `k2`.
pub fn next_step_plan<G: ColourView>(
    g: &G,
    u: Vertex,
    v: Vertex,
    k1: Colour,
    k2: Colour,
) -> Result<StepPlan, ChainError> {
    let fan = build_second_fan(g, u, v, k1, k2)?;
    match fan.case {
        FanCase::SharedWithCentre => Ok(StepPlan::FanOnly { fan }),
        FanCase::RepeatedRepresentative => {
            let tau1 = g
                .free_colours(u)
                .into_iter()
                .find(|&c| c != k1 && c != k2)
                .ok_or(ChainError::FanPrecondition("no third colour free at centre"))?;
            let tau2 = fan.last_alpha();
            Ok(StepPlan::walk(g, fan, tau1, tau2, true))
        }
        FanCase::SecondColourTerminal => Ok(StepPlan::walk(g, fan, k1, k2, false)),
    }
}

/// The consistent 1-step Vizing chain on blank `uv` centred at `u`; `None` budget is unbounded.
pub fn first_step<G: ColourView>(g: &G, u: Vertex, v: Vertex, budget: Option<usize>) -> Result<ChainStep, ChainError> {
    Ok(first_step_plan(g, u, v)?.realise(budget))
}

/// Consistent extension step on blank `uv` after a `(k1, k2)` path whose last edge was `k2`.
pub fn next_step<G: ColourView>(
    g: &G,
    u: Vertex,
    v: Vertex,
    k1: Colour,
    k2: Colour,
    budget: Option<usize>,
) -> Result<ChainStep, ChainError> {
    Ok(next_step_plan(g, u, v, k1, k2)?.realise(budget))
}

/// Appends one consistent step to `prefix` (or starts a chain on `blank` when
/// `prefix` is empty).
pub fn extend_vizing<G: ColourView>(
    g: &G,
    blank: EdgeId,
    prefix: &Chain,
    budget: Option<usize>,
) -> Result<Chain, ChainError> {
    if prefix.is_empty() {
        let (u, v) = g.endpoints(blank);
        let step = first_step(g, u, v, budget)?;
        let mut chain = Chain::default();
        chain.push_step(g, step)?;
        return Ok(chain);
    }
    let mut o = Overlay::new(g);
    shift_overlay(&mut o, &prefix.edges).map_err(|_| ChainError::BadPrefix)?;
    let last = prefix.steps.last().expect("non-empty prefix has steps");
    let last_edge = *prefix.edges.last().unwrap();
    if last.is_fan_terminal() || common_free(&o, last_edge).is_some() {
        return Err(ChainError::AlreadyAugmenting);
    }
    if last.path.len() < 2 {
        return Err(ChainError::BadPrefix);
    }
    let n = last.path.len();
    let (u, v) = (last.path[n - 2], last.path[n - 1]);
    let k2 = g.colour(last_edge).ok_or(ChainError::BadPrefix)?;
    let k1 = if k2 == last.pair.0 { last.pair.1 } else { last.pair.0 };
    let step = next_step(&o, u, v, k1, k2, budget)?;
    let mut chain = prefix.clone();
    chain.push_step(g, step)?;
    Ok(chain)
}

/// Builds the augmenting chain on `blank = (w1, v)` that realises `process`.
///
/// Each step is recomputed on the shifted colouring with the process path's
/// length as budget and must reproduce that path exactly.
pub fn process_to_chain<G: ColourView>(
    g: &G,
    blank: EdgeId,
    process: &SteppingProcess,
) -> Result<Chain, ChainError> {
    let mut chain = Chain::default();
    for (j, code) in process.paths.iter().enumerate() {
        chain = extend_vizing(g, blank, &chain, Some(code.len))?;
        let step = chain.steps.last().unwrap();
        let (path, _) = step.process_path();
        if !path_matches(g, code, path) {
            return Err(ChainError::NotFound);
        }
        if j == 0 && step.centre != process.start {
            return Err(ChainError::NotFound);
        }
    }
    if chain.is_augmenting(g) {
        Ok(chain)
    } else {
        Err(ChainError::NotFound)
    }
}

fn path_matches<G: ColourView>(g: &G, code: &PathCode, path: &[Vertex]) -> bool {
    path.len() == code.len && path.first() == Some(&code.anchor) && code.vertices(g).as_deref() == Some(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainSource {
    Short,
    Lookup,
    Fallback,
}

/// Finds an augmenting chain on the blank edge `e`, centred at `centre`.
///
/// Tries the 1-step chain when its path is short, then the stepping-set
/// lookup, then the unbounded 1-step chain.
pub fn find_augmenting_chain<G, F>(
    g: &G,
    e: EdgeId,
    centre: Vertex,
    ell: usize,
    mut lookup: F,
) -> Result<(Chain, ChainSource), ChainError>
where
    G: ColourView,
    F: FnMut(&FanResult, (Colour, Colour)) -> Option<SteppingProcess>,
{
    if g.colour(e).is_some() {
        return Err(ChainError::NotBlank(e));
    }
    let (a, b) = g.endpoints(e);
    let other = if a == centre { b } else { a };
    let unbounded = first_step(g, centre, other, None)?;
    if unbounded.path.len() <= ell + 1 {
        let mut chain = Chain::default();
        chain.push_step(g, unbounded)?;
        if chain.is_augmenting(g) {
            return Ok((chain, ChainSource::Short));
        }
        return Err(ChainError::NotFound);
    }
    let fan = build_primary_fan(g, centre, other)?;
    if let Some(process) = lookup(&fan, unbounded.pair) {
        if let Ok(chain) = process_to_chain(g, e, &process) {
            return Ok((chain, ChainSource::Lookup));
        }
    }
    let mut chain = Chain::default();
    chain.push_step(g, unbounded)?;
    if chain.is_augmenting(g) {
        Ok((chain, ChainSource::Fallback))
    } else {
        Err(ChainError::NotFound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, k: Colour, edges: &[(Vertex, Vertex, Option<Colour>)]) -> DynamicGraph {
        let mut g = DynamicGraph::new(n, k);
        for &(u, v, c) in edges {
            let e = g.add_edge(u, v).unwrap();
            g.set_colour(e, c).unwrap();
        }
        g
    }

    #[test]
    fn shift_pair_moves_the_colour() {
        let mut g = graph(3, 3, &[(0, 1, None), (1, 2, Some(2))]);
        shift_pair(&mut g, 0, 1).unwrap();
        assert_eq!((g.colour(0), g.colour(1)), (Some(2), None));
    }

    #[test]
    fn shift_pair_rejects_coloured_first_edge() {
        let mut g = graph(3, 3, &[(0, 1, Some(1)), (1, 2, Some(2))]);
        assert_eq!(shift_pair(&mut g, 0, 1), Err(ChainError::BlankPattern(0, 1)));
    }

    #[test]
    fn zero_shift_is_identity() {
        let mut g = graph(3, 3, &[(0, 1, None), (1, 2, Some(2))]);
        let before = g.coloured_edges();
        shift_chain(&mut g, &[0, 1], 0).unwrap();
        assert_eq!(g.coloured_edges(), before);
    }

    #[test]
    fn failed_shift_rolls_back() {
        // Second shift puts colour 2 on 1-2, but 1 already has it via 1-4.
        let mut g = graph(5, 3, &[(0, 1, None), (1, 2, Some(1)), (2, 3, Some(2)), (1, 4, Some(2))]);
        let before = g.coloured_edges();
        let err = shift_chain(&mut g, &[0, 1, 2], 2).unwrap_err();
        assert!(matches!(err, ChainError::ShiftFailed { step: 2, .. }), "{err:?}");
        assert_eq!(g.coloured_edges(), before);
    }

    #[test]
    fn primary_fan_stops_on_shared_colour() {
        let g = graph(2, 2, &[(0, 1, None)]);
        let f = build_primary_fan(&g, 0, 1).unwrap();
        assert_eq!((f.leaves, f.alphas, f.case), (vec![1], vec![1], FanCase::SharedWithCentre));
    }

    #[test]
    fn primary_fan_requires_blank_edge() {
        let g = graph(2, 2, &[(0, 1, Some(1))]);
        assert_eq!(build_primary_fan(&g, 0, 1), Err(ChainError::NotBlank(0)));
    }

    #[test]
    fn short_augmenting_step_is_a_single_edge() {
        let g = graph(2, 2, &[(0, 1, None)]);
        let s = first_step(&g, 0, 1, Some(3)).unwrap();
        assert!(s.is_fan_terminal());
        assert_eq!(s.path, vec![1]);
    }
}
