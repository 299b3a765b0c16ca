//! Public engine: routes updates to a direct colourer, a bare splitter, a
//! hierarchy with per-leaf colourers, or the degree scheduler over copies of
//! any of those.
//!
//! The scheduler keeps, per edge, the lowest copy it belongs to; membership is
//! always an up-set of copy indices. Only the copy whose interval holds the
//! current maximum degree is brought up to date, by diffing its edge set
//! against the membership rule when it becomes live and by forwarding touched
//! edges while it stays live.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::colourer::{ColourerConfig, ColourerCounters, DirectColourer};
use crate::error::PipelineError;
use crate::graph_core::{Colour, ColourView, Vertex};
use crate::oracle::{rebuild_splitter_invariant, verify_proper, Verdict};
use crate::params::{self, Overrides};
use crate::splitter_hierarchy::{initialize_parameters, LeafEvent, Prefix, SplitterHierarchy};
use crate::tsplitter::{edge_key, EdgeKey, SplitterConfig, TSplitter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Direct,
    Splitter,
    Hierarchy,
    Full,
}

/// Which colouring engine a scheduler copy runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BackendChoice {
    /// Direct below the hierarchy threshold, hierarchy at or above it.
    #[default]
    Auto,
    Direct,
    Hierarchy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub n: usize,
    pub epsilon: f64,
    /// Degree cap for the non-scheduled modes; ignored in full mode.
    pub delta_max: usize,
    pub mode: Mode,
    pub backend: BackendChoice,
    pub overrides: Overrides,
    /// Replays every looked-up process and checks each shift step.
    pub audit: bool,
}

impl PipelineConfig {
    pub fn new(n: usize, epsilon: f64, delta_max: usize, mode: Mode) -> Self {
        PipelineConfig {
            n,
            epsilon,
            delta_max,
            mode,
            backend: BackendChoice::Auto,
            overrides: Overrides::default(),
            audit: false,
        }
    }

    fn colourer(&self, delta_max: usize) -> ColourerConfig {
        let ov = &self.overrides;
        // Any step length of at least n behaves like the astronomically large default.
        let ell = ov.ell.unwrap_or(self.n);
        let a = ov.a.unwrap_or_else(|| {
            let (lo, _) = params::a_range(self.n, delta_max as u64, ell as f64);
            lo.ceil().clamp(1.0, usize::MAX as f64) as usize
        });
        ColourerConfig {
            n: self.n,
            delta_max,
            ell,
            a,
            levels: ov.levels.unwrap_or_else(|| params::sqrt_log_ceil(self.n)),
            audit: self.audit,
        }
    }

    fn threshold(&self, epsilon: f64) -> u64 {
        self.overrides
            .threshold
            .unwrap_or_else(|| params::hierarchy_threshold(self.n, epsilon).min(u64::MAX as u128) as u64)
    }

    /// Arity of the bare splitter mode.
    pub fn splitter_arity(&self) -> u32 {
        self.overrides
            .t2
            .unwrap_or_else(|| params::t2(self.n, self.epsilon).min(u32::MAX as u128) as u64)
            .max(1) as u32
    }
}

/// Counters of one colouring engine, summed over its colourers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EngineCounters {
    pub chain: ColourerCounters,
    pub splitter_recolourings: u64,
    /// Edges moved between leaves by splitter recolourings.
    pub leaf_moves: u64,
}

impl EngineCounters {
    fn add(&mut self, c: &ColourerCounters) {
        let t = &mut self.chain;
        t.insertions += c.insertions;
        t.deletions += c.deletions;
        t.recolourings += c.recolourings;
        t.uncolourings += c.uncolourings;
        t.short_chains += c.short_chains;
        t.lookups += c.lookups;
        t.lookup_hits += c.lookup_hits;
        t.fallbacks += c.fallbacks;
        t.chain_edges += c.chain_edges;
    }

    /// Changes to already-coloured edges of this engine's colouring.
    pub fn recolourings(&self) -> u64 {
        self.chain.recolourings + self.leaf_moves
    }
}

#[derive(Debug, Clone)]
struct SplitBackend {
    hierarchy: SplitterHierarchy,
    leaves: BTreeMap<Prefix, DirectColourer>,
    leaf_config: ColourerConfig,
    leaf_moves: u64,
}

impl SplitBackend {
    fn rank(&self, leaf: &[Colour]) -> u64 {
        let arities = &self.hierarchy.params().arities;
        leaf.iter()
            .zip(arities)
            .fold(0u64, |acc, (&c, &t)| acc.saturating_mul(t as u64).saturating_add(c as u64 - 1))
    }

    fn offset(&self, leaf: &[Colour]) -> Colour {
        let width = self.leaf_config.palette() as u64;
        self.rank(leaf).saturating_mul(width).min(Colour::MAX as u64) as Colour
    }

    fn leaf_of(&self, key: EdgeKey) -> Option<&[Colour]> {
        self.hierarchy.profile(key.0, key.1)
    }

    fn apply_events(&mut self, inserted: Option<EdgeKey>) -> Result<(), PipelineError> {
        for ev in self.hierarchy.take_events() {
            match ev {
                LeafEvent::Added { leaf, edge } => {
                    if Some(edge) != inserted {
                        self.leaf_moves += 1;
                    }
                    let cfg = self.leaf_config;
                    self.leaves
                        .entry(leaf)
                        .or_insert_with(|| DirectColourer::new(cfg))
                        .insert(edge.0, edge.1)?;
                }
                LeafEvent::Removed { leaf, edge } => {
                    self.leaves
                        .get_mut(&leaf)
                        .ok_or_else(|| PipelineError::Internal(format!("leaf {leaf:?} missing")))?
                        .delete(edge.0, edge.1)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Backend {
    Direct(DirectColourer),
    Split(Box<SplitBackend>),
}

impl Backend {
    fn new(cfg: &PipelineConfig, delta_max: usize, epsilon: f64) -> Self {
        let hierarchical = match cfg.backend {
            BackendChoice::Auto => delta_max as u64 >= cfg.threshold(epsilon),
            BackendChoice::Direct => false,
            BackendChoice::Hierarchy => true,
        };
        if !hierarchical {
            return Backend::Direct(DirectColourer::new(cfg.colourer(delta_max)));
        }
        let params = initialize_parameters(cfg.n, delta_max as u64, epsilon, &cfg.overrides);
        let leaf_cap = params.int_cap(params.depth()) as usize;
        Backend::Split(Box::new(SplitBackend {
            hierarchy: SplitterHierarchy::new(params),
            leaves: BTreeMap::new(),
            leaf_config: cfg.colourer(leaf_cap),
            leaf_moves: 0,
        }))
    }

    fn insert(&mut self, u: Vertex, v: Vertex) -> Result<(), PipelineError> {
        match self {
            Backend::Direct(c) => c.insert(u, v),
            Backend::Split(s) => {
                s.hierarchy.insert(u, v)?;
                s.apply_events(Some(edge_key(u, v)))
            }
        }
    }

    fn delete(&mut self, u: Vertex, v: Vertex) -> Result<(), PipelineError> {
        match self {
            Backend::Direct(c) => c.delete(u, v),
            Backend::Split(s) => {
                s.hierarchy.delete(u, v)?;
                s.apply_events(None)
            }
        }
    }

    fn colour_of(&self, key: EdgeKey) -> Option<Colour> {
        match self {
            Backend::Direct(c) => c.colour_of(key.0, key.1),
            Backend::Split(s) => {
                let leaf = s.leaf_of(key)?;
                let local = s.leaves.get(leaf)?.colour_of(key.0, key.1)?;
                Some(s.offset(leaf) + local)
            }
        }
    }

    fn edges(&self) -> Vec<(Vertex, Vertex, Option<Colour>)> {
        match self {
            Backend::Direct(c) => c.graph().coloured_edges(),
            Backend::Split(s) => s
                .leaves
                .iter()
                .flat_map(|(leaf, c)| {
                    let off = s.offset(leaf);
                    c.graph().coloured_edges().into_iter().map(move |(u, v, k)| (u, v, k.map(|k| k + off)))
                })
                .collect(),
        }
    }

    /// Colours the backend may hand out: `1..=palette`.
    fn palette(&self) -> Colour {
        match self {
            Backend::Direct(c) => c.config().palette(),
            Backend::Split(s) => {
                let leaves = s.hierarchy.params().leaf_count_bound();
                (leaves * s.leaf_config.palette() as f64).min(Colour::MAX as f64) as Colour
            }
        }
    }

    fn counters(&self) -> EngineCounters {
        let mut out = EngineCounters::default();
        match self {
            Backend::Direct(c) => out.add(&c.counters()),
            Backend::Split(s) => {
                for c in s.leaves.values() {
                    out.add(&c.counters());
                }
                out.splitter_recolourings = s.hierarchy.level_counters().iter().map(|l| l.recolourings).sum();
                out.leaf_moves = s.leaf_moves;
            }
        }
        out
    }

    fn is_hierarchical(&self) -> bool {
        matches!(self, Backend::Split(_))
    }
}

#[derive(Debug, Clone)]
struct Copy {
    backend: Backend,
    members: BTreeSet<EdgeKey>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SchedulerCounters {
    /// (edge, copy) memberships gained.
    pub admissions: u64,
    /// (edge, copy) memberships lost.
    pub evictions: u64,
    pub switches: u64,
    /// Edges inserted into or removed from a copy while syncing it.
    pub sync_updates: u64,
}

#[derive(Debug, Clone)]
struct Scheduler {
    epsilon: f64,
    copies: Vec<Option<Copy>>,
    /// Lowest copy index each edge belongs to.
    lowest: BTreeMap<EdgeKey, usize>,
    adjacency: Vec<BTreeSet<Vertex>>,
    live: Option<usize>,
    counters: SchedulerCounters,
}

impl Scheduler {
    fn new(n: usize, epsilon: f64) -> Self {
        let s = params::scheduler_copies(n, epsilon);
        Scheduler {
            epsilon,
            copies: vec![None; s + 1],
            lowest: BTreeMap::new(),
            adjacency: vec![BTreeSet::new(); n],
            live: None,
            counters: SchedulerCounters::default(),
        }
    }

    fn first(&self, d: usize) -> usize {
        params::first_copy_for(d, self.epsilon).min(self.copies.len() - 1)
    }

    fn spread(&self, key: EdgeKey) -> usize {
        self.adjacency[key.0].len().max(self.adjacency[key.1].len())
    }

    /// Re-applies the membership rule to every edge at `u` or `v`. Returns
    /// the edges whose lowest copy changed.
    fn rescore(&mut self, u: Vertex, v: Vertex) -> Vec<(EdgeKey, usize, usize)> {
        let mut touched = BTreeSet::new();
        for w in [u, v] {
            for &x in &self.adjacency[w] {
                touched.insert(edge_key(w, x));
            }
        }
        let mut changed = Vec::new();
        for key in touched {
            let f = self.first(self.spread(key));
            let old = self.lowest[&key];
            let new = old.max(f.saturating_sub(1)).min(f);
            if new != old {
                if new > old {
                    self.counters.evictions += (new - old) as u64;
                } else {
                    self.counters.admissions += (old - new) as u64;
                }
                self.lowest.insert(key, new);
                changed.push((key, old, new));
            }
        }
        changed
    }

    fn max_degree(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    fn copy_mut(&mut self, j: usize, cfg: &PipelineConfig) -> &mut Copy {
        let eps = self.epsilon;
        self.copies[j].get_or_insert_with(|| Copy {
            backend: Backend::new(cfg, params::copy_cap(j, eps), eps),
            members: BTreeSet::new(),
        })
    }

    /// Brings copy `j` in line with the membership rule over `keys`.
    fn sync(&mut self, j: usize, keys: &BTreeSet<EdgeKey>, cfg: &PipelineConfig) -> Result<(), PipelineError> {
        let want: Vec<(EdgeKey, bool)> = keys
            .iter()
            .map(|&k| (k, self.lowest.get(&k).is_some_and(|&lo| lo <= j)))
            .collect();
        let copy = self.copy_mut(j, cfg);
        let mut work = 0;
        for &(k, keep) in &want {
            if !keep && copy.members.remove(&k) {
                copy.backend.delete(k.0, k.1)?;
                work += 1;
            }
        }
        for &(k, keep) in &want {
            if keep && copy.members.insert(k) {
                copy.backend.insert(k.0, k.1)?;
                work += 1;
            }
        }
        self.counters.sync_updates += work;
        Ok(())
    }

    fn live_copy(&self) -> Option<&Copy> {
        self.copies[self.live?].as_ref()
    }

    /// Applies an update that has already changed `adjacency`, then syncs
    /// the live copy. On a switch, returns the exported colour changes.
    fn settle(&mut self, key: EdgeKey, cfg: &PipelineConfig) -> Result<Option<u64>, PipelineError> {
        let changed = self.rescore(key.0, key.1);
        let target = self.first(self.max_degree());
        if self.live == Some(target) {
            let mut keys: BTreeSet<EdgeKey> = changed
                .iter()
                .filter(|&&(_, old, new)| (old <= target) != (new <= target))
                .map(|&(k, _, _)| k)
                .collect();
            keys.insert(key);
            self.sync(target, &keys, cfg)?;
            return Ok(None);
        }
        let before: BTreeMap<EdgeKey, Colour> = match self.live_copy() {
            Some(c) => c.members.iter().filter_map(|&k| Some((k, c.backend.colour_of(k)?))).collect(),
            None => BTreeMap::new(),
        };
        let mut keys: BTreeSet<EdgeKey> = self.lowest.keys().copied().collect();
        keys.extend(self.copy_mut(target, cfg).members.iter().copied());
        self.sync(target, &keys, cfg)?;
        self.live = Some(target);
        self.counters.switches += 1;
        let copy = self.live_copy().expect("just synced");
        Ok(Some(
            before
                .iter()
                .filter(|&(&k, &c)| copy.members.contains(&k) && copy.backend.colour_of(k) != Some(c))
                .count() as u64,
        ))
    }

    fn insert(&mut self, u: Vertex, v: Vertex, cfg: &PipelineConfig) -> Result<Option<u64>, PipelineError> {
        let key = edge_key(u, v);
        self.adjacency[u].insert(v);
        self.adjacency[v].insert(u);
        let lo = self.first(self.spread(key));
        self.counters.admissions += (self.copies.len() - lo) as u64;
        self.lowest.insert(key, lo);
        self.settle(key, cfg)
    }

    fn delete(&mut self, u: Vertex, v: Vertex, cfg: &PipelineConfig) -> Result<Option<u64>, PipelineError> {
        let key = edge_key(u, v);
        self.adjacency[u].remove(&v);
        self.adjacency[v].remove(&u);
        let lo = self.lowest.remove(&key).expect("present edge");
        self.counters.evictions += (self.copies.len() - lo) as u64;
        self.settle(key, cfg)
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Single(Backend),
    Splitter(TSplitter),
    Scheduled(Box<Scheduler>),
}

/// The exported colouring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalColouring {
    pub edges: Vec<(Vertex, Vertex, Colour)>,
    /// Colours `1..=palette` the current engine may use.
    pub palette: Colour,
    pub colours_used: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub updates: u64,
    pub insertions: u64,
    pub deletions: u64,
    /// Colour changes of already-coloured edges in the exported colouring.
    pub recolourings: u64,
    pub colours_used: u64,
    pub max_degree: u64,
    pub engine: EngineCounters,
    pub scheduler: SchedulerCounters,
    pub wall_ns_total: u64,
    pub wall_ns_max: u64,
}

impl Metrics {
    /// Flat counter view for sinks that want name → integer.
    pub fn counters(&self) -> BTreeMap<&'static str, u64> {
        let c = &self.engine.chain;
        BTreeMap::from([
            ("updates", self.updates),
            ("insertions", self.insertions),
            ("deletions", self.deletions),
            ("recolourings", self.recolourings),
            ("colours_used", self.colours_used),
            ("max_degree", self.max_degree),
            ("chain_recolourings", c.recolourings),
            ("chain_uncolourings", c.uncolourings),
            ("short_chains", c.short_chains),
            ("lookups", c.lookups),
            ("lookup_hits", c.lookup_hits),
            ("fallbacks", c.fallbacks),
            ("chain_edges", c.chain_edges),
            ("splitter_recolourings", self.engine.splitter_recolourings),
            ("leaf_moves", self.engine.leaf_moves),
            ("admissions", self.scheduler.admissions),
            ("evictions", self.scheduler.evictions),
            ("switches", self.scheduler.switches),
            ("sync_updates", self.scheduler.sync_updates),
            ("wall_ns_total", self.wall_ns_total),
            ("wall_ns_max", self.wall_ns_max),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Improper(Verdict),
    Palette { used: usize, bound: usize },
    Splitter(Verdict),
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    engine: Engine,
    degree: Vec<usize>,
    metrics: Metrics,
    /// Recolouring counter of the live engine at the end of the last update.
    live_reading: u64,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Self {
        let engine = match config.mode {
            Mode::Direct => Engine::Single(Backend::new(
                &PipelineConfig { backend: BackendChoice::Direct, ..config },
                config.delta_max,
                config.epsilon,
            )),
            Mode::Hierarchy => Engine::Single(Backend::new(
                &PipelineConfig { backend: BackendChoice::Hierarchy, ..config },
                config.delta_max,
                config.epsilon,
            )),
            Mode::Splitter => Engine::Splitter(TSplitter::new(SplitterConfig::new(
                config.n,
                config.splitter_arity(),
                config.delta_max as u64,
                config.epsilon,
                config.overrides.eta,
            ))),
            Mode::Full => Engine::Scheduled(Box::new(Scheduler::new(config.n, config.epsilon / 7.0))),
        };
        Pipeline {
            config,
            engine,
            degree: vec![0; config.n],
            metrics: Metrics::default(),
            live_reading: 0,
        }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    fn check_pair(&self, u: Vertex, v: Vertex) -> Result<(), PipelineError> {
        use crate::error::GraphError;
        for w in [u, v] {
            if w >= self.config.n {
                return Err(GraphError::VertexOutOfRange(w).into());
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u).into());
        }
        Ok(())
    }

    fn present(&self, key: EdgeKey) -> bool {
        match &self.engine {
            Engine::Single(b) => b.colour_of(key).is_some() || self.backend_has(b, key),
            Engine::Splitter(s) => s.colour_of(key.0, key.1).is_some(),
            Engine::Scheduled(s) => s.lowest.contains_key(&key),
        }
    }

    fn backend_has(&self, b: &Backend, key: EdgeKey) -> bool {
        match b {
            Backend::Direct(c) => c.graph().edge_between(key.0, key.1).is_some(),
            Backend::Split(s) => s.hierarchy.profile(key.0, key.1).is_some(),
        }
    }

    pub fn insert(&mut self, u: Vertex, v: Vertex) -> Result<(), PipelineError> {
        self.check_pair(u, v)?;
        let key = edge_key(u, v);
        if self.present(key) {
            return Err(crate::error::GraphError::DuplicateEdge(key.0, key.1).into());
        }
        let start = Instant::now();
        let switched = match &mut self.engine {
            Engine::Single(b) => b.insert(u, v).map(|_| None)?,
            Engine::Splitter(s) => s.insert(u, v).map(|_| None)?,
            Engine::Scheduled(s) => s.insert(u, v, &self.config)?,
        };
        self.degree[u] += 1;
        self.degree[v] += 1;
        self.metrics.insertions += 1;
        self.finish(start, switched);
        Ok(())
    }

    pub fn delete(&mut self, u: Vertex, v: Vertex) -> Result<(), PipelineError> {
        self.check_pair(u, v)?;
        let key = edge_key(u, v);
        if !self.present(key) {
            return Err(crate::error::GraphError::MissingEdge(key.0, key.1).into());
        }
        let start = Instant::now();
        let switched = match &mut self.engine {
            Engine::Single(b) => b.delete(u, v).map(|_| None)?,
            Engine::Splitter(s) => s.delete(u, v).map(|_| None)?,
            Engine::Scheduled(s) => s.delete(u, v, &self.config)?,
        };
        self.degree[u] -= 1;
        self.degree[v] -= 1;
        self.metrics.deletions += 1;
        self.finish(start, switched);
        Ok(())
    }

    fn finish(&mut self, start: Instant, switched: Option<u64>) {
        let ns = start.elapsed().as_nanos().min(u64::MAX as u128) as u64;
        let (engine, scheduler) = self.engine_counters();
        let reading = match &self.engine {
            Engine::Splitter(_) => engine.splitter_recolourings,
            _ => engine.recolourings(),
        };
        let colours_used = self.colours_used() as u64;
        let max_degree = self.max_degree() as u64;
        let m = &mut self.metrics;
        m.updates += 1;
        m.wall_ns_total = m.wall_ns_total.saturating_add(ns);
        m.wall_ns_max = m.wall_ns_max.max(ns);
        // A switch replaces the exported colouring wholesale; only the difference counts.
        m.recolourings += switched.unwrap_or_else(|| reading.saturating_sub(self.live_reading));
        self.live_reading = reading;
        m.engine = engine;
        m.scheduler = scheduler;
        m.max_degree = max_degree;
        m.colours_used = colours_used;
    }

    fn engine_counters(&self) -> (EngineCounters, SchedulerCounters) {
        match &self.engine {
            Engine::Single(b) => (b.counters(), SchedulerCounters::default()),
            Engine::Splitter(s) => (
                EngineCounters {
                    splitter_recolourings: s.counters().recolourings,
                    ..EngineCounters::default()
                },
                SchedulerCounters::default(),
            ),
            Engine::Scheduled(s) => (
                s.live_copy().map(|c| c.backend.counters()).unwrap_or_default(),
                s.counters,
            ),
        }
    }

    fn exported(&self) -> (Vec<(Vertex, Vertex, Option<Colour>)>, Colour) {
        match &self.engine {
            Engine::Single(b) => (b.edges(), b.palette()),
            Engine::Splitter(s) => (
                s.coloured_edges().into_iter().map(|(u, v, c)| (u, v, Some(c))).collect(),
                s.config().t,
            ),
            Engine::Scheduled(s) => match s.live_copy() {
                Some(c) => (c.backend.edges(), c.backend.palette()),
                None => (Vec::new(), 0),
            },
        }
    }

    fn colours_used(&self) -> usize {
        let (edges, _) = self.exported();
        edges.iter().filter_map(|e| e.2).collect::<BTreeSet<_>>().len()
    }

    pub fn current_colouring(&self) -> GlobalColouring {
        let (edges, palette) = self.exported();
        let mut edges: Vec<_> = edges
            .into_iter()
            .map(|(u, v, c)| {
                let (a, b) = edge_key(u, v);
                (a, b, c.unwrap_or(0))
            })
            .collect();
        edges.sort_unstable();
        let colours_used = edges.iter().map(|e| e.2).collect::<BTreeSet<_>>().len();
        GlobalColouring {
            edges,
            palette,
            colours_used,
        }
    }

    pub fn metrics(&self) -> Metrics {
        self.metrics
    }

    /// `⌈(1+ε)Δ⌉` for the current maximum degree.
    pub fn palette_bound(&self) -> usize {
        ((1.0 + self.config.epsilon) * self.max_degree() as f64 - 1e-9).ceil().max(0.0) as usize
    }

    /// Whether the live scheduler copy (or the single backend) runs the hierarchy.
    pub fn uses_hierarchy(&self) -> bool {
        match &self.engine {
            Engine::Single(b) => b.is_hierarchical(),
            Engine::Splitter(_) => false,
            Engine::Scheduled(s) => s.live_copy().is_some_and(|c| c.backend.is_hierarchical()),
        }
    }

    /// Independent checks of the exported state. Properness always; in full
    /// mode also the palette bound; in splitter mode the splitter invariant.
    pub fn validate(&self) -> Result<(), Failure> {
        if let Engine::Splitter(s) = &self.engine {
            let c = s.config();
            let v = rebuild_splitter_invariant(&s.coloured_edges(), c.t, c.delta_max, c.eta, c.epsilon);
            return if v.passed() { Ok(()) } else { Err(Failure::Splitter(v)) };
        }
        let (edges, palette) = self.exported();
        let v = verify_proper(&edges, palette);
        if !v.passed() {
            return Err(Failure::Improper(v));
        }
        let total = match &self.engine {
            Engine::Scheduled(s) => s.lowest.len(),
            _ => edges.len(),
        };
        if total != edges.len() {
            return Err(Failure::Improper(Verdict::Fail(crate::oracle::Witness::NotColourable {
                edges: total,
                palette,
            })));
        }
        if self.config.mode == Mode::Full {
            let used = self.colours_used();
            let bound = self.palette_bound();
            if used > bound {
                return Err(Failure::Palette { used, bound });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_pipeline_exports_nothing() {
        let p = Pipeline::new(PipelineConfig::new(5, 0.5, 3, Mode::Full));
        let c = p.current_colouring();
        assert!(c.edges.is_empty());
        assert_eq!(c.colours_used, 0);
        assert_eq!(p.validate(), Ok(()));
    }

    #[test]
    fn star_in_direct_mode_uses_five_of_six() {
        let mut p = Pipeline::new(PipelineConfig::new(6, 0.5, 5, Mode::Direct));
        for v in 1..6 {
            p.insert(0, v).unwrap();
        }
        let c = p.current_colouring();
        assert_eq!(c.palette, 6);
        assert_eq!(c.colours_used, 5);
    }

    #[test]
    fn delete_right_after_insert_uncolours() {
        let mut p = Pipeline::new(PipelineConfig::new(4, 0.5, 2, Mode::Full));
        p.insert(0, 1).unwrap();
        p.delete(1, 0).unwrap();
        assert!(p.metrics().engine.chain.uncolourings >= 1);
        assert!(p.current_colouring().edges.is_empty());
    }

    #[test]
    fn rejects_bad_updates() {
        let mut p = Pipeline::new(PipelineConfig::new(4, 0.5, 2, Mode::Full));
        assert!(p.insert(1, 1).is_err());
        assert!(p.insert(0, 9).is_err());
        assert!(p.delete(0, 1).is_err());
        p.insert(0, 1).unwrap();
        assert!(p.insert(1, 0).is_err());
        assert_eq!(p.metrics().updates, 1);
    }

    #[test]
    fn leaf_offsets_are_disjoint() {
        let ov = Overrides {
            t1: Some(2),
            t2: Some(2),
            threshold: Some(3),
            mu: Some(0.5),
            eta: Some(16),
            ..Overrides::default()
        };
        let cfg = PipelineConfig {
            overrides: ov,
            ..PipelineConfig::new(16, 0.5, 8, Mode::Hierarchy)
        };
        let Backend::Split(s) = Backend::new(&cfg, 8, 0.5) else { panic!("expected hierarchy") };
        let h = s.hierarchy.params().depth();
        let width = s.leaf_config.palette();
        let mut offsets: Vec<Colour> = Vec::new();
        let mut leaf = vec![1; h];
        loop {
            offsets.push(s.offset(&leaf));
            let Some(i) = (0..h).rev().find(|&i| leaf[i] < s.hierarchy.params().arities[i]) else { break };
            leaf[i] += 1;
            leaf[i + 1..].iter_mut().for_each(|c| *c = 1);
        }
        let expect: Vec<Colour> = (0..offsets.len() as Colour).map(|r| r * width).collect();
        assert_eq!(offsets, expect);
    }
}
