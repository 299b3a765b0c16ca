//! Brute-force checkers used as ground truth by the tests.
//!
//! Everything here works on plain edge lists and re-derives its own view of
//! the colouring, so a bug in the maintained structures cannot leak into the
//! verdicts. The fan and extension rules are transcribed a second time on
//! purpose.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::stepping_sets::{PathCode, SteppingProcess};

type V = usize;
type C = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Clash { first: (V, V), second: (V, V), colour: C },
    Uncoloured((V, V)),
    OutOfPalette((V, V), C),
    NotColourable { edges: usize, palette: C },
    Splitter { edge: (V, V), colour: C, against: C },
    ClassDegree { vertex: V, colour: C, degree: usize },
    Replay { step: usize, clause: Clause },
    Stale { step: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    NotAdjacent,
    NotFromEndpoint,
    StepLength,
    SharedVertex,
    SharedEdge,
    NearCentre,
    SameMaximalPath,
    Extension,
    CentreNearPrefix,
    PathNearEarlier,
    NotAugmenting,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {0} edges, above the brute-force cap of 20")]
    TooLarge(usize),
}

fn key(u: V, v: V) -> (V, V) {
    (u.min(v), u.max(v))
}

/// Fully coloured check: every edge coloured, palette respected, no clash.
pub fn verify_proper(edges: &[(V, V, Option<C>)], palette: C) -> Verdict {
    verify_partial(edges, palette, false)
}

/// Same as [`verify_proper`] but blank edges are allowed.
pub fn verify_partial_proper(edges: &[(V, V, Option<C>)], palette: C) -> Verdict {
    verify_partial(edges, palette, true)
}

fn verify_partial(edges: &[(V, V, Option<C>)], palette: C, allow_blank: bool) -> Verdict {
    let mut seen: HashMap<(V, C), (V, V)> = HashMap::new();
    for &(u, v, c) in edges {
        let Some(c) = c else {
            if allow_blank {
                continue;
            }
            return Verdict::Fail(Witness::Uncoloured(key(u, v)));
        };
        if c == 0 || c > palette {
            return Verdict::Fail(Witness::OutOfPalette(key(u, v), c));
        }
        for x in [u, v] {
            if let Some(&other) = seen.get(&(x, c)) {
                return Verdict::Fail(Witness::Clash {
                    first: other,
                    second: key(u, v),
                    colour: c,
                });
            }
            seen.insert((x, c), key(u, v));
        }
    }
    Verdict::Pass
}

/// Exact k-edge-colourability by backtracking (at most 20 edges).
pub fn brute_force_colourable(edges: &[(V, V)], k: C) -> Result<Verdict, OracleError> {
    if edges.len() > 20 {
        return Err(OracleError::TooLarge(edges.len()));
    }
    let mut degree: HashMap<V, usize> = HashMap::new();
    for &(u, v) in edges {
        *degree.entry(u).or_default() += 1;
        *degree.entry(v).or_default() += 1;
    }
    let mut order: Vec<(V, V)> = edges.to_vec();
    order.sort_by_key(|&(u, v)| std::cmp::Reverse(degree[&u] + degree[&v]));
    let mut used: HashMap<V, u64> = HashMap::new();
    fn go(i: usize, order: &[(V, V)], k: C, used: &mut HashMap<V, u64>) -> bool {
        if i == order.len() {
            return true;
        }
        let (u, v) = order[i];
        for c in 1..=k {
            let bit = 1u64 << c;
            let mu = used.get(&u).copied().unwrap_or(0);
            let mv = used.get(&v).copied().unwrap_or(0);
            if mu & bit != 0 || mv & bit != 0 {
                continue;
            }
            used.insert(u, mu | bit);
            used.insert(v, mv | bit);
            if go(i + 1, order, k, used) {
                return true;
            }
            used.insert(u, mu);
            used.insert(v, mv);
        }
        false
    }
    if go(0, &order, k, &mut used) {
        Ok(Verdict::Pass)
    } else {
        Ok(Verdict::Fail(Witness::NotColourable {
            edges: edges.len(),
            palette: k,
        }))
    }
}

// ---------------------------------------------------------------------------
// An independent colouring model with cheap patching.

#[derive(Debug, Clone)]
pub struct Model {
    k: C,
    adj: Vec<BTreeSet<V>>,
    colour: HashMap<(V, V), C>,
    at: HashMap<(V, C), V>,
}

impl Model {
    pub fn new(n: usize, k: C, edges: &[(V, V, Option<C>)]) -> Self {
        let mut m = Model {
            k,
            adj: vec![BTreeSet::new(); n],
            colour: HashMap::new(),
            at: HashMap::new(),
        };
        for &(u, v, c) in edges {
            m.adj[u].insert(v);
            m.adj[v].insert(u);
            if let Some(c) = c {
                m.paint(u, v, Some(c));
            }
        }
        m
    }

    pub fn paint(&mut self, u: V, v: V, c: Option<C>) {
        if let Some(old) = self.colour.remove(&key(u, v)) {
            self.at.remove(&(u, old));
            self.at.remove(&(v, old));
        }
        if let Some(c) = c {
            self.colour.insert(key(u, v), c);
            self.at.insert((u, c), v);
            self.at.insert((v, c), u);
        }
    }

    pub fn colour_of(&self, u: V, v: V) -> Option<C> {
        self.colour.get(&key(u, v)).copied()
    }

    pub fn adjacent(&self, u: V, v: V) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn partner(&self, v: V, c: C) -> Option<V> {
        self.at.get(&(v, c)).copied()
    }

    fn free(&self, v: V) -> BTreeSet<C> {
        (1..=self.k).filter(|c| !self.at.contains_key(&(v, *c))).collect()
    }

    fn two_hop(&self, seeds: &[V]) -> HashSet<V> {
        let mut out: HashSet<V> = seeds.iter().copied().collect();
        let mut frontier: Vec<V> = seeds.to_vec();
        for _ in 0..2 {
            let mut next = Vec::new();
            for &x in &frontier {
                for &y in &self.adj[x] {
                    if out.insert(y) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// Alternating walk from `start`, first along `first`, then the other colour.
    fn walk(&self, start: V, first: C, other: C, max_vertices: usize) -> Vec<V> {
        let mut out = vec![start];
        let (mut cur, mut want) = (start, first);
        while out.len() < max_vertices {
            let Some(nx) = self.partner(cur, want) else { break };
            if nx == start {
                break;
            }
            out.push(nx);
            cur = nx;
            want = if want == first { other } else { first };
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Fans and consistent steps, transcribed from the construction proofs.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleFan {
    pub leaves: Vec<V>,
    pub alphas: Vec<C>,
    /// 1: colour shared with centre, 2: repeated representative, 3: second-colour terminal.
    pub branch: u8,
}

pub fn oracle_primary_fan(m: &Model, u: V, v: V) -> Option<OracleFan> {
    oracle_fan(m, u, v, None)
}

pub fn oracle_second_fan(m: &Model, u: V, v: V, k2: C) -> Option<OracleFan> {
    oracle_fan(m, u, v, Some(k2))
}

fn oracle_fan(m: &Model, u: V, v: V, k2: Option<C>) -> Option<OracleFan> {
    let at_centre = m.free(u);
    let mut leaves = vec![v];
    let mut alphas: Vec<C> = Vec::new();
    loop {
        let w = *leaves.last().unwrap();
        let here = m.free(w);
        if let Some(&c) = here.intersection(&at_centre).next() {
            alphas.push(c);
            return Some(OracleFan { leaves, alphas, branch: 1 });
        }
        if let Some(&c) = alphas.iter().find(|a| here.contains(a)) {
            alphas.push(c);
            return Some(OracleFan { leaves, alphas, branch: 2 });
        }
        let pick = here.iter().copied().find(|c| Some(*c) != k2);
        match pick {
            Some(c) => {
                alphas.push(c);
                let next = m.partner(u, c)?;
                if leaves.contains(&next) {
                    return None;
                }
                leaves.push(next);
            }
            None => {
                alphas.push(k2?);
                return Some(OracleFan { leaves, alphas, branch: 3 });
            }
        }
    }
}

/// One consistent step: fan prefix length plus the vertex run `q_0, q_1, …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleStep {
    pub fan: Vec<V>,
    pub q: Vec<V>,
    pub pair: (C, C),
}

impl OracleStep {
    /// Chain edges of this step as vertex pairs, fan first.
    pub fn edges(&self) -> Vec<(V, V)> {
        let centre = self.q[0];
        let mut out: Vec<(V, V)> = self.fan.iter().map(|&w| (centre, w)).collect();
        for win in self.q[1..].windows(2) {
            out.push((win[0], win[1]));
        }
        out
    }
}

fn finish_step(
    m: &Model,
    u: V,
    fan: &OracleFan,
    pa: C,
    pb: C,
    budget: usize,
    returns: bool,
) -> OracleStep {
    let k = fan.leaves.len();
    let wk = fan.leaves[k - 1];
    let full = m.walk(wk, pa, pb, usize::MAX);
    let tp = full.len();
    let pair = (pa.min(pb), pa.max(pb));
    let mut q = vec![u];
    let last = full[tp - 1];
    let fan_pos = |x: V| fan.leaves[..k - 1].iter().position(|&w| w == x);
    let into_centre = returns && tp >= 2 && last == u && fan_pos(full[tp - 2]).is_some();
    if budget + 1 < tp && !(into_centre && budget + 2 == tp) {
        q.extend_from_slice(&full[..=budget.min(tp - 1)]);
        return OracleStep { fan: fan.leaves.clone(), q, pair };
    }
    if returns {
        if let Some(i) = fan_pos(last) {
            q.extend(full.iter().rev());
            return OracleStep { fan: fan.leaves[..=i].to_vec(), q, pair };
        }
        if into_centre {
            let s = fan_pos(full[tp - 2]).unwrap();
            let stop = if budget + 2 == tp { 1 } else { 0 };
            q.extend(full[stop..tp - 1].iter().rev());
            return OracleStep { fan: fan.leaves[..=s].to_vec(), q, pair };
        }
    }
    q.extend_from_slice(&full);
    OracleStep { fan: fan.leaves.clone(), q, pair }
}

/// First step on blank edge `uv` centred at `u` with budget `t`.
pub fn oracle_first_step(m: &Model, u: V, v: V, budget: usize) -> Option<OracleStep> {
    let fan = oracle_primary_fan(m, u, v)?;
    let ak = *fan.alphas.last().unwrap();
    if fan.branch == 1 {
        return Some(OracleStep {
            q: vec![u, *fan.leaves.last().unwrap()],
            fan: fan.leaves,
            pair: (ak, ak),
        });
    }
    let k1 = *m.free(u).iter().next()?;
    Some(finish_step(m, u, &fan, k1, ak, budget, true))
}

/// Extension step centred at `u` over blank `uv`, with `k1` free at `u` and `k2` free at `v`.
pub fn oracle_next_step(m: &Model, u: V, v: V, k1: C, k2: C, budget: usize) -> Option<OracleStep> {
    let fan = oracle_second_fan(m, u, v, k2)?;
    let ak = *fan.alphas.last().unwrap();
    match fan.branch {
        1 => Some(OracleStep {
            q: vec![u, *fan.leaves.last().unwrap()],
            fan: fan.leaves,
            pair: (ak, ak),
        }),
        2 => {
            let tau1 = m.free(u).into_iter().find(|c| *c != k1 && *c != k2)?;
            Some(finish_step(m, u, &fan, tau1, ak, budget, true))
        }
        _ => Some(finish_step(m, u, &fan, k1, k2, budget, false)),
    }
}

/// Process path of a step per the mapping from chains to processes.
fn derived_path(step: &OracleStep, budget: usize) -> (Vec<V>, bool) {
    let tail = &step.q[1..];
    if tail.len() <= budget {
        (tail.to_vec(), true)
    } else {
        (tail[..tail.len() - 1].to_vec(), false)
    }
}

// ---------------------------------------------------------------------------
// Process replay.

struct Decoded {
    vertices: Vec<V>,
    edges: Vec<(V, V)>,
    maximal: (C, C, V, V),
}

fn decode(m: &Model, code: &PathCode) -> Option<Decoded> {
    let (lo, hi) = (code.low, code.high);
    if code.len == 0 {
        return None;
    }
    let vertices = match code.first {
        None => {
            if code.len != 1 {
                return None;
            }
            vec![code.anchor]
        }
        Some(f) => {
            if f != lo && f != hi {
                return None;
            }
            let other = if f == lo { hi } else { lo };
            let w = m.walk(code.anchor, f, other, code.len);
            if w.len() != code.len {
                return None;
            }
            w
        }
    };
    let edges = vertices.windows(2).map(|w| key(w[0], w[1])).collect();
    let maximal = if lo == hi {
        (lo, hi, code.anchor, code.anchor)
    } else {
        let a = m.walk(code.anchor, lo, hi, usize::MAX);
        let b = m.walk(code.anchor, hi, lo, usize::MAX);
        let ends = (*a.last().unwrap(), *b.last().unwrap());
        (lo, hi, ends.0.min(ends.1), ends.0.max(ends.1))
    };
    Some(Decoded { vertices, edges, maximal })
}

fn is_complete(m: &Model, code: &PathCode) -> bool {
    if code.low == code.high {
        return true;
    }
    let ends_free = |x: V| {
        let f = m.free(x);
        f.contains(&code.low) as u8 + f.contains(&code.high) as u8
    };
    let Some(d) = decode(m, code) else { return false };
    let first = d.vertices[0];
    let last = *d.vertices.last().unwrap();
    if d.vertices.len() == 1 {
        return ends_free(first) == 2;
    }
    ends_free(first) >= 1 && ends_free(last) >= 1
}

/// Checks a stepping process against the current colouring.
pub fn replay_process(
    n: usize,
    palette: C,
    edges: &[(V, V, Option<C>)],
    process: &SteppingProcess,
    ell: usize,
) -> Verdict {
    let m = Model::new(n, palette, edges);
    replay_on(&m, process, ell)
}

pub fn replay_on(m: &Model, process: &SteppingProcess, ell: usize) -> Verdict {
    let fail = |step: usize, clause: Clause| Verdict::Fail(Witness::Replay { step, clause });
    let mut decoded: Vec<Decoded> = Vec::new();
    for (j, code) in process.paths.iter().enumerate() {
        match decode(m, code) {
            Some(d) => decoded.push(d),
            None => return Verdict::Fail(Witness::Stale { step: j + 1 }),
        }
    }
    let steps = decoded.len();
    if steps == 0 {
        return fail(1, Clause::NotAugmenting);
    }
    let mut centres = vec![process.start];
    for d in &decoded[..steps - 1] {
        centres.push(*d.vertices.last().unwrap());
    }
    let mut last_augmenting = false;
    for j in 0..steps {
        let code = &process.paths[j];
        let cur = &decoded[j];
        if cur.vertices.len() > ell {
            return fail(j + 1, Clause::StepLength);
        }
        if j == 0 {
            if !m.adjacent(centres[0], code.anchor) {
                return fail(1, Clause::NotAdjacent);
            }
            if code.low == code.high {
                return fail(1, Clause::NotFromEndpoint);
            }
            if let Some(f) = code.first {
                let other = if f == code.low { code.high } else { code.low };
                if m.partner(code.anchor, other).is_some() {
                    return fail(1, Clause::NotFromEndpoint);
                }
            }
            last_augmenting = is_complete(m, code);
        } else {
            let prev = &decoded[j - 1];
            let Some(step) = extension_on_patched(m, &prev.vertices, &process.paths[j - 1], code.len) else {
                return fail(j + 1, Clause::Extension);
            };
            let (path, aug) = derived_path(&step, code.len);
            let pair_ok = step.pair == (code.low, code.high);
            if step.q[0] != centres[j] || path != cur.vertices || !pair_ok {
                return fail(j + 1, Clause::Extension);
            }
            last_augmenting = aug;
        }
        for k in 0..j {
            let earlier = &decoded[k];
            if j - k >= 2 && earlier.vertices.iter().any(|x| cur.vertices.contains(x)) {
                return fail(j + 1, Clause::SharedVertex);
            }
            if earlier.edges.iter().any(|e| cur.edges.contains(e)) {
                return fail(j + 1, Clause::SharedEdge);
            }
            if earlier.maximal == cur.maximal {
                return fail(j + 1, Clause::SameMaximalPath);
            }
            let near = m.two_hop(&[centres[k]]);
            if cur.vertices.iter().any(|x| near.contains(x)) {
                return fail(j + 1, Clause::NearCentre);
            }
            if k + 2 <= j {
                let near_path = m.two_hop(&earlier.vertices);
                if cur.vertices.iter().any(|x| near_path.contains(x)) {
                    return fail(j + 1, Clause::PathNearEarlier);
                }
            }
        }
        if j >= 1 {
            let mut seeds: Vec<V> = centres[..j].to_vec();
            for d in &decoded[..j.saturating_sub(1)] {
                seeds.extend_from_slice(&d.vertices);
            }
            if m.two_hop(&seeds).contains(&centres[j]) {
                return fail(j + 1, Clause::CentreNearPrefix);
            }
        }
        if j + 1 < steps && last_augmenting {
            return fail(j + 2, Clause::Extension);
        }
    }
    if !last_augmenting {
        return fail(steps, Clause::NotAugmenting);
    }
    Verdict::Pass
}

/// Uncolours the edge leaving the previous path, swaps the pair along it and
/// runs the second-fan step at its last vertex.
fn extension_on_patched(m: &Model, prev: &[V], prev_code: &PathCode, budget: usize) -> Option<OracleStep> {
    let (lo, hi) = (prev_code.low, prev_code.high);
    if lo == hi {
        return None;
    }
    let t = prev.len();
    let x = prev[t - 1];
    let leave = if t == 1 {
        prev_code.first?
    } else {
        let c = m.colour_of(prev[t - 2], prev[t - 1])?;
        if c == lo { hi } else { lo }
    };
    let next = m.partner(x, leave)?;
    let k2 = leave;
    let k1 = if leave == lo { hi } else { lo };
    let mut patched = m.clone();
    patched.paint(x, next, None);
    let swapped: Vec<(V, V, C)> = prev
        .windows(2)
        .map(|w| {
            let c = m.colour_of(w[0], w[1]).unwrap_or(k1);
            (w[0], w[1], if c == k1 { k2 } else { k1 })
        })
        .collect();
    for &(a, b, _) in &swapped {
        patched.paint(a, b, None);
    }
    for &(a, b, c) in &swapped {
        patched.paint(a, b, Some(c));
    }
    oracle_next_step(&patched, x, next, k1, k2, budget)
}

// ---------------------------------------------------------------------------
// Exhaustive chain enumeration.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedChain {
    pub budgets: Vec<usize>,
    pub edges: Vec<(V, V)>,
    pub augmenting: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Enumeration {
    pub chains: Vec<EnumeratedChain>,
    pub partial: bool,
}

/// All consistent chains on the blank edge `uv` (centred at `u`) with at most
/// `max_steps` steps and per-step budget at most `max_len`.
pub fn enumerate_chains(
    n: usize,
    palette: C,
    edges: &[(V, V, Option<C>)],
    blank: (V, V),
    max_steps: usize,
    max_len: usize,
) -> Enumeration {
    let m = Model::new(n, palette, edges);
    let mut out = Enumeration::default();
    let mut seen: BTreeSet<Vec<(V, V)>> = BTreeSet::new();
    const CAP: usize = 20_000;
    for t in 0..=max_len {
        let Some(step) = oracle_first_step(&m, blank.0, blank.1, t) else { continue };
        let edges = step.edges();
        if !chain_is_simple(&edges) {
            continue;
        }
        explore(
            &m,
            vec![t],
            edges,
            vec![step],
            max_steps,
            max_len,
            &mut out,
            &mut seen,
            CAP,
        );
    }
    out
}

fn chain_is_simple(edges: &[(V, V)]) -> bool {
    let mut s = HashSet::new();
    edges.iter().all(|&(a, b)| s.insert(key(a, b)))
}

#[allow(clippy::too_many_arguments)]
fn explore(
    m: &Model,
    budgets: Vec<usize>,
    edges: Vec<(V, V)>,
    steps: Vec<OracleStep>,
    max_steps: usize,
    max_len: usize,
    out: &mut Enumeration,
    seen: &mut BTreeSet<Vec<(V, V)>>,
    cap: usize,
) {
    if out.chains.len() >= cap {
        out.partial = true;
        return;
    }
    let Some(shifted) = shift_model(m, &edges) else { return };
    let (a, b) = *edges.last().unwrap();
    let augmenting = shifted.free(a).intersection(&shifted.free(b)).next().is_some();
    if seen.insert(edges.clone()) {
        out.chains.push(EnumeratedChain {
            budgets: budgets.clone(),
            edges: edges.clone(),
            augmenting,
        });
    }
    if augmenting || steps.len() >= max_steps {
        return;
    }
    let last = steps.last().unwrap();
    if last.q.len() < 3 {
        return;
    }
    let (u2, v2) = (last.q[last.q.len() - 2], last.q[last.q.len() - 1]);
    let Some(k2) = m.colour_of(u2, v2) else { return };
    let (lo, hi) = last.pair;
    if lo == hi {
        return;
    }
    let k1 = if k2 == lo { hi } else { lo };
    for t in 0..=max_len {
        let Some(step) = oracle_next_step(&shifted, u2, v2, k1, k2, t) else { continue };
        let mut more = edges.clone();
        more.extend(step.edges().into_iter().skip(1));
        if !chain_is_simple(&more) {
            continue;
        }
        let mut all = steps.clone();
        all.push(step);
        if !chain_constraints_hold(m, &all) {
            continue;
        }
        let mut b2 = budgets.clone();
        b2.push(t);
        explore(m, b2, more, all, max_steps, max_len, out, seen, cap);
    }
}

fn chain_constraints_hold(m: &Model, steps: &[OracleStep]) -> bool {
    let j = steps.len() - 1;
    let centres: Vec<V> = steps.iter().map(|s| s.q[0]).collect();
    let paths: Vec<Vec<V>> = steps.iter().map(|s| s.q[1..].to_vec()).collect();
    let mut seeds: Vec<V> = centres[..j].to_vec();
    for p in &paths[..j.saturating_sub(1)] {
        seeds.extend_from_slice(p);
    }
    if m.two_hop(&seeds).contains(&centres[j]) {
        return false;
    }
    for (k, centre) in centres.iter().enumerate().take(j) {
        if paths[j].iter().any(|x| m.two_hop(&[*centre]).contains(x)) {
            return false;
        }
        if k + 2 <= j {
            let near = m.two_hop(&paths[k]);
            if paths[j].iter().any(|x| near.contains(x)) {
                return false;
            }
        }
    }
    true
}

/// Shifts a chain given as consecutive vertex pairs on a copy of the model.
pub fn shift_model(m: &Model, chain: &[(V, V)]) -> Option<Model> {
    let mut out = m.clone();
    if out.colour_of(chain[0].0, chain[0].1).is_some() {
        return None;
    }
    for w in chain.windows(2) {
        let c = out.colour_of(w[1].0, w[1].1)?;
        out.paint(w[1].0, w[1].1, None);
        let (a, b) = w[0];
        if out.partner(a, c).is_some() || out.partner(b, c).is_some() {
            return None;
        }
        out.paint(a, b, Some(c));
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Bichromatic skeleton from scratch.

pub type PathKey = (C, C, Vec<V>);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CanonicalSkeleton {
    pub paths: BTreeSet<PathKey>,
    pub endpoint_edges: BTreeSet<(V, PathKey)>,
    pub near_edges: BTreeSet<(PathKey, V)>,
    pub neighbour_edges: BTreeSet<(V, V)>,
    pub components: BTreeMap<(C, C), usize>,
}

pub fn canonical_path(lo: C, hi: C, mut seq: Vec<V>) -> PathKey {
    if seq.len() > 1 && seq[0] > *seq.last().unwrap() {
        seq.reverse();
    }
    (lo, hi, seq)
}

pub fn skeleton_from_scratch(
    n: usize,
    palette: C,
    edges: &[(V, V, Option<C>)],
    ell: usize,
) -> CanonicalSkeleton {
    let m = Model::new(n, palette, edges);
    let mut sk = CanonicalSkeleton::default();
    for &(u, v, c) in edges {
        if c.is_some() {
            sk.neighbour_edges.insert((u, v));
            sk.neighbour_edges.insert((v, u));
        }
    }
    for lo in 1..=palette {
        for hi in lo + 1..=palette {
            let mut seen = vec![false; n];
            let mut count = 0;
            for s in 0..n {
                if seen[s] || (m.partner(s, lo).is_none() && m.partner(s, hi).is_none()) {
                    continue;
                }
                count += 1;
                let mut comp = Vec::new();
                let mut queue = VecDeque::from([s]);
                seen[s] = true;
                while let Some(x) = queue.pop_front() {
                    comp.push(x);
                    for c in [lo, hi] {
                        if let Some(y) = m.partner(x, c) {
                            if !seen[y] {
                                seen[y] = true;
                                queue.push_back(y);
                            }
                        }
                    }
                }
                let ends: Vec<V> = comp
                    .iter()
                    .copied()
                    .filter(|&x| m.partner(x, lo).is_none() || m.partner(x, hi).is_none())
                    .collect();
                if ends.is_empty() {
                    continue;
                }
                let start = *ends.iter().min().unwrap();
                let first = if m.partner(start, lo).is_some() { lo } else { hi };
                let other = if first == lo { hi } else { lo };
                let seq = m.walk(start, first, other, usize::MAX);
                let len = seq.len();
                let pk = canonical_path(lo, hi, seq.clone());
                for end in [seq[0], seq[len - 1]] {
                    sk.endpoint_edges.insert((end, pk.clone()));
                }
                for (i, &x) in seq.iter().enumerate() {
                    if i.min(len - 1 - i) < ell {
                        sk.near_edges.insert((pk.clone(), x));
                    }
                }
                sk.paths.insert(pk);
            }
            if count > 0 {
                sk.components.insert((lo, hi), count);
            }
        }
    }
    sk
}

// ---------------------------------------------------------------------------
// Splitter checks from scratch. Surpluses are scaled by t.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitterTruth {
    pub t: u32,
    pub delta_max: u64,
    degree: HashMap<(V, C), u64>,
}

impl SplitterTruth {
    pub fn new(edges: &[(V, V, C)], t: u32, delta_max: u64) -> Self {
        let mut degree = HashMap::new();
        for &(u, v, c) in edges {
            *degree.entry((u, c)).or_insert(0) += 1;
            *degree.entry((v, c)).or_insert(0) += 1;
        }
        SplitterTruth { t, delta_max, degree }
    }

    pub fn class_degree(&self, v: V, c: C) -> u64 {
        self.degree.get(&(v, c)).copied().unwrap_or(0)
    }

    /// `t · s_c(v)`.
    pub fn surplus(&self, v: V, c: C) -> i64 {
        (self.t as i64 * self.class_degree(v, c) as i64 - self.delta_max as i64).max(0)
    }

    pub fn sum(&self, u: V, v: V, c: C) -> i64 {
        self.surplus(u, c) + self.surplus(v, c)
    }

    pub fn max_class_degree(&self) -> u64 {
        self.degree.values().copied().max().unwrap_or(0)
    }

    /// `2 t² Φ` computed from the triangular sums.
    pub fn potential_scaled(&self) -> u128 {
        let t = self.t as i128;
        self.degree
            .keys()
            .map(|&(v, c)| {
                let s = self.surplus(v, c) as i128;
                (s * (s + t)) as u128
            })
            .sum()
    }
}

/// Invariant and degree conclusion over a splitter colouring `(u, v, colour)`.
pub fn rebuild_splitter_invariant(
    edges: &[(V, V, C)],
    t: u32,
    delta_max: u64,
    eta: u64,
    epsilon: f64,
) -> Verdict {
    let truth = SplitterTruth::new(edges, t, delta_max);
    let slack = eta as i64 * t as i64;
    for &(u, v, c) in edges {
        let own = truth.sum(u, v, c);
        for i in 1..=t {
            if own > slack + truth.sum(u, v, i) {
                return Verdict::Fail(Witness::Splitter {
                    edge: key(u, v),
                    colour: c,
                    against: i,
                });
            }
        }
    }
    let bound = (1.0 + epsilon) * delta_max as f64;
    let mut worst: Option<(V, C, u64)> = None;
    for (&(v, c), &d) in &truth.degree {
        if (d * t as u64) as f64 > bound + 1e-9 && worst.map_or(true, |w| (d, std::cmp::Reverse((v, c))) > (w.2, std::cmp::Reverse((w.0, w.1)))) {
            worst = Some((v, c, d));
        }
    }
    match worst {
        Some((vertex, colour, degree)) => Verdict::Fail(Witness::ClassDegree {
            vertex,
            colour,
            degree: degree as usize,
        }),
        None => Verdict::Pass,
    }
}

// ---------------------------------------------------------------------------
// Compressed-trie goodness of a set of strings.

/// True when every trie node at depth ≤ `depth - 1` is a leaf or has ≥ `a` children.
pub fn trie_is_good<T: Ord + Clone>(strings: &[Vec<T>], a: usize, depth: usize) -> bool {
    fn node<T: Ord + Clone>(group: &[&Vec<T>], offset: usize, d: usize, a: usize, depth: usize, root: bool) -> bool {
        if group.len() <= 1 || d >= depth {
            return true;
        }
        let mut pos = offset;
        if !root {
            loop {
                let Some(c) = group[0].get(pos) else { break };
                if group.iter().all(|s| s.get(pos) == Some(c)) {
                    pos += 1;
                } else {
                    break;
                }
            }
        }
        let mut children: BTreeMap<Option<&T>, Vec<&Vec<T>>> = BTreeMap::new();
        for s in group {
            children.entry(s.get(pos)).or_default().push(s);
        }
        if children.len() < a {
            return false;
        }
        children.iter().all(|(c, g)| c.is_none() || node(g, pos + 1, d + 1, a, depth, false))
    }
    let group: Vec<&Vec<T>> = strings.iter().collect();
    node(&group, 0, 0, a, depth, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph_is_proper() {
        assert_eq!(verify_proper(&[], 3), Verdict::Pass);
    }

    #[test]
    fn clash_names_both_edges() {
        let v = verify_proper(&[(0, 1, Some(1)), (1, 2, Some(1))], 3);
        assert_eq!(
            v,
            Verdict::Fail(Witness::Clash {
                first: (0, 1),
                second: (1, 2),
                colour: 1
            })
        );
    }

    #[test]
    fn triangle_needs_three_colours() {
        let tri = [(0, 1), (1, 2), (0, 2)];
        assert!(brute_force_colourable(&tri, 3).unwrap().passed());
        assert!(!brute_force_colourable(&tri, 2).unwrap().passed());
    }

    #[test]
    fn brute_force_rejects_large_inputs() {
        let many: Vec<(V, V)> = (0..21).map(|i| (i, i + 1)).collect();
        assert_eq!(brute_force_colourable(&many, 3), Err(OracleError::TooLarge(21)));
    }

    #[test]
    fn trie_goodness_counts_children() {
        let s = vec![vec![1, 2], vec![3, 4]];
        assert!(trie_is_good(&s, 2, 1));
        assert!(!trie_is_good(&s, 3, 1));
        let t = vec![vec![1, 2], vec![1, 3], vec![4]];
        assert!(trie_is_good(&t, 2, 2));
        let u = vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![5]];
        assert!(trie_is_good(&u, 2, 2));
        assert!(!trie_is_good(&u, 3, 2));
    }
}
