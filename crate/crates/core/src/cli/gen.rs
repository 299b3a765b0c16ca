//! Seeded stream generators.

use std::collections::{BTreeSet, VecDeque};

use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::stream::{Update, UpdateStream};
use crate::graph_core::Vertex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamKind {
    UniformRandom,
    SlidingWindow,
    DegreeOscillation,
    BipartiteRegular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub kind: StreamKind,
    pub n: usize,
    pub steps: usize,
    pub seed: u64,
    /// Degree cap for random kinds, target degree for bipartite-regular,
    /// peak hub degree for degree-oscillation.
    pub degree: Option<usize>,
    /// Edge budget of sliding-window.
    pub window: Option<usize>,
}

struct Builder {
    n: usize,
    deg: Vec<usize>,
    present: BTreeSet<(Vertex, Vertex)>,
    order: Vec<(Vertex, Vertex)>,
    out: Vec<Update>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            n,
            deg: vec![0; n],
            present: BTreeSet::new(),
            order: Vec::new(),
            out: Vec::new(),
        }
    }

    fn can_add(&self, u: Vertex, v: Vertex, cap: usize) -> bool {
        u != v && self.deg[u] < cap && self.deg[v] < cap && !self.present.contains(&(u.min(v), u.max(v)))
    }

    fn add(&mut self, u: Vertex, v: Vertex) {
        self.deg[u] += 1;
        self.deg[v] += 1;
        self.present.insert((u.min(v), u.max(v)));
        self.order.push((u, v));
        self.out.push(Update::Insert(u, v));
    }

    fn remove(&mut self, u: Vertex, v: Vertex) {
        self.deg[u] -= 1;
        self.deg[v] -= 1;
        self.present.remove(&(u.min(v), u.max(v)));
        self.out.push(Update::Delete(u, v));
    }

    /// Tries a few random pairs; gives up quietly when the graph is saturated.
    fn add_random(&mut self, rng: &mut ChaCha8Rng, cap: usize) -> Option<(Vertex, Vertex)> {
        for _ in 0..64 {
            let (u, v) = (rng.gen_range(0..self.n), rng.gen_range(0..self.n));
            if self.can_add(u, v, cap) {
                self.add(u, v);
                return Some((u, v));
            }
        }
        None
    }

    fn remove_random(&mut self, rng: &mut ChaCha8Rng) {
        let i = rng.gen_range(0..self.order.len());
        let (u, v) = self.order.swap_remove(i);
        self.remove(u, v);
    }

    fn finish(self) -> UpdateStream {
        let mut s = UpdateStream {
            n: self.n,
            delta_hint: None,
            updates: self.out,
        };
        s.delta_hint = Some(s.peak_degree());
        s
    }
}

pub fn generate(p: &GenParams) -> UpdateStream {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut b = Builder::new(p.n.max(2));
    let n = b.n;
    match p.kind {
        StreamKind::UniformRandom => {
            let cap = p.degree.unwrap_or(usize::MAX);
            while b.out.len() < p.steps {
                let grow = b.order.is_empty() || rng.gen_bool(0.6);
                if !(grow && b.add_random(&mut rng, cap).is_some()) && !b.order.is_empty() {
                    b.remove_random(&mut rng);
                }
                if b.order.is_empty() && b.add_random(&mut rng, cap).is_none() {
                    break;
                }
            }
        }
        StreamKind::SlidingWindow => {
            let window = p.window.unwrap_or(n).max(1);
            let cap = p.degree.unwrap_or(usize::MAX);
            let mut fifo: VecDeque<(Vertex, Vertex)> = VecDeque::new();
            while b.out.len() < p.steps {
                if fifo.len() >= window {
                    let (u, v) = fifo.pop_front().expect("non-empty window");
                    b.remove(u, v);
                } else if let Some(e) = b.add_random(&mut rng, cap) {
                    fifo.push_back(e);
                } else if let Some((u, v)) = fifo.pop_front() {
                    b.remove(u, v);
                } else {
                    break;
                }
            }
        }
        StreamKind::DegreeOscillation => {
            // A hub swings between degree 1 and its peak over a sparse background.
            let peak = p.degree.unwrap_or(n - 1).clamp(1, n - 1);
            let mut spokes: Vec<Vertex> = (1..n).collect();
            spokes.shuffle(&mut rng);
            let mut up = true;
            let mut hub_deg = 0;
            while b.out.len() < p.steps {
                if rng.gen_bool(0.25) {
                    if b.order.len() > hub_deg && rng.gen_bool(0.5) {
                        // Hub edges drawn here are left alone.
                        let i = rng.gen_range(0..b.order.len());
                        let (u, v) = b.order[i];
                        if u != 0 && v != 0 {
                            b.order.swap_remove(i);
                            b.remove(u, v);
                        }
                    } else {
                        let (u, v) = (rng.gen_range(1..n), rng.gen_range(1..n));
                        if b.can_add(u, v, 3) {
                            b.add(u, v);
                        }
                    }
                    continue;
                }
                if up {
                    let v = spokes[hub_deg];
                    if b.can_add(0, v, usize::MAX) {
                        b.add(0, v);
                    }
                    hub_deg += 1;
                    up = hub_deg < peak;
                } else {
                    hub_deg -= 1;
                    let v = spokes[hub_deg];
                    if let Some(i) = b.order.iter().position(|&e| e == (0, v)) {
                        b.order.swap_remove(i);
                        b.remove(0, v);
                    }
                    up = hub_deg <= 1;
                }
            }
        }
        StreamKind::BipartiteRegular => {
            let half = n / 2;
            let d = p.degree.unwrap_or(4).clamp(1, half.max(1));
            let mut edges: Vec<(Vertex, Vertex)> =
                (0..d).flat_map(|k| (0..half).map(move |i| (i, half + (i + k) % half))).collect();
            edges.shuffle(&mut rng);
            for (u, v) in edges.into_iter().take(p.steps) {
                b.add(u, v);
            }
            // Remaining steps churn one edge at a time and put it straight back.
            while b.out.len() < p.steps {
                let (u, v) = b.order[rng.gen_range(0..b.order.len())];
                b.remove(u, v);
                if b.out.len() < p.steps {
                    b.out.push(Update::Insert(u, v));
                    b.deg[u] += 1;
                    b.deg[v] += 1;
                    b.present.insert((u.min(v), u.max(v)));
                }
            }
        }
    }
    b.out.truncate(p.steps);
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kind: StreamKind) -> GenParams {
        GenParams {
            kind,
            n: 40,
            steps: 500,
            seed: 7,
            degree: None,
            window: None,
        }
    }

    #[test]
    fn every_kind_replays_cleanly() {
        for kind in StreamKind::value_variants() {
            let s = generate(&params(*kind));
            let again = UpdateStream::parse(&s.render("x")).unwrap();
            assert_eq!(again.updates.len(), 500, "{kind:?}");
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let p = params(StreamKind::UniformRandom);
        assert_eq!(generate(&p).render(""), generate(&p).render(""));
    }

    #[test]
    fn sliding_window_respects_window() {
        let s = generate(&GenParams { window: Some(15), ..params(StreamKind::SlidingWindow) });
        let mut live = 0i64;
        for u in &s.updates {
            live += if matches!(u, Update::Insert(..)) { 1 } else { -1 };
            assert!(live <= 15);
        }
    }

    #[test]
    fn bipartite_reaches_target_degree() {
        let s = generate(&GenParams { steps: 80, degree: Some(4), ..params(StreamKind::BipartiteRegular) });
        let mut deg = vec![0; 40];
        for u in &s.updates {
            if let Update::Insert(a, b) = *u {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        assert!(deg.iter().all(|&d| d == 4));
    }

    #[test]
    fn oscillation_reaches_its_peak() {
        let s = generate(&GenParams { steps: 2000, degree: Some(20), ..params(StreamKind::DegreeOscillation) });
        assert_eq!(s.peak_degree(), 20);
    }
}
