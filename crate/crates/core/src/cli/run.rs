use std::collections::BTreeMap;

use serde::Serialize;

use super::stream::{Update, UpdateStream};
use crate::params::Overrides;
use crate::pipeline::{BackendChoice, Failure, Mode, Pipeline, PipelineConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub mode: Mode,
    pub epsilon: f64,
    pub delta_max: Option<usize>,
    pub backend: BackendChoice,
    pub overrides: Overrides,
    /// Validate after every this many updates; 0 validates only at the end.
    pub validate_every: usize,
    pub audit: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            mode: Mode::Full,
            epsilon: 0.5,
            delta_max: None,
            backend: BackendChoice::Auto,
            overrides: Overrides::default(),
            validate_every: 0,
            audit: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub update: u64,
    pub edges: usize,
    pub max_degree: usize,
    pub colours_used: usize,
    pub palette_bound: usize,
    pub recolourings: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureReport {
    pub update: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WallTime {
    pub total_ns: u64,
    pub max_update_ns: u64,
    pub mean_update_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub mode: Mode,
    pub n: usize,
    pub epsilon: f64,
    pub delta_max: usize,
    pub updates: u64,
    pub insertions: u64,
    pub deletions: u64,
    pub final_edges: usize,
    pub recolourings: u64,
    pub colours_used: usize,
    pub peak_colours_used: usize,
    pub max_degree: usize,
    pub peak_degree: usize,
    pub validations: u64,
    pub validation_failures: u64,
    pub first_failure: Option<FailureReport>,
    pub counters: BTreeMap<String, u64>,
    pub samples: Vec<Sample>,
    pub wall: WallTime,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.validation_failures == 0
    }

    /// The report with every timing field zeroed, for byte comparisons.
    pub fn without_wall(&self) -> RunReport {
        RunReport {
            wall: WallTime {
                total_ns: 0,
                max_update_ns: 0,
                mean_update_ns: 0,
            },
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn describe(f: &Failure) -> String {
    match f {
        Failure::Improper(v) => format!("improper colouring: {v:?}"),
        Failure::Palette { used, bound } => format!("{used} colours in use, bound {bound}"),
        Failure::Splitter(v) => format!("splitter invariant: {v:?}"),
    }
}

pub fn run(stream: &UpdateStream, opts: &RunOptions) -> RunReport {
    let delta_max = opts
        .delta_max
        .or(stream.delta_hint)
        .unwrap_or_else(|| stream.peak_degree())
        .max(1);
    let config = PipelineConfig {
        backend: opts.backend,
        overrides: opts.overrides,
        audit: opts.audit,
        ..PipelineConfig::new(stream.n, opts.epsilon, delta_max, opts.mode)
    };
    let mut p = Pipeline::new(config);
    let mut validations = 0;
    let mut failures = 0;
    let mut first_failure = None;
    let mut samples = Vec::new();
    let mut peak_colours = 0;
    let mut peak_degree = 0;
    let mut fail = |update: u64, reason: String, failures: &mut u64| {
        *failures += 1;
        first_failure.get_or_insert(FailureReport { update, reason });
    };
    let total = stream.updates.len();
    for (i, u) in stream.updates.iter().enumerate() {
        let step = i as u64 + 1;
        let out = match *u {
            Update::Insert(a, b) => p.insert(a, b),
            Update::Delete(a, b) => p.delete(a, b),
        };
        if let Err(e) = out {
            fail(step, format!("engine error: {e}"), &mut failures);
            break;
        }
        let m = p.metrics();
        peak_colours = peak_colours.max(m.colours_used as usize);
        peak_degree = peak_degree.max(m.max_degree as usize);
        let due = if opts.validate_every == 0 { i + 1 == total } else { (i + 1) % opts.validate_every == 0 };
        if due {
            validations += 1;
            if let Err(f) = p.validate() {
                fail(step, describe(&f), &mut failures);
            }
            samples.push(Sample {
                update: step,
                edges: p.current_colouring().edges.len(),
                max_degree: m.max_degree as usize,
                colours_used: m.colours_used as usize,
                palette_bound: p.palette_bound(),
                recolourings: m.recolourings,
            });
        }
    }
    let m = p.metrics();
    let counters = m
        .counters()
        .into_iter()
        .filter(|(k, _)| !k.starts_with("wall"))
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    RunReport {
        mode: opts.mode,
        n: stream.n,
        epsilon: opts.epsilon,
        delta_max,
        updates: m.updates,
        insertions: m.insertions,
        deletions: m.deletions,
        final_edges: p.current_colouring().edges.len(),
        recolourings: m.recolourings,
        colours_used: m.colours_used as usize,
        peak_colours_used: peak_colours,
        max_degree: m.max_degree as usize,
        peak_degree,
        validations,
        validation_failures: failures,
        first_failure,
        counters,
        samples,
        wall: WallTime {
            total_ns: m.wall_ns_total,
            max_update_ns: m.wall_ns_max,
            mean_update_ns: m.wall_ns_total.checked_div(m.updates).unwrap_or(0),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_stream_reports_zero_updates() {
        let s = UpdateStream::parse("4\n").unwrap();
        let r = run(&s, &RunOptions::default());
        assert_eq!(r.updates, 0);
        assert!(r.passed());
    }

    #[test]
    fn insert_then_delete_leaves_nothing() {
        let s = UpdateStream::parse("2\n+ 0 1\n- 0 1\n").unwrap();
        let r = run(&s, &RunOptions { validate_every: 1, ..RunOptions::default() });
        assert_eq!(r.updates, 2);
        assert_eq!(r.final_edges, 0);
        assert_eq!(r.validations, 2);
        assert!(r.passed());
    }
}
