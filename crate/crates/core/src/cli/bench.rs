use std::fmt::Write as _;

use serde::Serialize;

use super::run::{run, RunOptions};
use super::stream::UpdateStream;
use crate::pipeline::Mode;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub mode: Mode,
    pub reps: usize,
    pub median_total_ms: f64,
    pub median_update_us: f64,
    pub recolourings: u64,
    pub recourse_per_update: f64,
    /// Recolouring counts agreed across repetitions.
    pub deterministic: bool,
    pub failures: u64,
}

fn median(xs: &mut [u64]) -> u64 {
    xs.sort_unstable();
    match xs.len() {
        0 => 0,
        k if k % 2 == 1 => xs[k / 2],
        k => (xs[k / 2 - 1] + xs[k / 2]) / 2,
    }
}

pub fn bench(stream: &UpdateStream, modes: &[Mode], reps: usize, base: &RunOptions) -> Vec<BenchRow> {
    let reps = reps.max(1);
    modes
        .iter()
        .map(|&mode| {
            let opts = RunOptions { mode, ..base.clone() };
            let reports: Vec<_> = (0..reps).map(|_| run(stream, &opts)).collect();
            let mut totals: Vec<u64> = reports.iter().map(|r| r.wall.total_ns).collect();
            let mut means: Vec<u64> = reports.iter().map(|r| r.wall.mean_update_ns).collect();
            let first = &reports[0];
            BenchRow {
                mode,
                reps,
                median_total_ms: median(&mut totals) as f64 / 1e6,
                median_update_us: median(&mut means) as f64 / 1e3,
                recolourings: first.recolourings,
                recourse_per_update: first.recolourings as f64 / first.updates.max(1) as f64,
                deterministic: reports.iter().all(|r| r.recolourings == first.recolourings),
                failures: reports.iter().map(|r| r.validation_failures).sum(),
            }
        })
        .collect()
}

pub fn table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>5} {:>12} {:>12} {:>12} {:>10} {:>6} {:>8}",
        "mode", "reps", "total_ms", "update_us", "recolour", "per_upd", "det", "fail"
    );
    for r in rows {
        let mode = serde_json::to_value(r.mode).expect("mode serialises");
        let _ = writeln!(
            out,
            "{:<10} {:>5} {:>12.3} {:>12.3} {:>12} {:>10.4} {:>6} {:>8}",
            mode.as_str().unwrap_or("?"),
            r.reps,
            r.median_total_ms,
            r.median_update_us,
            r.recolourings,
            r.recourse_per_update,
            r.deterministic,
            r.failures
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_single_rep_is_one_row() {
        let s = UpdateStream::parse("3\n+ 0 1\n+ 1 2\n").unwrap();
        let rows = bench(&s, &[Mode::Direct], 1, &RunOptions::default());
        assert_eq!(rows.len(), 1);
        assert!(rows[0].deterministic);
        assert_eq!(table(&rows).lines().count(), 2);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [5, 1, 3]), 3);
        assert_eq!(median(&mut [4, 1, 3, 2]), 2);
        assert_eq!(median(&mut []), 0);
    }
}
