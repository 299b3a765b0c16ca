//! Closed-form parameters of the splitter, hierarchy, stepping sets and scheduler.
//!
//! `log` is base two throughout. Quantities that are astronomically large at
//! default settings are returned as `f64` and may be infinite.

use serde::{Deserialize, Serialize};

/// Hand-set values that replace the formulas below. Absent fields keep the formula.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub eta: Option<u64>,
    pub ell: Option<usize>,
    pub a: Option<usize>,
    pub levels: Option<usize>,
    pub t1: Option<u64>,
    pub t2: Option<u64>,
    /// Divisor `⌊2^{√log n}⌋` of the level rule.
    pub base: Option<u64>,
    /// Degree below which the hierarchy stops and the direct colourer is used.
    #[serde(alias = "thresholds")]
    pub threshold: Option<u64>,
    pub mu: Option<f64>,
}

/// Smallest `η` the splitter accepts from the formula; below it a recolouring
/// may fail to lower the potential and the repair loop need not terminate.
pub const MIN_DERIVED_ETA: u64 = 4;

pub fn log2n(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

/// `⌈√log₂ n⌉`, the budget used for step counts and levels.
pub fn sqrt_log_ceil(n: usize) -> usize {
    log2n(n).sqrt().ceil() as usize
}

/// `log₂ n` when it is a whole number.
fn exact_log2(n: usize) -> Option<u128> {
    n.is_power_of_two().then(|| n.trailing_zeros().max(1) as u128)
}

/// `ε` as `p/q` when a fraction with `q ≤ 10⁶` rounds to exactly this float,
/// so that `0.1` is read as `1/10` rather than its binary expansion.
pub fn epsilon_ratio(epsilon: f64) -> Option<(u128, u128)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return None;
    }
    // Continued-fraction convergents.
    let (mut h0, mut h1, mut k0, mut k1) = (0u128, 1u128, 1u128, 0u128);
    let mut x = epsilon;
    for _ in 0..40 {
        let a = x.floor();
        if a > 1e12 {
            break;
        }
        let a = a as u128;
        (h0, h1) = (h1, a * h1 + h0);
        (k0, k1) = (k1, a * k1 + k0);
        if k1 > 1_000_000 {
            break;
        }
        if h1 as f64 / k1 as f64 == epsilon {
            return Some((h1, k1));
        }
        let frac = x - a as f64;
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

/// Integer form `(log n, p, q)` of the inputs when both are available.
fn exact_inputs(n: usize, epsilon: f64) -> Option<(u128, u128, u128)> {
    let k = exact_log2(n)?;
    let (p, q) = epsilon_ratio(epsilon)?;
    Some((k, p, q))
}

/// `⌊ε²Δmax / (128 t log n)⌋`.
pub fn eta(n: usize, t: u32, delta_max: u64, epsilon: f64) -> u64 {
    if let Some((k, p, q)) = exact_inputs(n, epsilon) {
        let num = p.checked_mul(p).and_then(|x| x.checked_mul(delta_max as u128));
        let den = q.checked_mul(q).and_then(|x| x.checked_mul(128 * t.max(1) as u128 * k));
        if let (Some(num), Some(den)) = (num, den) {
            return (num / den).min(u64::MAX as u128) as u64;
        }
    }
    (epsilon * epsilon * delta_max as f64 / (128.0 * t as f64 * log2n(n))).floor() as u64
}

/// `⌈500 Δmax / η⌉`; a zero `η` is treated as one.
pub fn stride(delta_max: u64, eta: u64) -> u64 {
    (500 * delta_max).div_ceil(eta.max(1)).max(1)
}

/// Lower bound on `Δmax/t` under which the splitter's degree guarantee holds.
pub fn splitter_regime(n: usize, epsilon: f64) -> f64 {
    1e4 * log2n(n).powi(2) / (epsilon * epsilon)
}

fn saturating_pow2(x: f64) -> u128 {
    if x >= 127.0 {
        u128::MAX
    } else {
        x.exp2().floor() as u128
    }
}

/// `⌊2^{10√log n}⌋`.
pub fn t1(n: usize) -> u128 {
    saturating_pow2(10.0 * log2n(n).sqrt())
}

/// `⌊2^{√log n}⌋`, the divisor in the level rule.
pub fn level_base(n: usize) -> u128 {
    saturating_pow2(log2n(n).sqrt())
}

/// `⌊log n / ε⌋`.
pub fn t2(n: usize, epsilon: f64) -> u128 {
    match exact_inputs(n, epsilon) {
        Some((k, p, q)) => k * q / p,
        None => (log2n(n) / epsilon).floor() as u128,
    }
}

/// `⌈10⁷ log⁵ n / ε³⌉`: below this the hierarchy is skipped.
pub fn hierarchy_threshold(n: usize, epsilon: f64) -> u128 {
    if let Some((k, p, q)) = exact_inputs(n, epsilon) {
        let num = k.checked_pow(5).and_then(|x| x.checked_mul(10_000_000)).and_then(|x| x.checked_mul(q.checked_pow(3)?));
        if let (Some(num), Some(den)) = (num, p.checked_pow(3)) {
            return num.div_ceil(den);
        }
    }
    let x = (1e7 * log2n(n).powi(5) / epsilon.powi(3)).ceil();
    if x >= u128::MAX as f64 {
        u128::MAX
    } else {
        x as u128
    }
}

/// `ε / (128 log n)`, the hierarchy's per-level slack.
pub fn hierarchy_mu(n: usize, epsilon: f64) -> f64 {
    epsilon / (128.0 * log2n(n))
}

/// `4⌈√log₂ n⌉`.
pub fn depth_bound(n: usize) -> usize {
    4 * sqrt_log_ceil(n)
}

/// Both sides of `(1+μ)^{4 log n} ≤ 1 + ε/16` with the hierarchy's `μ`.
pub fn slack_inequality(n: usize, epsilon: f64) -> (f64, f64) {
    let lhs = (1.0 + hierarchy_mu(n, epsilon)).powf(4.0 * log2n(n));
    (lhs, 1.0 + epsilon / 16.0)
}

/// Default step length `10⁴ (10Δmax+1)^{50√log n}`.
pub fn default_ell(n: usize, delta_max: u64) -> f64 {
    1e4 * ((10 * delta_max + 1) as f64).powf(50.0 * log2n(n).sqrt())
}

/// Admissible range for `a` given `ell`: `ℓ / (2^{3√log n}(Δmax+1)^{e√log n})` for
/// `e = 8` (low end) and `e = 6` (high end).
pub fn a_range(n: usize, delta_max: u64, ell: f64) -> (f64, f64) {
    let r = log2n(n).sqrt();
    let d = (delta_max + 1) as f64;
    let base = (3.0 * r).exp2();
    (ell / (base * d.powf(8.0 * r)), ell / (base * d.powf(6.0 * r)))
}

/// Which hypothesis a configured `a` satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ARegime {
    BelowRange,
    InRange,
    AboveRange,
}

pub fn a_regime(n: usize, delta_max: u64, ell: usize, a: usize) -> ARegime {
    let (lo, hi) = a_range(n, delta_max, ell as f64);
    let a = a as f64;
    if a < lo {
        ARegime::BelowRange
    } else if a > hi {
        ARegime::AboveRange
    } else {
        ARegime::InRange
    }
}

/// Scheduler interval ratio `1 + ε/7`.
pub fn scheduler_ratio(epsilon: f64) -> f64 {
    1.0 + epsilon / 7.0
}

/// `(1+μ)^i`, the upper end of scheduler interval `i`.
pub fn interval_bound(i: usize, epsilon: f64) -> f64 {
    scheduler_ratio(epsilon).powi(i as i32)
}

/// Smallest `s` with `(1+μ)^s ≥ n`.
pub fn scheduler_copies(n: usize, epsilon: f64) -> usize {
    first_copy_for(n, epsilon).max(1)
}

/// `⌊(1+μ)^{i+1}⌋`, the degree cap of scheduler copy `i`.
pub fn copy_cap(i: usize, epsilon: f64) -> usize {
    interval_bound(i + 1, epsilon).floor() as usize
}

/// Smallest copy index `i` whose admission bound `(1+μ)^i` covers degree `d`.
pub fn first_copy_for(d: usize, epsilon: f64) -> usize {
    let mut i = 0;
    while interval_bound(i, epsilon) < d as f64 {
        i += 1;
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stride_rounds_up() {
        assert_eq!(stride(48, 16), 1500);
        assert_eq!(stride(7, 3), 1167);
    }

    #[test]
    fn defaults_at_two_to_sixteen() {
        let n = 1 << 16;
        assert_eq!(sqrt_log_ceil(n), 4);
        assert_eq!(t1(n), 1u128 << 40);
        assert_eq!(t2(n, 0.5), 32);
        assert_eq!(depth_bound(n), 16);
    }

    #[test]
    fn decimal_epsilons_read_as_fractions() {
        assert_eq!(epsilon_ratio(0.1), Some((1, 10)));
        assert_eq!(epsilon_ratio(0.75), Some((3, 4)));
        assert_eq!(epsilon_ratio(1.0 / 3.0), Some((1, 3)));
        assert_eq!(epsilon_ratio(std::f64::consts::PI / 10.0), None);
        assert_eq!(hierarchy_threshold(1 << 16, 0.1), 10_485_760_000_000_000);
    }

    #[test]
    fn scheduler_interval_for_degree_five() {
        assert_eq!(first_copy_for(5, 0.7), 17);
    }
}
