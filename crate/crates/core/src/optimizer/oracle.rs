//! Grid-search oracle for `T_n(θ)`, independent of the closed forms.
//!
//! Ordered tuples `λ_0 ≥ … ≥ λ_{n-1}` are drawn from the grid `k/(π·steps)`;
//! the last parameter `λ_n` is eliminated from the budget via
//! `λ_n = sin(2r)/π` with `r = θ − Σ_{j<n} cost(λ_j)`. The best grid point is
//! then polished by golden-section search on each free coordinate within one
//! grid cell. Every returned value is attained by a feasible sequence, so it
//! is a lower bound for `T_n(θ)`.

use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{max_w, max_w_slice, t0_closed, ParamSeq};
use crate::error::{Error, Result};
use crate::scalar::{step_cost, Angle, MAX_STEP};

/// Largest supported `n` (number of free parameters is `n`, sequence length `n+1`).
pub const MAX_N: usize = 4;
/// Smallest supported grid resolution.
pub const MIN_STEPS: usize = 100;

const ORDER_SLACK: f64 = 1e-12;
const GOLDEN_ITERS: usize = 80;
const REFINE_SWEEPS: usize = 3;

struct Grid {
    lambda: Vec<f64>,
    cost: Vec<f64>,
    factor: Vec<f64>,
}

impl Grid {
    fn new(steps: usize) -> Self {
        let lambda: Vec<f64> = (0..=steps)
            .map(|k| (k as f64 / (PI * steps as f64)).min(MAX_STEP))
            .collect();
        let cost = lambda.iter().map(|&x| step_cost(x).expect("on grid")).collect();
        let factor = lambda.iter().map(|&x| 1.0 - 2.0 * x).collect();
        Grid { lambda, cost, factor }
    }

    /// Indices `k ≤ k_max` with `lo ≤ cost[k] ≤ hi`, as a half-open range.
    fn cost_window(&self, k_max: usize, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let c = &self.cost[..=k_max];
        let start = c.partition_point(|&v| v < lo);
        let end = c.partition_point(|&v| v <= hi);
        start..end.max(start)
    }
}

#[derive(Clone)]
struct Best {
    value: f64,
    idx: Vec<usize>,
}

impl Best {
    fn none() -> Self {
        Best { value: f64::NEG_INFINITY, idx: Vec::new() }
    }

    // Total order for a reproducible reduction: higher value first, then the
    // lexicographically smaller index tuple.
    fn pick(a: Best, b: Best) -> Best {
        if b.value > a.value || (b.value == a.value && b.idx < a.idx) {
            b
        } else {
            a
        }
    }
}

/// Eliminated last parameter for a remaining budget `r`, or `None` if `r` is
/// outside `[0, π/4]`.
fn eliminate(r: f64) -> Option<f64> {
    if (-ORDER_SLACK..=FRAC_PI_4 + ORDER_SLACK).contains(&r) {
        Some((2.0 * r.clamp(0.0, FRAC_PI_4)).sin() / PI)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    grid: &Grid,
    theta: f64,
    depth: usize,
    free: usize,
    k_max: usize,
    spent: f64,
    product: f64,
    idx: &mut Vec<usize>,
    best: &mut Best,
) {
    let left = theta - spent;
    if depth == free {
        let Some(last) = eliminate(left) else { return };
        if last > grid.lambda[k_max] + ORDER_SLACK {
            return;
        }
        let value = 0.5 * (1.0 - product * (1.0 - 2.0 * last));
        if value > best.value || (value == best.value && *idx < best.idx) {
            best.value = value;
            best.idx.clone_from(idx);
        }
        return;
    }
    // This parameter and the `free - depth` after it (eliminated one included)
    // each cost at most cost[k], and together must spend `left`.
    let count = (free - depth + 1) as f64;
    for k in grid.cost_window(k_max, left / count - ORDER_SLACK, left + ORDER_SLACK).rev() {
        idx.push(k);
        search(
            grid,
            theta,
            depth + 1,
            free,
            k,
            spent + grid.cost[k],
            product * grid.factor[k],
            idx,
            best,
        );
        idx.pop();
    }
}

/// Value of a sequence whose last entry is eliminated from the budget, or
/// `None` when infeasible.
fn completed_value(theta: f64, free: &[f64]) -> Option<f64> {
    let mut spent = 0.0;
    let mut product = 1.0;
    for &x in free {
        if !(0.0..=MAX_STEP).contains(&x) {
            return None;
        }
        spent += 0.5 * (PI * x).min(1.0).asin();
        product *= 1.0 - 2.0 * x;
    }
    let last = eliminate(theta - spent)?;
    Some(0.5 * (1.0 - product * (1.0 - 2.0 * last)))
}

/// Golden-section maximisation along each free coordinate within `radius`.
fn refine(theta: f64, start: &[f64], radius: f64) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut fx = completed_value(theta, &x).unwrap_or(f64::NEG_INFINITY);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..REFINE_SWEEPS {
        let before = fx;
        for j in 0..x.len() {
            let centre = x[j];
            let eval = |v: f64| {
                let mut y = x.clone();
                y[j] = v;
                completed_value(theta, &y).unwrap_or(f64::NEG_INFINITY)
            };
            let (mut a, mut b) = ((centre - radius).max(0.0), (centre + radius).min(MAX_STEP));
            let mut c = b - inv_phi * (b - a);
            let mut d = a + inv_phi * (b - a);
            let (mut fc, mut fd) = (eval(c), eval(d));
            for _ in 0..GOLDEN_ITERS {
                if fc >= fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - inv_phi * (b - a);
                    fc = eval(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + inv_phi * (b - a);
                    fd = eval(d);
                }
            }
            let (v, fv) = if fc >= fd { (c, fc) } else { (d, fd) };
            if fv > fx {
                x[j] = v;
                fx = fv;
            }
        }
        if fx <= before {
            break;
        }
    }
    (x, fx)
}

/// Grid-search lower bound for `T_n(θ)`, the best endpoint reachable with
/// `n+1` steps spending exactly `θ`.
///
/// Returns 0 when `θ > (n+1)π/4`, where no sequence of that length can spend
/// the budget. Requires `n ≤ 4` and `steps ≥ 100`.
pub fn brute_force_tn(theta: f64, n: usize, steps: usize) -> Result<f64> {
    let theta = Angle::new(theta)?.radians();
    if n > MAX_N {
        return Err(Error::Invalid(format!("n = {n} exceeds the supported maximum {MAX_N}")));
    }
    if steps < MIN_STEPS {
        return Err(Error::Invalid(format!("steps = {steps} is below {MIN_STEPS}")));
    }
    if theta > (n + 1) as f64 * FRAC_PI_4 {
        return Ok(0.0);
    }
    if n == 0 {
        return t0_closed(theta);
    }
    let grid = Grid::new(steps);
    let top = grid.cost_window(steps, theta / (n + 1) as f64 - ORDER_SLACK, theta + ORDER_SLACK);
    let best = top
        .into_par_iter()
        .map(|k0| {
            let mut best = Best::none();
            let mut idx = vec![k0];
            search(&grid, theta, 1, n, k0, grid.cost[k0], grid.factor[k0], &mut idx, &mut best);
            best
        })
        .reduce(Best::none, Best::pick);
    if best.idx.is_empty() {
        // Every feasible tuple fell between grid points; fall back to equal steps.
        let equal = vec![(2.0 * theta / (n + 1) as f64).sin() / PI; n + 1];
        return Ok(max_w_slice(&equal));
    }
    let start: Vec<f64> = best.idx.iter().map(|&k| grid.lambda[k]).collect();
    let (_, refined) = refine(theta, &start, 1.0 / (PI * steps as f64));
    Ok(refined.max(best.value))
}

/// Optimality of one prefix `(λ_0, …, λ_k)` against the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefixSlack {
    /// `k`, so the prefix has `k+1` entries.
    pub k: usize,
    /// Budget spent by the prefix.
    pub theta: f64,
    /// `max W` of the prefix.
    pub value: f64,
    /// `brute_force_tn(theta, k, steps)`
    pub oracle: f64,
    /// `value − oracle`; negative means the oracle found something better.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub prefixes: Vec<PrefixSlack>,
    pub worst_slack: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks that every prefix of `lambda` is itself optimal for the budget it
/// spends, up to `tol`.
///
/// Sequences longer than `MAX_N + 1` are rejected since the oracle does not
/// reach them.
pub fn truncation_check(lambda: &ParamSeq, steps: usize, tol: f64) -> Result<TruncationReport> {
    if lambda.len() > MAX_N + 1 {
        return Err(Error::Invalid(format!(
            "sequence of length {} exceeds the oracle limit {}",
            lambda.len(),
            MAX_N + 1
        )));
    }
    let mut prefixes = Vec::with_capacity(lambda.len());
    for k in 0..lambda.len() {
        let prefix = lambda.prefix(k + 1)?;
        let theta = prefix.total_cost().min(std::f64::consts::FRAC_PI_2);
        let value = max_w(&prefix);
        let oracle = brute_force_tn(theta, k, steps)?;
        prefixes.push(PrefixSlack {
            k,
            theta,
            value,
            oracle,
            slack: value - oracle,
        });
    }
    let worst_slack = prefixes.iter().map(|p| p.slack).fold(f64::INFINITY, f64::min);
    Ok(TruncationReport {
        prefixes,
        worst_slack,
        tolerance: tol,
        passed: worst_slack >= -tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PaperConstants;
    use crate::optimizer::{t1_closed, t2_closed, t_closed};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn n_zero_is_exact() {
        for i in 0..=50 {
            let theta = FRAC_PI_4 * i as f64 / 50.0;
            let b = brute_force_tn(theta, 0, 100).unwrap();
            assert!((b - t0_closed(theta).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_budget_is_zero() {
        assert_eq!(brute_force_tn(1.0, 0, 100).unwrap(), 0.0);
    }

    #[test]
    fn n_one_matches_two_block() {
        let b = brute_force_tn(0.6, 1, 2000).unwrap();
        let t = t1_closed(0.6).unwrap();
        assert!((b - t).abs() < 1e-6, "{b} vs {t}");
        assert!(b <= t + 1e-12);
    }

    #[test]
    fn n_one_single_regime() {
        let theta = 0.4;
        let b = brute_force_tn(theta, 1, 500).unwrap();
        assert!((b - t1_closed(theta).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn three_free_steps_do_not_beat_two() {
        let v = PaperConstants::solved().vartheta;
        let b = brute_force_tn(FRAC_PI_2, 3, 300).unwrap();
        let t = t2_closed(FRAC_PI_2, v).unwrap();
        assert!((b - t).abs() < 1e-5, "{b} vs {t}");
        assert!(b <= t + 1e-9);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(brute_force_tn(0.5, 5, 100).is_err());
        assert!(brute_force_tn(0.5, 1, 99).is_err());
        assert!(brute_force_tn(-0.5, 1, 100).is_err());
    }

    #[test]
    fn deterministic() {
        let a = brute_force_tn(1.1, 2, 200).unwrap();
        let b = brute_force_tn(1.1, 2, 200).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn truncation_of_three_equal() {
        let v = PaperConstants::solved().vartheta;
        let r = t_closed(FRAC_PI_2, v).unwrap();
        let report = truncation_check(&r.argmax, 400, 1e-5).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.prefixes.len(), 3);
    }

    #[test]
    fn truncation_flags_bad_sequence() {
        let seq = ParamSeq::new(vec![MAX_STEP, 1e-3]).unwrap();
        let report = truncation_check(&seq, 400, 1e-5).unwrap();
        assert!(!report.passed);
        assert!(report.worst_slack < 0.0);
    }

    #[test]
    fn truncation_single_entry() {
        let seq = ParamSeq::new(vec![0.2]).unwrap();
        let report = truncation_check(&seq, 100, 1e-9).unwrap();
        assert!(report.passed);
        assert!(report.worst_slack.abs() < 1e-12);
    }
}
