//! The interpolation path `B_t = A + t·d·V/‖V‖` and its partition estimates.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::eigen::symmetric_eigen;
use super::projection::maximal_angle;
use super::trial::{build_problem, Layout, SpectralProblem, MAX_RESAMPLES, ROUND_OFF};
use crate::error::{Error, Result};
use crate::optimizer::{apply_w, t_closed};
use crate::scalar::{step_cost, MAX_STEP};

/// Per-step quantities along the partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub t_from: f64,
    pub t_to: f64,
    /// `ρ(P_{t_j}, P_{t_{j+1}})`
    pub angle: f64,
    /// `(π/2)(t_{j+1} − t_j)/(1 − 2t_{j+1})`, capped at 1, bounding `‖P_{t_j} − P_{t_{j+1}}‖`.
    pub local_bound: f64,
    /// `(t_{j+1} − t_j)/(1 − 2t_j)`
    pub lambda: f64,
    /// `½·arcsin(πλ_j)` when `λ_j ≤ 1/π`.
    pub step_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub seed: u64,
    pub dim: usize,
    pub ratio: f64,
    pub partition: Vec<f64>,
    /// `δ_{t_j} − (1 − 2t_j)·d` at every partition point.
    pub gap_slack: Vec<f64>,
    pub steps: Vec<PathStep>,
    /// `ρ(P_0, P_ratio)`
    pub total_angle: f64,
    /// `Σ ρ(P_{t_j}, P_{t_{j+1}})`
    pub angle_sum: f64,
    pub gap_bound_ok: bool,
    pub triangle_ok: bool,
    pub local_bound_ok: bool,
    /// `ρ_j ≤ ½·arcsin(πλ_j)` for every step with `λ_j ≤ 1/π`.
    pub step_cost_ok: bool,
}

impl PathReport {
    pub fn passed(&self) -> bool {
        self.gap_bound_ok && self.triangle_ok && self.local_bound_ok && self.step_cost_ok
    }
}

fn check_partition(partition: &[f64], ratio: f64) -> Result<()> {
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(Error::domain("ratio", ratio, "(0, 1/2)"));
    }
    if partition.len() < 2 || partition[0] != 0.0 {
        return Err(Error::Invalid("partition must start at 0 and have at least two points".into()));
    }
    if partition.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("partition must be strictly increasing".into()));
    }
    let last = *partition.last().expect("nonempty");
    if (last - ratio).abs() > 1e-12 {
        return Err(Error::Invalid(format!("partition ends at {last}, expected {ratio}")));
    }
    Ok(())
}

/// Uniform partition of `[0, ratio]` into `steps` pieces.
pub fn uniform_partition(ratio: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|j| ratio * j as f64 / steps as f64).collect()
}

/// The partition generated by the maximiser of `T` at `θ = N(ratio)`.
pub fn optimal_partition(ratio: f64, kappa: f64, vartheta: f64) -> Result<Vec<f64>> {
    let theta = crate::bounds::eval_new(ratio, kappa)?;
    let opt = t_closed(theta, vartheta)?;
    let mut ts: Vec<f64> = apply_w(&opt.argmax).points().to_vec();
    ts.dedup_by(|b, a| *b <= *a);
    if let Some(last) = ts.last_mut() {
        *last = ratio;
    }
    Ok(ts)
}

fn path_on(problem: &SpectralProblem, seed: u64, partition: &[f64]) -> Result<PathReport> {
    let gap = problem.gap;
    let w = &problem.v_matrix / problem.v_norm;
    let sigma = problem.sigma_values();
    let mut projections: Vec<DMatrix<f64>> = Vec::with_capacity(partition.len());
    let mut gap_slack = Vec::with_capacity(partition.len());
    for &t in partition {
        let b = &problem.a_matrix + &w * (t * gap);
        let eig = symmetric_eigen(&b)?;
        // ω_t: eigenvalues within t·d of σ; Ω_t: the rest.
        let near = |l: f64| sigma.iter().any(|&s| (l - s).abs() <= t * gap + ROUND_OFF);
        let (omega, big): (Vec<f64>, Vec<f64>) = eig.values.iter().partition(|&&l| near(l));
        if omega.len() != problem.sigma_set.len() {
            return Err(Error::Degenerate(format!(
                "component at t = {t} has {} eigenvalues, expected {}",
                omega.len(),
                problem.sigma_set.len()
            )));
        }
        let delta = omega
            .iter()
            .flat_map(|a| big.iter().map(move |b| (a - b).abs()))
            .fold(f64::INFINITY, f64::min);
        gap_slack.push(delta - (1.0 - 2.0 * t) * gap);
        projections.push(problem.neighbourhood_projection(&eig)?);
    }
    let mut steps = Vec::with_capacity(partition.len() - 1);
    for j in 0..partition.len() - 1 {
        let (a, b) = (partition[j], partition[j + 1]);
        let angle = maximal_angle(&projections[j], &projections[j + 1])?.radians();
        let lambda = (b - a) / (1.0 - 2.0 * a);
        steps.push(PathStep {
            t_from: a,
            t_to: b,
            angle,
            local_bound: (std::f64::consts::FRAC_PI_2 * (b - a) / (1.0 - 2.0 * b)).min(1.0),
            lambda,
            step_cost: (lambda <= MAX_STEP).then(|| step_cost(lambda)).transpose()?,
        });
    }
    let total_angle = maximal_angle(&projections[0], projections.last().expect("nonempty"))?.radians();
    let angle_sum: f64 = steps.iter().map(|s| s.angle).sum();
    Ok(PathReport {
        seed,
        dim: problem.dim,
        ratio: *partition.last().expect("nonempty"),
        partition: partition.to_vec(),
        gap_bound_ok: gap_slack.iter().all(|&s| s >= -ROUND_OFF),
        gap_slack,
        triangle_ok: total_angle <= angle_sum + ROUND_OFF,
        local_bound_ok: steps.iter().all(|s| s.angle.sin() <= s.local_bound + ROUND_OFF),
        step_cost_ok: steps
            .iter()
            .all(|s| s.step_cost.is_none_or(|c| s.angle <= c + ROUND_OFF)),
        steps,
        total_angle,
        angle_sum,
    })
}

/// Follows `B_t` over `partition` (which must run from 0 to `ratio < ½`) for the
/// random problem drawn from `seed`. See [`PathReport`] for what is checked.
pub fn path_experiment(
    seed: u64,
    dim: usize,
    gap: f64,
    ratio: f64,
    partition: &[f64],
    layout: Layout,
) -> Result<PathReport> {
    check_partition(partition, ratio)?;
    if dim < 2 {
        return Err(Error::domain("dim", dim as f64, "≥ 2"));
    }
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::domain("gap", gap, "(0, ∞)"));
    }
    for attempt in 0..MAX_RESAMPLES {
        let problem = build_problem(seed, attempt, dim, gap, ratio, layout)?;
        match path_on(&problem, seed, partition) {
            Err(Error::BoundaryEigenvalue { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::Degenerate(format!(
        "no admissible draw in {MAX_RESAMPLES} substreams (seed {seed})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PaperConstants;

    #[test]
    fn single_step_is_tight() {
        let r = path_experiment(1, 6, 1.0, 0.3, &[0.0, 0.3], Layout::Subordinated).unwrap();
        assert_eq!(r.steps.len(), 1);
        assert_eq!(r.total_angle, r.angle_sum);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn uniform_four_steps() {
        let p = uniform_partition(0.4, 4);
        for seed in 0..20 {
            let r = path_experiment(seed, 8, 1.0, 0.4, &p, Layout::Split).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn gap_bound_at_quarter() {
        let r = path_experiment(9, 8, 2.0, 0.4, &[0.0, 0.25, 0.4], Layout::Subordinated).unwrap();
        assert!(r.gap_slack[1] >= -ROUND_OFF);
    }

    #[test]
    fn optimal_partition_ends_at_ratio() {
        let c = PaperConstants::solved();
        for ratio in [0.1, 0.3, 0.42, 0.45] {
            let p = optimal_partition(ratio, c.kappa, c.vartheta).unwrap();
            assert_eq!(p[0], 0.0);
            assert_eq!(*p.last().unwrap(), ratio);
            let r = path_experiment(4, 6, 1.0, ratio, &p, Layout::Subordinated).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn rejects_bad_partitions() {
        let l = Layout::Subordinated;
        assert!(path_experiment(0, 4, 1.0, 0.3, &[0.0, 0.2], l).is_err());
        assert!(path_experiment(0, 4, 1.0, 0.3, &[0.1, 0.3], l).is_err());
        assert!(path_experiment(0, 4, 1.0, 0.3, &[0.0, 0.2, 0.2, 0.3], l).is_err());
        assert!(path_experiment(0, 4, 1.0, 0.5, &[0.0, 0.5], l).is_err());
    }
}
