//! Seeded random spectral problems and the angle measurements on them.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{asymmetry, symmetric_eigen, SymmetricEigen};
use super::projection::{maximal_angle, projection_from_eigen, projector_from_columns, IntervalSet};
use crate::bounds::eval_new;
use crate::constants::{c_crit, PaperConstants};
use crate::error::{Error, Result};
use crate::scalar::Angle;

/// Tolerance of the bound, spectral inclusion and related round-off checks.
pub const ROUND_OFF: f64 = 1e-9;
/// Substreams tried before a degenerate construction is reported.
pub const MAX_RESAMPLES: u64 = 16;

/// How the two spectral components are placed relative to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// `σ` entirely below `Σ`.
    Subordinated,
    /// `Σ` on both sides of `σ`. Needs `dim ≥ 3`; smaller problems fall back
    /// to [`Layout::Subordinated`].
    Split,
}

/// A symmetric matrix `A` with spectral components `σ`, `Σ` at distance `gap`,
/// and a symmetric perturbation `V`.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    pub dim: usize,
    pub a_matrix: DMatrix<f64>,
    /// Eigenvalues of `A`, in the column order of `a_vectors`.
    pub a_values: Vec<f64>,
    pub a_vectors: DMatrix<f64>,
    /// Indices into `a_values` forming `σ`.
    pub sigma_set: Vec<usize>,
    pub gap: f64,
    pub v_matrix: DMatrix<f64>,
    pub v_norm: f64,
}

impl SpectralProblem {
    /// Builds a problem from an explicit diagonalisation of `A`.
    pub fn from_parts(
        a_values: Vec<f64>,
        a_vectors: DMatrix<f64>,
        sigma_set: Vec<usize>,
        v_matrix: DMatrix<f64>,
    ) -> Result<Self> {
        let dim = a_values.len();
        if dim < 2 || a_vectors.shape() != (dim, dim) || v_matrix.shape() != (dim, dim) {
            return Err(Error::Invalid("inconsistent problem dimensions".into()));
        }
        if sigma_set.is_empty() || sigma_set.len() == dim || sigma_set.iter().any(|&i| i >= dim) {
            return Err(Error::Invalid("σ must be a proper nonempty index subset".into()));
        }
        let defect = asymmetry(&v_matrix);
        if defect > 1e-12 * v_matrix.amax().max(1.0) {
            return Err(Error::NotSymmetric { defect });
        }
        let (sig, big) = split_values(&a_values, &sigma_set);
        let gap = sig
            .iter()
            .flat_map(|s| big.iter().map(move |b| (s - b).abs()))
            .fold(f64::INFINITY, f64::min);
        if !(gap > 0.0) {
            return Err(Error::Invalid("σ and Σ must be disjoint".into()));
        }
        let a_matrix = &a_vectors * DMatrix::from_diagonal(&a_values.clone().into()) * a_vectors.transpose();
        let a_matrix = (&a_matrix + a_matrix.transpose()) * 0.5;
        let v_norm = symmetric_eigen(&v_matrix)?.spectral_radius();
        Ok(SpectralProblem { dim, a_matrix, a_values, a_vectors, sigma_set, gap, v_matrix, v_norm })
    }

    pub fn ratio(&self) -> f64 {
        self.v_norm / self.gap
    }

    pub fn sigma_values(&self) -> Vec<f64> {
        split_values(&self.a_values, &self.sigma_set).0
    }

    /// `E_A(σ)`.
    pub fn unperturbed_projection(&self) -> DMatrix<f64> {
        projector_from_columns(&self.a_vectors, &self.sigma_set)
    }

    /// `E_B(O_{d/2}(σ))` for a matrix `B` close to `A`.
    pub fn neighbourhood_projection(&self, eig: &SymmetricEigen) -> Result<DMatrix<f64>> {
        let set = IntervalSet::neighbourhood(&self.sigma_values(), self.gap / 2.0)?;
        projection_from_eigen(eig, &set)
    }
}

fn split_values(values: &[f64], sigma: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let mut sig = Vec::new();
    let mut big = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if sigma.contains(&i) {
            sig.push(v);
        } else {
            big.push(v);
        }
    }
    (sig, big)
}

/// One measured trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleRecord {
    pub seed: u64,
    pub dim: usize,
    /// `‖V‖/d`
    pub ratio: f64,
    /// `arcsin ‖E_A(σ) − E_{A+V}(O_{d/2}(σ))‖`
    pub measured: Angle,
    /// `N(ratio)`
    pub bound: Angle,
    /// `bound − measured`
    pub slack: f64,
}

/// A record together with its side diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub record: AngleRecord,
    /// Largest distance from an eigenvalue of `A+V` to the spectrum of `A`,
    /// minus `‖V‖`. Nonpositive up to round-off.
    pub inclusion_excess: f64,
    /// `‖P² − P‖` of the perturbed projection.
    pub idempotence_defect: f64,
}

fn check_trial_args(dim: usize, gap: f64, ratio: f64) -> Result<()> {
    if dim < 2 {
        return Err(Error::domain("dim", dim as f64, "≥ 2"));
    }
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::domain("gap", gap, "(0, ∞)"));
    }
    if !(ratio > 0.0 && ratio < c_crit()) {
        return Err(Error::domain("ratio", ratio, "(0, c_crit)"));
    }
    Ok(())
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `diag(R)` folded into `Q`.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let qr = normal_matrix(rng, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Random symmetric matrix with operator norm exactly `norm` (up to round-off).
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, norm: f64) -> Result<DMatrix<f64>> {
    let g = normal_matrix(rng, n);
    let v = (&g + g.transpose()) * 0.5;
    let current = symmetric_eigen(&v)?.spectral_radius();
    if !(current > 0.0) {
        return Err(Error::Degenerate("zero perturbation drawn".into()));
    }
    Ok(v * (norm / current))
}

/// Eigenvalues with `σ ⊂ [−s, 0]` and `Σ ⊂ [gap, gap+s]` (plus
/// `[−2s−gap, −s−gap]` for the split layout), `s ~ U[0, 3·gap]`. The extreme
/// values `0` and `gap` are always present so the distance is exactly `gap`.
fn cluster_values(rng: &mut ChaCha8Rng, dim: usize, gap: f64, layout: Layout) -> (Vec<f64>, Vec<usize>) {
    let split = layout == Layout::Split && dim >= 3;
    let spread = rng.random_range(0.0..=3.0 * gap);
    let n_sigma = rng.random_range(1..=dim - if split { 2 } else { 1 });
    let mut values = Vec::with_capacity(dim);
    values.push(0.0);
    for _ in 1..n_sigma {
        values.push(-rng.random_range(0.0..=spread));
    }
    values.push(gap);
    let mut remaining = dim - n_sigma - 1;
    if split {
        values.push(-spread - gap);
        remaining -= 1;
    }
    for _ in 0..remaining {
        let v = rng.random_range(0.0..=spread);
        if split && rng.random_bool(0.5) {
            values.push(-spread - gap - v);
        } else {
            values.push(gap + v);
        }
    }
    (values, (0..n_sigma).collect())
}

/// Draws a random problem for `seed`. Substream `attempt` selects the resample.
pub fn build_problem(
    seed: u64,
    attempt: u64,
    dim: usize,
    gap: f64,
    ratio: f64,
    layout: Layout,
) -> Result<SpectralProblem> {
    let mut rng = rng_for(seed, attempt);
    let (values, sigma) = cluster_values(&mut rng, dim, gap, layout);
    let u = random_orthogonal(&mut rng, dim);
    let v = random_symmetric(&mut rng, dim, ratio * gap)?;
    SpectralProblem::from_parts(values, u, sigma, v)
}

/// Measures the maximal angle for a problem and compares it with `N`.
pub fn measure(problem: &SpectralProblem, seed: u64, kappa: f64) -> Result<Measurement> {
    let perturbed = &problem.a_matrix + &problem.v_matrix;
    let eig = symmetric_eigen(&perturbed)?;
    let p0 = problem.unperturbed_projection();
    let p1 = problem.neighbourhood_projection(&eig)?;
    let inclusion_excess = eig
        .values
        .iter()
        .map(|&l| problem.a_values.iter().map(|&a| (l - a).abs()).fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max)
        - problem.v_norm;
    let ratio = problem.ratio();
    let measured = maximal_angle(&p0, &p1)?;
    let bound = Angle::new(eval_new(ratio, kappa)?)?;
    Ok(Measurement {
        record: AngleRecord {
            seed,
            dim: problem.dim,
            ratio,
            measured,
            bound,
            slack: bound.radians() - measured.radians(),
        },
        inclusion_excess,
        idempotence_defect: (&p1 * &p1 - &p1).amax(),
    })
}

/// A full trial with diagnostics. Degenerate draws (an eigenvalue of `A+V` on
/// the boundary of `O_{d/2}(σ)`) are resampled on the next substream.
pub fn run_trial_measured(seed: u64, dim: usize, gap: f64, ratio: f64, layout: Layout) -> Result<Measurement> {
    check_trial_args(dim, gap, ratio)?;
    let kappa = PaperConstants::solved().kappa;
    for attempt in 0..MAX_RESAMPLES {
        let problem = build_problem(seed, attempt, dim, gap, ratio, layout)?;
        match measure(&problem, seed, kappa) {
            Err(Error::BoundaryEigenvalue { .. }) => continue,
            Err(e) => return Err(e),
            Ok(m) => {
                if m.inclusion_excess > ROUND_OFF {
                    return Err(Error::Degenerate(format!(
                        "spectral inclusion violated by {} (seed {seed})",
                        m.inclusion_excess
                    )));
                }
                if m.record.slack < -ROUND_OFF {
                    return Err(Error::BoundViolated {
                        seed,
                        measured: m.record.measured.radians(),
                        bound: m.record.bound.radians(),
                    });
                }
                return Ok(m);
            }
        }
    }
    Err(Error::Degenerate(format!(
        "no admissible draw in {MAX_RESAMPLES} substreams (seed {seed})"
    )))
}

/// Random trial: `A` with clusters at distance `gap`, `‖V‖ = ratio·gap`.
/// Fails with [`Error::BoundViolated`] if the measured angle exceeds `N(ratio)`
/// by more than round-off.
pub fn run_trial(seed: u64, dim: usize, gap: f64, ratio: f64, layout: Layout) -> Result<AngleRecord> {
    run_trial_measured(seed, dim, gap, ratio, layout).map(|m| m.record)
}

/// Ratio drawn for a trial when none is fixed: uniform on `(0.01, c_crit − 0.001)`.
pub fn sampled_ratio(seed: u64) -> f64 {
    rng_for(seed, u64::MAX).random_range(0.01..c_crit() - 0.001)
}

/// `trials` consecutive seeds starting at `seed`, in seed order.
pub fn run_experiment(
    seed: u64,
    trials: usize,
    dim: usize,
    gap: f64,
    ratio: Option<f64>,
    layout: Layout,
) -> Result<Vec<AngleRecord>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            run_trial(s, dim, gap, ratio.unwrap_or_else(|| sampled_ratio(s)), layout)
        })
        .collect()
}

/// `A = diag(−d/2, d/2)` perturbed by `v` off the diagonal. Returns the
/// measured angle, which should be `½·arctan(2v/d)`.
pub fn two_by_two_angle(gap: f64, v: f64) -> Result<f64> {
    let values = vec![-gap / 2.0, gap / 2.0];
    let vm = DMatrix::from_row_slice(2, 2, &[0.0, v, v, 0.0]);
    let problem = SpectralProblem::from_parts(values, DMatrix::identity(2, 2), vec![0], vm)?;
    if problem.ratio() >= c_crit() {
        return Err(Error::domain("v/d", problem.ratio(), "[0, c_crit)"));
    }
    let eig = symmetric_eigen(&(&problem.a_matrix + &problem.v_matrix))?;
    let p1 = problem.neighbourhood_projection(&eig)?;
    Ok(maximal_angle(&problem.unperturbed_projection(), &p1)?.radians())
}

/// Outcome of [`sharpness_search`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    /// The record with the largest `measured / bound`.
    pub worst: AngleRecord,
    /// Whether the worst record came from the structured family.
    pub structured: bool,
    pub evaluated: usize,
}

// Rotation of the pair (top of σ, bottom of Σ) in the plane they span:
// V = r·d·[[sin ψ, cos ψ], [cos ψ, −sin ψ]] in that basis. ψ = 0 gives
// ½·arctan(2r); sin ψ = 2r gives ½·arcsin(2r).
fn structured_problem(seed: u64, dim: usize, gap: f64, ratio: f64, psi: f64) -> Result<SpectralProblem> {
    let mut rng = rng_for(seed, 0);
    let (values, sigma) = cluster_values(&mut rng, dim, gap, Layout::Subordinated);
    let u = random_orthogonal(&mut rng, dim);
    let top = u.column(0).clone_owned();
    let bottom = u.column(sigma.len()).clone_owned();
    let r = ratio * gap;
    let v = (&top * top.transpose() - &bottom * bottom.transpose()) * (r * psi.sin())
        + (&top * bottom.transpose() + &bottom * top.transpose()) * (r * psi.cos());
    let v = (&v + v.transpose()) * 0.5;
    SpectralProblem::from_parts(values, u, sigma, v)
}

/// Searches for near-extremal configurations: random trials in both layouts
/// for `seeds` seeds, plus a structured two-dimensional family for each seed.
/// Never asserts that the bound is attained.
pub fn sharpness_search(seeds: usize, dim: usize, ratio: f64) -> Result<SharpnessResult> {
    let gap = 1.0;
    check_trial_args(dim, gap, ratio)?;
    let kappa = PaperConstants::solved().kappa;
    let psi_max = (2.0 * ratio).min(1.0).asin();
    let psis: Vec<f64> = (0..=8).map(|k| psi_max * k as f64 / 8.0).collect();
    let per_seed: Vec<Vec<(AngleRecord, bool)>> = (0..seeds as u64)
        .into_par_iter()
        .map(|seed| {
            let mut out = Vec::new();
            for layout in [Layout::Subordinated, Layout::Split] {
                out.push((run_trial(seed, dim, gap, ratio, layout)?, false));
            }
            for &psi in &psis {
                let problem = structured_problem(seed, dim, gap, ratio, psi)?;
                match measure(&problem, seed, kappa) {
                    Ok(m) => out.push((m.record, true)),
                    Err(Error::BoundaryEigenvalue { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(AngleRecord, bool)> = None;
    let mut evaluated = 0;
    for (rec, structured) in per_seed.into_iter().flatten() {
        evaluated += 1;
        let score = rec.measured.radians() / rec.bound.radians();
        let better = best
            .as_ref()
            .is_none_or(|(b, _)| score > b.measured.radians() / b.bound.radians());
        if better {
            best = Some((rec, structured));
        }
    }
    let (worst, structured) = best.ok_or_else(|| Error::Invalid("no seeds to search".into()))?;
    Ok(SharpnessResult { worst, structured, evaluated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_lab::projection::projector_defects;

    #[test]
    fn two_by_two_matches_arctan() {
        for (d, v) in [(1.0, 0.1), (2.0, 0.5), (1.0, 0.4), (3.0, 0.01)] {
            let measured = two_by_two_angle(d, v).unwrap();
            let expected = 0.5 * (2.0 * v / d).atan();
            assert!((measured - expected).abs() < 1e-10, "d={d} v={v}: {measured} vs {expected}");
        }
    }

    #[test]
    fn trial_is_reproducible() {
        let a = run_trial(42, 8, 1.0, 0.3, Layout::Split).unwrap();
        let b = run_trial(42, 8, 1.0, 0.3, Layout::Split).unwrap();
        assert_eq!(a, b);
        let c = run_trial(43, 8, 1.0, 0.3, Layout::Split).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn trial_respects_bound() {
        for seed in 0..50 {
            for layout in [Layout::Subordinated, Layout::Split] {
                let m = run_trial_measured(seed, 6, 1.0, 0.45, layout).unwrap();
                assert!(m.record.slack >= -ROUND_OFF);
                assert!(m.inclusion_excess <= ROUND_OFF);
                assert!(m.idempotence_defect <= 1e-10);
                assert!((m.record.ratio - 0.45).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tiny_ratio_tiny_angle() {
        let r = run_trial(5, 4, 1.0, 1e-6, Layout::Subordinated).unwrap();
        assert!(r.measured.radians() < 1e-5);
    }

    #[test]
    fn construction_has_exact_gap() {
        for seed in 0..20 {
            let p = build_problem(seed, 0, 7, 2.0, 0.2, Layout::Split).unwrap();
            assert_eq!(p.gap, 2.0);
            assert!((p.v_norm - 0.4).abs() < 1e-12);
            let (pd, sd) = projector_defects(&p.unperturbed_projection());
            assert!(pd < 1e-12 && sd < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_trial_args() {
        assert!(run_trial(0, 1, 1.0, 0.1, Layout::Subordinated).is_err());
        assert!(run_trial(0, 4, 0.0, 0.1, Layout::Subordinated).is_err());
        assert!(run_trial(0, 4, 1.0, 0.0, Layout::Subordinated).is_err());
        assert!(run_trial(0, 4, 1.0, 0.46, Layout::Subordinated).is_err());
    }

    #[test]
    fn sharpness_two_dims() {
        let r = sharpness_search(10, 2, 0.2).unwrap();
        assert!(r.worst.measured.radians() >= 0.5 * 0.4f64.atan() - 1e-10);
        assert!(r.worst.measured.radians() <= r.worst.bound.radians() * (1.0 + 1e-9));
    }

    #[test]
    fn structured_family_reaches_half_arcsin() {
        let ratio: f64 = 0.2;
        let kappa = PaperConstants::solved().kappa;
        let psi = (2.0 * ratio).asin();
        let p = structured_problem(3, 5, 1.0, ratio, psi).unwrap();
        let m = measure(&p, 3, kappa).unwrap();
        let target = 0.5 * (2.0 * ratio).asin();
        assert!((m.record.measured.radians() - target).abs() < 1e-9);
        assert!(m.record.slack >= 0.0);
    }

    #[test]
    fn experiment_in_seed_order() {
        let recs = run_experiment(100, 6, 4, 1.0, None, Layout::Subordinated).unwrap();
        let seeds: Vec<u64> = recs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, (100..106).collect::<Vec<_>>());
        assert!(recs.iter().all(|r| r.ratio > 0.01 && r.ratio < c_crit() - 0.001));
    }
}
