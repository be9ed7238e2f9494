//! Spectral projections onto unions of open intervals, and the maximal
//! angle between two orthogonal projections.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::eigen::{asymmetry, symmetric_eigen, SymmetricEigen};
use crate::error::{Error, Result};
use crate::scalar::Angle;

/// How close an eigenvalue may come to a finite interval endpoint.
pub const BOUNDARY_TOL: f64 = 1e-10;
/// Tolerance used when validating projector inputs.
pub const PROJECTOR_TOL: f64 = 1e-9;

/// A finite union of open intervals of the real line. Endpoints may be infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn all() -> Self {
        IntervalSet { intervals: vec![(f64::NEG_INFINITY, f64::INFINITY)] }
    }

    /// The open interval `(lo, hi)`; empty if `lo ≥ hi`.
    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Invalid("interval endpoint is NaN".into()));
        }
        Ok(if lo < hi { IntervalSet { intervals: vec![(lo, hi)] } } else { Self::empty() })
    }

    /// Open `radius`-neighbourhood of a finite point set.
    pub fn neighbourhood(points: &[f64], radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Invalid(format!("radius must be positive, got {radius}")));
        }
        let mut set = Self::empty();
        for &p in points {
            set = set.union(&Self::open(p - radius, p + radius)?);
        }
        Ok(set)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut v: Vec<(f64, f64)> = self.intervals.iter().chain(&other.intervals).copied().collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            match merged.last_mut() {
                // Touching open intervals leave their common endpoint out.
                Some(last) if lo < last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        IntervalSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo < x && x < hi)
    }

    /// Distance from `x` to the nearest finite endpoint (infinite if none).
    pub fn boundary_distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .flat_map(|&(lo, hi)| [lo, hi])
            .filter(|e| e.is_finite())
            .map(|e| (x - e).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `Σ q_i q_iᵀ` over the given eigenvector columns.
pub fn projector_from_columns(vectors: &DMatrix<f64>, columns: &[usize]) -> DMatrix<f64> {
    let n = vectors.nrows();
    let mut p = DMatrix::<f64>::zeros(n, n);
    for &j in columns {
        let q = vectors.column(j);
        p += q * q.transpose();
    }
    p
}

/// Spectral projection of an already decomposed matrix onto `set`.
pub fn projection_from_eigen(eig: &SymmetricEigen, set: &IntervalSet) -> Result<DMatrix<f64>> {
    let mut inside = Vec::new();
    for (j, &lambda) in eig.values.iter().enumerate() {
        if set.boundary_distance(lambda) <= BOUNDARY_TOL {
            return Err(Error::BoundaryEigenvalue { eigenvalue: lambda, tol: BOUNDARY_TOL });
        }
        if set.contains(lambda) {
            inside.push(j);
        }
    }
    Ok(projector_from_columns(&eig.vectors, &inside))
}

/// The orthogonal projector onto the eigenvectors of `mat` whose eigenvalues lie in `set`.
pub fn spectral_projection(mat: &DMatrix<f64>, set: &IntervalSet) -> Result<DMatrix<f64>> {
    projection_from_eigen(&symmetric_eigen(mat)?, set)
}

/// `‖P² − P‖` and `‖Pᵀ − P‖` as largest absolute entries.
pub fn projector_defects(p: &DMatrix<f64>) -> (f64, f64) {
    ((p * p - p).amax(), asymmetry(p))
}

fn validate_projector(p: &DMatrix<f64>) -> Result<()> {
    if p.nrows() != p.ncols() {
        return Err(Error::Invalid("projector must be square".into()));
    }
    let (idem, sym) = projector_defects(p);
    let defect = idem.max(sym);
    if !(defect <= PROJECTOR_TOL) {
        return Err(Error::NotProjector { defect });
    }
    Ok(())
}

/// Operator norm of a symmetric matrix, as its largest absolute eigenvalue.
pub fn operator_norm(mat: &DMatrix<f64>) -> Result<f64> {
    Ok(symmetric_eigen(mat)?.spectral_radius())
}

/// `arcsin ‖P − Q‖` for orthogonal projections `P` and `Q`.
pub fn maximal_angle(p: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<Angle> {
    if p.shape() != q.shape() {
        return Err(Error::Invalid(format!("shape mismatch {:?} vs {:?}", p.shape(), q.shape())));
    }
    validate_projector(p)?;
    validate_projector(q)?;
    let norm = operator_norm(&(p - q))?;
    Angle::new(norm.min(1.0).asin())
}
