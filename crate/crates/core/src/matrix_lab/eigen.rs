//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Sweep cap for [`symmetric_eigen`].
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to `‖A‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Largest tolerated asymmetry `max |A − Aᵀ|`, relative to `max(1, max |A|)`.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Eigen-decomposition `A = Q·diag(values)·Qᵀ` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors, one per column, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    /// Largest absolute eigenvalue, which is the operator norm.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Largest absolute entry of `A − Aᵀ`.
pub fn asymmetry(mat: &DMatrix<f64>) -> f64 {
    let n = mat.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((mat[(i, j)] - mat[(j, i)]).abs());
        }
    }
    worst
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Diagonalises a real symmetric matrix by cyclic Jacobi rotations.
///
/// Input is symmetrised as `(A + Aᵀ)/2` after the symmetry check. Output is
/// deterministic: ascending eigenvalues, each eigenvector signed so its
/// largest-magnitude entry (first on ties) is positive.
pub fn symmetric_eigen(mat: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = mat.nrows();
    if n == 0 || mat.ncols() != n {
        return Err(Error::Invalid(format!(
            "expected a nonempty square matrix, got {}×{}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    if mat.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("matrix has non-finite entries".into()));
    }
    let scale = mat.amax().max(1.0);
    let defect = asymmetry(mat);
    if defect > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { defect });
    }

    let mut a = (mat + mat.transpose()) * 0.5;
    let mut q = DMatrix::<f64>::identity(n, n);
    let threshold = OFF_DIAGONAL_TOL * a.norm();
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigenConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                rotate(&mut a, &mut q, p, r);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));
    let values = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = q.column(src).clone_owned();
        let lead = col.iter().copied().fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if lead < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok(SymmetricEigen { values, vectors })
}

/// One Jacobi rotation annihilating `a[(p, r)]`, accumulated into `q`.
fn rotate(a: &mut DMatrix<f64>, q: &mut DMatrix<f64>, p: usize, r: usize) {
    let apr = a[(p, r)];
    if apr == 0.0 {
        return;
    }
    let n = a.nrows();
    let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        let akp = a[(k, p)];
        let akr = a[(k, r)];
        a[(k, p)] = c * akp - s * akr;
        a[(k, r)] = s * akp + c * akr;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let ark = a[(r, k)];
        a[(p, k)] = c * apk - s * ark;
        a[(r, k)] = s * apk + c * ark;
    }
    a[(p, r)] = 0.0;
    a[(r, p)] = 0.0;
    for k in 0..n {
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = c * qkp - s * qkr;
        q[(k, r)] = s * qkp + c * qkr;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reconstruct(e: &SymmetricEigen) -> DMatrix<f64> {
        &e.vectors * DMatrix::from_diagonal(&e.values) * e.vectors.transpose()
    }

    #[test]
    fn identity() {
        let e = symmetric_eigen(&DMatrix::identity(4, 4)).unwrap();
        assert!(e.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn diagonal_is_sorted() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let e = symmetric_eigen(&m).unwrap();
        assert_eq!(e.values.as_slice(), &[1.0, 2.0, 3.0]);
        for j in 0..3 {
            assert_eq!(e.vectors.column(j).amax(), 1.0);
            assert_eq!(e.vectors.column(j).iter().filter(|v| **v != 0.0).count(), 1);
        }
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 5, 8, 16, 32] {
            let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let a = (&g + g.transpose()) * 0.5;
            let e = symmetric_eigen(&a).unwrap();
            let orth = (e.vectors.transpose() * &e.vectors - DMatrix::identity(n, n)).amax();
            assert!(orth <= 1e-10, "n={n}: {orth}");
            let err = (reconstruct(&e) - &a).amax();
            assert!(err <= 1e-9 * a.norm(), "n={n}: {err}");
            assert!(e.values.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = symmetric_eigen(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(symmetric_eigen(&m), Err(Error::NotSymmetric { .. })));
        assert!(symmetric_eigen(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn deterministic_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
        let a = (&g + g.transpose()) * 0.5;
        let e1 = symmetric_eigen(&a).unwrap();
        let e2 = symmetric_eigen(&a).unwrap();
        assert_eq!(e1.vectors, e2.vectors);
        assert_eq!(e1.values, e2.values);
    }
}
