use crate::error::{invalid, Error, Result};
use crate::imaging::RngState;
use crate::vector::{dot, norm};
use crate::Scalar;

use super::{DenseOperator, LinearOperator};

/// Dense compressive-sensing matrix with orthonormal rows.
#[derive(Debug, Clone)]
pub struct CompressiveSensingOperator<T> {
    matrix: DenseOperator<T>,
    seed: u64,
}

impl<T: Scalar> CompressiveSensingOperator<T> {
    pub fn matrix(&self) -> &DenseOperator<T> {
        &self.matrix
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Samples an `m x n` matrix with i.i.d. `N(0, 1/m)` entries and
/// orthonormalizes its rows.
///
/// The rows are the orthonormal factor of a reduced QR of `A^T` with a
/// non-negative `R` diagonal, computed by Gram-Schmidt with one full
/// reorthogonalization pass per row.
pub fn build_cs_operator<T: Scalar>(m: usize, n: usize, seed: u64) -> Result<CompressiveSensingOperator<T>> {
    if m == 0 || m >= n {
        return invalid(format!("compressive sensing needs 1 <= m < n, got m={m}, n={n}"));
    }
    let mut rng = RngState::new(seed);
    let sd = T::one() / T::of_usize(m).sqrt();
    let mut data: Vec<T> = rng.gaussian_vec::<T>(m * n).into_iter().map(|v| v * sd).collect();
    for i in 0..m {
        let (done, rest) = data.split_at_mut(i * n);
        let row = &mut rest[..n];
        for _pass in 0..2 {
            for q in done.chunks_exact(n) {
                let c = dot(q, row);
                for (r, &qv) in row.iter_mut().zip(q) {
                    *r = *r - c * qv;
                }
            }
        }
        let nrm = norm(row);
        if !(nrm > T::of(1e-12)) {
            return Err(Error::Undefined(format!("sampled matrix is rank deficient at row {i}")));
        }
        for r in row.iter_mut() {
            *r = *r / nrm;
        }
    }
    Ok(CompressiveSensingOperator { matrix: DenseOperator::new(m, n, data)?, seed })
}

impl<T: Scalar> LinearOperator<T> for CompressiveSensingOperator<T> {
    fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    fn range_dim(&self) -> usize {
        self.matrix.rows()
    }

    fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        self.matrix.forward(x)
    }

    fn adjoint(&self, u: &[T]) -> Result<Vec<T>> {
        self.matrix.adjoint(u)
    }

    fn label(&self) -> String {
        format!("cs {}x{} seed {}", self.matrix.rows(), self.matrix.cols(), self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::adjoint_mismatch;

    fn gram_defect(op: &CompressiveSensingOperator<f64>) -> f64 {
        let a = op.matrix();
        let mut worst = 0.0f64;
        for i in 0..a.rows() {
            for j in 0..a.rows() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a.row(i), a.row(j)) - target).abs());
            }
        }
        worst
    }

    #[test]
    fn tiny_instance_has_orthonormal_rows() {
        for seed in 0..5 {
            let op = build_cs_operator::<f64>(2, 8, seed).unwrap();
            assert!(gram_defect(&op) < 1e-12);
        }
    }

    #[test]
    fn orthonormal_at_ten_percent_ratio() {
        let op = build_cs_operator::<f64>(103, 1024, 17).unwrap();
        assert!(gram_defect(&op) < 1e-10);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = build_cs_operator::<f64>(5, 40, 3).unwrap();
        let b = build_cs_operator::<f64>(5, 40, 3).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn rejects_oversampling() {
        assert!(build_cs_operator::<f64>(8, 8, 0).is_err());
        assert!(build_cs_operator::<f64>(0, 8, 0).is_err());
    }

    #[test]
    fn rows_span_the_sampled_row_space() {
        // Rebuild the raw Gaussian rows and check they project losslessly onto the basis.
        let (m, n, seed) = (4, 12, 9);
        let op = build_cs_operator::<f64>(m, n, seed).unwrap();
        let raw: Vec<f64> = RngState::new(seed).gaussian_vec(m * n);
        for r in raw.chunks(n) {
            let coeffs = op.forward(r).unwrap();
            let back = op.adjoint(&coeffs).unwrap();
            for (a, b) in back.iter().zip(r) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let mut rng = RngState::new(1);
        for _ in 0..20 {
            let v = rng.gaussian_vec::<f64>(n);
            let u = rng.gaussian_vec::<f64>(m);
            assert!(adjoint_mismatch(&op, &v, &u).unwrap() < 1e-12);
        }
    }
}
