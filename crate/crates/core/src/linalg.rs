//! Sparse matrices over vertex indices and symmetric positive definite solves.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Vertex counts at or above this use conjugate gradients instead of a dense
/// Cholesky factorization.
pub const DENSE_LIMIT: usize = 2000;

/// Square matrix in row-compressed form; rows keep their column indices sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    n: usize,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Real> SparseMatrix<T> {
    /// Sums duplicate entries in the order they are supplied.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (i, j, v) in triplets {
            let row = &mut rows[i];
            match row.binary_search_by_key(&j, |e| e.0) {
                Ok(p) => row[p].1 = row[p].1 + v,
                Err(p) => row.insert(p, (j, v)),
            }
        }
        SparseMatrix { n, rows }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map(|p| self.rows[i][p].1)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .map(|r| r.iter().fold(T::zero(), |a, &(j, v)| a + v * x[j]))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.n]; self.n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                d[i][j] = v;
            }
        }
        d
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        self.rows
            .iter()
            .flatten()
            .fold(T::zero(), |a, &(_, v)| a.max(v.abs()))
    }

    /// `max |Mᵢⱼ − Mⱼᵢ|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `(M + Mᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        let half = lit::<T>(0.5);
        let mut triplets = Vec::with_capacity(2 * self.nnz());
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                triplets.push((i, j, v * half));
                triplets.push((j, i, v * half));
            }
        }
        Self::from_triplets(self.n, triplets)
    }

    /// Smallest `Mᵢᵢ − Σ_{j≠i} |Mᵢⱼ|` over all rows.
    pub fn diagonal_dominance_margin(&self) -> T {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter().fold(
                    T::zero(),
                    |a, &(j, v)| {
                        if i == j {
                            a + v
                        } else {
                            a - v.abs()
                        }
                    },
                )
            })
            .fold(T::infinity(), |a, m| a.min(m))
    }
}

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky
/// factorization; only the lower triangle of `a` is read.
pub fn cholesky_solve<T: Real>(a: &[Vec<T>], b: &[T]) -> Result<Vec<T>> {
    let n = b.len();
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for p in 0..j {
                s = s - l[i][p] * l[j][p];
            }
            if i == j {
                if !(s > T::zero()) {
                    return Err(Error::LinearAlgebra(format!(
                        "matrix is not positive definite (pivot {i} = {s})"
                    )));
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let s = (0..i).fold(b[i], |acc, p| acc - l[i][p] * y[p]);
        y[i] = s / l[i][i];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(y[i], |acc, p| acc - l[p][i] * x[p]);
        x[i] = s / l[i][i];
    }
    Ok(x)
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

/// Jacobi-preconditioned conjugate gradients, stopping when
/// `‖r‖ ≤ tol·‖b‖`.
pub fn conjugate_gradient<T: Real>(
    m: &SparseMatrix<T>,
    b: &[T],
    tol: T,
    max_iter: usize,
) -> Result<Vec<T>> {
    let n = b.len();
    let diag: Vec<T> = (0..n).map(|i| m.get(i, i)).collect();
    if let Some(i) = diag.iter().position(|&d| !(d > T::zero())) {
        return Err(Error::LinearAlgebra(format!(
            "non-positive diagonal at row {i}"
        )));
    }
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut z: Vec<T> = r.iter().zip(&diag).map(|(&r, &d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let target = tol * dot(b, b).sqrt();
    for _ in 0..max_iter {
        if dot(&r, &r).sqrt() <= target {
            return Ok(x);
        }
        let mp = m.mul_vec(&p);
        let curv = dot(&p, &mp);
        if !(curv > T::zero()) {
            return Err(Error::LinearAlgebra(
                "matrix is not positive definite".into(),
            ));
        }
        let alpha = rz / curv;
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * mp[i];
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if dot(&r, &r).sqrt() <= target {
        Ok(x)
    } else {
        Err(Error::LinearAlgebra(format!(
            "conjugate gradients did not converge in {max_iter} iterations"
        )))
    }
}

/// Solves `M x = b` for symmetric positive definite `M`: dense Cholesky below
/// [`DENSE_LIMIT`] unknowns, conjugate gradients above.
pub fn solve_spd<T: Real>(m: &SparseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    if m.dim() < DENSE_LIMIT {
        cholesky_solve(&m.to_dense(), b)
    } else {
        conjugate_gradient(m, b, T::epsilon() * lit(100.0), 10 * m.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laplacian_plus_identity(n: usize) -> SparseMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 3.0));
            t.push((i, (i + 1) % n, -1.0));
            t.push(((i + 1) % n, i, -1.0));
        }
        SparseMatrix::from_triplets(n, t)
    }

    #[test]
    fn triplets_accumulate() {
        let m = SparseMatrix::from_triplets(2, [(0, 1, 1.0), (0, 1, 2.0), (1, 0, 3.0)]);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.asymmetry(), 0.0);
        let a = SparseMatrix::from_triplets(2, [(0, 1, 1.0), (1, 0, 2.0)]);
        assert_eq!(a.asymmetry(), 1.0);
        assert_eq!(a.symmetrized().get(1, 0), 1.5);
    }

    #[test]
    fn rejects_indefinite() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(matches!(
            cholesky_solve(&a, &[1.0, 1.0]),
            Err(Error::LinearAlgebra(_))
        ));
    }

    #[test]
    fn cg_matches_cholesky() {
        let m = laplacian_plus_identity(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let x1 = cholesky_solve(&m.to_dense(), &b).unwrap();
        let x2 = conjugate_gradient(&m, &b, 1e-14, 500).unwrap();
        for (a, c) in x1.iter().zip(&x2) {
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn large_system_uses_cg() {
        let m = laplacian_plus_identity(DENSE_LIMIT + 10);
        let b = vec![1.0; DENSE_LIMIT + 10];
        let x = solve_spd(&m, &b).unwrap();
        let r = m.mul_vec(&x);
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    proptest! {
        #[test]
        fn cholesky_solves_random_spd(entries in prop::collection::vec(-1.0f64..1.0, 36), rhs in prop::collection::vec(-5.0f64..5.0, 6)) {
            let n = 6;
            // A = BᵀB + I
            let mut a = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    a[i][j] = (0..n).map(|p| entries[p * n + i] * entries[p * n + j]).sum::<f64>();
                }
                a[i][i] += 1.0;
            }
            let x = cholesky_solve(&a, &rhs).unwrap();
            for i in 0..n {
                let ax: f64 = (0..n).map(|j| a[i][j] * x[j]).sum();
                prop_assert!((ax - rhs[i]).abs() < 1e-10);
            }
        }
    }
}
