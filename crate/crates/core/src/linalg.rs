//! Small dense linear algebra: row-major matrices, Cholesky solves and a
//! cyclic Jacobi symmetric eigensolver. Sized for `d` in the tens to low
//! hundreds.

use crate::error::{check_dim, FedError, Result};
use crate::scalar::Scalar;
use crate::vector::axpy_into;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        check_dim("matrix storage", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `out = self · v`.
    pub fn matvec_into(&self, v: &[T], out: &mut [T]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = crate::vector::dot_unchecked(row, v);
        }
    }

    pub fn matvec(&self, v: &[T]) -> Result<Vec<T>> {
        check_dim("matvec", self.cols, v.len())?;
        let mut out = vec![T::zero(); self.rows];
        self.matvec_into(v, &mut out);
        Ok(out)
    }

    /// `out += selfᵀ · v`, accumulated row by row (axpy form, vectorizes
    /// without reassociation). For a symmetric matrix this is `self · v`.
    pub fn t_matvec_acc(&self, v: &[T], out: &mut [T]) {
        debug_assert_eq!(v.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for (row, &vi) in self.data.chunks_exact(self.cols).zip(v) {
            axpy_into(vi, row, out);
        }
    }

    pub fn t_matvec(&self, v: &[T]) -> Result<Vec<T>> {
        check_dim("transposed matvec", self.rows, v.len())?;
        let mut out = vec![T::zero(); self.cols];
        self.t_matvec_acc(v, &mut out);
        Ok(out)
    }

    /// Gram matrix `selfᵀ · self`, exactly symmetric.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for row in self.data.chunks_exact(n) {
            for (k, &rk) in row.iter().enumerate() {
                if rk == T::zero() {
                    continue;
                }
                for l in k..n {
                    g.data[k * n + l] += rk * row[l];
                }
            }
        }
        for k in 0..n {
            for l in 0..k {
                g.data[k * n + l] = g.data[l * n + k];
            }
        }
        g
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        check_dim("matrix add rows", self.rows, other.rows)?;
        check_dim("matrix add cols", self.cols, other.cols)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: T) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn frobenius(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: DenseMatrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(FedError::InvalidInput(format!(
                "cholesky needs a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut diag = a[(j, j)];
            for k in 0..j {
                diag -= l[(j, k)] * l[(j, k)];
            }
            if !(diag > T::zero()) || !diag.is_finite() {
                return Err(FedError::Singular(format!(
                    "matrix not positive definite (pivot {j} = {diag})"
                )));
            }
            let ljj = diag.sqrt();
            l[(j, j)] = ljj;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.l.rows;
        check_dim("cholesky solve", n, b.len())?;
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.l[(i, k)] * z[k];
            }
            z[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in i + 1..n {
                s -= self.l[(k, i)] * z[k];
            }
            z[i] = s / self.l[(i, i)];
        }
        Ok(z)
    }
}

/// Solves the SPD system `a · v = b` with one step of iterative refinement.
pub fn spd_solve<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let chol = Cholesky::factor(a)?;
    let mut v = chol.solve(b)?;
    let av = a.matvec(&v)?;
    let r: Vec<T> = b.iter().zip(&av).map(|(&bi, &ai)| bi - ai).collect();
    let dv = chol.solve(&r)?;
    v.iter_mut().zip(&dv).for_each(|(vi, &d)| *vi += d);
    Ok(v)
}

/// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi).
pub fn symmetric_eigenvalues<T: Scalar>(a: &DenseMatrix<T>) -> Result<Vec<T>> {
    if !a.is_symmetric() {
        return Err(FedError::InvalidInput(
            "eigenvalues requested for a non-symmetric matrix".into(),
        ));
    }
    let n = a.rows;
    let mut m = a.clone();
    let scale = a.frobenius();
    if scale == T::zero() {
        return Ok(vec![T::zero(); n]);
    }
    let tol = T::epsilon() * scale;
    for _sweep in 0..100 {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |acc, (i, j)| acc + m[(i, j)] * m[(i, j)])
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gram_is_symmetric_product() {
        let a = DenseMatrix::from_row_major(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let g = a.gram();
        assert_eq!(g.as_slice(), &[35.0, 44.0, 44.0, 56.0]);
        assert!(g.is_symmetric());
        assert_eq!(a.t_matvec(&[1.0, 0.0, 1.0]).unwrap(), vec![6.0, 8.0]);
        assert_eq!(a.matvec(&[1.0, 1.0]).unwrap(), vec![3.0, 7.0, 11.0]);
    }

    #[test]
    fn cholesky_solves() {
        let a = DenseMatrix::from_row_major(2, 2, vec![4.0, 2.0, 2.0, 3.0]).unwrap();
        let v = spd_solve(&a, &[2.0, 1.0]).unwrap();
        let back = a.matvec(&v).unwrap();
        assert_relative_eq!(back[0], 2.0, epsilon = 1e-14);
        assert_relative_eq!(back[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn cholesky_rejects_singular() {
        let a = DenseMatrix::from_row_major(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(Cholesky::factor(&a), Err(FedError::Singular(_))));
    }

    #[test]
    fn jacobi_diagonal_and_2x2() {
        let d = DenseMatrix::from_diag(&[4.0, 1.0, 2.5]);
        assert_eq!(symmetric_eigenvalues(&d).unwrap(), vec![1.0, 2.5, 4.0]);
        let a = DenseMatrix::from_row_major(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = symmetric_eigenvalues(&a).unwrap();
        assert_relative_eq!(e[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_matches_nalgebra_on_random_gram() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 3, 8, 20] {
            let data: Vec<f64> = (0..(2 * n * n))
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let a = DenseMatrix::from_row_major(2 * n, n, data).unwrap().gram();
            let ours = symmetric_eigenvalues(&a).unwrap();
            let na = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
            let mut theirs: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            theirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (o, t) in ours.iter().zip(&theirs) {
                assert_relative_eq!(*o, *t, max_relative = 1e-8, epsilon = 1e-12);
            }
        }
    }
}
