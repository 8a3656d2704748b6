//! Small dense linear algebra kernels: a row-major matrix, an affine
//! null-vector routine, a one-sided Jacobi SVD, and a primal simplex that
//! reports dual multipliers. Everything is generic over [`Real`] and sized
//! for desk-scale problems (dimensions up to a few dozen).

mod simplex;
mod svd;

pub use simplex::{solve_lp, LpSolution};
pub use svd::{svd, Svd};

use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
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

    /// Builds from nested rows; all rows must share a length.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `self * v`.
    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// `self^T * v`.
    pub fn tr_matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            let vi = v[i];
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + *a * vi;
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Largest absolute entry; zero for empty matrices.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// Entry-wise difference `self - rhs`.
    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = *a - *b;
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = *a * s;
        }
        out
    }

    /// Adds `s * x y^T` in place.
    pub fn add_outer(&mut self, s: T, x: &[T], y: &[T]) {
        assert_eq!(x.len(), self.rows);
        assert_eq!(y.len(), self.cols);
        for i in 0..self.rows {
            let sx = s * x[i];
            for j in 0..self.cols {
                self[(i, j)] = self[(i, j)] + sx * y[j];
            }
        }
    }

    /// Row-major flattening, the vec ordering used by the equality LPs.
    pub fn vec(&self) -> Vec<T> {
        self.data.clone()
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    /// Kronecker product in row-major vec ordering: `vec(A Z B^T) = kron(A, B) vec(Z)`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * *xi;
    }
}

/// Minimum-norm least-squares solution of `A x = b` through the singular
/// value decomposition, with a relative rank cutoff.
pub fn pinv_solve<T: Real>(a: &Mat<T>, b: &[T]) -> crate::error::Result<Vec<T>> {
    let dec = svd(a)?;
    let cut = dec.sigma.first().copied().unwrap_or(T::zero()) * crate::scalar::real::<T>(1e-12);
    let mut x = vec![T::zero(); a.ncols()];
    for (k, &s) in dec.sigma.iter().enumerate() {
        if s <= cut {
            break;
        }
        let coef = dot(&dec.u.col(k), b) / s;
        axpy(coef, &dec.v.col(k), &mut x);
    }
    Ok(x)
}

/// A nonzero vector `alpha` with `M alpha = 0`, or `None` when the columns of
/// `M` are linearly independent. Gaussian elimination with partial pivoting;
/// the free column chosen is the first one without a pivot, so the output is
/// deterministic.
pub fn null_vector<T: Real>(m: &Mat<T>) -> Option<Vec<T>> {
    let rows = m.nrows();
    let cols = m.ncols();
    let mut a = m.clone();
    let mut pivot_col_of_row: Vec<Option<usize>> = vec![None; rows];
    let mut is_pivot_col = vec![false; cols];
    let mut r = 0usize;
    let eps = crate::scalar::real::<T>(1e-12);

    for c in 0..cols {
        if r == rows {
            break;
        }
        // partial pivot in column c among rows r..
        let mut best = r;
        for i in r + 1..rows {
            if a[(i, c)].abs() > a[(best, c)].abs() {
                best = i;
            }
        }
        if a[(best, c)].abs() <= eps * (T::one() + m.max_abs()) {
            continue;
        }
        if best != r {
            for j in 0..cols {
                let tmp = a[(r, j)];
                a[(r, j)] = a[(best, j)];
                a[(best, j)] = tmp;
            }
        }
        let piv = a[(r, c)];
        for j in 0..cols {
            a[(r, j)] = a[(r, j)] / piv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != T::zero() {
                    for j in 0..cols {
                        let sub = f * a[(r, j)];
                        a[(i, j)] = a[(i, j)] - sub;
                    }
                }
            }
        }
        pivot_col_of_row[r] = Some(c);
        is_pivot_col[c] = true;
        r += 1;
    }

    let free = (0..cols).find(|&c| !is_pivot_col[c])?;
    let mut alpha = vec![T::zero(); cols];
    alpha[free] = T::one();
    for (row, pc) in pivot_col_of_row.iter().enumerate() {
        if let Some(c) = pc {
            alpha[*c] = -a[(row, free)];
        }
    }
    Some(alpha)
}
