//! Dense matrices and the Hermitian positive-definite solver.
//!
//! Everything the regression and online modules need: a row-major [`Matrix`],
//! a Cholesky factorization over [`Field`], [`hermitian_solve`] with a single
//! jitter retry, and a Jacobi eigenvalue routine for the PSD diagnostics.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::scalar::Field;
use crate::{Error, Result};

/// Relative tolerance on `max |A_ij - conj(A_ji)|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative diagonal load added once when a factorization fails.
pub const JITTER: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
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

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[T]> {
        // chunks_exact panics on a zero chunk size
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Field>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + b)
            .collect();
        Ok(Matrix { data, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        Ok(Matrix { data, ..*self })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let lhs = self.row(i);
            let dst = out.row_mut(i);
            for (k, &a) in lhs.iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self.rows_iter().map(|r| dot(r, v)).collect())
    }

    /// Adds `value` to every diagonal entry.
    pub fn add_diagonal(&mut self, value: T) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += value;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - conj(A_ji)|`; zero for an exactly Hermitian matrix.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).abs());
            }
        }
        worst
    }

    /// `max |A_ij - A_ji|`; zero for an exactly (complex) symmetric matrix.
    pub fn symmetric_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermitian_asymmetry() <= rel_tol * self.max_abs().max(1.0)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    /// `[[a, b], [c, d]]` from four conformable blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows {
            return Err(Error::DimensionMismatch {
                expected: a.rows,
                found: b.rows,
            });
        }
        if a.cols != c.cols || b.cols != d.cols {
            return Err(Error::DimensionMismatch {
                expected: a.cols,
                found: c.cols,
            });
        }
        let (top, left) = (a.rows, a.cols);
        Ok(Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| {
            match (i < top, j < left) {
                (true, true) => a[(i, j)],
                (true, false) => b[(i, j - left)],
                (false, true) => c[(i - top, j)],
                (false, false) => d[(i - top, j - left)],
            }
        }))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Plain (non-conjugating) dot product.
#[inline]
pub fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Lower Cholesky factor `A = L L^H` of a Hermitian positive-definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: Matrix<T>,
    jittered: bool,
    /// Set when the input was diagonal; solves then divide exactly.
    diagonal: Option<Vec<f64>>,
}

impl<T: Field> Cholesky<T> {
    /// Factors `a` reading only its lower triangle. No retry.
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows,
                cols: a.cols,
            });
        }
        let n = a.rows;
        let mut l: Matrix<T> = Matrix::zeros(n, n);
        for j in 0..n {
            let d = a[(j, j)].re() - l.row(j)[..j].iter().map(|v| v.abs_sq()).sum::<f64>();
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let djj = libm::sqrt(d);
            l[(j, j)] = T::from_real(djj);
            let inv = 1.0 / djj;
            let lj_prefix: Vec<T> = l.row(j)[..j].iter().map(|v| v.conj()).collect();
            for i in j + 1..n {
                let li = l.row(i);
                let s = a[(i, j)] - dot(&li[..j], &lj_prefix);
                l[(i, j)] = s.scale(inv);
            }
        }
        let is_diagonal = (0..n).all(|i| a.row(i)[..i].iter().all(|v| *v == T::zero()));
        let diagonal = is_diagonal.then(|| (0..n).map(|i| a[(i, i)].re()).collect());
        Ok(Cholesky {
            l,
            jittered: false,
            diagonal,
        })
    }

    /// Factors `a`; on failure adds `JITTER * trace(a) / n` to the diagonal and
    /// tries exactly once more.
    pub fn factor_with_jitter(a: &Matrix<T>) -> Result<Self> {
        match Self::factor(a) {
            Ok(c) => Ok(c),
            Err(Error::NotPositiveDefinite { pivot }) => {
                let n = a.rows.max(1);
                let load = JITTER * a.trace().re() / n as f64;
                if !(load > 0.0) || !load.is_finite() {
                    return Err(Error::NotPositiveDefinite { pivot });
                }
                let mut loaded = a.clone();
                loaded.add_diagonal(T::from_real(load));
                log::debug!("cholesky failed at pivot {pivot}; retrying with jitter {load:e}");
                let mut c = Self::factor(&loaded)?;
                c.jittered = true;
                Ok(c)
            }
            Err(e) => Err(e),
        }
    }

    pub fn dim(&self) -> usize {
        self.l.rows
    }

    pub fn lower(&self) -> &Matrix<T> {
        &self.l
    }

    /// Whether the jitter retry was needed.
    pub fn jittered(&self) -> bool {
        self.jittered
    }

    pub fn solve_in_place(&self, b: &mut [T]) -> Result<()> {
        let n = self.l.rows;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        if let Some(d) = &self.diagonal {
            for (bi, di) in b.iter_mut().zip(d) {
                *bi = bi.unscale(*di);
            }
            return Ok(());
        }
        // L z = b
        for i in 0..n {
            let row = self.l.row(i);
            let s = b[i] - dot(&row[..i], &b[..i]);
            b[i] = s / row[i];
        }
        // L^H x = z
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[(k, i)].conj() * b[k];
            }
            b[i] = s / self.l[(i, i)];
        }
        Ok(())
    }

    pub fn solve_vec(&self, b: &[T]) -> Result<Vec<T>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        if b.rows != self.l.rows {
            return Err(Error::DimensionMismatch {
                expected: self.l.rows,
                found: b.rows,
            });
        }
        let mut out = Matrix::zeros(b.rows, b.cols);
        let mut col = vec![T::zero(); b.rows];
        for j in 0..b.cols {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(i, j)];
            }
            self.solve_in_place(&mut col)?;
            for (i, &c) in col.iter().enumerate() {
                out[(i, j)] = c;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Matrix<T>> {
        let mut inv = self.solve(&Matrix::identity(self.l.rows))?;
        // exact Hermitian symmetry
        let n = inv.rows;
        for i in 0..n {
            for j in i + 1..n {
                let v = (inv[(i, j)] + inv[(j, i)].conj()).scale(0.5);
                inv[(i, j)] = v;
                inv[(j, i)] = v.conj();
            }
            let d = inv[(i, i)].re();
            inv[(i, i)] = T::from_real(d);
        }
        Ok(inv)
    }
}

/// Solves `A X = B` for Hermitian positive-definite `A`.
///
/// `A` must be Hermitian to a relative tolerance of [`HERMITIAN_TOL`]. A
/// failed factorization is retried once with a diagonal load of
/// `JITTER * trace(A) / n`; a second failure is reported as
/// [`Error::NotPositiveDefinite`].
pub fn hermitian_solve<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    check_hermitian(a)?;
    Cholesky::factor_with_jitter(a)?.solve(b)
}

/// Vector right-hand-side version of [`hermitian_solve`].
pub fn hermitian_solve_vec<T: Field>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    check_hermitian(a)?;
    Cholesky::factor_with_jitter(a)?.solve_vec(b)
}

pub(crate) fn check_hermitian<T: Field>(a: &Matrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("system matrix"));
    }
    let asym = a.hermitian_asymmetry();
    if asym > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian(asym));
    }
    Ok(())
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending.
pub fn symmetric_eigenvalues(a: &Matrix<f64>) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let mut m = a.clone();
    let frob = libm::sqrt(m.data.iter().map(|v| v * v).sum::<f64>());
    if frob == 0.0 {
        return Ok(vec![0.0; n]);
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if libm::sqrt(off) <= 1e-15 * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    Ok(eig)
}
