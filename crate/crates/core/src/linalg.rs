//! Dense complex matrices and the Hermitian Cholesky factorization used by the
//! weight solver.
//!
//! Storage is column-major: steering matrices are built one steering vector
//! (column) at a time, and every product the solver needs walks columns.

use num_complex::Complex;
use num_traits::Zero;

use crate::num::Real;

/// Dense column-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds a matrix from columns of length `rows`.
    ///
    /// Panics if any column has the wrong length.
    pub fn from_columns<I, C>(rows: usize, columns: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[Complex<T>]>,
    {
        let mut data = Vec::new();
        let mut cols = 0;
        for c in columns {
            let c = c.as_ref();
            assert_eq!(c.len(), rows, "column {cols} has length {}", c.len());
            data.extend_from_slice(c);
            cols += 1;
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[Complex<T>] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex<T>]> {
        // chunks_exact(0) panics, and a 0-row matrix may still have columns.
        let rows = self.rows;
        (0..self.cols).map(move |j| &self.data[j * rows..(j + 1) * rows])
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![Complex::zero(); self.rows];
        for (col, &xj) in self.columns().zip(x) {
            for (yi, &a) in y.iter_mut().zip(col) {
                *yi = *yi + a * xj;
            }
        }
        y
    }

    /// `Aᴴ x`
    pub fn adjoint_mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(x.len(), self.rows);
        self.columns().map(|col| dot_conj(col, x)).collect()
    }

    /// `Aᴴ B`
    pub fn adjoint_mul(&self, other: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.rows, other.rows);
        let mut out = CMatrix::zeros(self.cols, other.cols);
        for (j, b) in other.columns().enumerate() {
            for (i, a) in self.columns().enumerate() {
                out[(i, j)] = dot_conj(a, b);
            }
        }
        out
    }

    /// `A Aᴴ + loading·I`, Hermitian by construction.
    pub fn outer_gram(&self, loading: T) -> CMatrix<T> {
        let n = self.rows;
        let mut g = CMatrix::zeros(n, n);
        for col in self.columns() {
            for j in 0..n {
                let cj = col[j].conj();
                if cj.is_zero() {
                    continue;
                }
                for i in j..n {
                    g[(i, j)] = g[(i, j)] + col[i] * cj;
                }
            }
        }
        for j in 0..n {
            g[(j, j)] = Complex::new(g[(j, j)].re + loading, T::zero());
            for i in j + 1..n {
                g[(j, i)] = g[(i, j)].conj();
            }
        }
        g
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest absolute deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.cols {
            for i in 0..self.rows {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[j * self.rows + i]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[j * self.rows + i]
    }
}

/// `Σ conj(a_i) b_i`
pub fn dot_conj<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (&x, &y)| acc + x.conj() * y)
}

pub fn norm2<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
}

/// Pivot at which a Cholesky factorization broke down.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotPositiveDefinite {
    pub pivot: usize,
    pub dim: usize,
}

/// Lower-triangular factor `L` of a Hermitian positive definite `A = L Lᴴ`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: CMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factorizes the lower triangle of `a`; the upper triangle is ignored.
    ///
    /// A pivot is rejected when it falls below `n·ε·max_diag`, which flags
    /// matrices that are singular up to rounding.
    pub fn factor(a: &CMatrix<T>) -> Result<Self, NotPositiveDefinite> {
        assert_eq!(a.rows(), a.cols(), "Cholesky needs a square matrix");
        let n = a.rows();
        let max_diag = (0..n).map(|i| a[(i, i)].re).fold(T::zero(), T::max);
        let tol = T::epsilon() * T::lit(n.max(1) as f64) * max_diag;
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d = d - l[(j, k)].norm_sqr();
            }
            if !(d > tol) || !d.is_finite() {
                return Err(NotPositiveDefinite { pivot: j, dim: n });
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex::new(djj, T::zero());
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn factor_l(&self) -> &CMatrix<T> {
        &self.l
    }

    /// Solves `L y = b` in place.
    pub fn forward(&self, b: &mut [Complex<T>]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s = s - self.l[(i, k)] * b[k];
            }
            b[i] = s / self.l[(i, i)].re;
        }
    }

    /// Solves `Lᴴ x = y` in place.
    pub fn backward(&self, b: &mut [Complex<T>]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s = s - self.l[(k, i)].conj() * b[k];
            }
            b[i] = s / self.l[(i, i)].re;
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut x = b.to_vec();
        self.forward(&mut x);
        self.backward(&mut x);
        x
    }

    /// Applies `L⁻¹` to every column of `b`.
    pub fn forward_columns(&self, b: &CMatrix<T>) -> CMatrix<T> {
        let mut out = b.clone();
        let rows = out.rows;
        for chunk in out.data.chunks_mut(rows.max(1)) {
            if chunk.len() == rows {
                self.forward(chunk);
            }
        }
        out
    }

    /// Applies `L⁻ᴴ` to every column of `b`.
    pub fn backward_columns(&self, b: &CMatrix<T>) -> CMatrix<T> {
        let mut out = b.clone();
        let rows = out.rows;
        for chunk in out.data.chunks_mut(rows.max(1)) {
            if chunk.len() == rows {
                self.backward(chunk);
            }
        }
        out
    }
}
