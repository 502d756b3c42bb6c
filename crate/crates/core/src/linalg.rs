//! Dense linear algebra kernels: truncated-SVD least squares (one-sided
//! Jacobi) and complex Hermitian Cholesky log-determinants.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Cplx, Real};

/// Row-major dense real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self { rows: rows.len(), cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).map(|(&a, &b)| a * b).sum()
            })
            .collect()
    }
}

/// Outcome of a truncated-SVD least-squares solve.
#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    pub solution: Vec<T>,
    /// Singular values of the column-equilibrated matrix, descending.
    pub singular_values: Vec<T>,
    /// Number of singular values kept.
    pub rank: usize,
    /// Ratio of the largest to the smallest kept singular value.
    pub condition: T,
    /// Euclidean norm of the residual `A x - b`.
    pub residual_norm: T,
}

/// Minimum-norm least-squares solution of `A x = b` discarding singular
/// values below `rel_cutoff · σ_max`.
///
/// Columns are equilibrated to unit norm before the decomposition; the
/// returned singular values refer to the equilibrated matrix.
pub fn tsvd_solve<T: Real>(a: &Matrix<T>, b: &[T], rel_cutoff: T) -> Result<LeastSquares<T>> {
    let (m, n) = (a.rows, a.cols);
    if b.len() != m {
        return Err(Error::InvalidArgument(format!("rhs length {} for {} rows", b.len(), m)));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("matrix has no columns".into()));
    }
    // Column-major working copy.
    let mut u: Vec<Vec<T>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    // Equilibrate columns, but never amplify a column by more than 1/√ε
    // relative to the largest: columns that are tiny because the data carry
    // no information about them must stay tiny so truncation discards them.
    let norms: Vec<T> = u.iter().map(|col| col.iter().map(|&x| x * x).sum::<T>().sqrt()).collect();
    let largest = norms.iter().fold(T::zero(), |m, &x| m.max(x));
    let floor = largest * T::epsilon().sqrt();
    let mut scale = vec![T::one(); n];
    for (j, col) in u.iter_mut().enumerate() {
        let norm = norms[j].max(floor);
        if norm > T::zero() {
            scale[j] = norm;
            col.iter_mut().for_each(|x| *x = *x / norm);
        }
    }
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();

    let tol = T::epsilon() * lit(4.0);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    alpha = alpha + u[p][i] * u[p][i];
                    beta = beta + u[q][i] * u[q][i];
                    gamma = gamma + u[p][i] * u[q][i];
                }
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (lit::<T>(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = (T::one() + t * t).sqrt().recip();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (u[p][i], u[q][i]);
                    u[p][i] = c * x - s * y;
                    u[q][i] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[p][i], v[q][i]);
                    v[p][i] = c * x - s * y;
                    v[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<(T, usize)> = u
        .iter()
        .enumerate()
        .map(|(j, col)| (col.iter().map(|&x| x * x).sum::<T>().sqrt(), j))
        .collect();
    sigma.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let smax = sigma[0].0;
    if !(smax > T::zero()) {
        return Err(Error::RankDeficient("matrix is identically zero".into()));
    }
    let cut = smax * rel_cutoff;
    let mut y = vec![T::zero(); n];
    let mut rank = 0;
    let mut smin = smax;
    for &(s, j) in &sigma {
        if s <= cut {
            break;
        }
        rank += 1;
        smin = s;
        let ub: T = u[j].iter().zip(b).map(|(&x, &bi)| x * bi).sum::<T>() / (s * s);
        for i in 0..n {
            y[i] = y[i] + v[j][i] * ub;
        }
    }
    let solution: Vec<T> = y.iter().zip(&scale).map(|(&yi, &s)| yi / s).collect();
    let ax = a.mul_vec(&solution);
    let residual_norm = ax.iter().zip(b).map(|(&p, &q)| (p - q) * (p - q)).sum::<T>().sqrt();
    Ok(LeastSquares {
        solution,
        singular_values: sigma.iter().map(|s| s.0).collect(),
        rank,
        condition: smax / smin,
        residual_norm,
    })
}

/// Dense complex square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    pub n: usize,
    pub data: Vec<Cplx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex::new(T::zero(), T::zero()); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Cplx<T> {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Cplx<T>) {
        self.data[i * self.n + j] = v;
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Replaces the matrix by its Hermitian part.
    pub fn symmetrize(&mut self) {
        let half: T = lit(0.5);
        for i in 0..self.n {
            let d = self.get(i, i);
            self.set(i, i, Complex::new(d.re, T::zero()));
            for j in (i + 1)..self.n {
                let avg = (self.get(i, j) + self.get(j, i).conj()) * half;
                self.set(i, j, avg);
                self.set(j, i, avg.conj());
            }
        }
    }
}

/// Result of a Cholesky-based log-determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogDet<T> {
    /// Finite log-determinant.
    Finite(T),
    /// A pivot vanished within tolerance: the determinant is zero.
    Singular { index: usize, pivot: T },
}

/// Log-determinant of a Hermitian positive semidefinite matrix.
///
/// The matrix is symmetrically scaled by its diagonal first so that pivot
/// tests are relative.  Pivots in `(-tol, 0]` (relative) are reported as
/// [`LogDet::Singular`]; more negative pivots raise [`Error::Indefinite`].
pub fn hermitian_log_det<T: Real>(m: &CMatrix<T>, tol: T) -> Result<LogDet<T>> {
    let n = m.n;
    let mut log_scale = T::zero();
    let mut d = vec![T::one(); n];
    for i in 0..n {
        let dii = m.get(i, i).re;
        if dii < -tol {
            return Err(Error::Indefinite { pivot: dii.to_f64().unwrap_or(f64::NAN) });
        }
        if dii <= T::zero() {
            return Ok(LogDet::Singular { index: i, pivot: dii });
        }
        d[i] = dii.sqrt();
        log_scale = log_scale + dii.ln();
    }
    let mut l = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            l.set(i, j, m.get(i, j) / (d[i] * d[j]));
        }
    }
    let mut log_det = T::zero();
    for j in 0..n {
        let mut pivot = l.get(j, j).re;
        for k in 0..j {
            pivot = pivot - l.get(j, k).norm_sqr();
        }
        if pivot < -tol {
            return Err(Error::Indefinite { pivot: pivot.to_f64().unwrap_or(f64::NAN) });
        }
        if pivot <= T::epsilon() * lit(n as f64) {
            return Ok(LogDet::Singular { index: j, pivot });
        }
        let ljj = pivot.sqrt();
        l.set(j, j, Complex::new(ljj, T::zero()));
        log_det = log_det + pivot.ln();
        for i in (j + 1)..n {
            let mut s = l.get(i, j);
            for k in 0..j {
                s = s - l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / ljj);
        }
    }
    Ok(LogDet::Finite(log_det + log_scale))
}
