//! Dense square complex matrices with the small set of linear-algebra
//! kernels the rest of the crate needs.
//!
//! Dimensions in scope are tiny (Hilbert space d <= 16, Liouville space
//! d^2 <= 256), so everything is straightforward O(n^3) dense code: no
//! blocking, no external BLAS/LAPACK. Storage is row-major, which doubles as
//! the vectorization convention for Liouville space: `mat.data()` *is*
//! vec(rho) with index `i*d + j` for entry (i, j).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

use crate::math;
use crate::{Error, Result};

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Build from a row-major vector of entries; length must be a square.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(CMatrix { dim, data })
    }

    /// Build from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(CMatrix {
            dim,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        })
    }

    /// Real diagonal matrix.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    /// Matrix unit E_kl: single 1 at (k, l).
    pub fn unit(dim: usize, k: usize, l: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(k, l)] = Complex64::ONE;
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_mut(&mut self, c: Complex64) {
        for z in &mut self.data {
            *z *= c;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self * v` for a vector of length `dim`.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![Complex64::ZERO; n];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = Complex64::ZERO;
            for (&a, &x) in row.iter().zip(v) {
                acc += a * x;
            }
            *o = acc;
        }
        out
    }

    /// `self^dag * v` without materializing the adjoint.
    pub fn matvec_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![Complex64::ZERO; n];
        for (i, &x) in v.iter().enumerate() {
            if x == Complex64::ZERO {
                continue;
            }
            let row = &self.data[i * n..(i + 1) * n];
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a.conj() * x;
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.matmul(other).add(&other.matmul(self))
    }

    /// Kronecker product; result has dimension `self.dim * other.dim`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Hilbert-Schmidt inner product Tr{self^dag other}.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a.conj() * b)
            .sum()
    }

    /// Frobenius (Hilbert-Schmidt) norm.
    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Maximum column absolute sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.dim;
        let mut best: f64 = 0.0;
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += self[(i, j)].norm();
            }
            best = best.max(s);
        }
        best
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|z| math::hypot(z.re, z.im))
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the matrix's own adjoint.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest entrywise deviation of `self^dag self` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().matmul(self);
        p.max_abs_diff(&Self::identity(self.dim))
    }

    /// Solve `self * X = B` by LU with partial pivoting.
    pub fn lu_solve(&self, b: &Self) -> Result<Self> {
        debug_assert_eq!(self.dim, b.dim);
        let n = self.dim;
        let mut lu = self.clone();
        let mut x = b.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for col in 0..n {
            // Pivot: largest magnitude in this column at or below the diagonal.
            let mut pivot_row = col;
            let mut pivot_mag = lu[(col, col)].norm();
            for r in col + 1..n {
                let m = lu[(r, col)].norm();
                if m > pivot_mag {
                    pivot_mag = m;
                    pivot_row = r;
                }
            }
            if pivot_mag == 0.0 {
                return Err(Error::InvalidParameter(alloc::format!(
                    "singular matrix in LU solve (column {col})"
                )));
            }
            if pivot_row != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(col, pivot_row);
                for j in 0..n {
                    let tmp = x[(col, j)];
                    x[(col, j)] = x[(pivot_row, j)];
                    x[(pivot_row, j)] = tmp;
                }
            }
            let inv_p = Complex64::ONE / lu[(col, col)];
            for r in col + 1..n {
                let f = lu[(r, col)] * inv_p;
                lu[(r, col)] = f;
                for j in col + 1..n {
                    let s = lu[(col, j)];
                    lu[(r, j)] -= f * s;
                }
                for j in 0..n {
                    let s = x[(col, j)];
                    x[(r, j)] -= f * s;
                }
            }
        }
        // Back substitution.
        for col in (0..n).rev() {
            let inv_p = Complex64::ONE / lu[(col, col)];
            for j in 0..n {
                x[(col, j)] *= inv_p;
            }
            for r in 0..col {
                let f = lu[(r, col)];
                if f == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let s = x[(col, j)];
                    x[(r, j)] -= f * s;
                }
            }
        }
        Ok(x)
    }

    /// Eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi sweeps.
    ///
    /// The caller is responsible for Hermiticity; the routine symmetrizes
    /// internally so that tiny defects do not break convergence.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        if n == 1 {
            return vec![self[(0, 0)].re];
        }
        // Work on (A + A^dag)/2 to enforce exact Hermiticity.
        let mut a = self.clone();
        for i in 0..n {
            for j in 0..n {
                let h = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                a[(i, j)] = h;
            }
        }
        let scale = a.max_abs().max(1.0);
        let tol = 1e-15 * scale;
        // Each sweep zeroes every off-diagonal pair once; quadratic
        // convergence makes ~30 sweeps a generous cap even for n = 256.
        for _sweep in 0..60 {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag <= tol * 1e-2 {
                        continue;
                    }
                    // Unitary plane rotation that annihilates a[(p,q)]:
                    // first rotate the phase away, then a real Jacobi rotation.
                    let phase = apq / mag;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = (aqq - app) / (2.0 * mag);
                    // t = sign(theta) / (|theta| + sqrt(theta^2 + 1))
                    let t = if theta >= 0.0 {
                        1.0 / (theta + math::sqrt(theta * theta + 1.0))
                    } else {
                        -1.0 / (-theta + math::sqrt(theta * theta + 1.0))
                    };
                    let c = 1.0 / math::sqrt(t * t + 1.0);
                    let s = t * c;
                    // Columns: [p q] <- [p q] * [[c, s*phase], [-s*conj(phase), c]]
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * c - aiq * s * phase.conj();
                        a[(i, q)] = aip * s * phase + aiq * c;
                    }
                    // Rows: conjugate-transpose rotation from the left.
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = apj * c - aqj * s * phase;
                        a[(q, j)] = apj * s * phase.conj() + aqj * c;
                    }
                }
            }
        }
        let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eigs
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()[0]
    }
}

/// Common fixed matrices.
pub mod pauli {
    use super::CMatrix;
    use num_complex::Complex64;

    pub fn sigma_x() -> CMatrix {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = Complex64::ONE;
        m[(1, 0)] = Complex64::ONE;
        m
    }

    pub fn sigma_y() -> CMatrix {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = Complex64::new(0.0, -1.0);
        m[(1, 0)] = Complex64::new(0.0, 1.0);
        m
    }

    pub fn sigma_z() -> CMatrix {
        CMatrix::diag(&[1.0, -1.0])
    }
}
