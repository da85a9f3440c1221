use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries. Panics if `data.len()` is not `dim * dim`.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major data must hold dim^2 entries");
        Self { dim, data }
    }

    /// Projector `|k><k|` onto a computational basis state.
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        m
    }

    /// `|psi><psi|` for a (not necessarily normalized) state vector.
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |r, c| psi[r] * psi[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        check_dims(self, rhs)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            let row = &self.data[r * n..(r + 1) * n];
            let orow = &mut out.data[r * n..(r + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `AB - BA`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        Ok(self.matmul(rhs)? - rhs.matmul(self)?)
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: C64, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| alpha * z).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `|M - M^dagger|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Hermitian part `(M + M^dagger)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |r, c| 0.5 * (self[(r, c)] + self[(c, r)].conj()))
    }

    /// Ascending eigenvalues of the hermitian part of the matrix.
    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        self.eigh().0
    }

    /// Eigen-decomposition of the hermitian part: ascending eigenvalues and
    /// the matching orthonormal eigenvectors as columns.
    pub fn eigh(&self) -> (Vec<f64>, ComplexMatrix) {
        let n = self.dim;
        let h = self.hermitian_part();
        let m = DMatrix::from_fn(n, n, |r, c| h[(r, c)]);
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Self::from_fn(n, |r, c| eig.eigenvectors[(r, order[c])]);
        (values, vectors)
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    Ok(())
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        self += &rhs;
        self
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        self -= &rhs;
        self
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix addition");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix subtraction");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(mut self) -> ComplexMatrix {
        self.data.iter_mut().for_each(|z| *z = -*z);
        self
    }
}
