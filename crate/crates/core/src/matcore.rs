//! Dense complex linear algebra used throughout the crate.
//!
//! [`ComplexMatrix`] is a small row-major matrix type. Decompositions are
//! delegated to `nalgebra`; everything downstream only relies on
//! eigenvalues and projectors, never on a particular eigenvector phase.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64 as Complex;

use crate::error::{Error, Result};

/// Relative eigenvalue cutoff below which a direction is treated as outside the support.
pub const RANK_TOL: f64 = 1e-12;

/// Tolerance on `‖M − M†‖_F / ‖M‖_F` accepted by [`hermitian_eigen`].
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Relative tolerance on negative eigenvalues for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

#[inline]
pub fn r(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex>> = rows.iter().map(|r| r.iter().map(|&x| self::r(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = r(v);
        }
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[Complex], v: &[Complex]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &[Complex]) -> Self {
        Self::outer(v, v)
    }

    /// Column vector as an `n×1` matrix.
    pub fn column_vector(v: &[Complex]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
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

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + adj[(i, j)]) * 0.5)
    }

    /// `‖M − M†‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for z in self.row(i) {
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn zip_with(a: &ComplexMatrix, b: &ComplexMatrix, f: impl Fn(Complex, Complex) -> Complex) -> ComplexMatrix {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "shape mismatch");
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        for (x, &y) in self.data.iter_mut().zip(&rhs.data) {
            *x += y;
        }
    }
}

impl std::iter::Sum for ComplexMatrix {
    /// Panics on an empty iterator; there is no dimension to default to.
    fn sum<I: Iterator<Item = ComplexMatrix>>(mut iter: I) -> Self {
        let mut acc = iter.next().expect("sum of an empty matrix iterator");
        for m in iter {
            acc += &m;
        }
        acc
    }
}

/// Inner product `⟨u|v⟩`.
pub fn inner(u: &[Complex], v: &[Complex]) -> Complex {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vector_norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex>>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Indices of eigenvalues strictly above `rank_tol · γ_max`.
    pub fn support_indices(&self, rank_tol: f64) -> Vec<usize> {
        let top = self.max_eigenvalue();
        if top <= 0.0 {
            return Vec::new();
        }
        let cut = rank_tol * top;
        (0..self.dim()).filter(|&k| self.eigenvalues[k] > cut).collect()
    }

    pub fn rank(&self, rank_tol: f64) -> usize {
        self.support_indices(rank_tol).len()
    }

    /// `Σ_k f(γ_k) v_k v_k†` over the given indices.
    pub fn spectral_sum(&self, indices: &[usize], f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for &k in indices {
            let w = f(self.eigenvalues[k]);
            let v = &self.eigenvectors[k];
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let all: Vec<usize> = (0..self.dim()).collect();
        self.spectral_sum(&all, |g| g)
    }

    /// Projector onto eigenvectors whose eigenvalue lies within `rel_tol · |γ_max|` of the top.
    pub fn top_eigenspace_projector(&self, rel_tol: f64) -> ComplexMatrix {
        let top = self.max_eigenvalue();
        let cut = top - rel_tol * top.abs().max(f64::MIN_POSITIVE);
        let idx: Vec<usize> = (0..self.dim()).filter(|&k| self.eigenvalues[k] >= cut).collect();
        self.spectral_sum(&idx, |_| 1.0)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(M + M†)/2` before decomposition, so small
/// asymmetries from roundoff are tolerated up to [`HERMITIAN_TOL`].
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<EigenSystem> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let norm = m.frobenius_norm();
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL * norm {
        return Err(Error::NotHermitian {
            deviation: defect / norm,
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(EigenSystem {
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
        });
    }
    let eig = SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| {
            let col: Vec<Complex> = eig.eigenvectors.column(k).iter().copied().collect();
            let nrm = vector_norm(&col);
            col.into_iter().map(|z| z / nrm).collect()
        })
        .collect();
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigendecomposition that additionally rejects matrices with eigenvalues below `−PSD_TOL·γ_max`.
pub fn psd_eigen(m: &ComplexMatrix) -> Result<EigenSystem> {
    let eig = hermitian_eigen(m)?;
    let top = eig.max_eigenvalue().max(0.0);
    let low = eig.min_eigenvalue();
    if low < -PSD_TOL * top || (top == 0.0 && low < 0.0) {
        return Err(Error::NotPositive { min_eigenvalue: low });
    }
    Ok(eig)
}

pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    match hermitian_eigen(m) {
        Ok(eig) => eig.min_eigenvalue() >= -tol,
        Err(_) => false,
    }
}

pub fn max_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m)?.max_eigenvalue())
}

fn psd_support(m: &ComplexMatrix, rank_tol: f64) -> Result<(EigenSystem, Vec<usize>)> {
    let eig = psd_eigen(m)?;
    let support = eig.support_indices(rank_tol);
    if support.is_empty() {
        return Err(Error::NoSupport);
    }
    Ok((eig, support))
}

/// Inverse square root restricted to the support of a PSD matrix.
///
/// Eigenvalues at or below `rank_tol · γ_max` are treated as zero and mapped to zero.
pub fn support_inv_sqrt(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let (eig, support) = psd_support(m, rank_tol)?;
    Ok(eig.spectral_sum(&support, |g| 1.0 / g.sqrt()))
}

/// Moore-Penrose style inverse restricted to the support of a PSD matrix.
pub fn support_inverse(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let (eig, support) = psd_support(m, rank_tol)?;
    Ok(eig.spectral_sum(&support, |g| 1.0 / g))
}

/// Orthogonal projector onto the support of a PSD matrix.
pub fn support_projector(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let (eig, support) = psd_support(m, rank_tol)?;
    Ok(eig.spectral_sum(&support, |_| 1.0))
}

/// Partial trace over the left factor.
///
/// Composite index convention: `|a⟩_L|i⟩_R` has index `a·dim_right + i`.
pub fn partial_trace_left(m: &ComplexMatrix, dim_left: usize, dim_right: usize) -> Result<ComplexMatrix> {
    let n = dim_left * dim_right;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of a {}x{} matrix over {dim_left}x{dim_right} factors",
            m.rows(),
            m.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(dim_right, dim_right, |i, k| {
        (0..dim_left).map(|a| m[(a * dim_right + i, a * dim_right + k)]).sum()
    }))
}

/// Partial trace over the right factor, same index convention as [`partial_trace_left`].
pub fn partial_trace_right(m: &ComplexMatrix, dim_left: usize, dim_right: usize) -> Result<ComplexMatrix> {
    let n = dim_left * dim_right;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of a {}x{} matrix over {dim_left}x{dim_right} factors",
            m.rows(),
            m.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(dim_left, dim_left, |a, b| {
        (0..dim_right).map(|i| m[(a * dim_right + i, b * dim_right + i)]).sum()
    }))
}

/// Thin singular value decomposition, singular values descending.
///
/// Returns `(u, s, v)` with `m = Σ_k s_k u_k v_k†`.
pub fn svd(m: &ComplexMatrix) -> (Vec<Vec<Complex>>, Vec<f64>, Vec<Vec<Complex>>) {
    let dec = m.to_nalgebra().svd(true, true);
    let u = dec.u.expect("u requested");
    let v_t = dec.v_t.expect("v_t requested");
    let k = dec.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    let us = order.iter().map(|&j| u.column(j).iter().copied().collect()).collect();
    let ss = order.iter().map(|&j| dec.singular_values[j]).collect();
    // rows of v_t are v_k†
    let vs = order
        .iter()
        .map(|&j| v_t.row(j).iter().map(|z| z.conj()).collect())
        .collect();
    (us, ss, vs)
}

/// Orthonormalizes `vectors` in order (modified Gram-Schmidt), dropping dependent ones.
pub fn gram_schmidt(vectors: &[Vec<Complex>], tol: f64) -> Vec<Vec<Complex>> {
    let mut basis: Vec<Vec<Complex>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let proj = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
        let nrm = vector_norm(&w);
        if nrm > tol {
            basis.push(w.into_iter().map(|z| z / nrm).collect());
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = hermitian_eigen(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues.len(), 2);
        for g in &eig.eigenvalues {
            assert!((g - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_eigenvalues_descending() {
        let eig = hermitian_eigen(&ComplexMatrix::diag(&[0.25, 0.75])).unwrap();
        assert!((eig.eigenvalues[0] - 0.75).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn pauli_x_eigenpairs() {
        // characteristic polynomial γ² − 1 = 0
        let eig = hermitian_eigen(&pauli_x()).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexMatrix::projector(&[r(s), r(s)]);
        let minus = ComplexMatrix::projector(&[r(s), r(-s)]);
        let p0 = ComplexMatrix::projector(&eig.eigenvectors[0]);
        let p1 = ComplexMatrix::projector(&eig.eigenvectors[1]);
        assert!((&p0 - &plus).frobenius_norm() < 1e-12);
        assert!((&p1 - &minus).frobenius_norm() < 1e-12);
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert!(matches!(
            hermitian_eigen(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn inv_sqrt_identity_and_rank_deficient() {
        let i3 = ComplexMatrix::identity(3);
        let out = support_inv_sqrt(&i3, RANK_TOL).unwrap();
        assert!((&out - &i3).frobenius_norm() < 1e-14);

        let out = support_inv_sqrt(&ComplexMatrix::diag(&[4.0, 0.0]), RANK_TOL).unwrap();
        assert!((&out - &ComplexMatrix::diag(&[0.5, 0.0])).frobenius_norm() < 1e-14);
    }

    #[test]
    fn inv_sqrt_errors() {
        assert!(matches!(
            support_inv_sqrt(&ComplexMatrix::zeros(2, 2), RANK_TOL),
            Err(Error::NoSupport)
        ));
        assert!(matches!(
            support_inv_sqrt(&ComplexMatrix::diag(&[1.0, -0.5]), RANK_TOL),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn partial_trace_basics() {
        let sigma = ComplexMatrix::from_rows(&[vec![r(0.3), c(0.1, 0.2)], vec![c(0.1, -0.2), r(0.7)]]).unwrap();
        let m = ComplexMatrix::diag(&[1.0, 0.0]).kron(&sigma);
        let out = partial_trace_left(&m, 2, 2).unwrap();
        assert!((&out - &sigma).frobenius_norm() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = [r(s), ZERO, ZERO, r(s)];
        let out = partial_trace_left(&ComplexMatrix::projector(&bell), 2, 2).unwrap();
        assert!((&out - &ComplexMatrix::identity(2).scale(0.5)).frobenius_norm() < 1e-15);

        assert!(partial_trace_left(&ComplexMatrix::identity(5), 2, 2).is_err());
    }

    #[test]
    fn product_state_partial_trace_matches_double_sum() {
        let left = [c(0.6, 0.0), c(0.0, 0.8)];
        let right = [c(0.5, 0.1), c(-0.3, 0.4), c(0.2, -0.6)];
        let nr = vector_norm(&right);
        let right: Vec<Complex> = right.iter().map(|z| z / nr).collect();
        let mut joint = Vec::new();
        for a in &left {
            for b in &right {
                joint.push(a * b);
            }
        }
        let rho = ComplexMatrix::projector(&joint);
        let out = partial_trace_left(&rho, 2, 3).unwrap();
        // explicit double sum Σ_a ⟨a,i|ρ|a,k⟩
        let mut oracle = ComplexMatrix::zeros(3, 3);
        for i in 0..3 {
            for k in 0..3 {
                for a in 0..2 {
                    oracle[(i, k)] += joint[a * 3 + i] * joint[a * 3 + k].conj();
                }
            }
        }
        assert!((&out - &oracle).frobenius_norm() < 1e-15);
        assert!((&out - &ComplexMatrix::projector(&right)).frobenius_norm() < 1e-14);
        assert!((out.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn svd_reconstructs() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(0.2, 0.0), c(0.0, -1.0)],
            vec![c(0.3, 0.3), c(-0.7, 0.1), c(0.4, 0.0)],
        ])
        .unwrap();
        let (u, s, v) = svd(&m);
        assert!(s[0] >= s[1]);
        let mut rec = ComplexMatrix::zeros(2, 3);
        for k in 0..s.len() {
            rec += &ComplexMatrix::outer(&u[k], &v[k]).scale(s[k]);
        }
        assert!((&rec - &m).frobenius_norm() < 1e-13);
    }
}
