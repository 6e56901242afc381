//! Dense complex linear algebra for the small operators used throughout the crate.
//!
//! All tensor products use one fixed subsystem ordering: the first factor is the
//! most significant index. A basis state `|t⟩ ⊗ |e⟩` of a `d_T × d_E` space lives
//! at flat index `t * d_E + e`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Maximum entrywise `|M - M^†|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A column vector of complex amplitudes. Never normalized implicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector(DVector<C64>);

impl ComplexVector {
    pub fn from_vec(entries: Vec<C64>) -> Self {
        assert!(!entries.is_empty(), "vectors must have positive dimension");
        Self(DVector::from_vec(entries))
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::from_vec(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vectors must have positive dimension");
        Self(DVector::zeros(dim))
    }

    /// Computational basis vector `|index⟩` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dimension {dim}"
        );
        let mut v = Self::zeros(dim);
        v.0[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.0
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(
            self.dim(),
            other.dim(),
            "inner product of mismatched vectors"
        );
        self.0.dotc(&other.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Contiguous slice `[start, start + len)` as a new vector.
    pub fn segment(&self, start: usize, len: usize) -> Self {
        Self(self.0.rows(start, len).into_owned())
    }
}

impl From<DVector<C64>> for ComplexVector {
    fn from(v: DVector<C64>) -> Self {
        Self(v)
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;

    fn add(self, rhs: Self) -> ComplexVector {
        ComplexVector(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;

    fn sub(self, rhs: Self) -> ComplexVector {
        ComplexVector(&self.0 - &rhs.0)
    }
}

impl Add for ComplexVector {
    type Output = ComplexVector;

    fn add(self, rhs: Self) -> ComplexVector {
        ComplexVector(self.0 + rhs.0)
    }
}

/// Square complex matrix: unitaries, density operators, projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexOperator(DMatrix<C64>);

impl ComplexOperator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square with positive dimension, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }

    /// Builds a `dim × dim` operator from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0);
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self(DMatrix::from_diagonal(&DVector::from_vec(d)))
    }

    /// `|v⟩⟨v|`, unnormalized.
    pub fn projector(v: &ComplexVector) -> Self {
        Self(v.as_vector() * v.as_vector().adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(&self.0 * C64::new(factor, 0.0))
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), v.dim(), "operator/vector dimension mismatch");
        ComplexVector(&self.0 * v.as_vector())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Largest entrywise `|M - M^†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL
    }

    /// Largest entrywise `|U^†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.0.adjoint() * &self.0;
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((gram[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Direct sum `diag(b_1, ..., b_n)`.
    pub fn block_diagonal(blocks: &[ComplexOperator]) -> Self {
        let total: usize = blocks.iter().map(ComplexOperator::dim).sum();
        let mut m = DMatrix::zeros(total, total);
        let mut offset = 0;
        for b in blocks {
            let d = b.dim();
            m.view_mut((offset, offset), (d, d)).copy_from(&b.0);
            offset += d;
        }
        Self(m)
    }
}

impl Mul for &ComplexOperator {
    type Output = ComplexOperator;

    fn mul(self, rhs: Self) -> ComplexOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator product dimension mismatch");
        ComplexOperator(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexOperator {
    type Output = ComplexOperator;

    fn add(self, rhs: Self) -> ComplexOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator sum dimension mismatch");
        ComplexOperator(&self.0 + &rhs.0)
    }
}

/// Which factor of a bipartite space `A ⊗ B` survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Reduced operator on the `keep` factor of a `dims.0 × dims.1` bipartite operator.
pub fn partial_trace(
    rho: &ComplexOperator,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexOperator> {
    let (da, db) = dims;
    if da == 0 || db == 0 || da * db != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot split a {}-dimensional operator as {da} x {db}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let reduced = match keep {
        Subsystem::First => DMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()
        }),
        Subsystem::Second => DMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()
        }),
    };
    Ok(ComplexOperator(reduced))
}

/// Real eigenvalues of a Hermitian operator in descending order.
pub fn hermitian_eigenvalues(m: &ComplexOperator) -> Result<Vec<f64>> {
    let deviation = m.hermiticity_defect();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let mut values: Vec<f64> = m.matrix().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}
