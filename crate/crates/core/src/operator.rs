//! Dense Hermitian operators, density operators and spectral projectors.
//!
//! All operators are stored as dense `d x d` complex matrices. An optional
//! block layout records a known block-diagonal structure so that spectral
//! work can be done block by block.

use std::fmt;
use std::ops::{Add, Deref, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eigen::jacobi_eigen;
use crate::error::{QhtError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermiticity tolerance at construction, relative to `max(1, max |a_ij|)`.
pub const TOL_HERM: f64 = 1e-12;
/// Trace tolerance for density operators.
pub const TOL_TRACE: f64 = 1e-10;
/// Allowed negative eigenvalue for positive semidefinite operators.
pub const TOL_PSD: f64 = 1e-10;
/// Eigenvalues with `|λ| <= TOL_ZERO_REL * max(1, ‖A‖)` count as zero.
pub const TOL_ZERO_REL: f64 = 1e-9;
/// Eigenvalues closer than `TOL_GROUP_REL * max |λ|` share an eigenspace.
pub const TOL_GROUP_REL: f64 = 1e-9;

#[inline]
pub(crate) fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Real part of `tr(A B)` for square matrices, without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)];
            let y = b[(k, i)];
            s += x.re * y.re - x.im * y.im;
        }
    }
    s
}

/// A finite-dimensional self-adjoint operator.
#[derive(Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
    blocks: Option<Vec<usize>>,
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianOperator")
            .field("dim", &self.dim())
            .field("blocks", &self.blocks)
            .field("matrix", &self.matrix)
            .finish()
    }
}

impl HermitianOperator {
    /// Validates squareness, finiteness and Hermiticity (within [`TOL_HERM`]),
    /// then symmetrizes so that the stored matrix is exactly self-adjoint.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 {
            return Err(QhtError::NotSquare { rows, cols });
        }
        let mut largest: f64 = 1.0;
        for j in 0..cols {
            for i in 0..rows {
                let z = matrix[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(QhtError::NonFinite { row: i, col: j });
                }
                largest = largest.max(z.norm());
            }
        }
        let mut deviation: f64 = 0.0;
        for j in 0..cols {
            for i in 0..=j {
                deviation = deviation.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if deviation > TOL_HERM * largest {
            return Err(QhtError::NotHermitian { deviation });
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Returns `(A + A^H) / 2` without validation.
    pub fn symmetrized(matrix: CMatrix) -> Self {
        let n = matrix.nrows();
        let m = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c64(matrix[(i, i)].re)
            } else {
                (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5
            }
        });
        HermitianOperator {
            matrix: m,
            blocks: None,
        }
    }

    pub fn from_real_diagonal(diagonal: &[f64]) -> Self {
        let n = diagonal.len();
        HermitianOperator {
            matrix: CMatrix::from_fn(n, n, |i, j| if i == j { c64(diagonal[i]) } else { c64(0.0) }),
            blocks: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            matrix: CMatrix::identity(dim, dim),
            blocks: None,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            matrix: CMatrix::zeros(dim, dim),
            blocks: None,
        }
    }

    /// Rank-one projector `|v><v| / <v|v>`.
    pub fn ket_projector(v: &CVector) -> Result<Self> {
        let norm2 = v.norm_squared();
        if norm2 == 0.0 || !norm2.is_finite() {
            return Err(QhtError::InvalidArgument("zero or non-finite vector".into()));
        }
        Ok(Self::symmetrized(v * v.adjoint() / c64(norm2)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Block sizes of a known block-diagonal layout, if any.
    pub fn blocks(&self) -> Option<&[usize]> {
        self.blocks.as_deref()
    }

    /// Attaches a block layout. Off-block entries must be exactly zero.
    pub fn with_blocks(mut self, sizes: Vec<usize>) -> Result<Self> {
        let total: usize = sizes.iter().sum();
        if total != self.dim() || sizes.contains(&0) {
            return Err(QhtError::InvalidArgument(format!(
                "block sizes {sizes:?} do not partition dimension {}",
                self.dim()
            )));
        }
        let owner = block_owner(&sizes);
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                if owner[i] != owner[j] && self.matrix[(i, j)] != c64(0.0) {
                    return Err(QhtError::InvalidArgument(format!(
                        "entry ({i}, {j}) lies outside the declared blocks"
                    )));
                }
            }
        }
        self.blocks = if sizes.len() > 1 { Some(sizes) } else { None };
        Ok(self)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// `tr(A B)`, which is real for Hermitian `A`, `B`.
    pub fn inner(&self, other: &HermitianOperator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        trace_product(&self.matrix, &other.matrix)
    }

    /// `X A X^H`.
    pub fn congruence(&self, x: &CMatrix) -> HermitianOperator {
        Self::symmetrized(x * &self.matrix * x.adjoint())
    }

    /// Kronecker product `A ⊗ B`.
    pub fn kron(&self, other: &HermitianOperator) -> HermitianOperator {
        Self::symmetrized(self.matrix.kronecker(&other.matrix))
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(QhtError::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        SpectralDecomposition::of(self)
    }

    pub fn projector(&self, region: SpectralRegion) -> Result<Projector> {
        Ok(self.spectral()?.projector(region))
    }

    /// `{A > 0}`.
    pub fn positive_projector(&self) -> Result<Projector> {
        self.projector(SpectralRegion::Positive)
    }

    /// `{A >= 0}`.
    pub fn nonnegative_projector(&self) -> Result<Projector> {
        self.projector(SpectralRegion::NonNegative)
    }

    /// `{A < 0}`.
    pub fn negative_projector(&self) -> Result<Projector> {
        self.projector(SpectralRegion::Negative)
    }

    /// `{A <= 0}`.
    pub fn nonpositive_projector(&self) -> Result<Projector> {
        self.projector(SpectralRegion::NonPositive)
    }

    /// Projector onto the numerically null eigenspace.
    pub fn null_projector(&self) -> Result<Projector> {
        self.projector(SpectralRegion::Null)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*self.spectral()?.eigenvalues().last().unwrap())
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectral()?.eigenvalues()[0])
    }

    /// Applies `f` to every eigenvalue.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
        Ok(self.spectral()?.map(f))
    }

    fn same_blocks(&self, other: &HermitianOperator) -> Option<Vec<usize>> {
        match (&self.blocks, &other.blocks) {
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            _ => None,
        }
    }
}

fn block_owner(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect()
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    /// Panics on dimension mismatch.
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix + &rhs.matrix,
            blocks: self.same_blocks(rhs),
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;

    /// Panics on dimension mismatch.
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix - &rhs.matrix,
            blocks: self.same_blocks(rhs),
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, rhs: f64) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix * c64(rhs),
            blocks: self.blocks.clone(),
        }
    }
}

/// Block-diagonal operator `diag(A_1, ..., A_n)` with its layout recorded.
pub fn block_diag(blocks: &[HermitianOperator]) -> Result<HermitianOperator> {
    if blocks.is_empty() {
        return Err(QhtError::InvalidArgument("block_diag needs at least one block".into()));
    }
    let sizes: Vec<usize> = blocks.iter().map(|b| b.dim()).collect();
    let total = sizes.iter().sum();
    let mut m = CMatrix::zeros(total, total);
    let mut offset = 0;
    for b in blocks {
        let d = b.dim();
        m.view_mut((offset, offset), (d, d)).copy_from(&b.matrix);
        offset += d;
    }
    HermitianOperator {
        matrix: m,
        blocks: None,
    }
    .with_blocks(sizes)
}

/// Which part of the spectrum a projector selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralRegion {
    Positive,
    NonNegative,
    Negative,
    NonPositive,
    Null,
}

impl SpectralRegion {
    fn contains(self, lambda: f64, tol: f64) -> bool {
        match self {
            SpectralRegion::Positive => lambda > tol,
            SpectralRegion::NonNegative => lambda >= -tol,
            SpectralRegion::Negative => lambda < -tol,
            SpectralRegion::NonPositive => lambda <= tol,
            SpectralRegion::Null => lambda.abs() <= tol,
        }
    }
}

/// A set of numerically equal eigenvalues, as a range into the sorted list.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenGroup {
    pub value: f64,
    pub range: std::ops::Range<usize>,
}

/// `A = Σ λ_i E_i` with eigenvalues sorted in descending order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    values: Vec<f64>,
    vectors: CMatrix,
    groups: Vec<EigenGroup>,
    norm: f64,
}

impl SpectralDecomposition {
    pub fn of(a: &HermitianOperator) -> Result<Self> {
        let n = a.dim();
        let (values, vectors) = match &a.blocks {
            Some(sizes) => {
                let mut pairs: Vec<(f64, CVector)> = Vec::with_capacity(n);
                let mut offset = 0;
                for &d in sizes {
                    let sub = a.matrix.view((offset, offset), (d, d)).into_owned();
                    let e = jacobi_eigen(&sub)?;
                    for (k, &lambda) in e.values.iter().enumerate() {
                        let mut v = CVector::zeros(n);
                        v.rows_mut(offset, d).copy_from(&e.vectors.column(k));
                        pairs.push((lambda, v));
                    }
                    offset += d;
                }
                pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
                let values = pairs.iter().map(|p| p.0).collect();
                let cols: Vec<CVector> = pairs.into_iter().map(|p| p.1).collect();
                (values, CMatrix::from_columns(&cols))
            }
            None => {
                let e = jacobi_eigen(&a.matrix)?;
                (e.values, e.vectors)
            }
        };
        let groups = group_eigenvalues(&values);
        Ok(SpectralDecomposition {
            values,
            vectors,
            groups,
            norm: a.norm(),
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn groups(&self) -> &[EigenGroup] {
        &self.groups
    }

    /// Zero-classification band `TOL_ZERO_REL * max(1, ‖A‖)`.
    pub fn tol_zero(&self) -> f64 {
        TOL_ZERO_REL * self.norm.max(1.0)
    }

    /// One projector `E_i` per distinct eigenvalue.
    pub fn eigenprojectors(&self) -> Vec<(f64, Projector)> {
        self.groups
            .iter()
            .map(|g| {
                let idx: Vec<usize> = g.range.clone().collect();
                (g.value, Projector(self.span_projector(&idx)))
            })
            .collect()
    }

    pub fn region_indices(&self, region: SpectralRegion) -> Vec<usize> {
        let tol = self.tol_zero();
        (0..self.dim())
            .filter(|&i| region.contains(self.values[i], tol))
            .collect()
    }

    pub fn projector(&self, region: SpectralRegion) -> Projector {
        Projector(self.span_projector(&self.region_indices(region)))
    }

    /// Projector onto the span of the given eigenvectors.
    pub fn projector_of(&self, idx: &[usize]) -> Projector {
        Projector(self.span_projector(idx))
    }

    /// `tr(B P)` for the projector `P` of `region`, via `Σ <v_i|B|v_i>`.
    pub fn trace_in_region(&self, region: SpectralRegion, b: &HermitianOperator) -> f64 {
        self.region_indices(region)
            .into_iter()
            .map(|i| self.expectation(i, b))
            .sum()
    }

    /// `<v_i|B|v_i>` for the `i`-th eigenvector.
    pub fn expectation(&self, i: usize, b: &HermitianOperator) -> f64 {
        let v = self.vectors.column(i);
        let bv = &b.matrix * v;
        v.dotc(&bv).re
    }

    /// `Σ_{i ∈ idx} |v_i><v_i|`.
    pub fn span_projector(&self, idx: &[usize]) -> HermitianOperator {
        let n = self.dim();
        if idx.is_empty() {
            return HermitianOperator::zeros(n);
        }
        let cols: Vec<_> = idx.iter().map(|&i| self.vectors.column(i).into_owned()).collect();
        let v = CMatrix::from_columns(&cols);
        HermitianOperator::symmetrized(&v * v.adjoint())
    }

    /// `Σ f(λ_i) |v_i><v_i|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let s = f(lambda);
            for r in 0..n {
                scaled[(r, k)] *= s;
            }
        }
        HermitianOperator::symmetrized(&scaled * self.vectors.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.map(|x| x)
    }
}

fn group_eigenvalues(values: &[f64]) -> Vec<EigenGroup> {
    let scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = TOL_GROUP_REL * scale;
    let mut groups: Vec<EigenGroup> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i - 1] - values[i] > tol {
            let members = &values[start..i];
            let value = members.iter().sum::<f64>() / members.len() as f64;
            groups.push(EigenGroup {
                value,
                range: start..i,
            });
            start = i;
        }
    }
    groups
}

/// An orthogonal projector: `P^2 = P`, eigenvalues in `{0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector(HermitianOperator);

impl Projector {
    /// Validates `P^2 = P` within 1e-10 (Frobenius).
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let sq = &op.matrix * &op.matrix;
        let dev = (sq - &op.matrix).norm();
        if dev > 1e-10 {
            return Err(QhtError::InvalidArgument(format!(
                "operator is not idempotent: ‖P² − P‖ = {dev:e}"
            )));
        }
        Ok(Projector(op))
    }

    pub fn rank(&self) -> usize {
        self.0.trace().round() as usize
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.0
    }
}

impl Deref for Projector {
    type Target = HermitianOperator;

    fn deref(&self) -> &HermitianOperator {
        &self.0
    }
}

/// A quantum state: unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(HermitianOperator);

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        let min_eigenvalue = op.min_eigenvalue()?;
        if (trace - 1.0).abs() > TOL_TRACE || min_eigenvalue < -TOL_PSD {
            return Err(QhtError::NotDensity {
                trace,
                min_eigenvalue,
            });
        }
        Ok(DensityOperator(op))
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(matrix)?)
    }

    /// Clips negative eigenvalues and renormalizes. Fails only if nothing
    /// positive remains.
    pub fn nearest(op: &HermitianOperator) -> Result<Self> {
        let clipped = op.map_spectrum(|x| x.max(0.0))?;
        let tr = clipped.trace();
        if tr <= 0.0 {
            return Err(QhtError::InvalidArgument(
                "operator has no positive part to normalize".into(),
            ));
        }
        Self::new(&clipped * (1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator(&HermitianOperator::identity(dim) * (1.0 / dim as f64))
    }

    /// Pure state `|ψ><ψ|` from an (unnormalized) state vector.
    pub fn pure(psi: &CVector) -> Result<Self> {
        Ok(DensityOperator(HermitianOperator::ket_projector(psi)?))
    }

    /// `|k><k|` in dimension `dim`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        DensityOperator(HermitianOperator::from_real_diagonal(&diag))
    }

    pub fn purity(&self) -> f64 {
        self.0.inner(&self.0)
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.0
    }

    /// Wraps an operator already known to be a state; used for block
    /// constructions whose validity follows from their inputs.
    pub(crate) fn assume_valid(op: HermitianOperator) -> Self {
        DensityOperator(op)
    }
}

impl Deref for DensityOperator {
    type Target = HermitianOperator;

    fn deref(&self) -> &HermitianOperator {
        &self.0
    }
}
