//! Dense complex matrix kernels.
//!
//! Every higher module works on [`ComplexMatrix`], a column-major
//! `nalgebra` matrix of [`Complex64`]. SVD and Hermitian eigenproblems go
//! through LAPACK (`ndarray-linalg`). This module adds the pieces the
//! boundary-condition algebra needs on top of plain arithmetic: sorted
//! Hermitian eigendecompositions, full SVDs with non-increasing singular
//! values, a relative-threshold numerical rank, Haar-random unitaries and a
//! handful of orthonormal-basis utilities.

use std::str::FromStr;

use nalgebra::{Complex, DMatrix, DVector, QR};
use ndarray::{Array2, ShapeBuilder};
use ndarray_linalg::{Eigh, SVD, UPLO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type ComplexScalar = Complex64;
pub type ComplexMatrix = DMatrix<Complex64>;

fn to_lapack(m: &ComplexMatrix) -> Array2<Complex64> {
    Array2::from_shape_fn(m.shape().f(), |(i, j)| m[(i, j)])
}

fn from_lapack(a: &Array2<Complex64>) -> ComplexMatrix {
    let (r, c) = a.dim();
    ComplexMatrix::from_fn(r, c, |i, j| a[(i, j)])
}

/// Numerical thresholds used wherever the exact-arithmetic statements need a
/// floating-point cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative singular-value cutoff for numerical rank.
    pub rank_rel: f64,
    /// Max absolute entry of `U*U - I` (also used for Hermiticity checks).
    pub unitary_abs: f64,
    /// Frobenius bound for reconstruction and Gram residuals.
    pub residual_abs: f64,
    /// Distance from 1 below which an eigenvalue of `KK*` counts as a unit eigenvalue.
    pub unit_eig_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel: 1e-10,
            unitary_abs: 1e-10,
            residual_abs: 1e-8,
            unit_eig_abs: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("unitary_abs", self.unitary_abs),
            ("residual_abs", self.residual_abs),
            ("unit_eig_abs", self.unit_eig_abs),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {v} is outside (0, 1)"
                )));
            }
        }
        Ok(())
    }

    /// Applies an override string to `self`.
    ///
    /// Accepted forms are a bare number, which sets `residual_abs`, or a
    /// comma-separated list of `name=value` assignments, e.g.
    /// `rank_rel=1e-12,residual_abs=1e-9`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Err(Error::InvalidTolerance("empty tolerance string".into()));
        }
        if !spec.contains('=') {
            self.residual_abs = parse_positive(spec)?;
        } else {
            for item in spec.split(',') {
                let (key, value) = item.split_once('=').ok_or_else(|| {
                    Error::InvalidTolerance(format!("expected name=value, got {item:?}"))
                })?;
                let value = parse_positive(value)?;
                match key.trim() {
                    "rank_rel" => self.rank_rel = value,
                    "unitary_abs" => self.unitary_abs = value,
                    "residual_abs" => self.residual_abs = value,
                    "unit_eig_abs" => self.unit_eig_abs = value,
                    other => {
                        return Err(Error::InvalidTolerance(format!(
                            "unknown tolerance {other:?}"
                        )))
                    }
                }
            }
        }
        self.validate()?;
        Ok(self)
    }
}

impl FromStr for Tolerances {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tolerances::default().with_overrides(s)
    }
}

fn parse_positive(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::InvalidTolerance(format!("not a number: {s:?}")))?;
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidTolerance(format!("{v} is not a positive finite number")));
    }
    Ok(v)
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Largest entry modulus, 0 for an empty matrix.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    ComplexMatrix::from_fn(r, c, |i, j| real(rows[i][j]))
}

pub fn diagonal(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().copied().map(real),
    ))
}

/// Block-diagonal concatenation; blocks need not be square.
pub fn block_diagonal(blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn hstack(blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    assert!(blocks.iter().all(|b| b.nrows() == rows), "hstack: row counts differ");
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        out.view_mut((0, c), b.shape()).copy_from(*b);
        c += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    assert!(blocks.iter().all(|b| b.ncols() == cols), "vstack: column counts differ");
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), b.shape()).copy_from(*b);
        r += b.nrows();
    }
    out
}

/// Hermitian eigendecomposition with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `j` pairs with `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

pub fn hermitian_eigendecomposition(h: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    ensure_finite(h)?;
    let deviation = max_abs(&(h - h.adjoint()));
    if deviation > tol.unitary_abs {
        return Err(Error::NotHermitian { deviation });
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let (values, vectors) = to_lapack(&sym)
        .eigh(UPLO::Lower)
        .map_err(|_| Error::ConvergenceFailure("Hermitian eigendecomposition"))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues = order.iter().map(|&j| values[j]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Full singular value decomposition `M = U diag(sigma) V*`.
///
/// `U` is `rows x rows` and `V` is `cols x cols`, both unitary; `sigma` has
/// `min(rows, cols)` non-increasing entries.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// `U diag(sigma) V*` with the rectangular diagonal in the middle.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (r, c) = (self.u.nrows(), self.v.nrows());
        let mut s = ComplexMatrix::zeros(r, c);
        for (k, &x) in self.sigma.iter().enumerate() {
            s[(k, k)] = real(x);
        }
        &self.u * s * self.v.adjoint()
    }
}

pub fn singular_value_decomposition(m: &ComplexMatrix) -> Result<Svd> {
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(Svd {
            u: ComplexMatrix::identity(rows, rows),
            sigma: Vec::new(),
            v: ComplexMatrix::identity(cols, cols),
        });
    }
    let (u, sigma, vt) = to_lapack(m)
        .svd(true, true)
        .map_err(|_| Error::ConvergenceFailure("singular value decomposition"))?;
    let u = from_lapack(&u.expect("u requested"));
    let v = from_lapack(&vt.expect("v requested")).adjoint();
    let k = rows.min(cols);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let sigma = order.iter().map(|&j| sigma[j].max(0.0)).collect();
    // Full U and V: reorder the leading k columns, keep the rest.
    let pick = |j: usize| if j < k { order[j] } else { j };
    Ok(Svd {
        u: ComplexMatrix::from_fn(rows, rows, |i, j| u[(i, pick(j))]),
        sigma,
        v: ComplexMatrix::from_fn(cols, cols, |i, j| v[(i, pick(j))]),
    })
}

pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    ensure_finite(m)?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let (_, sigma, _) = to_lapack(m)
        .svd(false, false)
        .map_err(|_| Error::ConvergenceFailure("singular value decomposition"))?;
    let mut s: Vec<f64> = sigma.iter().map(|x| x.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Number of singular values strictly above `rank_rel * sigma_max`.
pub fn rank_from_singular_values(sigma: &[f64], rank_rel: f64) -> usize {
    let top = sigma.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > rank_rel * top).count()
}

pub fn numerical_rank(m: &ComplexMatrix, tol: &Tolerances) -> Result<usize> {
    Ok(rank_from_singular_values(&singular_values(m)?, tol.rank_rel))
}

/// `max |U*U - I|`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    assert!(u.is_square(), "unitarity_residual needs a square matrix");
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - ComplexMatrix::identity(n, n)))
}

pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = ComplexMatrix::zeros(rows, cols);
    // Fill row-major so the stream layout does not depend on storage order.
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            out[(i, j)] = Complex64::new(re * scale, im * scale);
        }
    }
    out
}

/// Haar-distributed unitary drawn from `rng`: QR of a complex Ginibre matrix
/// with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary_with<R: Rng + ?Sized>(m: usize, rng: &mut R) -> ComplexMatrix {
    assert!(m >= 1, "random_unitary needs m >= 1");
    let g = complex_gaussian(m, m, rng);
    let qr = QR::new(g);
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Deterministic Haar-random `m x m` unitary for a given seed.
pub fn random_unitary(m: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    random_unitary_with(m, &mut rng)
}

pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Extends the orthonormal columns of `basis` to a square unitary.
///
/// Candidate directions are the standard basis vectors; at each step the one
/// with the largest component outside the current span is taken, projected
/// twice and normalized.
pub fn complete_orthonormal(basis: &ComplexMatrix) -> ComplexMatrix {
    let (n, k) = basis.shape();
    let mut cols: Vec<DVector<Complex64>> =
        (0..k).map(|j| basis.column(j).into_owned()).collect();
    while cols.len() < n {
        let mut best: Option<(f64, DVector<Complex64>)> = None;
        for e in 0..n {
            let mut v = DVector::<Complex64>::zeros(n);
            v[e] = real(1.0);
            project_out(&mut v, &cols);
            let norm = v.norm();
            if best.as_ref().map_or(true, |(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        let (_, mut v) = best.expect("n > 0");
        project_out(&mut v, &cols);
        let norm = v.norm();
        cols.push(v.unscale(norm));
    }
    ComplexMatrix::from_columns(&cols)
}

/// Two passes of classical Gram-Schmidt against `basis` (assumed orthonormal).
pub fn project_out(v: &mut DVector<Complex64>, basis: &[DVector<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let coeff = b.dotc(v);
            v.axpy(-coeff, b, Complex64::new(1.0, 0.0));
        }
    }
}

/// Nearest unitary matrix in Frobenius norm (the unitary polar factor).
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    assert!(m.is_square(), "polar_unitary needs a square matrix");
    let svd = singular_value_decomposition(m)?;
    Ok(&svd.u * svd.v.adjoint())
}

/// Orthonormal basis (as columns) of the row space of `m`, i.e. of the
/// column space of `m*`, truncated at the numerical rank.
pub fn row_space_basis(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let svd = singular_value_decomposition(m)?;
    let rank = rank_from_singular_values(&svd.sigma, tol.rank_rel);
    // Row space of M = span of the right singular vectors; conj() turns the
    // columns of V into the (row-vector) coordinates used by M's rows.
    Ok(svd.v.columns(0, rank).map(|z| z.conj()))
}

/// Largest principal angle (radians) between the column spaces of two
/// matrices with orthonormal columns.
///
/// Computed from the sines, `sigma_max((I - P_a) Q_b)`, which stays accurate
/// for tiny angles where `acos` of the cosines would not.
pub fn max_principal_angle(qa: &ComplexMatrix, qb: &ComplexMatrix) -> Result<f64> {
    if qa.nrows() != qb.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "principal angles between subspaces of C^{} and C^{}",
            qa.nrows(),
            qb.nrows()
        )));
    }
    if qa.ncols() != qb.ncols() {
        // Subspaces of different dimension are never equal.
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    let residual = qb - qa * (qa.adjoint() * qb);
    let s = singular_values(&residual)?;
    Ok(s.first().copied().unwrap_or(0.0).clamp(0.0, 1.0).asin())
}

/// Largest principal angle between the row spaces of two matrices.
pub fn row_space_angle(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    max_principal_angle(&row_space_basis(a, tol)?, &row_space_basis(b, tol)?)
}
