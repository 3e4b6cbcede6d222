//! CS decomposition of a unitary matrix with a nearly balanced 2x2 block
//! partition (`|p - q| <= 1`):
//!
//! ```text
//! W = diag(U1, U2) · [C 0 S; 0 1 0; -S 0 C] · diag(V1, V2)
//! ```
//!
//! `C` and `S` are `r x r` nonnegative diagonals with `r = min(p, q)` and
//! `C^2 + S^2 = I`. The structural `1` exists only when `p != q`; it lives at
//! 0-based index `r`, which is the last row of the top block when `p > q` and
//! the first row of the bottom block when `q > p`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::matcore::{
    block_diagonal, complete_orthonormal, polar_unitary, project_out, real,
    singular_value_decomposition, unitarity_residual, Complex64, ComplexMatrix, Tolerances,
};

/// Sines at or below this are treated as exact zeros when orienting `U2`.
const SINE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct CsFactors {
    pub p: usize,
    pub q: usize,
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
    pub v1: ComplexMatrix,
    pub v2: ComplexMatrix,
    /// Non-increasing, in `[0, 1]`.
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct CsdOptions {
    /// Sines below this mark a cluster of cosines near 1; those directions
    /// are orthonormalized only after the well-separated ones.
    pub cluster_tol: f64,
}

impl Default for CsdOptions {
    fn default() -> Self {
        Self { cluster_tol: 1e-8 }
    }
}

fn check_partition(dim: usize, p: usize, q: usize) -> Result<()> {
    if p + q != dim || p.abs_diff(q) > 1 || p == 0 || q == 0 {
        return Err(Error::PartitionMismatch { p, q, dim });
    }
    Ok(())
}

/// The central factor `[C 0 S; 0 1 0; -S 0 C]` (no middle row when `p == q`).
pub fn core_matrix(p: usize, q: usize, cos: &[f64], sin: &[f64]) -> ComplexMatrix {
    let r = p.min(q);
    assert_eq!(cos.len(), r);
    assert_eq!(sin.len(), r);
    let dim = p + q;
    let mid = usize::from(p != q);
    let mut core = ComplexMatrix::zeros(dim, dim);
    for k in 0..r {
        let (top, bottom) = (k, r + mid + k);
        core[(top, top)] = real(cos[k]);
        core[(top, bottom)] = real(sin[k]);
        core[(bottom, top)] = real(-sin[k]);
        core[(bottom, bottom)] = real(cos[k]);
    }
    if mid == 1 {
        core[(r, r)] = real(1.0);
    }
    core
}

pub fn cs_reconstruct(f: &CsFactors) -> ComplexMatrix {
    let left = block_diagonal(&[&f.u1, &f.u2]);
    let right = block_diagonal(&[&f.v1, &f.v2]);
    left * core_matrix(f.p, f.q, &f.cos, &f.sin) * right
}

pub fn cs_decompose(w: &ComplexMatrix, p: usize, q: usize, tol: &Tolerances) -> Result<CsFactors> {
    cs_decompose_with(w, p, q, tol, &CsdOptions::default())
}

pub fn cs_decompose_with(
    w: &ComplexMatrix,
    p: usize,
    q: usize,
    tol: &Tolerances,
    opts: &CsdOptions,
) -> Result<CsFactors> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "CS decomposition needs a square matrix, got {}x{}",
            w.nrows(),
            w.ncols()
        )));
    }
    check_partition(w.nrows(), p, q)?;
    let residual = unitarity_residual(w);
    if residual.is_nan() || residual > tol.unitary_abs {
        return Err(Error::NotUnitary { residual });
    }
    let r = p.min(q);

    let w11 = w.view((0, 0), (p, p)).into_owned();
    let w12 = w.view((0, p), (p, q)).into_owned();
    let w21 = w.view((p, 0), (q, p)).into_owned();
    let w22 = w.view((p, p), (q, q)).into_owned();

    // W11 = Ua diag(sigma) Vb*; the columns of W21 Vb are mutually orthogonal
    // with norms sqrt(1 - sigma^2), which gives the sines without cancellation.
    let svd = singular_value_decomposition(&w11)?;
    let y = &w21 * &svd.v;
    let col_norm: Vec<f64> = (0..p).map(|j| y.column(j).norm()).collect();

    // With p > q one unit singular value of W11 is structural: its W21
    // column vanishes identically.
    let structural = (p > q).then(|| {
        (0..p)
            .min_by(|&a, &b| col_norm[a].total_cmp(&col_norm[b]))
            .expect("p > 0")
    });
    let mut paired: Vec<(usize, f64)> = (0..p)
        .filter(|&j| Some(j) != structural)
        .map(|j| (j, col_norm[j].atan2(svd.sigma[j])))
        .collect();
    paired.sort_by(|a, b| a.1.total_cmp(&b.1));
    debug_assert_eq!(paired.len(), r);

    let cos: Vec<f64> = paired.iter().map(|&(_, t)| t.cos().clamp(0.0, 1.0)).collect();
    let sin: Vec<f64> = paired.iter().map(|&(_, t)| t.sin().clamp(0.0, 1.0)).collect();

    let mut order: Vec<usize> = paired.iter().map(|&(j, _)| j).collect();
    order.extend(structural);
    let u1 = ComplexMatrix::from_fn(p, p, |i, k| svd.u[(i, order[k])]);
    let v1 = ComplexMatrix::from_fn(p, p, |i, k| svd.v[(k, order[i])].conj());

    // Column of U2 that pairs with the k-th cosine.
    let u2_slot = |k: usize| if q > p { k + 1 } else { k };

    let mut targets: Vec<(usize, f64, DVector<Complex64>)> = (0..r)
        .filter(|&k| sin[k] > SINE_FLOOR)
        .map(|k| {
            let col = y.column(order[k]).into_owned();
            let norm = col.norm();
            (u2_slot(k), sin[k], col.unscale(-norm))
        })
        .collect();
    // Well-separated directions first, then the near-unit-cosine cluster.
    targets.sort_by(|a, b| {
        let ca = a.1 <= opts.cluster_tol;
        let cb = b.1 <= opts.cluster_tol;
        ca.cmp(&cb).then(b.1.total_cmp(&a.1))
    });
    let u2 = orient_columns(q, targets);

    // V2 from whichever of C V2 = U2* W22 and S V2 = U1* W12 divides by the
    // larger of (c, s) >= 1/√2.
    let from_w22 = u2.adjoint() * &w22;
    let from_w12 = u1.adjoint() * &w12;
    let mut v2 = ComplexMatrix::zeros(q, q);
    if q > p {
        v2.row_mut(0).copy_from(&from_w22.row(0));
    }
    for k in 0..r {
        let row = u2_slot(k);
        if cos[k] >= sin[k] {
            let scaled = from_w22.row(row).unscale(cos[k]);
            v2.row_mut(row).copy_from(&scaled);
        } else {
            let scaled = from_w12.row(k).unscale(sin[k]);
            v2.row_mut(row).copy_from(&scaled);
        }
    }
    let v2 = polar_unitary(&v2)?;

    Ok(CsFactors {
        p,
        q,
        u1,
        u2,
        v1,
        v2,
        cos,
        sin,
    })
}

/// Builds a `dim x dim` unitary whose column `slot` follows the given target
/// direction as closely as orthogonality to earlier columns allows; slots
/// without a target (or whose target collapses) are filled by orthonormal
/// completion.
fn orient_columns(dim: usize, targets: Vec<(usize, f64, DVector<Complex64>)>) -> ComplexMatrix {
    let mut placed: Vec<DVector<Complex64>> = Vec::with_capacity(dim);
    let mut slots: Vec<Option<usize>> = vec![None; dim];
    for (slot, _, mut v) in targets {
        project_out(&mut v, &placed);
        let norm = v.norm();
        if norm < 0.5 {
            continue;
        }
        slots[slot] = Some(placed.len());
        placed.push(v.unscale(norm));
    }
    let known = placed.len();
    let mut basis = ComplexMatrix::zeros(dim, known);
    for (j, v) in placed.iter().enumerate() {
        basis.set_column(j, v);
    }
    let full = complete_orthonormal(&basis);
    let mut spare = known..dim;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (slot, src) in slots.iter().enumerate() {
        let j = src.unwrap_or_else(|| spare.next().expect("one spare column per empty slot"));
        out.set_column(slot, &full.column(j));
    }
    out
}
