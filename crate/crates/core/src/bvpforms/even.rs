//! Canonical form for order `2n`:
//! `(A:B) = U [C I 0 S; -S 0 I C] diag(V1, U1*, U2*, V2) Z`.
//!
//! `Z = Z_a ⊕ Z_a` takes `C_{2n}` to `±i diag(I_n, -I_n)`. Writing
//! `A Z_a* = [a1 a2]` and `B Z_a* = [b1 b2]`, the Gram condition becomes
//! `X X* = Y Y*` with `X = [a1 b2]`, `Y = [a2 b1]`, so `X = Y W'` for a
//! unitary `W'` whose balanced CS decomposition supplies the factors.

use super::{require_self_adjoint, unitary_quotient, BoundaryPair, Classification};
use crate::csd::cs_decompose;
use crate::error::{Error, Result};
use crate::matcore::{block_diagonal, diagonal, hstack, vstack, ComplexMatrix, Tolerances};
use crate::structure::{even_order_z, even_order_z_block};

#[derive(Debug, Clone)]
pub struct EvenCanonicalForm {
    pub n: usize,
    /// Invertible `2n x 2n` left factor.
    pub u: ComplexMatrix,
    pub v1: ComplexMatrix,
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
    pub v2: ComplexMatrix,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub z: ComplexMatrix,
    /// The unitary `W'` with `X = Y W'`.
    pub w: ComplexMatrix,
    /// Number of sines above `rank_rel`.
    pub rank_s: usize,
    pub classification: Classification,
}

/// `[C I 0 S; -S 0 I C]`, a `2n x 4n` matrix.
pub fn even_core(cos: &[f64], sin: &[f64]) -> ComplexMatrix {
    let n = cos.len();
    let c = diagonal(cos);
    let s = diagonal(sin);
    let eye = ComplexMatrix::identity(n, n);
    let zero = ComplexMatrix::zeros(n, n);
    vstack(&[
        &hstack(&[&c, &eye, &zero, &s]),
        &hstack(&[&(-&s), &zero, &eye, &c]),
    ])
}

impl EvenCanonicalForm {
    pub fn core(&self) -> ComplexMatrix {
        even_core(&self.cos, &self.sin)
    }

    /// `diag(V1, U1*, U2*, V2) Z`.
    pub fn right_factor(&self) -> ComplexMatrix {
        block_diagonal(&[&self.v1, &self.u1.adjoint(), &self.u2.adjoint(), &self.v2]) * &self.z
    }

    /// The `2n x 4n` matrix `(A:B)` rebuilt from the factors.
    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.u * self.core() * self.right_factor()
    }
}

pub(crate) fn classify_rank_s(rank_s: usize, n: usize) -> Classification {
    if rank_s == 0 {
        Classification::Separated
    } else if rank_s == n {
        Classification::Coupled
    } else {
        Classification::Mixed
    }
}

pub fn even_canonical_decompose(pair: &BoundaryPair, tol: &Tolerances) -> Result<EvenCanonicalForm> {
    let m = pair.spec.m;
    if m % 2 == 1 {
        return Err(Error::OddSize { m });
    }
    require_self_adjoint(pair, tol)?;
    let n = m / 2;
    let za = even_order_z_block(n);
    let ma = &pair.a * za.adjoint();
    let mb = &pair.b * za.adjoint();
    let x = hstack(&[&ma.columns(0, n).into_owned(), &mb.columns(n, n).into_owned()]);
    let y = hstack(&[&ma.columns(n, n).into_owned(), &mb.columns(0, n).into_owned()]);
    let w = unitary_quotient(&y, &x, tol)?;
    let cs = cs_decompose(&w, n, n, tol)?;
    let u = y * block_diagonal(&[&cs.u1, &cs.u2]);
    let rank_s = cs.sin.iter().filter(|&&s| s > tol.rank_rel).count();
    Ok(EvenCanonicalForm {
        n,
        u,
        v1: cs.v1,
        u1: cs.u1,
        u2: cs.u2,
        v2: cs.v2,
        cos: cs.cos,
        sin: cs.sin,
        z: even_order_z(n),
        w,
        rank_s,
        classification: classify_rank_s(rank_s, n),
    })
}
