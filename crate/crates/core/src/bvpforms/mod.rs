//! Self-adjoint boundary pairs `(A:B)`: verification, synthesis from a
//! unitary `W`, recovery of `W`, and the canonical forms.
//!
//! A pair encodes the conditions `A Y(a) + B Y(b) = 0`. For order `m` it is
//! self-adjoint exactly when `rank(A:B) = m` and `A C_m A* = B C_m B*`.
//! Every such pair of odd order `2n + 1` is row-equivalent to
//! `(V11* + W V12* : V21* + W V22*)` for a unique unitary `W`.

mod canonical;
mod even;
mod generate;

pub use canonical::{
    block_rank_formula, canonical_decompose, classify, predicted_ranks, CanonicalForm,
};
pub use even::{even_canonical_decompose, EvenCanonicalForm};
pub use generate::{generate_random_even_pair, generate_random_pair};

use std::fmt;

use crate::error::{Error, Result};
use crate::matcore::{
    ensure_finite, hstack, numerical_rank, singular_value_decomposition, unitarity_residual,
    ComplexMatrix, Tolerances,
};
use crate::structure::{eigenbasis, symplectic_matrix, OrderSpec};

#[derive(Debug, Clone)]
pub struct BoundaryPair {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub spec: OrderSpec,
}

impl BoundaryPair {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(Error::DimensionMismatch(format!(
                "A and B must be square of equal size, got {}x{} and {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        ensure_finite(&a)?;
        ensure_finite(&b)?;
        let spec = OrderSpec::from_size(a.nrows())?;
        Ok(Self { a, b, spec })
    }

    /// The `m x 2m` matrix `(A:B)`.
    pub fn stacked(&self) -> ComplexMatrix {
        hstack(&[&self.a, &self.b])
    }

    /// `(G A : G B)`.
    pub fn left_multiply(&self, g: &ComplexMatrix) -> Self {
        Self {
            a: g * &self.a,
            b: g * &self.b,
            spec: self.spec,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Mixed,
    Coupled,
    Separated,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mixed => "Mixed",
            Self::Coupled => "Coupled",
            Self::Separated => "Separated",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfAdjointReport {
    pub rank_ab: usize,
    pub rank_ok: bool,
    /// Frobenius norm of `A C A* - B C B*`.
    pub gram_residual: f64,
    pub gram_ok: bool,
    pub rank_a: usize,
    pub rank_b: usize,
}

impl SelfAdjointReport {
    pub fn is_self_adjoint(&self) -> bool {
        self.rank_ok && self.gram_ok
    }
}

pub fn gram_residual(pair: &BoundaryPair) -> f64 {
    let c = symplectic_matrix(pair.spec.m);
    let lhs = &pair.a * &c * pair.a.adjoint();
    let rhs = &pair.b * &c * pair.b.adjoint();
    (lhs - rhs).norm()
}

pub fn check_self_adjoint(pair: &BoundaryPair, tol: &Tolerances) -> Result<SelfAdjointReport> {
    let m = pair.spec.m;
    let rank_ab = numerical_rank(&pair.stacked(), tol)?;
    let gram_residual = gram_residual(pair);
    Ok(SelfAdjointReport {
        rank_ab,
        rank_ok: rank_ab == m,
        gram_residual,
        gram_ok: gram_residual <= tol.residual_abs,
        rank_a: numerical_rank(&pair.a, tol)?,
        rank_b: numerical_rank(&pair.b, tol)?,
    })
}

/// Rank first, then the Gram condition.
pub(crate) fn require_self_adjoint(pair: &BoundaryPair, tol: &Tolerances) -> Result<SelfAdjointReport> {
    let report = check_self_adjoint(pair, tol)?;
    if !report.rank_ok {
        return Err(Error::RankDeficient {
            rank: report.rank_ab,
            expected: pair.spec.m,
        });
    }
    if !report.gram_ok {
        return Err(Error::NotSelfAdjoint {
            gram_residual: report.gram_residual,
        });
    }
    Ok(report)
}

/// `(V11* + W V12* : V21* + W V22*)` for odd order.
pub fn construct_from_w(w: &ComplexMatrix, spec: &OrderSpec, tol: &Tolerances) -> Result<BoundaryPair> {
    let basis = eigenbasis(spec)?;
    if w.shape() != (spec.m, spec.m) {
        return Err(Error::DimensionMismatch(format!(
            "W must be {m}x{m}, got {}x{}",
            w.nrows(),
            w.ncols(),
            m = spec.m
        )));
    }
    ensure_finite(w)?;
    let residual = unitarity_residual(w);
    if residual.is_nan() || residual > tol.unitary_abs {
        return Err(Error::NotUnitary { residual });
    }
    Ok(BoundaryPair {
        a: basis.v11.adjoint() + w * basis.v12.adjoint(),
        b: basis.v21.adjoint() + w * basis.v22.adjoint(),
        spec: *spec,
    })
}

/// The unitary `W` with `(A:B) = G (I : W) V*` for some invertible `G`.
pub fn recover_w(pair: &BoundaryPair, tol: &Tolerances) -> Result<ComplexMatrix> {
    let basis = eigenbasis(&pair.spec)?;
    require_self_adjoint(pair, tol)?;
    // (A:B) V = (G : G W).
    let p = &pair.a * &basis.v11 + &pair.b * &basis.v21;
    let r = &pair.a * &basis.v12 + &pair.b * &basis.v22;
    unitary_quotient(&p, &r, tol)
}

/// `P^{-1} R` for square `P, R` with `P P* = R R*`, computed as
/// `V_P U_P* U_R V_R*` from the two SVDs so the result is unitary to
/// working precision even when singular values repeat.
pub(crate) fn unitary_quotient(p: &ComplexMatrix, r: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let sp = singular_value_decomposition(p)?;
    let sr = singular_value_decomposition(r)?;
    let dim = p.nrows();
    let top = sp.sigma.first().copied().unwrap_or(0.0);
    let rank = sp.sigma.iter().filter(|&&s| s > tol.rank_rel * top).count();
    if rank < dim {
        return Err(Error::RankDeficient { rank, expected: dim });
    }
    Ok(&sp.v * sp.u.adjoint() * &sr.u * sr.v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{block_diagonal, from_real_rows, random_unitary, vstack};
    use std::f64::consts::SQRT_2;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn eye(n: usize) -> ComplexMatrix {
        ComplexMatrix::identity(n, n)
    }

    #[test]
    fn identity_pair_is_self_adjoint() {
        let pair = BoundaryPair::new(eye(5), eye(5)).unwrap();
        let rep = check_self_adjoint(&pair, &tol()).unwrap();
        assert_eq!(rep.rank_ab, 5);
        assert!(rep.rank_ok && rep.gram_ok);
        assert_eq!(rep.gram_residual, 0.0);
    }

    #[test]
    fn one_sided_pair_fails_gram() {
        let pair = BoundaryPair::new(eye(5), ComplexMatrix::zeros(5, 5)).unwrap();
        let rep = check_self_adjoint(&pair, &tol()).unwrap();
        assert!(rep.rank_ok);
        assert!(!rep.gram_ok);
        // ||C5||_F = sqrt(5)
        assert!((rep.gram_residual - 5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(recover_w(&pair, &tol()), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn rank_deficient_rejected_first() {
        let z = ComplexMatrix::zeros(5, 5);
        let pair = BoundaryPair::new(z.clone(), z).unwrap();
        assert!(matches!(
            recover_w(&pair, &tol()),
            Err(Error::RankDeficient { rank: 0, expected: 5 })
        ));
    }

    #[test]
    fn mismatched_shapes() {
        assert!(matches!(
            BoundaryPair::new(eye(5), eye(3)),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            BoundaryPair::new(eye(1), eye(1)),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn construct_at_identity_fifth_order() {
        let spec = OrderSpec::odd_order(2);
        let pair = construct_from_w(&eye(5), &spec, &tol()).unwrap();
        let r2 = SQRT_2;
        let a = from_real_rows(&[
            &[r2, 0.0, 0.0, 0.0, 0.0],
            &[0.0, r2, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0],
        ]);
        let b = from_real_rows(&[
            &[0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0, 0.0],
            &[r2, 0.0, 0.0, 0.0, 0.0],
            &[0.0, r2, 0.0, 0.0, 0.0],
        ]);
        assert!((&pair.a - a).norm() < 1e-15);
        assert!((&pair.b - b).norm() < 1e-15);
        assert!(check_self_adjoint(&pair, &tol()).unwrap().is_self_adjoint());
    }

    #[test]
    fn construct_coupled_example() {
        let spec = OrderSpec::odd_order(2);
        let i2 = eye(2);
        let z2 = ComplexMatrix::zeros(2, 2);
        let w = vstack(&[
            &hstack(&[&z2, &ComplexMatrix::zeros(2, 1), &i2]),
            &hstack(&[&ComplexMatrix::zeros(1, 2), &eye(1), &ComplexMatrix::zeros(1, 2)]),
            &hstack(&[&(-&i2), &ComplexMatrix::zeros(2, 1), &z2]),
        ]);
        let pair = construct_from_w(&w, &spec, &tol()).unwrap();
        let rep = check_self_adjoint(&pair, &tol()).unwrap();
        assert!(rep.is_self_adjoint());
        assert_eq!((rep.rank_a, rep.rank_b), (5, 5));
    }

    #[test]
    fn construct_rejects_non_unitary() {
        let spec = OrderSpec::odd_order(1);
        let w = eye(3).scale(2.0);
        assert!(matches!(
            construct_from_w(&w, &spec, &tol()),
            Err(Error::NotUnitary { .. })
        ));
        let even = OrderSpec::even_order(2);
        assert!(matches!(
            construct_from_w(&eye(4), &even, &tol()),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn recover_round_trip() {
        for n in 1..=4 {
            let spec = OrderSpec::odd_order(n);
            for seed in 0..10 {
                let w0 = random_unitary(spec.m, seed);
                let pair = construct_from_w(&w0, &spec, &tol()).unwrap();
                let w = recover_w(&pair, &tol()).unwrap();
                assert!((w - &w0).norm() < 1e-10, "n={n} seed={seed}");
            }
        }
    }

    #[test]
    fn recover_matches_lu_solve() {
        // Independent oracle: W = P^{-1} R by LU.
        let spec = OrderSpec::odd_order(3);
        let basis = eigenbasis(&spec).unwrap();
        let w0 = random_unitary(7, 5);
        let g = random_unitary(7, 6) * block_diagonal(&[&eye(3), &eye(4).scale(3.0)]);
        let pair = construct_from_w(&w0, &spec, &tol()).unwrap().left_multiply(&g);
        let p = &pair.a * &basis.v11 + &pair.b * &basis.v21;
        let r = &pair.a * &basis.v12 + &pair.b * &basis.v22;
        let lu = p.lu().solve(&r).unwrap();
        let w = recover_w(&pair, &tol()).unwrap();
        assert!((w - lu).norm() < 1e-12);
    }

    #[test]
    fn identity_w_recovers_identity() {
        let spec = OrderSpec::odd_order(2);
        let pair = construct_from_w(&eye(5), &spec, &tol()).unwrap();
        let w = recover_w(&pair, &tol()).unwrap();
        assert!((w - eye(5)).norm() < 1e-12);
    }
}
