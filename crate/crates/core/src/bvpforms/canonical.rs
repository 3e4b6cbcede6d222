//! Canonical form of odd-order self-adjoint pairs.
//!
//! With `W` recovered and split by a CS decomposition, the pair factors as
//! `(A:B) = (1/√2) Q1 · core · Q2` where `Q1 = U1 ⊕ U2`,
//! `Q2 = diag(V1, U*, U*, U*, V2) · Q3` and `Q3 = sel · Q4`. The block
//! layouts of `core`, `sel` and the middle corner factors differ between odd
//! and even `n`.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{recover_w, BoundaryPair, Classification};
use crate::csd::{cs_decompose, CsFactors};
use crate::error::Result;
use crate::matcore::{
    block_diagonal, diagonal, hermitian_eigendecomposition, hstack, singular_values, vstack,
    ComplexMatrix, Tolerances,
};
use crate::structure::{q4_matrix, OrderSpec, Parity};

#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub spec: OrderSpec,
    pub cs: CsFactors,
    pub w: ComplexMatrix,
    pub q1: ComplexMatrix,
    pub q2: ComplexMatrix,
    pub q3: ComplexMatrix,
    pub q4: ComplexMatrix,
    /// `m x (5n + 3)`.
    pub core: ComplexMatrix,
    /// `n x (n + 1)`.
    pub k: ComplexMatrix,
    pub predicted_rank_a: usize,
    pub predicted_rank_b: usize,
    /// Unit eigenvalues of `KK*`, i.e. `Null(I_n - KK*)`.
    pub null_count: usize,
    pub classification: Classification,
    /// `rank(A) - (n + 1)`, in `[0, n]`.
    pub r: usize,
}

impl CanonicalForm {
    /// `(1/√2) Q1 · core · Q2`, an `m x 2m` matrix.
    pub fn reconstruct(&self) -> ComplexMatrix {
        (&self.q1 * &self.core * &self.q2).scale(FRAC_1_SQRT_2)
    }
}

fn eye(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

fn zeros(r: usize, c: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(r, c)
}

fn unit_column(len: usize, at: usize) -> ComplexMatrix {
    let mut e = zeros(len, 1);
    e[(at, 0)] = nalgebra::Complex::new(1.0, 0.0);
    e
}

struct Assembly {
    q1: ComplexMatrix,
    q2: ComplexMatrix,
    q3: ComplexMatrix,
    q4: ComplexMatrix,
    core: ComplexMatrix,
    k: ComplexMatrix,
}

fn assemble(spec: &OrderSpec, cs: &CsFactors) -> Result<Assembly> {
    let n = spec.n;
    let cd = diagonal(&cs.cos);
    let sd = diagonal(&cs.sin);
    let one = eye(1);
    let (u1s, u2s) = (cs.u1.adjoint(), cs.u2.adjoint());

    let (core, d, sel, k) = match spec.parity {
        Parity::OddN => {
            // Bold C = C ⊕ 1, bold S = [S; 0].
            let bc = block_diagonal(&[&cd, &one]);
            let bs = vstack(&[&sd, &zeros(1, n)]);
            let core = vstack(&[
                &hstack(&[&bc, &eye(n + 1), &zeros(n + 1, n), &eye(n + 1), &bs]),
                &hstack(&[&(-bs.adjoint()), &zeros(n, n + 1), &eye(n), &zeros(n, n + 1), &cd]),
            ]);
            let d = block_diagonal(&[&cs.v1, &u1s, &u2s, &u1s, &cs.v2]);
            let drop_last = vstack(&[&eye(n), &zeros(1, n)]);
            let sel = block_diagonal(&[&eye(n + 1), &drop_last, &eye(n), &unit_column(n + 1, n), &eye(n)]);
            let k = hstack(&[&eye(n), &zeros(n, 1)]) * &cs.u1 * &bc;
            (core, d, sel, k)
        }
        Parity::EvenN => {
            // Bold C = 1 ⊕ C, bold S = [0 S].
            let bc = block_diagonal(&[&one, &cd]);
            let bs = hstack(&[&zeros(n, 1), &sd]);
            let core = vstack(&[
                &hstack(&[&cd, &zeros(n, n + 1), &eye(n), &zeros(n, n + 1), &bs]),
                &hstack(&[&(-bs.adjoint()), &eye(n + 1), &zeros(n + 1, n), &eye(n + 1), &bc]),
            ]);
            let d = block_diagonal(&[&cs.v1, &u2s, &u1s, &u2s, &cs.v2]);
            let drop_first = vstack(&[&zeros(1, n), &eye(n)]);
            let sel = block_diagonal(&[&eye(n), &unit_column(n + 1, 0), &eye(n), &drop_first, &eye(n + 1)]);
            let k = hstack(&[&zeros(n, 1), &eye(n)]) * &cs.u2 * &bc;
            (core, d, sel, k)
        }
        Parity::EvenOrder => unreachable!("odd order checked by the caller"),
    };

    let q4 = q4_matrix(spec)?;
    let q3 = sel * &q4;
    let q2 = d * &q3;
    Ok(Assembly {
        q1: block_diagonal(&[&cs.u1, &cs.u2]),
        q2,
        q3,
        q4,
        core,
        k,
    })
}

fn unit_eigen_count(k: &ComplexMatrix, tol: &Tolerances) -> Result<usize> {
    let kk = k * k.adjoint();
    let kk = (&kk + kk.adjoint()).scale(0.5);
    let eig = hermitian_eigendecomposition(&kk, tol)?;
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&l| (l - 1.0).abs() <= tol.unit_eig_abs)
        .count())
}

/// `(rank A, rank B, Null(I_n - KK*))` from the `K` of a canonical form.
pub fn predicted_ranks(form: &CanonicalForm, tol: &Tolerances) -> Result<(usize, usize, usize)> {
    ranks_from_k(&form.k, &form.spec, tol)
}

fn ranks_from_k(k: &ComplexMatrix, spec: &OrderSpec, tol: &Tolerances) -> Result<(usize, usize, usize)> {
    let null = unit_eigen_count(k, tol)?;
    let rank = spec.m - null;
    Ok((rank, rank, null))
}

/// Ranks of `A` and `B` read off the blocks of `W`.
///
/// Odd `n`: `rank A = n + rank W[n.., ..=n]`, `rank B = n + 1 + rank W[..n, n+1..]`.
/// Even `n`: `rank A = n + 1 + rank W[n+1.., ..n]`, `rank B = n + rank W[..=n, n..]`.
/// Blocks of a unitary are bounded by 1, so the cutoff is `rank_rel` absolute.
pub fn block_rank_formula(w: &ComplexMatrix, spec: &OrderSpec, tol: &Tolerances) -> Result<(usize, usize)> {
    spec.require_odd_order()?;
    let n = spec.n;
    let m = spec.m;
    let rank = |r0: usize, c0: usize, rows: usize, cols: usize| -> Result<usize> {
        let block = w.view((r0, c0), (rows, cols)).into_owned();
        Ok(singular_values(&block)?
            .iter()
            .filter(|&&s| s > tol.rank_rel)
            .count())
    };
    Ok(match spec.parity {
        Parity::OddN => (n + rank(n, 0, n + 1, n + 1)?, n + 1 + rank(0, n + 1, n, n)?),
        Parity::EvenN => (n + 1 + rank(n + 1, 0, n, n)?, n + rank(0, n, n + 1, m - n)?),
        Parity::EvenOrder => unreachable!(),
    })
}

pub fn canonical_decompose(pair: &BoundaryPair, tol: &Tolerances) -> Result<CanonicalForm> {
    pair.spec.require_odd_order()?;
    let w = recover_w(pair, tol)?;
    let spec = pair.spec;
    let (p, q) = spec.cs_partition();
    let cs = cs_decompose(&w, p, q, tol)?;
    let asm = assemble(&spec, &cs)?;
    let (rank_a, rank_b, null_count) = ranks_from_k(&asm.k, &spec, tol)?;
    let classification = if null_count == 0 {
        Classification::Coupled
    } else {
        Classification::Mixed
    };
    Ok(CanonicalForm {
        spec,
        cs,
        w,
        q1: asm.q1,
        q2: asm.q2,
        q3: asm.q3,
        q4: asm.q4,
        core: asm.core,
        k: asm.k,
        predicted_rank_a: rank_a,
        predicted_rank_b: rank_b,
        null_count,
        classification,
        r: rank_a - (spec.n + 1),
    })
}

/// Classification and rank offset. Odd orders are Mixed or Coupled with
/// `r = rank A - (n + 1)`; order `2n` uses the even canonical form and
/// reports `r = rank S`.
pub fn classify(pair: &BoundaryPair, tol: &Tolerances) -> Result<(Classification, usize)> {
    if pair.spec.is_odd_order() {
        let form = canonical_decompose(pair, tol)?;
        Ok((form.classification, form.r))
    } else {
        let form = super::even_canonical_decompose(pair, tol)?;
        Ok((form.classification, form.rank_s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvpforms::construct_from_w;
    use crate::matcore::{numerical_rank, random_unitary};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn coupled_w() -> ComplexMatrix {
        let i2 = eye(2);
        vstack(&[
            &hstack(&[&zeros(2, 2), &zeros(2, 1), &i2]),
            &hstack(&[&zeros(1, 2), &eye(1), &zeros(1, 2)]),
            &hstack(&[&(-&i2), &zeros(2, 1), &zeros(2, 2)]),
        ])
    }

    #[test]
    fn identity_w_is_mixed() {
        let spec = OrderSpec::odd_order(2);
        let pair = construct_from_w(&eye(5), &spec, &tol()).unwrap();
        let form = canonical_decompose(&pair, &tol()).unwrap();
        assert!(form.cs.cos.iter().all(|c| (c - 1.0).abs() < 1e-12));
        assert!(form.cs.sin.iter().all(|s| s.abs() < 1e-12));
        let kk = &form.k * form.k.adjoint();
        assert!((kk - eye(2)).norm() < 1e-12);
        assert_eq!(form.null_count, 2);
        assert_eq!((form.predicted_rank_a, form.predicted_rank_b), (3, 3));
        assert_eq!(form.classification, Classification::Mixed);
        assert_eq!(form.r, 0);
        assert_eq!(numerical_rank(&pair.a, &tol()).unwrap(), 3);
    }

    #[test]
    fn coupled_example() {
        let spec = OrderSpec::odd_order(2);
        let pair = construct_from_w(&coupled_w(), &spec, &tol()).unwrap();
        let form = canonical_decompose(&pair, &tol()).unwrap();
        assert!(form.cs.cos.iter().all(|c| c.abs() < 1e-12));
        assert_eq!(form.null_count, 0);
        assert_eq!(form.predicted_rank_a, 5);
        assert_eq!(form.classification, Classification::Coupled);
        assert_eq!(form.r, 2);
        assert_eq!(classify(&pair, &tol()).unwrap(), (Classification::Coupled, 2));
    }

    #[test]
    fn zero_k_has_full_rank() {
        let spec = OrderSpec::odd_order(2);
        assert_eq!(ranks_from_k(&zeros(2, 3), &spec, &tol()).unwrap(), (5, 5, 0));
        let k = hstack(&[&zeros(2, 1), &eye(2)]);
        assert_eq!(ranks_from_k(&k, &spec, &tol()).unwrap(), (3, 3, 2));
    }

    #[test]
    fn shapes() {
        for n in 1..=4 {
            let spec = OrderSpec::odd_order(n);
            let pair = construct_from_w(&random_unitary(spec.m, n as u64), &spec, &tol()).unwrap();
            let form = canonical_decompose(&pair, &tol()).unwrap();
            assert_eq!(form.core.shape(), (spec.m, 5 * n + 3));
            assert_eq!(form.q3.shape(), (5 * n + 3, 2 * spec.m));
            assert_eq!(form.q2.shape(), (5 * n + 3, 2 * spec.m));
            assert_eq!(form.k.shape(), (n, n + 1));
        }
    }

    #[test]
    fn reconstruction_and_rank_formulas() {
        for n in 1..=4 {
            let spec = OrderSpec::odd_order(n);
            for seed in 0..10 {
                let w0 = random_unitary(spec.m, 1000 + seed);
                let pair = construct_from_w(&w0, &spec, &tol()).unwrap();
                let form = canonical_decompose(&pair, &tol()).unwrap();
                let target = construct_from_w(&form.w, &spec, &tol()).unwrap().stacked();
                assert!((form.reconstruct() - target).norm() < 1e-10, "n={n} seed={seed}");
                let ra = numerical_rank(&pair.a, &tol()).unwrap();
                let rb = numerical_rank(&pair.b, &tol()).unwrap();
                assert_eq!((ra, rb), (form.predicted_rank_a, form.predicted_rank_b));
                assert_eq!(block_rank_formula(&form.w, &spec, &tol()).unwrap(), (ra, rb));
            }
        }
    }

    #[test]
    fn rank_formula_on_structured_w() {
        let spec = OrderSpec::odd_order(2);
        assert_eq!(block_rank_formula(&eye(5), &spec, &tol()).unwrap(), (3, 3));
        assert_eq!(block_rank_formula(&coupled_w(), &spec, &tol()).unwrap(), (5, 5));
    }
}
