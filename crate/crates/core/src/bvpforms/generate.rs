//! Random self-adjoint pairs with a prescribed number of unit cosines.
//!
//! Odd order: `W = diag(U1, U2) · Core · diag(V1, V2)` with Haar corners, then
//! `construct_from_w`. Order `2n`: the even canonical form is assembled
//! directly with a random well-conditioned left factor.

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::{canonical_decompose, construct_from_w, even::even_core, BoundaryPair};
use crate::csd::core_matrix;
use crate::error::{Error, Result};
use crate::matcore::{
    block_diagonal, diagonal, numerical_rank, random_unitary_with, seeded_rng, ComplexMatrix,
    Tolerances,
};
use crate::structure::{even_order_z, OrderSpec};

/// Non-unit cosines are drawn from `(DELTA, 1 - DELTA)`.
const DELTA: f64 = 1e-3;
const MAX_ATTEMPTS: usize = 64;

fn spectrum(rng: &mut ChaCha20Rng, n: usize, k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cos: Vec<f64> = (0..n)
        .map(|j| if j < k { 1.0 } else { rng.random_range(DELTA..1.0 - DELTA) })
        .collect();
    cos.sort_by(|a, b| b.total_cmp(a));
    let sin = cos.iter().map(|c| (1.0 - c * c).max(0.0).sqrt()).collect();
    (cos, sin)
}

fn check_target(spec: &OrderSpec, target: Option<usize>) -> Result<()> {
    match target {
        Some(k) if k > spec.n => Err(Error::InvalidTarget { k, n: spec.n }),
        _ => Ok(()),
    }
}

/// A self-adjoint pair of the given order, deterministic per `(spec, seed)`.
///
/// With `target_unit_cosines = Some(k)` the pair has exactly `k` unit
/// eigenvalues of `KK*` (odd order) or `rank S = n - k` (order `2n`).
/// Draws whose realized rank disagrees are discarded and redrawn from the
/// same stream.
pub fn generate_random_pair(spec: &OrderSpec, seed: u64, target_unit_cosines: Option<usize>) -> Result<BoundaryPair> {
    if !spec.is_odd_order() {
        return generate_random_even_pair(spec.n, seed, target_unit_cosines);
    }
    check_target(spec, target_unit_cosines)?;
    let tol = Tolerances::default();
    let mut rng = seeded_rng(seed);
    let (p, q) = spec.cs_partition();
    for _ in 0..MAX_ATTEMPTS {
        let Some(k) = target_unit_cosines else {
            let w = random_unitary_with(spec.m, &mut rng);
            return construct_from_w(&w, spec, &tol);
        };
        let (cos, sin) = spectrum(&mut rng, spec.n, k);
        let u1 = random_unitary_with(p, &mut rng);
        let u2 = random_unitary_with(q, &mut rng);
        let v1 = random_unitary_with(p, &mut rng);
        let v2 = random_unitary_with(q, &mut rng);
        let w = block_diagonal(&[&u1, &u2]) * core_matrix(p, q, &cos, &sin) * block_diagonal(&[&v1, &v2]);
        let pair = construct_from_w(&w, spec, &tol)?;
        let expected = spec.m - k;
        let form = canonical_decompose(&pair, &tol)?;
        if form.null_count == k
            && numerical_rank(&pair.a, &tol)? == expected
            && numerical_rank(&pair.b, &tol)? == expected
        {
            return Ok(pair);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

/// Order `2n`: `(A:B) = U · [C I 0 S; -S 0 I C] · diag(V1, U1*, U2*, V2) · Z`
/// with Haar corners and `U` of condition number 4.
pub fn generate_random_even_pair(n: usize, seed: u64, target_unit_cosines: Option<usize>) -> Result<BoundaryPair> {
    if n == 0 {
        return Err(Error::UnsupportedOrder {
            m: 0,
            reason: "size must be at least 2",
        });
    }
    let spec = OrderSpec::even_order(n);
    check_target(&spec, target_unit_cosines)?;
    let mut rng = seeded_rng(seed);
    let k = match target_unit_cosines {
        Some(k) => k,
        None => rng.random_range(0..=n),
    };
    let (cos, sin) = spectrum(&mut rng, n, k);
    let v1 = random_unitary_with(n, &mut rng);
    let u1 = random_unitary_with(n, &mut rng);
    let u2 = random_unitary_with(n, &mut rng);
    let v2 = random_unitary_with(n, &mut rng);
    let left = random_unitary_with(2 * n, &mut rng);
    let right = random_unitary_with(2 * n, &mut rng);
    let spread: Vec<f64> = (0..2 * n)
        .map(|j| 0.5 + 1.5 * j as f64 / (2 * n - 1) as f64)
        .collect();
    let u = left * diagonal(&spread) * right;
    let ab: ComplexMatrix = u
        * even_core(&cos, &sin)
        * block_diagonal(&[&v1, &u1.adjoint(), &u2.adjoint(), &v2])
        * even_order_z(n);
    let m = 2 * n;
    BoundaryPair::new(ab.columns(0, m).into_owned(), ab.columns(m, m).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvpforms::{check_self_adjoint, classify, even_canonical_decompose, Classification};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn fifth_order_targets() {
        let spec = OrderSpec::odd_order(2);
        for seed in 0..5 {
            let pair = generate_random_pair(&spec, seed, Some(2)).unwrap();
            assert_eq!(classify(&pair, &tol()).unwrap(), (Classification::Mixed, 0));
            let pair = generate_random_pair(&spec, seed, Some(1)).unwrap();
            assert_eq!(classify(&pair, &tol()).unwrap(), (Classification::Mixed, 1));
            let pair = generate_random_pair(&spec, seed, Some(0)).unwrap();
            assert_eq!(classify(&pair, &tol()).unwrap(), (Classification::Coupled, 2));
        }
    }

    #[test]
    fn deterministic() {
        let spec = OrderSpec::odd_order(3);
        let a = generate_random_pair(&spec, 9, Some(1)).unwrap();
        let b = generate_random_pair(&spec, 9, Some(1)).unwrap();
        assert_eq!(a.a, b.a);
        assert_eq!(a.b, b.b);
    }

    #[test]
    fn seventh_order_self_adjoint() {
        let spec = OrderSpec::odd_order(3);
        for seed in 0..50 {
            let pair = generate_random_pair(&spec, seed, None).unwrap();
            let rep = check_self_adjoint(&pair, &tol()).unwrap();
            assert!(rep.is_self_adjoint());
            assert!(rep.gram_residual < 1e-11);
        }
    }

    #[test]
    fn invalid_target() {
        let spec = OrderSpec::odd_order(2);
        assert_eq!(
            generate_random_pair(&spec, 0, Some(3)).unwrap_err(),
            Error::InvalidTarget { k: 3, n: 2 }
        );
        assert!(generate_random_even_pair(2, 0, Some(3)).is_err());
    }

    #[test]
    fn even_targets_set_rank_s() {
        for n in 1..=3 {
            for k in 0..=n {
                let pair = generate_random_even_pair(n, 11 + k as u64, Some(k)).unwrap();
                let form = even_canonical_decompose(&pair, &tol()).unwrap();
                assert_eq!(form.rank_s, n - k);
                assert!((form.reconstruct() - pair.stacked()).norm() < 1e-9);
            }
        }
    }
}
