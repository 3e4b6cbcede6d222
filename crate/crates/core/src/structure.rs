//! Fixed structural matrices: the signed antidiagonal `C_m`, the explicit
//! diagonalizing basis `V` of `C_m ⊕ (-C_m)` together with its four blocks,
//! the column transform `Q4` and the even-order right factor `Z`.
//!
//! Formulas are written with 1-based indices `r, s` (as in `(-1)^r δ_{r,m+1-s}`)
//! and stored 0-based; `(r, s)` lands at `(r - 1, s - 1)`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{Error, Result};
use crate::matcore::{block_diagonal, hstack, real, vstack, Complex64, ComplexMatrix};

/// Which canonical form applies to a matrix size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// `m = 2n + 1` with `n` odd.
    OddN,
    /// `m = 2n + 1` with `n` even.
    EvenN,
    /// `m = 2n`.
    EvenOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderSpec {
    pub m: usize,
    pub n: usize,
    pub parity: Parity,
}

impl OrderSpec {
    /// Classifies a boundary-matrix size. Sizes below 2 carry no `n >= 1`.
    pub fn from_size(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::UnsupportedOrder {
                m,
                reason: "size must be at least 2",
            });
        }
        Ok(if m % 2 == 1 {
            Self::odd_order(m / 2)
        } else {
            Self::even_order(m / 2)
        })
    }

    /// Order `2n + 1`.
    pub fn odd_order(n: usize) -> Self {
        assert!(n >= 1, "odd order needs n >= 1");
        let parity = if n % 2 == 1 { Parity::OddN } else { Parity::EvenN };
        Self { m: 2 * n + 1, n, parity }
    }

    /// Order `2n`.
    pub fn even_order(n: usize) -> Self {
        assert!(n >= 1, "even order needs n >= 1");
        Self {
            m: 2 * n,
            n,
            parity: Parity::EvenOrder,
        }
    }

    pub fn is_odd_order(&self) -> bool {
        self.parity != Parity::EvenOrder
    }

    /// Top/bottom block sizes `(p, q)` of the CS partition used for `W`:
    /// `(n + 1, n)` for odd `n`, `(n, n + 1)` for even `n`, `(n, n)` for order `2n`.
    pub fn cs_partition(&self) -> (usize, usize) {
        match self.parity {
            Parity::OddN => (self.n + 1, self.n),
            Parity::EvenN => (self.n, self.n + 1),
            Parity::EvenOrder => (self.n, self.n),
        }
    }

    pub(crate) fn require_odd_order(&self) -> Result<()> {
        if self.is_odd_order() {
            Ok(())
        } else {
            Err(Error::UnsupportedOrder {
                m: self.m,
                reason: "defined for odd orders 2n+1 only",
            })
        }
    }
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `C_m = ((-1)^r δ_{r, m+1-s})`, the signed antidiagonal matrix.
pub fn symplectic_matrix(m: usize) -> ComplexMatrix {
    assert!(m >= 1, "symplectic_matrix needs m >= 1");
    let mut c = ComplexMatrix::zeros(m, m);
    for r in 1..=m {
        let s = m + 1 - r;
        c[(r - 1, s - 1)] = real(sign(r));
    }
    c
}

/// The explicit eigenbasis of `C_m ⊕ (-C_m)`: the first `m` columns span the
/// `-1` eigenspace, the last `m` the `+1` eigenspace.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub v: ComplexMatrix,
    pub v11: ComplexMatrix,
    pub v12: ComplexMatrix,
    pub v21: ComplexMatrix,
    pub v22: ComplexMatrix,
}

/// `(1/√2) (I_n; 0; sgn C_n)`, an `(2n+1) x n` block of eigenvectors of `C_{2n+1}`.
fn half_block(n: usize, sgn: f64) -> ComplexMatrix {
    let top = ComplexMatrix::identity(n, n);
    let mid = ComplexMatrix::zeros(1, n);
    let bottom = symplectic_matrix(n).scale(sgn);
    vstack(&[&top, &mid, &bottom]).scale(FRAC_1_SQRT_2)
}

/// Unit vector on the `(n+1)`-th coordinate of `C^{2n+1}`.
fn middle_unit(n: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(2 * n + 1, 1);
    e[(n, 0)] = real(1.0);
    e
}

pub fn eigenbasis(spec: &OrderSpec) -> Result<EigenBasis> {
    spec.require_odd_order()?;
    let (n, m) = (spec.n, spec.m);
    // +1 and -1 eigenvectors of C_m.
    let plus = half_block(n, sign(n + 1));
    let minus = half_block(n, sign(n));
    let e = middle_unit(n);
    let z1 = ComplexMatrix::zeros(m, 1);
    let zn = ComplexMatrix::zeros(m, n);

    // e_{n+1} has C_m-eigenvalue (-1)^{n+1}, so it sits in a different slot
    // for odd and even n.
    let (top, bottom) = match spec.parity {
        Parity::OddN => (
            hstack(&[&minus, &z1, &zn, &plus, &e, &zn]),
            hstack(&[&zn, &e, &plus, &zn, &z1, &minus]),
        ),
        Parity::EvenN => (
            hstack(&[&minus, &e, &zn, &plus, &z1, &zn]),
            hstack(&[&zn, &z1, &plus, &zn, &e, &minus]),
        ),
        Parity::EvenOrder => unreachable!(),
    };
    let v = vstack(&[&top, &bottom]);
    Ok(EigenBasis {
        v11: v.view((0, 0), (m, m)).into_owned(),
        v12: v.view((0, m), (m, m)).into_owned(),
        v21: v.view((m, 0), (m, m)).into_owned(),
        v22: v.view((m, m), (m, m)).into_owned(),
        v,
    })
}

/// The `(2n+1) x (2n+1)` block `[I_n 0 (-1)^{n+1}C_n*; 0 √2 0; I_n 0 (-1)^n C_n*]`.
pub fn q4_block(n: usize) -> ComplexMatrix {
    let cn_adj = symplectic_matrix(n).adjoint();
    let eye = ComplexMatrix::identity(n, n);
    let zc = ComplexMatrix::zeros(n, 1);
    let zr = ComplexMatrix::zeros(1, n);
    let root2 = ComplexMatrix::from_element(1, 1, real(SQRT_2));
    vstack(&[
        &hstack(&[&eye, &zc, &cn_adj.scale(sign(n + 1))]),
        &hstack(&[&zr, &root2, &zr]),
        &hstack(&[&eye, &zc, &cn_adj.scale(sign(n))]),
    ])
}

/// `Q4 = q4_block(n) ⊕ q4_block(n)`, satisfying `Q4 Q4* = 2 I`.
pub fn q4_matrix(spec: &OrderSpec) -> Result<ComplexMatrix> {
    spec.require_odd_order()?;
    let t = q4_block(spec.n);
    Ok(block_diagonal(&[&t, &t]))
}

/// One diagonal block of `Z`:
/// `(1/√2) [I I; I -I] · diag(I, (-1)^{n+1} i C_n)`.
pub fn even_order_z_block(n: usize) -> ComplexMatrix {
    assert!(n >= 1, "even_order_z needs n >= 1");
    let eye = ComplexMatrix::identity(n, n);
    let neg = -&eye;
    let mix = vstack(&[&hstack(&[&eye, &eye]), &hstack(&[&eye, &neg])]).scale(FRAC_1_SQRT_2);
    let d = symplectic_matrix(n) * Complex64::new(0.0, sign(n + 1));
    mix * block_diagonal(&[&eye, &d])
}

/// The `4n x 4n` right factor of the even-order canonical form.
pub fn even_order_z(n: usize) -> ComplexMatrix {
    let b = even_order_z_block(n);
    block_diagonal(&[&b, &b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{max_abs, unitarity_residual};

    fn real_rows(m: &ComplexMatrix) -> Vec<Vec<f64>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
            .collect()
    }

    #[test]
    fn c5_matches_display() {
        let expected = vec![
            vec![0.0, 0.0, 0.0, 0.0, -1.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, -1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0, 0.0, 0.0],
        ];
        assert_eq!(real_rows(&symplectic_matrix(5)), expected);
    }

    #[test]
    fn small_symplectic_cases() {
        assert_eq!(real_rows(&symplectic_matrix(1)), vec![vec![-1.0]]);
        assert_eq!(
            real_rows(&symplectic_matrix(3)),
            vec![vec![0.0, 0.0, -1.0], vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 0.0]]
        );
        assert_eq!(
            real_rows(&symplectic_matrix(2)),
            vec![vec![0.0, -1.0], vec![1.0, 0.0]]
        );
    }

    #[test]
    fn symplectic_square_and_symmetry() {
        for m in 1..=12 {
            let c = symplectic_matrix(m);
            let sq = &c * &c;
            let expected = if m % 2 == 1 { 1.0 } else { -1.0 };
            assert_eq!(sq, ComplexMatrix::identity(m, m).scale(expected), "m = {m}");
            if m % 2 == 1 {
                assert_eq!(c.transpose(), c);
            } else {
                assert_eq!(c.transpose(), -&c);
            }
            assert!(c.iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn order_spec_parity() {
        assert_eq!(OrderSpec::from_size(5).unwrap().parity, Parity::EvenN);
        assert_eq!(OrderSpec::from_size(7).unwrap().parity, Parity::OddN);
        assert_eq!(OrderSpec::from_size(3).unwrap().parity, Parity::OddN);
        let even = OrderSpec::from_size(6).unwrap();
        assert_eq!((even.n, even.parity), (3, Parity::EvenOrder));
        assert!(OrderSpec::from_size(1).is_err());
        assert_eq!(OrderSpec::odd_order(3).cs_partition(), (4, 3));
        assert_eq!(OrderSpec::odd_order(2).cs_partition(), (2, 3));
    }

    #[test]
    fn eigenbasis_fifth_order_blocks() {
        let b = eigenbasis(&OrderSpec::odd_order(2)).unwrap();
        let h = FRAC_1_SQRT_2;
        // V11 = (1/√2)[I2 0 0; 0 √2 0; C2 0 0], C2 = [[0,-1],[1,0]].
        let v11 = vec![
            vec![h, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, h, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, -h, 0.0, 0.0, 0.0],
            vec![h, 0.0, 0.0, 0.0, 0.0],
        ];
        assert_eq!(real_rows(&b.v11), v11);
        // V12 = (1/√2)[I2 0 0; 0 0 0; -C2 0 0].
        let v12 = vec![
            vec![h, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, h, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, h, 0.0, 0.0, 0.0],
            vec![-h, 0.0, 0.0, 0.0, 0.0],
        ];
        assert_eq!(real_rows(&b.v12), v12);
        // V22 = (1/√2)[0 0 I2; 0 √2 0; 0 0 C2].
        let v22 = vec![
            vec![0.0, 0.0, 0.0, h, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, h],
            vec![0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, -h],
            vec![0.0, 0.0, 0.0, h, 0.0],
        ];
        assert_eq!(real_rows(&b.v22), v22);
    }

    #[test]
    fn eigenbasis_odd_n_blocks() {
        // n = 1: V11 = (1/√2)[1 0 0; 0 0 0; -C1 0 0] with C1 = (-1).
        let b = eigenbasis(&OrderSpec::odd_order(1)).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_eq!(
            real_rows(&b.v11),
            vec![vec![h, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![h, 0.0, 0.0]]
        );
        assert_eq!(
            real_rows(&b.v21),
            vec![vec![0.0, 0.0, h], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, -h]]
        );
    }

    #[test]
    fn eigenbasis_diagonalizes() {
        for n in 1..=5 {
            let spec = OrderSpec::odd_order(n);
            let m = spec.m;
            let b = eigenbasis(&spec).unwrap();
            assert!(unitarity_residual(&b.v) < 1e-14);
            let c = symplectic_matrix(m);
            let h = block_diagonal(&[&c, &(-&c)]);
            let minus = -ComplexMatrix::identity(m, m);
            let sig = block_diagonal(&[&minus, &ComplexMatrix::identity(m, m)]);
            assert!(max_abs(&(&h * &b.v - &b.v * sig)) < 1e-14, "n = {n}");

            let nonzero: Vec<f64> = b.v.iter().filter(|z| z.norm() > 0.0).map(|z| z.re).collect();
            assert_eq!(nonzero.len(), 4 * m - 2);
            assert!(nonzero
                .iter()
                .all(|&x| x == 1.0 || x == FRAC_1_SQRT_2 || x == -FRAC_1_SQRT_2));
        }
    }

    #[test]
    fn eigenbasis_rejects_even_order() {
        assert!(matches!(
            eigenbasis(&OrderSpec::even_order(2)),
            Err(Error::UnsupportedOrder { .. })
        ));
        assert!(q4_matrix(&OrderSpec::even_order(1)).is_err());
    }

    #[test]
    fn q4_blocks() {
        let r2 = SQRT_2;
        // n = 2: (-1)^3 C2* = C2.
        let t = q4_block(2);
        assert_eq!(
            real_rows(&t),
            vec![
                vec![1.0, 0.0, 0.0, 0.0, -1.0],
                vec![0.0, 1.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, r2, 0.0, 0.0],
                vec![1.0, 0.0, 0.0, 0.0, 1.0],
                vec![0.0, 1.0, 0.0, -1.0, 0.0],
            ]
        );
        // n = 1: (-1)^2 C1* = C1 = (-1).
        assert_eq!(
            real_rows(&q4_block(1)),
            vec![vec![1.0, 0.0, -1.0], vec![0.0, r2, 0.0], vec![1.0, 0.0, 1.0]]
        );
        for n in 1..=5 {
            let q4 = q4_matrix(&OrderSpec::odd_order(n)).unwrap();
            let m2 = 2 * (2 * n + 1);
            let gram = &q4 * q4.adjoint();
            assert!(max_abs(&(gram - ComplexMatrix::identity(m2, m2).scale(2.0))) < 1e-14);
        }
    }

    #[test]
    fn z_first_order() {
        // n = 1: (-1)^2 i C1 = -i.
        let z = even_order_z(1);
        let h = FRAC_1_SQRT_2;
        let expected = [
            [(h, 0.0), (0.0, -h), (0.0, 0.0), (0.0, 0.0)],
            [(h, 0.0), (0.0, h), (0.0, 0.0), (0.0, 0.0)],
            [(0.0, 0.0), (0.0, 0.0), (h, 0.0), (0.0, -h)],
            [(0.0, 0.0), (0.0, 0.0), (h, 0.0), (0.0, h)],
        ];
        for i in 0..4 {
            for j in 0..4 {
                let (re, im) = expected[i][j];
                assert!((z[(i, j)] - Complex64::new(re, im)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn z_is_unitary_block_diagonal() {
        for n in 1..=4 {
            let z = even_order_z(n);
            assert!(unitarity_residual(&z) < 1e-14);
            let d = 2 * n;
            assert_eq!(max_abs(&z.view((0, d), (d, d)).into_owned()), 0.0);
            assert_eq!(max_abs(&z.view((d, 0), (d, d)).into_owned()), 0.0);
        }
    }
}
