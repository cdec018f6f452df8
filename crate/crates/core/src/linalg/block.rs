//! 2x2 block matrices, Schur complements and block determinants.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{SquareMatrix, DEFAULT_RCOND};
use crate::error::{Error, Result};

/// `[[a, b], [c, d]]` with square blocks of a common size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMatrix2x2 {
    pub a: SquareMatrix,
    pub b: SquareMatrix,
    pub c: SquareMatrix,
    pub d: SquareMatrix,
}

impl BlockMatrix2x2 {
    pub fn new(a: SquareMatrix, b: SquareMatrix, c: SquareMatrix, d: SquareMatrix) -> Result<Self> {
        let n = a.dim();
        for m in [&b, &c, &d] {
            if m.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                });
            }
        }
        Ok(BlockMatrix2x2 { a, b, c, d })
    }

    pub fn identity(dim: usize) -> Self {
        BlockMatrix2x2 {
            a: SquareMatrix::identity(dim),
            b: SquareMatrix::zeros(dim),
            c: SquareMatrix::zeros(dim),
            d: SquareMatrix::identity(dim),
        }
    }

    /// Block size `N`.
    pub fn block_dim(&self) -> usize {
        self.a.dim()
    }

    /// The dense `2N x 2N` matrix.
    pub fn assemble(&self) -> SquareMatrix {
        SquareMatrix::assemble(&[
            vec![self.a.clone(), self.b.clone()],
            vec![self.c.clone(), self.d.clone()],
        ])
    }

    /// Splits a dense `2N x 2N` matrix into blocks.
    pub fn split(m: &SquareMatrix) -> Result<Self> {
        if !m.dim().is_multiple_of(2) {
            return Err(Error::InvalidInput(
                "block split needs an even dimension".into(),
            ));
        }
        let bs = m.dim() / 2;
        Ok(BlockMatrix2x2 {
            a: m.block(0, 0, bs),
            b: m.block(0, 1, bs),
            c: m.block(1, 0, bs),
            d: m.block(1, 1, bs),
        })
    }
}

/// Last quasideterminant `d - c a^{-1} b`.
pub fn quasidet_last(m: &BlockMatrix2x2) -> Result<SquareMatrix> {
    let ainv = m.a.inverse_with(DEFAULT_RCOND).map_err(|e| e.named("a"))?;
    Ok(&m.d - &(&(&m.c * &ainv) * &m.b))
}

/// Determinant of the assembled matrix, factored through the Schur complement
/// when `a` is well conditioned and computed densely otherwise.
pub fn block_det(m: &BlockMatrix2x2) -> Complex64 {
    match quasidet_last(m) {
        Ok(s) => m.a.det() * s.det(),
        Err(_) => m.assemble().det(),
    }
}

/// Blockwise inverse via the Schur complement of `a`.
pub fn block_inverse(m: &BlockMatrix2x2) -> Result<BlockMatrix2x2> {
    let ainv = m.a.inverse().map_err(|e| e.named("a"))?;
    let s = &m.d - &(&(&m.c * &ainv) * &m.b);
    let sinv = s.inverse().map_err(|e| e.named("d - c a^-1 b"))?;
    let ainv_b = &ainv * &m.b;
    let c_ainv = &m.c * &ainv;
    let top_right = -(&ainv_b * &sinv);
    let bottom_left = -(&sinv * &c_ainv);
    let top_left = &ainv + &(&(&ainv_b * &sinv) * &c_ainv);
    Ok(BlockMatrix2x2 {
        a: top_left,
        b: top_right,
        c: bottom_left,
        d: sinv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(v: f64) -> SquareMatrix {
        SquareMatrix::from_real_rows(&[&[v]])
    }

    fn random(rng: &mut ChaCha8Rng, n: usize) -> SquareMatrix {
        SquareMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn quasidet_examples() {
        let id = SquareMatrix::identity(2);
        let z = SquareMatrix::zeros(2);
        let d = SquareMatrix::from_real_diag(&[3.0, 4.0]);
        let m = BlockMatrix2x2::new(id, z.clone(), z, d.clone()).unwrap();
        assert!(quasidet_last(&m).unwrap().approx_eq(&d, 0.0));

        let m = BlockMatrix2x2::new(r(2.0), r(1.0), r(4.0), r(5.0)).unwrap();
        assert!(quasidet_last(&m).unwrap().approx_eq(&r(3.0), 1e-15));
    }

    #[test]
    fn quasidet_padded_rectangular_example() {
        // a = I2, b = e1 column, c = e2 row, d = [7], embedded in 2x2 blocks
        // with zero padding; the (0,0) entry of the complement carries d.
        let a = SquareMatrix::identity(2);
        let b = SquareMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let c = SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let d = SquareMatrix::from_real_rows(&[&[7.0, 0.0], &[0.0, 0.0]]);
        let s = quasidet_last(&BlockMatrix2x2::new(a, b, c, d).unwrap()).unwrap();
        assert_eq!(s[(0, 0)], Complex64::new(7.0, 0.0));
    }

    #[test]
    fn singular_a_is_named() {
        let m = BlockMatrix2x2::new(r(0.0), r(1.0), r(1.0), r(1.0)).unwrap();
        match quasidet_last(&m) {
            Err(Error::SingularBlock { what, .. }) => assert_eq!(what, "a"),
            other => panic!("unexpected {other:?}"),
        }
        // dense fallback: det [[0,1],[1,1]] = -1
        assert!((block_det(&m) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn block_det_examples() {
        assert!(
            (block_det(&BlockMatrix2x2::identity(3)) - Complex64::new(1.0, 0.0)).norm() < 1e-15
        );
        let m = BlockMatrix2x2::new(r(2.0), r(1.0), r(4.0), r(5.0)).unwrap();
        assert!((block_det(&m) - Complex64::new(6.0, 0.0)).norm() < 1e-14);
        assert!((m.assemble().det() - Complex64::new(6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn block_det_row_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let (a, b, c, d) = (
                random(&mut rng, 2),
                random(&mut rng, 2),
                random(&mut rng, 2),
                random(&mut rng, 2),
            );
            let m = BlockMatrix2x2::new(a.clone(), b.clone(), c.clone(), d.clone()).unwrap();
            let swapped = BlockMatrix2x2::new(-&c, -&d, a, b).unwrap();
            let (x, y) = (m.assemble().det(), swapped.assemble().det());
            assert!((x - y).norm() <= 1e-12 * x.norm().max(1.0));
        }
    }

    #[test]
    fn block_inverse_examples() {
        let inv = block_inverse(&BlockMatrix2x2::identity(2)).unwrap();
        assert!(inv.assemble().approx_eq(&SquareMatrix::identity(4), 1e-15));

        let m = BlockMatrix2x2::new(r(2.0), r(1.0), r(4.0), r(5.0)).unwrap();
        let inv = block_inverse(&m).unwrap().assemble();
        let expected =
            SquareMatrix::from_real_rows(&[&[5.0, -1.0], &[-4.0, 2.0]]).scale_re(1.0 / 6.0);
        assert!(inv.approx_eq(&expected, 1e-14));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = BlockMatrix2x2::new(
            random(&mut rng, 3),
            random(&mut rng, 3),
            random(&mut rng, 3),
            random(&mut rng, 3),
        )
        .unwrap();
        let prod = &block_inverse(&m).unwrap().assemble() * &m.assemble();
        assert!(prod.approx_eq(&SquareMatrix::identity(6), 1e-11));
    }

    #[test]
    fn block_inverse_names_schur_failure() {
        // complement 5 - 4 * (1/2) * 2.5 = 0
        let m = BlockMatrix2x2::new(r(2.0), r(2.5), r(4.0), r(5.0)).unwrap();
        match block_inverse(&m) {
            Err(Error::SingularBlock { what, .. }) => assert_eq!(what, "d - c a^-1 b"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
