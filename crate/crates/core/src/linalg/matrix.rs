//! Dense square complex matrices.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::lu::Lu;
use crate::error::{Error, Result};

/// Reciprocal condition threshold below which a matrix is treated as singular.
pub const DEFAULT_RCOND: f64 = 1e-12;

/// A dense `N x N` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        SquareMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, Complex64::new(1.0, 0.0))
    }

    /// `c * I`.
    pub fn scalar(dim: usize, c: Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Validating constructor: `data` must hold `dim * dim` finite entries.
    pub fn try_new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "matrix dimension must be positive".into(),
            ));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SquareMatrix { dim, data })
    }

    /// Builds from real rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| {
            assert_eq!(rows[i].len(), dim, "rows must be square");
            Complex64::new(rows[i][j], 0.0)
        })
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| {
            assert_eq!(rows[i].len(), dim, "rows must be square");
            rows[i][j]
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self + c * I`.
    pub fn shift(&self, c: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)] += c;
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.dim)
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn row_abs_sums(&self) -> Vec<f64> {
        self.data
            .chunks(self.dim)
            .map(|r| r.iter().map(|z| z.norm()).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius distance.
    pub fn dist(&self, other: &SquareMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `dist / max(norms)`, zero when both vanish.
    pub fn rel_dist(&self, other: &SquareMatrix) -> f64 {
        let scale = self.norm().max(other.norm());
        if scale == 0.0 {
            0.0
        } else {
            self.dist(other) / scale
        }
    }

    pub fn approx_eq(&self, other: &SquareMatrix, tol: f64) -> bool {
        self.dim == other.dim && self.dist(other) <= tol
    }

    pub fn is_lower_triangular(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self[(i, j)].norm() <= tol))
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self[(i, j)].norm() <= tol))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..=i).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() <= tol)
    }

    /// `A A^H = A^H A` within `tol` (Frobenius, relative to `|A|^2`).
    pub fn is_normal(&self, tol: f64) -> bool {
        let ah = self.adjoint();
        let lhs = self * &ah;
        let rhs = &ah * self;
        lhs.dist(&rhs) <= tol * self.norm().powi(2).max(f64::MIN_POSITIVE)
    }

    pub fn lu(&self) -> Lu {
        Lu::new(self)
    }

    pub fn det(&self) -> Complex64 {
        self.lu().det()
    }

    /// Exact 1-norm reciprocal condition number; zero for exactly singular input.
    pub fn rcond(&self) -> f64 {
        let lu = self.lu();
        if lu.is_singular() {
            return 0.0;
        }
        let inv = lu.inverse();
        let denom = self.norm_one() * inv.norm_one();
        if denom.is_finite() && denom > 0.0 {
            1.0 / denom
        } else {
            0.0
        }
    }

    /// Inverse with the default reciprocal-condition test.
    pub fn inverse(&self) -> Result<SquareMatrix> {
        self.inverse_with(DEFAULT_RCOND)
    }

    pub fn inverse_with(&self, rcond_tol: f64) -> Result<SquareMatrix> {
        let lu = self.lu();
        if lu.is_singular() {
            return Err(Error::SingularBlock {
                what: "matrix".into(),
                rcond: 0.0,
            });
        }
        let inv = lu.inverse();
        let rcond = 1.0 / (self.norm_one() * inv.norm_one());
        if rcond.is_nan() || rcond < rcond_tol || !inv.is_finite() {
            return Err(Error::SingularBlock {
                what: "matrix".into(),
                rcond: if rcond.is_finite() { rcond } else { 0.0 },
            });
        }
        Ok(inv)
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &SquareMatrix) -> Result<SquareMatrix> {
        Ok(&self.inverse()? * rhs)
    }

    /// Extracts the `(bi, bj)` block of size `bs` from a block matrix.
    pub fn block(&self, bi: usize, bj: usize, bs: usize) -> SquareMatrix {
        SquareMatrix::from_fn(bs, |i, j| self[(bi * bs + i, bj * bs + j)])
    }

    /// Assembles a `k x k` grid of equal-size blocks (row-major) into one matrix.
    pub fn assemble(grid: &[Vec<SquareMatrix>]) -> SquareMatrix {
        let k = grid.len();
        assert!(
            k > 0 && grid.iter().all(|r| r.len() == k),
            "block grid must be square"
        );
        let bs = grid[0][0].dim();
        let mut m = SquareMatrix::zeros(k * bs);
        for (bi, row) in grid.iter().enumerate() {
            for (bj, blk) in row.iter().enumerate() {
                assert_eq!(blk.dim(), bs, "blocks must share a dimension");
                for i in 0..bs {
                    for j in 0..bs {
                        m[(bi * bs + i, bj * bs + j)] = blk[(i, j)];
                    }
                }
            }
        }
        m
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{})", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim) {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.6e}{:+.6e}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        SquareMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        SquareMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Neg for &SquareMatrix {
    type Output = SquareMatrix;
    fn neg(self) -> SquareMatrix {
        self.scale_re(-1.0)
    }
}

impl Neg for SquareMatrix {
    type Output = SquareMatrix;
    fn neg(self) -> SquareMatrix {
        self.scale_re(-1.0)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<SquareMatrix> for SquareMatrix {
            type Output = SquareMatrix;
            fn $method(self, rhs: SquareMatrix) -> SquareMatrix {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a SquareMatrix> for SquareMatrix {
            type Output = SquareMatrix;
            fn $method(self, rhs: &SquareMatrix) -> SquareMatrix {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<SquareMatrix> for &'a SquareMatrix {
            type Output = SquareMatrix;
            fn $method(self, rhs: SquareMatrix) -> SquareMatrix {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl AddAssign<&SquareMatrix> for SquareMatrix {
    fn add_assign(&mut self, rhs: &SquareMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&SquareMatrix> for SquareMatrix {
    fn sub_assign(&mut self, rhs: &SquareMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Mul<Complex64> for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, c: Complex64) -> SquareMatrix {
        self.scale(c)
    }
}

impl Mul<Complex64> for SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, c: Complex64) -> SquareMatrix {
        self.scale(c)
    }
}

/// Serialized as nested rows of `[re, im]` pairs.
impl Serialize for SquareMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .data
            .chunks(self.dim)
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SquareMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(serde::de::Error::custom("matrix rows must form a square"));
        }
        let data = rows
            .into_iter()
            .flatten()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        SquareMatrix::try_new(dim, data).map_err(serde::de::Error::custom)
    }
}
