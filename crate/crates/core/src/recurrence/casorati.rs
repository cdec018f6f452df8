//! Block Casorati matrices and the independence test.

use num_complex::Complex64;

use super::coefficients::RecurrenceCoefficients;
use super::family::values;
use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, DEFAULT_RCOND};

/// A matrix sequence `f_m` stored from index `offset` upward.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub offset: isize,
    pub values: Vec<SquareMatrix>,
}

impl Sequence {
    pub fn new(offset: isize, values: Vec<SquareMatrix>) -> Self {
        Sequence { offset, values }
    }

    pub fn get(&self, m: isize) -> Option<&SquareMatrix> {
        usize::try_from(m - self.offset)
            .ok()
            .and_then(|i| self.values.get(i))
    }

    /// Last stored index.
    pub fn last_index(&self) -> isize {
        self.offset + self.values.len() as isize - 1
    }

    /// Right product `f_m * m`, which is again a solution.
    pub fn right_mul(&self, m: &SquareMatrix) -> Sequence {
        Sequence::new(self.offset, self.values.iter().map(|v| v * m).collect())
    }

    /// `n -> V_n(x)` for `n = -1..=n_max`, with `V_{-1} = 0`.
    pub fn polynomials(
        rc: &RecurrenceCoefficients,
        x: Complex64,
        n_max: usize,
    ) -> Result<Sequence> {
        let mut v = vec![SquareMatrix::zeros(rc.dim())];
        v.extend(values(rc, x, n_max)?);
        Ok(Sequence::new(-1, v))
    }

    /// `n -> V^(k)_{n-k}(x)` for `n = k-2..=n_max`, `k >= 1`, starting from
    /// `V^(k)_{-2} = -C_{k-1}^{-1} A_{k-1}` and `V^(k)_{-1} = 0`.
    pub fn associated(
        rc: &RecurrenceCoefficients,
        k: usize,
        x: Complex64,
        n_max: usize,
    ) -> Result<Sequence> {
        if k == 0 {
            return Err(Error::InvalidInput(
                "associated sequences need k >= 1".into(),
            ));
        }
        let minus2 = -(rc.c_inv(k - 1)? * rc.a(k - 1)?);
        let mut v = vec![minus2, SquareMatrix::zeros(rc.dim())];
        if n_max >= k {
            v.extend(values(&rc.shifted(k), x, n_max - k)?);
        }
        Ok(Sequence::new(k as isize - 2, v))
    }
}

/// Blocks `(i, j) = f_{j, n+i}` of `W(f_0, ..., f_{k-1})` at index `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CasoratiMatrix {
    pub n: isize,
    pub blocks: Vec<Vec<SquareMatrix>>,
}

impl CasoratiMatrix {
    pub fn order(&self) -> usize {
        self.blocks.len()
    }

    pub fn assemble(&self) -> SquareMatrix {
        SquareMatrix::assemble(&self.blocks)
    }

    pub fn det(&self) -> Complex64 {
        self.assemble().det()
    }
}

pub fn casorati(fs: &[&Sequence], n: isize) -> Result<CasoratiMatrix> {
    let k = fs.len();
    if k == 0 {
        return Err(Error::InvalidInput("no sequences".into()));
    }
    let blocks = (0..k)
        .map(|i| {
            fs.iter()
                .map(|f| {
                    f.get(n + i as isize).cloned().ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "sequence undefined at index {}",
                            n + i as isize
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CasoratiMatrix { n, blocks })
}

/// `det(A_n^{-1}) det(C_n) w_prev`: the determinant of a second-order
/// Casorati matrix at `n` predicted from its value at `n - 1`.
pub fn casorati_det_step(
    rc: &RecurrenceCoefficients,
    w_prev: Complex64,
    n: usize,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidInput("the step needs n >= 1".into()));
    }
    Ok(rc.a_inv(n)?.det() * rc.c(n)?.det() * w_prev)
}

/// `det(A_0) prod_{j=0}^{n} det(A_j^{-1}) det(C_j)`, the determinant of
/// `W(V_n, V^(1)_{n-1})`. The `j = 0` factor cancels `det(A_0)`.
pub fn product_formula(rc: &RecurrenceCoefficients, n: usize) -> Result<Complex64> {
    let mut acc = rc.a(0)?.det();
    for j in 0..=n {
        acc *= rc.a_inv(j)?.det() * rc.c(j)?.det();
    }
    Ok(acc)
}

/// Outcome of a Casorati independence probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Independence {
    pub independent: bool,
    /// First probed index whose Casorati matrix is well conditioned, with its determinant.
    pub witness: Option<(isize, Complex64)>,
    /// Best reciprocal condition seen over the probe window.
    pub best_rcond: f64,
}

/// Sufficient test for right-linear independence: some probed Casorati
/// matrix is nonsingular in the reciprocal-condition sense.
pub fn independence_test(
    fs: &[&Sequence],
    probe: impl IntoIterator<Item = isize>,
) -> Result<Independence> {
    let mut best = 0.0f64;
    for n in probe {
        let w = casorati(fs, n)?;
        let m = w.assemble();
        let rc = m.rcond();
        best = best.max(rc);
        if rc > DEFAULT_RCOND {
            return Ok(Independence {
                independent: true,
                witness: Some((n, m.det())),
                best_rcond: best,
            });
        }
    }
    Ok(Independence {
        independent: false,
        witness: None,
        best_rcond: best,
    })
}
