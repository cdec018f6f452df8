//! Block recurrence coefficients `(A_n, B_n, C_n)`.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, DEFAULT_RCOND};

/// Structural constraints imposed on the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `A_n` lower triangular, `C_n` upper triangular.
    Biorthogonal,
    /// `C_n = A_{n-1}^T` and `B_n` Hermitian.
    Orthonormal,
}

/// One coefficient triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub a: SquareMatrix,
    pub b: SquareMatrix,
    pub c: SquareMatrix,
}

impl Triple {
    pub fn new(a: SquareMatrix, b: SquareMatrix, c: SquareMatrix) -> Self {
        Triple { a, b, c }
    }

    /// `(C^T, B^T, A^T)`, the triple of the transposed recurrence.
    pub fn transposed(&self) -> Triple {
        Triple {
            a: self.c.transpose(),
            b: self.b.transpose(),
            c: self.a.transpose(),
        }
    }

    fn rel_dist(&self, other: &Triple) -> f64 {
        self.a
            .rel_dist(&other.a)
            .max(self.b.rel_dist(&other.b))
            .max(self.c.rel_dist(&other.c))
    }
}

#[derive(Debug, Clone)]
struct Entry {
    t: Triple,
    a_inv: SquareMatrix,
    c_inv: SquareMatrix,
}

#[derive(Debug)]
struct Inner {
    dim: usize,
    mode: Mode,
    head: Vec<Entry>,
    tail: Option<Entry>,
    transposed: OnceLock<RecurrenceCoefficients>,
}

/// Coefficients of `x V_n = A_n V_{n+1} + B_n V_n + C_n V_{n-1}`: an explicit
/// head for `n < head_len` and an optional constant tail beyond it.
///
/// `C_0` is always the identity and `A_{-1} = I` by convention. Inverses of
/// every `A_n`, `C_n` are computed once at construction, so cloned handles
/// can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct RecurrenceCoefficients {
    inner: Arc<Inner>,
}

const STRUCTURE_TOL: f64 = 1e-12;

fn check_dim(m: &SquareMatrix, dim: usize) -> Result<()> {
    if m.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn invert(m: &SquareMatrix, which: char, index: usize) -> Result<SquareMatrix> {
    m.inverse_with(DEFAULT_RCOND)
        .map_err(|_| Error::SingularCoefficient { which, index })
}

fn entry(t: Triple, index: usize) -> Result<Entry> {
    let a_inv = invert(&t.a, 'A', index)?;
    let c_inv = invert(&t.c, 'C', index)?;
    Ok(Entry { t, a_inv, c_inv })
}

impl RecurrenceCoefficients {
    /// Validating constructor. An empty head with a tail means a constant
    /// recurrence; `C_0` is then set to the identity.
    pub fn new(dim: usize, mode: Mode, head: Vec<Triple>, tail: Option<Triple>) -> Result<Self> {
        let rc = Self::assemble(dim, mode, head, tail)?;
        rc.validate_mode()?;
        Ok(rc)
    }

    /// Constant recurrence without the mode-specific structure checks, for
    /// reference families built from arbitrary nonsingular `A`, `C`.
    pub(crate) fn constant_unchecked(
        a: SquareMatrix,
        b: SquareMatrix,
        c: SquareMatrix,
    ) -> Result<Self> {
        let mode = if c.dist(&a.transpose()) <= STRUCTURE_TOL * c.norm().max(1.0)
            && b.is_hermitian(STRUCTURE_TOL)
        {
            Mode::Orthonormal
        } else {
            Mode::Biorthogonal
        };
        Self::assemble(a.dim(), mode, Vec::new(), Some(Triple::new(a, b, c)))
    }

    fn assemble(dim: usize, mode: Mode, head: Vec<Triple>, tail: Option<Triple>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCoefficients(
                "dimension must be positive".into(),
            ));
        }
        for t in head.iter().chain(tail.iter()) {
            check_dim(&t.a, dim)?;
            check_dim(&t.b, dim)?;
            check_dim(&t.c, dim)?;
        }
        let mut head = head;
        if head.is_empty() {
            match &tail {
                Some(t) => head.push(Triple::new(
                    t.a.clone(),
                    t.b.clone(),
                    SquareMatrix::identity(dim),
                )),
                None => return Err(Error::InvalidCoefficients("no coefficients given".into())),
            }
        }
        if head[0].c.dist(&SquareMatrix::identity(dim)) > 1e-14 {
            return Err(Error::InvalidCoefficients("C_0 must be identity".into()));
        }
        let entries = head
            .into_iter()
            .enumerate()
            .map(|(i, t)| entry(t, i))
            .collect::<Result<Vec<_>>>()?;
        let tail = match tail {
            Some(t) => Some(entry(t, entries.len())?),
            None => None,
        };
        Ok(Self::from_parts(dim, mode, entries, tail))
    }

    /// A recurrence with the same triple at every index (`C_0 = I`).
    pub fn constant(a: SquareMatrix, b: SquareMatrix, c: SquareMatrix, mode: Mode) -> Result<Self> {
        let dim = a.dim();
        Self::new(dim, mode, Vec::new(), Some(Triple::new(a, b, c)))
    }

    /// Scalar recurrence with `a_n = c_n = a`, `b_n = b`.
    pub fn scalar_chebyshev(a: f64, b: f64) -> Self {
        let m = |v: f64| SquareMatrix::from_real_rows(&[&[v]]);
        Self::constant(m(a), m(b), m(a), Mode::Orthonormal).expect("nonzero scalar coefficients")
    }

    fn from_parts(dim: usize, mode: Mode, head: Vec<Entry>, tail: Option<Entry>) -> Self {
        RecurrenceCoefficients {
            inner: Arc::new(Inner {
                dim,
                mode,
                head,
                tail,
                transposed: OnceLock::new(),
            }),
        }
    }

    fn validate_mode(&self) -> Result<()> {
        let inner = &self.inner;
        let all: Vec<(usize, &Triple)> = inner
            .head
            .iter()
            .enumerate()
            .map(|(i, e)| (i, &e.t))
            .chain(inner.tail.iter().map(|e| (inner.head.len(), &e.t)))
            .collect();
        for &(i, t) in &all {
            let tol = |m: &SquareMatrix| STRUCTURE_TOL * m.norm().max(1.0);
            match inner.mode {
                Mode::Biorthogonal => {
                    if !t.a.is_lower_triangular(tol(&t.a)) {
                        return Err(Error::InvalidCoefficients(format!(
                            "A_{i} must be lower triangular"
                        )));
                    }
                    if !t.c.is_upper_triangular(tol(&t.c)) {
                        return Err(Error::InvalidCoefficients(format!(
                            "C_{i} must be upper triangular"
                        )));
                    }
                }
                Mode::Orthonormal => {
                    if !t.b.is_hermitian(tol(&t.b)) {
                        return Err(Error::InvalidCoefficients(format!(
                            "B_{i} must be Hermitian"
                        )));
                    }
                }
            }
        }
        if inner.mode == Mode::Orthonormal {
            for n in 1..=inner.head.len() {
                let (Ok(c), Ok(a_prev)) = (self.c(n), self.a(n - 1)) else {
                    break;
                };
                if c.dist(&a_prev.transpose()) > STRUCTURE_TOL * c.norm().max(1.0) {
                    return Err(Error::InvalidCoefficients(format!(
                        "C_{n} must equal A_{}^T",
                        n - 1
                    )));
                }
            }
            if let Some(t) = &inner.tail {
                if t.t.c.dist(&t.t.a.transpose()) > STRUCTURE_TOL * t.t.c.norm().max(1.0) {
                    return Err(Error::InvalidCoefficients(
                        "tail C must equal tail A^T".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn mode(&self) -> Mode {
        self.inner.mode
    }

    /// Number of explicitly stored indices.
    pub fn head_len(&self) -> usize {
        self.inner.head.len()
    }

    pub fn tail(&self) -> Option<&Triple> {
        self.inner.tail.as_ref().map(|e| &e.t)
    }

    pub fn has_tail(&self) -> bool {
        self.inner.tail.is_some()
    }

    /// True when index `n` is covered by the head or the tail.
    pub fn is_available(&self, n: usize) -> bool {
        n < self.inner.head.len() || self.inner.tail.is_some()
    }

    /// True when every index uses the tail triple (apart from `C_0 = I`).
    pub fn is_constant(&self) -> bool {
        match &self.inner.tail {
            Some(t) => self
                .inner
                .head
                .iter()
                .enumerate()
                .all(|(i, e)| e.t.a == t.t.a && e.t.b == t.t.b && (i == 0 || e.t.c == t.t.c)),
            None => false,
        }
    }

    fn entry(&self, n: usize) -> Result<&Entry> {
        self.inner
            .head
            .get(n)
            .or(self.inner.tail.as_ref())
            .ok_or(Error::OutOfRange(n))
    }

    pub fn triple(&self, n: usize) -> Result<&Triple> {
        self.entry(n).map(|e| &e.t)
    }

    pub fn a(&self, n: usize) -> Result<&SquareMatrix> {
        self.entry(n).map(|e| &e.t.a)
    }

    pub fn b(&self, n: usize) -> Result<&SquareMatrix> {
        self.entry(n).map(|e| &e.t.b)
    }

    pub fn c(&self, n: usize) -> Result<&SquareMatrix> {
        self.entry(n).map(|e| &e.t.c)
    }

    pub fn a_inv(&self, n: usize) -> Result<&SquareMatrix> {
        self.entry(n).map(|e| &e.a_inv)
    }

    pub fn c_inv(&self, n: usize) -> Result<&SquareMatrix> {
        self.entry(n).map(|e| &e.c_inv)
    }

    /// `A_n` for `n >= -1`, with `A_{-1} = I`.
    pub fn a_signed(&self, n: isize) -> Result<SquareMatrix> {
        if n == -1 {
            Ok(SquareMatrix::identity(self.dim()))
        } else {
            self.a(usize::try_from(n).map_err(|_| Error::OutOfRange(0))?)
                .cloned()
        }
    }

    /// The recurrence with every index shifted by `k` and `C_0` reset to `I`.
    pub fn shifted(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        let inner = &self.inner;
        let dim = inner.dim;
        let mut head: Vec<Entry> = inner.head.iter().skip(k).cloned().collect();
        if head.is_empty() {
            if let Some(t) = &inner.tail {
                head.push(t.clone());
            }
        }
        if let Some(first) = head.first_mut() {
            first.t.c = SquareMatrix::identity(dim);
            first.c_inv = SquareMatrix::identity(dim);
        }
        Self::from_parts(dim, inner.mode, head, inner.tail.clone())
    }

    /// Coefficients `(C_{n+1}^T, B_n^T, A_{n-1}^T)` of the recurrence satisfied
    /// by `G_n`. Cached after the first call.
    pub fn transposed(&self) -> &RecurrenceCoefficients {
        self.inner
            .transposed
            .get_or_init(|| self.build_transposed())
    }

    fn build_transposed(&self) -> RecurrenceCoefficients {
        let inner = &self.inner;
        let dim = inner.dim;
        let h = inner.head.len();
        let len = if inner.tail.is_some() {
            h + 1
        } else {
            h.saturating_sub(1)
        };
        let id = SquareMatrix::identity(dim);
        let head = (0..len)
            .map(|n| {
                let next = self.entry(n + 1).expect("index within range");
                let cur = self.entry(n).expect("index within range");
                let (c, c_inv) = if n == 0 {
                    (id.clone(), id.clone())
                } else {
                    let prev = self.entry(n - 1).expect("index within range");
                    (prev.t.a.transpose(), prev.a_inv.transpose())
                };
                Entry {
                    t: Triple::new(next.t.c.transpose(), cur.t.b.transpose(), c),
                    a_inv: next.c_inv.transpose(),
                    c_inv,
                }
            })
            .collect();
        let tail = inner.tail.as_ref().map(|e| Entry {
            t: e.t.transposed(),
            a_inv: e.c_inv.transpose(),
            c_inv: e.a_inv.transpose(),
        });
        Self::from_parts(dim, inner.mode, head, tail)
    }

    /// Copy with `C_index` multiplied by `factor`, bypassing validation.
    /// Used to inject faults into identity checks.
    #[doc(hidden)]
    pub fn with_scaled_c(&self, index: usize, factor: f64) -> Result<Self> {
        let inner = &self.inner;
        let mut head = inner.head.clone();
        let mut tail = inner.tail.clone();
        if index < head.len() {
            let e = &mut head[index];
            e.t.c = e.t.c.scale_re(factor);
            e.c_inv = e.c_inv.scale_re(1.0 / factor);
        } else if let Some(t) = tail.clone() {
            // materialize the tail up to `index` so only that entry changes
            while head.len() < index {
                head.push(t.clone());
            }
            let mut e = t;
            e.t.c = e.t.c.scale_re(factor);
            e.c_inv = e.c_inv.scale_re(1.0 / factor);
            head.push(e);
            tail = inner.tail.clone();
        } else {
            return Err(Error::OutOfRange(index));
        }
        Ok(Self::from_parts(inner.dim, inner.mode, head, tail))
    }

    /// Largest relative distance between the stored tail and `t`.
    pub fn tail_distance(&self, t: &Triple) -> Option<f64> {
        self.tail().map(|own| own.rel_dist(t))
    }

    /// Explicit triples for indices `0..len`, using the tail beyond the head.
    pub fn materialize(&self, len: usize) -> Result<Vec<Triple>> {
        (0..len).map(|n| self.triple(n).cloned()).collect()
    }
}
