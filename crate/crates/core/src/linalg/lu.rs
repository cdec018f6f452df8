//! LU factorisation with partial pivoting.

use num_complex::Complex64;

use super::matrix::SquareMatrix;

/// Packed `PA = LU` factors; `L` has a unit diagonal.
#[derive(Debug, Clone)]
pub struct Lu {
    factors: SquareMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(a: &SquareMatrix) -> Self {
        let n = a.dim();
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, f[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = f[(k, j)];
                    f[(k, j)] = f[(p, j)];
                    f[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = f[(k, k)];
            for i in k + 1..n {
                let l = f[(i, k)] / pivot;
                f[(i, k)] = l;
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let u = f[(k, j)];
                    f[(i, j)] -= l * u;
                }
            }
        }
        Lu {
            factors: f,
            perm,
            sign,
            singular,
        }
    }

    /// True if some pivot was exactly zero.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex64 {
        if self.singular {
            return Complex64::new(0.0, 0.0);
        }
        let n = self.factors.dim();
        (0..n).fold(Complex64::new(self.sign, 0.0), |acc, i| {
            acc * self.factors[(i, i)]
        })
    }

    /// Solves `A x = b` for a single vector.
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.factors.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.factors[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.factors[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.factors[(i, i)];
        }
        x
    }

    /// Inverse; entries are non-finite when the matrix is singular.
    pub fn inverse(&self) -> SquareMatrix {
        let n = self.factors.dim();
        let mut inv = SquareMatrix::zeros(n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve_vec(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}
