//! Seeded random coefficient sets for tests, benches and the CLI.
//!
//! Entries are kept small enough that the Gershgorin radius stays below
//! `1.6` for `dim <= 3`, so points such as `2`, `3 + 0.5i` and `-4` lie
//! outside the spectrum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::SquareMatrix;
use crate::recurrence::{Mode, RecurrenceCoefficients, Triple};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}

fn signed_diag(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = uniform(r, lo, hi);
    if r.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Lower triangular with diagonal magnitudes in `[0.25, 0.45]` and
/// off-diagonal entries in `[-0.05, 0.05]`.
fn lower(r: &mut ChaCha8Rng, dim: usize) -> SquareMatrix {
    SquareMatrix::from_fn(dim, |i, j| {
        let v = if i == j {
            signed_diag(r, 0.25, 0.45)
        } else if i > j {
            uniform(r, -0.05, 0.05)
        } else {
            0.0
        };
        v.into()
    })
}

fn dense(r: &mut ChaCha8Rng, dim: usize, amp: f64) -> SquareMatrix {
    SquareMatrix::from_fn(dim, |_, _| uniform(r, -amp, amp).into())
}

fn symmetric(r: &mut ChaCha8Rng, dim: usize, amp: f64) -> SquareMatrix {
    let m = dense(r, dim, amp);
    (&m + &m.transpose()).scale_re(0.5)
}

/// Real symmetric positive definite with spectrum inside `[0.25, 0.45]`.
fn spd(r: &mut ChaCha8Rng, dim: usize) -> SquareMatrix {
    let base = SquareMatrix::identity(dim).scale_re(uniform(r, 0.3, 0.4));
    &base + &symmetric(r, dim, 0.05 / dim as f64)
}

fn biorthogonal_triple(r: &mut ChaCha8Rng, dim: usize) -> Triple {
    let a = lower(r, dim);
    let b = dense(r, dim, 0.15);
    let c = lower(r, dim).transpose();
    Triple::new(a, b, c)
}

/// Biorthogonal recurrence with `head_len` random triples and a random
/// constant tail.
pub fn random_biorthogonal(
    dim: usize,
    head_len: usize,
    seed: u64,
) -> Result<RecurrenceCoefficients> {
    let mut r = rng(seed);
    let tail = biorthogonal_triple(&mut r, dim);
    let head = (0..head_len.max(1))
        .map(|n| {
            let mut t = biorthogonal_triple(&mut r, dim);
            if n == 0 {
                t.c = SquareMatrix::identity(dim);
            }
            t
        })
        .collect();
    RecurrenceCoefficients::new(dim, Mode::Biorthogonal, head, Some(tail))
}

/// Orthonormal recurrence with real symmetric positive definite `A_n`,
/// symmetric `B_n`, `C_n = A_{n-1}^T`, and a tail of the same kind. The last
/// head entry shares the tail's `A`.
pub fn random_orthonormal(
    dim: usize,
    head_len: usize,
    seed: u64,
) -> Result<RecurrenceCoefficients> {
    let mut r = rng(seed);
    let ta = spd(&mut r, dim);
    let tail = Triple::new(ta.clone(), symmetric(&mut r, dim, 0.15), ta.transpose());
    let mut head: Vec<Triple> = Vec::with_capacity(head_len.max(1));
    let len = head_len.max(1);
    for n in 0..len {
        // C_len = A_{len-1}^T must match the tail
        let a = if n + 1 == len {
            ta.clone()
        } else {
            spd(&mut r, dim)
        };
        let b = symmetric(&mut r, dim, 0.15);
        let c = if n == 0 {
            SquareMatrix::identity(dim)
        } else {
            head[n - 1].a.transpose()
        };
        head.push(Triple::new(a, b, c));
    }
    RecurrenceCoefficients::new(dim, Mode::Orthonormal, head, Some(tail))
}

/// The constant recurrence `tail` perturbed on its first `head_len` indices
/// by random terms of size `amplitude * ratio^n`, respecting `mode`.
pub fn decaying_perturbation(
    tail: &Triple,
    mode: Mode,
    head_len: usize,
    amplitude: f64,
    ratio: f64,
    seed: u64,
) -> Result<RecurrenceCoefficients> {
    let dim = tail.a.dim();
    let mut r = rng(seed);
    let mut head: Vec<Triple> = Vec::with_capacity(head_len.max(1));
    for n in 0..head_len.max(1) {
        let s = amplitude * ratio.powi(n as i32);
        let t = match mode {
            Mode::Biorthogonal => {
                let pa = SquareMatrix::from_fn(dim, |i, j| {
                    if i >= j {
                        uniform(&mut r, -s, s).into()
                    } else {
                        0.0.into()
                    }
                });
                let pb = dense(&mut r, dim, s);
                let pc = SquareMatrix::from_fn(dim, |i, j| {
                    if i <= j {
                        uniform(&mut r, -s, s).into()
                    } else {
                        0.0.into()
                    }
                });
                let c = if n == 0 {
                    SquareMatrix::identity(dim)
                } else {
                    &tail.c + &pc
                };
                Triple::new(&tail.a + &pa, &tail.b + &pb, c)
            }
            Mode::Orthonormal => {
                let pa = symmetric(&mut r, dim, s);
                let a = if n + 1 == head_len.max(1) {
                    tail.a.clone()
                } else {
                    &tail.a + &pa
                };
                let b = &tail.b + &symmetric(&mut r, dim, s);
                let c = if n == 0 {
                    SquareMatrix::identity(dim)
                } else {
                    head[n - 1].a.transpose()
                };
                Triple::new(a, b, c)
            }
        };
        head.push(t);
    }
    RecurrenceCoefficients::new(dim, mode, head, Some(tail.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::gershgorin_bound;

    #[test]
    fn seeded_sets_are_reproducible_and_bounded() {
        for dim in 1..=3 {
            for seed in 0..5 {
                let a = random_biorthogonal(dim, 6, seed).unwrap();
                let b = random_biorthogonal(dim, 6, seed).unwrap();
                assert_eq!(a.materialize(8).unwrap(), b.materialize(8).unwrap());
                assert!(gershgorin_bound(&a, 8).unwrap().m < 1.6);
                let o = random_orthonormal(dim, 6, seed).unwrap();
                assert!(gershgorin_bound(&o, 8).unwrap().m < 1.6);
                assert!(o.tail().unwrap().a.is_hermitian(0.0));
            }
        }
        let a = random_biorthogonal(2, 4, 1).unwrap();
        let b = random_biorthogonal(2, 4, 2).unwrap();
        assert_ne!(a.materialize(4).unwrap(), b.materialize(4).unwrap());
    }

    #[test]
    fn perturbation_decays_to_the_tail() {
        let base = random_biorthogonal(2, 1, 9).unwrap();
        let tail = base.tail().unwrap().clone();
        let rc = decaying_perturbation(&tail, Mode::Biorthogonal, 60, 0.1, 0.8, 3).unwrap();
        let d = |n: usize| rc.a(n).unwrap().dist(&tail.a);
        assert!(d(50) < 1e-5 && d(50) > 0.0);
        assert_eq!(rc.a(60).unwrap(), &tail.a);
        let orth = random_orthonormal(2, 1, 4).unwrap();
        let t = orth.tail().unwrap().clone();
        let rc = decaying_perturbation(&t, Mode::Orthonormal, 10, 0.05, 0.5, 1).unwrap();
        assert_eq!(rc.mode(), Mode::Orthonormal);
    }
}
