//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::time::Instant;

use mbop::asymptotics::{orthogonality_study, run_study, TargetId};
use mbop::identities::{failures, run_battery, BatteryConfig, TolerancePolicy};
use mbop::linalg::SquareMatrix;
use mbop::recurrence::{
    casorati, casorati_det_step, product_formula, values, Mode, RecurrenceCoefficients, Sequence,
    Triple,
};
use mbop::samples::{decaying_perturbation, random_biorthogonal, random_orthonormal};
use mbop::secondkind::{
    associated_transform, constant_tail_closed_form, quadratic_residual, stieltjes_fixed_point,
    Side, StieltjesSource,
};
use mbop::spectral::{g_zeros, gershgorin_bound, pair_multisets, zeros};
use mbop::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn re(v: f64) -> Complex64 {
    c(v, 0.0)
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let rc = RecurrenceCoefficients::scalar_chebyshev(0.5, 0.0);
    let src = StieltjesSource::fixed_point_from_tail(&rc).expect("tail");
    let s3 = 3f64.sqrt();
    let oracle = [
        (TargetId::ScalarPRatio, 2.0 + s3),
        (TargetId::ScalarQRatio, 2.0 - s3),
        (TargetId::ScalarPqProduct, 1.0 / s3),
    ];
    let mut worst = 0.0f64;
    for (t, want) in oracle {
        let s = run_study(&rc, &src, t, re(2.0), &[200]).expect("study");
        worst = worst.max((s.values[0][(0, 0)] - re(want)).norm());
    }
    let elapsed = t0.elapsed().as_secs_f64();
    Outcome {
        pass: worst < 1e-4 && elapsed < 1.0,
        detail: format!("max |ratio - closed form| = {worst:.2e}, {elapsed:.3} s"),
    }
}

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let points = vec![re(2.0), c(3.0, 0.5), re(-4.0)];
    let mut total = 0usize;
    let mut bad = 0usize;
    let mut worst = 0.0f64;
    let mut first_bad = None;
    for dim in 1..=3 {
        for seed in 0..5 {
            let rc = random_biorthogonal(dim, 8, seed).expect("sample");
            let src = StieltjesSource::fixed_point_from_tail(&rc).expect("tail");
            let mut cfg = BatteryConfig::new(points.clone(), 15, 15);
            cfg.policy = TolerancePolicy::uniform(1e-9);
            let reports = run_battery(&rc, &src, &cfg).expect("battery");
            for r in reports.iter().filter(|r| r.identity_id.gated()) {
                worst = worst.max(r.relative());
            }
            let f = failures(&reports);
            if first_bad.is_none() {
                first_bad = f
                    .first()
                    .map(|r| format!("{} n={} x={}", r.identity_id, r.n, r.x));
            }
            bad += f.len();
            total += reports.len();
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    Outcome {
        pass: bad == 0 && elapsed < 30.0,
        detail: format!(
            "{total} reports, {bad} failures, worst residual/scale {worst:.2e}, {elapsed:.1} s{}",
            first_bad
                .map(|s| format!(", first failure {s}"))
                .unwrap_or_default()
        ),
    }
}

/// Propagates `x f_n = A_n f_{n+1} + B_n f_n + C_n f_{n-1}` from `(f_{-1}, f_0)`.
fn solution(
    rc: &RecurrenceCoefficients,
    x: Complex64,
    init: (SquareMatrix, SquareMatrix),
    n_max: usize,
) -> Sequence {
    let mut out = vec![init.0, init.1];
    for n in 0..n_max {
        let (prev, cur) = (&out[n], &out[n + 1]);
        let rhs = &(&cur.scale(x) - &(rc.b(n).unwrap() * cur)) - &(rc.c(n).unwrap() * prev);
        out.push(rc.a_inv(n).unwrap() * &rhs);
    }
    Sequence::new(-1, out)
}

fn criterion_3() -> Outcome {
    let mut worst_step = 0.0f64;
    let mut worst_product = 0.0f64;
    for dim in 1..=3 {
        for seed in 0..3u64 {
            let rc = random_biorthogonal(dim, 12, 100 + seed).expect("sample");
            let x = c(0.1 * seed as f64, 0.05);
            let pick = |s: u64| {
                let a = random_biorthogonal(dim, 1, s).expect("sample");
                (a.b(0).unwrap().clone(), a.tail().unwrap().a.clone())
            };
            let f = solution(&rc, x, pick(seed * 7 + 1), 22);
            let g = solution(&rc, x, pick(seed * 7 + 2), 22);
            let mut prev = casorati(&[&f, &g], 0).unwrap().det();
            for n in 1..=20 {
                let w = casorati(&[&f, &g], n as isize).unwrap().det();
                let predicted = casorati_det_step(&rc, prev, n).unwrap();
                worst_step =
                    worst_step.max((w - predicted).norm() / w.norm().max(predicted.norm()));
                prev = w;
            }
            let v = Sequence::polynomials(&rc, x, 22).unwrap();
            let v1 = Sequence::associated(&rc, 1, x, 22).unwrap();
            for n in 0..=20 {
                let direct = casorati(&[&v, &v1], n as isize).unwrap().det();
                let formula = product_formula(&rc, n).unwrap();
                worst_product = worst_product.max((direct - formula).norm() / formula.norm());
            }
        }
    }
    Outcome {
        pass: worst_step < 1e-9 && worst_product < 1e-9,
        detail: format!("step {worst_step:.2e}, product formula {worst_product:.2e}"),
    }
}

fn criterion_4() -> Outcome {
    let rc = RecurrenceCoefficients::scalar_chebyshev(0.5, 0.0);
    let mut cheb = 0.0f64;
    for n in [2usize, 5, 10] {
        let mut got: Vec<f64> = zeros(&rc, 0, n)
            .unwrap()
            .zeros
            .iter()
            .map(|z| z.re)
            .collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want: Vec<f64> = (1..=n)
            .map(|j| (j as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
            .collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            cheb = cheb.max((g - w).abs());
        }
    }
    let mut vg = 0.0f64;
    let mut outside = 0usize;
    for seed in 0..5 {
        let rc = random_biorthogonal(2, 12, 200 + seed).expect("sample");
        let m = gershgorin_bound(&rc, 32).unwrap().m;
        for k in 0..=2 {
            for n in 1..=10 {
                let v = zeros(&rc, k, n).unwrap().zeros;
                let g = g_zeros(&rc, k, n).unwrap().zeros;
                vg = vg.max(pair_multisets(&v, &g).unwrap_or(f64::INFINITY));
                outside += v.iter().chain(&g).filter(|z| z.norm() > m + 1e-9).count();
            }
        }
    }
    Outcome {
        pass: cheb < 1e-9 && vg < 1e-8 && outside == 0,
        detail: format!(
            "Chebyshev {cheb:.2e}, V/G multisets {vg:.2e}, {outside} zeros outside the disk"
        ),
    }
}

fn criterion_5() -> Outcome {
    let dirs = [re(1.0), re(-1.0), c(0.0, 1.0), c(0.6, 0.8), c(-0.8, -0.6)];
    let mut fp = 0.0f64;
    let mut dur = 0.0f64;
    for dim in 1..=3 {
        for seed in 0..2u64 {
            let bio = random_biorthogonal(dim, 1, 300 + seed)
                .unwrap()
                .tail()
                .unwrap()
                .clone();
            let orth = random_orthonormal(dim, 1, 400 + seed)
                .unwrap()
                .tail()
                .unwrap()
                .clone();
            for t in [&bio, &orth] {
                let rc = RecurrenceCoefficients::constant(
                    t.a.clone(),
                    t.b.clone(),
                    t.c.clone(),
                    if std::ptr::eq(t, &bio) {
                        Mode::Biorthogonal
                    } else {
                        Mode::Orthonormal
                    },
                )
                .unwrap();
                let m = gershgorin_bound(&rc, 4).unwrap().m;
                for d in dirs {
                    let x = d * (m + 0.5);
                    for side in [Side::Left, Side::Right] {
                        let f = stieltjes_fixed_point(&t.a, &t.b, &t.c, x, side).unwrap();
                        let (r, s) = quadratic_residual(&t.a, &t.b, &t.c, &f, x, side);
                        fp = fp.max(r / s);
                    }
                }
            }
            let m = gershgorin_bound(
                &RecurrenceCoefficients::constant(
                    orth.a.clone(),
                    orth.b.clone(),
                    orth.c.clone(),
                    Mode::Orthonormal,
                )
                .unwrap(),
                4,
            )
            .unwrap()
            .m;
            for d in dirs {
                let x = d * (m + 0.5);
                let f = constant_tail_closed_form(&orth.a, &orth.b, x).unwrap();
                let (r, s) = quadratic_residual(&orth.a, &orth.b, &orth.c, &f, x, Side::Left);
                dur = dur.max(r / s);
            }
        }
    }
    // N = 1, a = 1/2: F(z) = 2 (z - sqrt(z^2 - 1)) on the decaying branch
    let half = SquareMatrix::scalar(1, re(0.5));
    let zero = SquareMatrix::zeros(1);
    let mut scalar = 0.0f64;
    for z in [re(2.0), re(-1.5), c(0.3, 1.2), c(-2.0, -0.7), c(1.1, 0.05)] {
        let mut s = (z * z - 1.0).sqrt();
        if (z - s).norm() > (z + s).norm() {
            s = -s;
        }
        let want = 2.0 * (z - s);
        let a = stieltjes_fixed_point(&half, &zero, &half, z, Side::Left).unwrap()[(0, 0)];
        let b = constant_tail_closed_form(&half, &zero, z).unwrap()[(0, 0)];
        scalar = scalar.max((a - want).norm()).max((b - want).norm());
    }
    Outcome {
        pass: fp < 1e-9 && dur < 1e-9 && scalar < 1e-10,
        detail: format!(
            "fixed point {fp:.2e}, closed form {dur:.2e}, scalar agreement {scalar:.2e}"
        ),
    }
}

fn outer_tail() -> Triple {
    let m = SquareMatrix::from_real_rows;
    Triple::new(
        m(&[&[0.5, 0.0], &[0.1, 0.45]]),
        m(&[&[0.1, 0.05], &[0.05, -0.1]]),
        m(&[&[0.5, 0.08], &[0.0, 0.45]]),
    )
}

fn criterion_6() -> Outcome {
    let rc = decaying_perturbation(&outer_tail(), Mode::Biorthogonal, 400, 0.1, 0.9, 6).unwrap();
    let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
    let grid = [10, 20, 40, 80, 160];
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [
        TargetId::RatioV,
        TargetId::RatioG,
        TargetId::RatioQ,
        TargetId::RatioR,
        TargetId::ProductRv,
        TargetId::ProductGq,
    ] {
        let s = run_study(&rc, &src, t, re(3.0), &grid).unwrap();
        let monotone = s.errors.windows(2).all(|w| w[1] < w[0]);
        let shrink = s.errors[4] / s.errors[0];
        let ok = monotone && shrink < 1e-3;
        pass &= ok;
        parts.push(format!(
            "{} {:.1e}{}",
            t.name(),
            shrink,
            if ok { "" } else { "!" }
        ));
    }
    Outcome {
        pass,
        detail: format!("final/initial: {}", parts.join(", ")),
    }
}

fn criterion_7() -> Outcome {
    let rc = decaying_perturbation(&outer_tail(), Mode::Biorthogonal, 60, 0.2, 0.7, 7).unwrap();
    let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
    let grid = [0usize, 5, 10, 20, 30, 40];
    let mut pass = true;
    let mut parts = Vec::new();
    for ell in 0..=4 {
        let s = orthogonality_study(&rc, ell, &grid).unwrap();
        let ok = if ell == 0 {
            s.deviations.iter().all(|&d| d == 0.0)
        } else {
            s.deviations[grid.len() - 1] < 1e-2 * s.deviations[0]
        };
        pass &= ok;
        parts.push(format!(
            "l={ell} {:.1e}",
            if ell == 0 {
                0.0
            } else {
                s.deviations[grid.len() - 1] / s.deviations[0]
            }
        ));
    }
    let mut cross = 0.0f64;
    for &k in &grid[1..] {
        let (from_r, from_q) = associated_transform(&rc, &src, k, re(3.0)).unwrap();
        cross = cross.max(from_r.rel_dist(&from_q));
    }
    pass &= cross < 1e-8;
    Outcome {
        pass,
        detail: format!(
            "deviation final/initial: {}; transform estimates {cross:.2e}",
            parts.join(", ")
        ),
    }
}

fn criterion_8() -> Outcome {
    let rc = RecurrenceCoefficients::scalar_chebyshev(0.5, 0.0);
    let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
    let x = re(2.0);
    let mut shrink = Vec::new();
    for t in [TargetId::DecayVq, TargetId::DecayGr] {
        let s = run_study(&rc, &src, t, x, &[5, 40]).unwrap();
        shrink.push((t.name().to_string(), s.errors[0] / s.errors[1]));
    }
    // both cross quantities separately, from raw families
    let v = values(&rc, x, 40).unwrap();
    let gt: Vec<SquareMatrix> = values(rc.transposed(), x, 40)
        .unwrap()
        .iter()
        .map(|m| m.transpose())
        .collect();
    let first = |n: usize| {
        (&(&v[n - 1].inverse().unwrap() * rc.c_inv(n).unwrap()) * &gt[n].inverse().unwrap()).norm()
    };
    let second = |n: usize| {
        (&(&v[n].inverse().unwrap() * rc.a_inv(n - 1).unwrap()) * &gt[n - 1].inverse().unwrap())
            .norm()
    };
    shrink.push(("DECAY_CROSS(1)".into(), first(5) / first(40)));
    shrink.push(("DECAY_CROSS(2)".into(), second(5) / second(40)));
    let pass = shrink.iter().all(|(_, r)| *r > 1e3);
    let parts: Vec<String> = shrink.iter().map(|(n, r)| format!("{n} {r:.1e}")).collect();
    Outcome {
        pass,
        detail: format!("norm(5)/norm(40): {}", parts.join(", ")),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("scalar ratio and product limits", criterion_1),
        ("identity battery", criterion_2),
        ("Casorati determinants", criterion_3),
        ("zeros", criterion_4),
        ("quadratic equations", criterion_5),
        ("outer ratio convergence", criterion_6),
        ("associated transform limit", criterion_7),
        ("decay limits", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "acceptance {} [{}] {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed > 0 {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("acceptance: all {} criteria passed", criteria.len());
}
