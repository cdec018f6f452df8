//! Sequential against data-parallel execution of the two grid sweeps.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mbop::asymptotics::{run_studies, StudyOptions, TargetId};
use mbop::identities::{run_battery, BatteryConfig};
use mbop::recurrence::Mode;
use mbop::samples::{decaying_perturbation, random_biorthogonal};
use mbop::secondkind::StieltjesSource;
use mbop::{Complex64, Execution};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn battery(c: &mut Criterion) {
    let rc = random_biorthogonal(3, 8, 7).unwrap();
    let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
    let points = vec![
        Complex64::new(2.0, 0.0),
        Complex64::new(3.0, 0.5),
        Complex64::new(-4.0, 0.0),
    ];
    let mut group = c.benchmark_group("identity_battery");
    group.sample_size(10);
    for (name, exec) in MODES {
        let mut cfg = BatteryConfig::new(points.clone(), 15, 15);
        cfg.execution = exec;
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(run_battery(&rc, &src, &cfg).unwrap()))
        });
    }
    group.finish();
}

fn studies(c: &mut Criterion) {
    let tail = random_biorthogonal(2, 1, 3)
        .unwrap()
        .tail()
        .unwrap()
        .clone();
    let rc = decaying_perturbation(&tail, Mode::Biorthogonal, 200, 0.1, 0.9, 1).unwrap();
    let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
    let targets = [
        TargetId::RatioV,
        TargetId::RatioG,
        TargetId::RatioQ,
        TargetId::RatioR,
        TargetId::ProductRv,
        TargetId::ProductGq,
    ];
    let points: Vec<Complex64> = (0..8)
        .map(|j| Complex64::from_polar(3.0, j as f64 * 0.785))
        .collect();
    let grid = [10, 20, 40, 80, 160];
    let opts = StudyOptions::default();
    let mut group = c.benchmark_group("ratio_studies");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                black_box(run_studies(
                    &rc, &src, &targets, &points, &grid, &opts, exec,
                ))
            })
        });
    }
    group.finish();
}

criterion_group!(benches, battery, studies);
criterion_main!(benches);
