use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qlax_core::exactfield::RationalExpr;
use qlax_core::lattice4d::{audit_random_instances, cube_at, LatticeBox, LatticePoint, ParameterSequences, Z4System};
use qlax_core::laxverify::{verify_theorem, VerifyMode};
use qlax_core::parallel::Execution;
use qlax_core::quadcat::check_cube_consistency;
use qlax_core::reduction::{bridge_random, lift_random};
use qlax_core::MapId;

const STRATEGIES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn lattice_audit(c: &mut Criterion) {
    let mut group = c.benchmark_group("lattice_audit");
    group.sample_size(10);
    let bx = LatticeBox::at_origin([3, 3, 3, 2]);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, 16), |b| {
            b.iter(|| audit_random_instances(16, 2024, &bx, exec).unwrap())
        });
    }
    group.finish();
}

fn theorem_sampled(c: &mut Criterion) {
    let mut group = c.benchmark_group("theorem_sampled");
    group.sample_size(10);
    let mode = VerifyMode::Sampled { samples: 32, seed: 7 };
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, "siii"), |b| {
            b.iter(|| verify_theorem(MapId::SIII, &mode, exec).unwrap())
        });
    }
    group.finish();
}

fn cube_consistency(c: &mut Criterion) {
    let mut group = c.benchmark_group("cube_consistency");
    group.sample_size(10);
    let system = Z4System::<RationalExpr>::new(ParameterSequences::free());
    let cube = cube_at(&system, &LatticePoint::ORIGIN, [1, 2, 4]).unwrap();
    let mode = VerifyMode::Sampled { samples: 32, seed: 7 };
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, "h3_d4"), |b| {
            b.iter(|| check_cube_consistency(&cube, &mode, exec).unwrap())
        });
    }
    group.finish();
}

fn reduction(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduction");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, "lift_20"), |b| b.iter(|| lift_random(20, 99, exec).unwrap()));
        group.bench_function(BenchmarkId::new(name, "bridge_10x5"), |b| {
            b.iter(|| bridge_random(10, 5, 31, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, lattice_audit, theorem_sampled, cube_consistency, reduction);
criterion_main!(benches);
