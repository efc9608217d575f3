use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use local_solve::batch::{run_many, run_many_sequential, BatchSpec};
use local_solve::sched::SchedulerKind;
use local_solve::solver::{NormKind, TerminationRule};
use local_solve::system::{bonacich_system, default_bonacich_alpha, generate_graph, GraphSpec};

fn bench_batch(c: &mut Criterion) {
    let adj = generate_graph(&GraphSpec::ErdosRenyi { n: 300, p: 0.03, seed: 11 }).unwrap();
    let alpha = default_bonacich_alpha(&adj);
    let sys = bonacich_system(&adj, alpha).unwrap();
    let rule = TerminationRule::new(NormKind::L2, 1e-4, 2_000_000).unwrap();

    let mut group = c.benchmark_group("replication_sweep");
    for reps in [8u64, 32] {
        let spec = BatchSpec { kind: SchedulerKind::UniformCensored, base_seed: 1, replications: reps };
        group.bench_with_input(BenchmarkId::new("sequential", reps), &spec, |b, spec| {
            b.iter(|| run_many_sequential(&sys, 0, spec, &rule).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", reps), &spec, |b, spec| {
            b.iter(|| run_many(&sys, 0, spec, &rule).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_batch);
criterion_main!(benches);
