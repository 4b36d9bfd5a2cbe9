//! Parallel vs serial throughput on the three hot paths: the full
//! degree-4 collapse at level 12, the degree-2 chain at k = 6, and a batch
//! of power-operation evaluations.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use theta_engine::powerops::{power_many, ExecMode};
use theta_engine::rings::{CoeffElem, ETheoryPresentation};
use theta_engine::saturate::{saturate, SaturationLimits};

fn collapse_benches(c: &mut Criterion) {
    let pres = ETheoryPresentation::height2();
    let spec = pres.spec();
    let four = CoeffElem::from_int(spec, 4);
    let mut group = c.benchmark_group("collapse-degree4-level12");
    for (name, mode) in [("serial", ExecMode::Serial), ("parallel", ExecMode::Parallel)] {
        group.bench_function(name, |b| {
            b.iter(|| {
                saturate(
                    &pres,
                    std::slice::from_ref(&four),
                    12,
                    SaturationLimits::default(),
                    mode,
                    false,
                )
            })
        });
    }
    group.finish();

    let h1 = ETheoryPresentation::height1();
    let sixty_four = CoeffElem::from_int(h1.spec(), 64);
    let mut group = c.benchmark_group("collapse-degree2-k6");
    for (name, mode) in [("serial", ExecMode::Serial), ("parallel", ExecMode::Parallel)] {
        group.bench_function(name, |b| {
            b.iter(|| {
                saturate(
                    &h1,
                    std::slice::from_ref(&sixty_four),
                    12,
                    SaturationLimits::default(),
                    mode,
                    false,
                )
            })
        });
    }
    group.finish();
}

fn power_benches(c: &mut Criterion) {
    use rand::{Rng, SeedableRng};
    let pres = ETheoryPresentation::height2();
    let spec = pres.spec();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let xs: Vec<CoeffElem> = (0..512)
        .map(|_| {
            let coeffs: Vec<i64> = (0..8).map(|_| rng.gen_range(0..256)).collect();
            CoeffElem::from_coeff_list(spec, &coeffs)
        })
        .collect();
    let mut group = c.benchmark_group("power-batch-512");
    for (name, mode) in [("serial", ExecMode::Serial), ("parallel", ExecMode::Parallel)] {
        group.bench_function(name, |b| {
            b.iter_batched(
                || xs.clone(),
                |xs| power_many(&pres, &xs, mode),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, collapse_benches, power_benches);
criterion_main!(benches);
