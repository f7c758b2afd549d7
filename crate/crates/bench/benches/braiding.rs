use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use oqdb::braiding::{closed_formula_r, PairContext, RootChoices};
use oqdb::reps::sample_standard;
use oqdb::scalars::RootContext;

fn bench_closed_formula(c: &mut Criterion) {
    for n in [3u32, 5] {
        let ctx = RootContext::new(n, 1).unwrap();
        let pc = PairContext::new(ctx.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v1 = sample_standard(&ctx, &mut rng);
        let v2 = sample_standard(&ctx, &mut rng);
        c.bench_function(&format!("closed_formula_r/N={n}"), |b| {
            b.iter(|| closed_formula_r(&pc, &v1, &v2, RootChoices::default()).unwrap())
        });
    }
}

fn bench_pair_context(c: &mut Criterion) {
    for n in [3u32, 5] {
        c.bench_function(&format!("pair_context/N={n}"), |b| {
            b.iter(|| PairContext::new(RootContext::new(n, 1).unwrap()).unwrap())
        });
    }
}

criterion_group!(benches, bench_closed_formula, bench_pair_context);
criterion_main!(benches);
