use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use regap::bench::bench_one;
use regap::gen::{cfg_corpus, default_bench_patterns, CfgParams};
use regap::matcher::MatchOptions;
use regap::par;

fn batch(c: &mut Criterion) {
    let corpus = cfg_corpus(7, 24, CfgParams::default());
    let patterns = default_bench_patterns();
    let pairs: Vec<(usize, usize)> = (0..corpus.len()).flat_map(|i| (0..patterns.len()).map(move |j| (i, j))).collect();
    let opts = MatchOptions::default();
    let one = |&(i, j): &(usize, usize)| bench_one(&format!("g{i}"), &corpus[i], &patterns[j].0, &patterns[j].1, &opts).outcome;

    let mut group = c.benchmark_group("cfg-batch");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("sequential", pairs.len()), &pairs, |b, pairs| {
        b.iter(|| par::map_sequential(pairs, one))
    });
    group.bench_with_input(BenchmarkId::new(if par::is_parallel() { "rayon" } else { "fallback" }, pairs.len()), &pairs, |b, pairs| {
        b.iter(|| par::map(pairs, one))
    });
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
