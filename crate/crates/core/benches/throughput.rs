//! Throughput of the hot paths.
//!
//! With default features each benchmark runs inside a one-thread pool and
//! inside the full rayon pool. Build with `--no-default-features` to time the
//! sequential fallback; the benchmark ids carry the mode so the two runs can
//! be compared side by side in `target/criterion`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use signlink::active::{select, Budget, FeatureSet, LogBase, Strategy};
use signlink::classify::fit_kstar;
use signlink::experiment::sample_train_mask;
use signlink::features::estimate_features;
use signlink::synth::{erdos_renyi, generate_labels, random_trolls, verify_alclog, LabelingModel};
use signlink::{Sign, SignedDigraph};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn workload(n: usize, p: f64) -> SignedDigraph {
    let g = erdos_renyi(n, p, 1).unwrap();
    let trolls = random_trolls(n, 0.2, 2);
    let base = generate_labels(&g, &LabelingModel::Consistent { trolls }, 0).unwrap();
    let labels = generate_labels(&g, &LabelingModel::PFlip { base, p: 0.1 }, 3).unwrap();
    g.relabeled(labels).unwrap()
}

/// (label, runner) pairs: each runner executes the closure under one
/// threading configuration.
#[allow(clippy::type_complexity)]
fn modes() -> Vec<(String, Box<dyn Fn(&mut (dyn FnMut() + Send))>)> {
    #[cfg(feature = "parallel")]
    {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let all = rayon::ThreadPoolBuilder::new().build().unwrap();
        let n = all.current_num_threads();
        let mut modes: Vec<(String, Box<dyn Fn(&mut (dyn FnMut() + Send))>)> =
            vec![("rayon-1".to_string(), Box::new(move |f: &mut (dyn FnMut() + Send)| one.install(f)))];
        if n > 1 {
            modes.push((format!("rayon-{n}"), Box::new(move |f: &mut (dyn FnMut() + Send)| all.install(f))));
        }
        modes
    }
    #[cfg(not(feature = "parallel"))]
    {
        vec![(signlink::par::MODE.to_string(), Box::new(|f: &mut (dyn FnMut() + Send)| f()))]
    }
}

fn bench(c: &mut Criterion) {
    let g = workload(20_000, 10.0 / 20_000.0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mask = sample_train_mask(&g, 0.5, &mut rng).unwrap();
    let feat = estimate_features(&g, &mask).unwrap();
    let train = mask.train_edges();
    let small = workload(2_000, 10.0 / 2_000.0);
    let strategy = Strategy { budget: Budget::Log, features: FeatureSet::Tu };

    let mut group = c.benchmark_group("throughput");
    group.sample_size(20);
    for (mode, run) in modes() {
        group.throughput(Throughput::Elements(g.edge_count() as u64));
        group.bench_function(BenchmarkId::new("estimate_features", &mode), |b| {
            b.iter(|| run(&mut || { std::hint::black_box(estimate_features(&g, &mask).unwrap()); }))
        });
        group.throughput(Throughput::Elements(train.len() as u64));
        group.bench_function(BenchmarkId::new("fit_kstar", &mode), |b| {
            b.iter(|| run(&mut || { std::hint::black_box(fit_kstar(&g, &feat, &train, Sign::Pos).unwrap()); }))
        });
        group.throughput(Throughput::Elements(g.node_count() as u64));
        group.bench_function(BenchmarkId::new("alclog_select", &mode), |b| {
            b.iter(|| run(&mut || { std::hint::black_box(select(&g, strategy, LogBase::Natural, 9)); }))
        });
        group.throughput(Throughput::Elements(100));
        group.bench_function(BenchmarkId::new("alclog_monte_carlo_100", &mode), |b| {
            b.iter(|| run(&mut || { std::hint::black_box(verify_alclog(&small, 100, 5).unwrap()); }))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
