use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lacelab::gamma::{geometric_grid, MajorantFamily};
use lacelab::lace::weights::j_bruteforce_with;
use lacelab::lace::{ConnectedGraphs, Contacts, Path};
use lacelab::mc::{fill_standard_normal, sample_rng};
use lacelab::saw::{estimate_cn_all, SawParams};
use lacelab::spectral::{mixture_hat, RadialGrid};
use lacelab::Exec;
use std::hint::black_box;

fn modes() -> Vec<(&'static str, Exec)> {
    let mut m = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    m.push(("parallel", Exec::Parallel));
    m
}

fn saw_cn(c: &mut Criterion) {
    let params = SawParams { d: 5, lambda: 0.1, rho: 1.0, n: 5, seed: 1, n_samples: 40_000 };
    let mut g = c.benchmark_group("saw_cn");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| estimate_cn_all(black_box(&params), e).unwrap())
        });
    }
    g.finish();
}

fn bruteforce_j(c: &mut Criterion) {
    let mut rng = sample_rng(7, 0);
    let mut inc = vec![0.0; 5 * 3];
    fill_standard_normal(&mut rng, &mut inc);
    let path = Path::from_increments(3, &inc).unwrap();
    let contacts = Contacts::new(&path, 1.5);
    let graphs = ConnectedGraphs::new(5, Exec::default()).unwrap();
    let mut g = c.benchmark_group("bruteforce_j");
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| j_bruteforce_with(&graphs, black_box(&contacts), 0, 0.5, e))
        });
    }
    g.finish();
}

fn radius_batch(c: &mut Criterion) {
    let mix = MajorantFamily::power_law(2.5, 5).unwrap().gamma(8);
    let grid = RadialGrid::for_min_variance(mix.min_variance().unwrap()).unwrap().shared();
    let hat = mixture_hat(&mix, &grid);
    let radii = geometric_grid(1e-2, 20.0, 512);
    let mut g = c.benchmark_group("inverse_radius_batch");
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| hat.inverse_batch(black_box(&radii), 5, e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, saw_cn, bruteforce_j, radius_batch);
criterion_main!(benches);
