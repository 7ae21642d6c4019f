use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use edgematch::clique::{build_conflict_graph, max_clique_heuristic, CliqueParams};
use edgematch::construct::{greedy_construct, Decomposition};
use edgematch::matching::{hungarian_solve, CostMatrix};
use edgematch::region::{solve_region, Region, RegionProblem, SolveMode};
use edgematch::Clock;
use edgematch_bench::{context_around, instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hungarian(c: &mut Criterion) {
    let mut group = c.benchmark_group("hungarian");
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for k in [16, 64, 128] {
        let rows = (0..k).map(|_| (0..k).map(|_| rng.gen_range(0..6)).collect()).collect();
        let m = CostMatrix::from_rows(rows).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &m, |b, m| b.iter(|| hungarian_solve(m)));
    }
    group.finish();
}

fn region_solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("region");
    let clock = Clock::wall();
    let inst = instance(8, 1);
    for (h, w) in [(1, 4), (2, 3), (2, 4)] {
        let region = Region::new(3, 3, 2 + h, 2 + w, inst.n).unwrap();
        let context = context_around(&inst, region, 7);
        let problem = RegionProblem::new(&inst, region, &context, SolveMode::MinimizeDefects);
        group.bench_function(format!("{h}x{w}"), |b| b.iter(|| solve_region(&problem, clock.unlimited()).unwrap()));
    }
    group.finish();
}

fn clique_heuristic(c: &mut Criterion) {
    let mut group = c.benchmark_group("clique");
    group.sample_size(10);
    let clock = Clock::wall();
    for n in [4, 5] {
        let inst = instance(n, 3);
        let graph = build_conflict_graph(&inst, None);
        let params = CliqueParams::new(200_000, 1);
        group.bench_function(format!("{n}x{n} q=200k"), |b| {
            b.iter(|| max_clique_heuristic(&graph.graph, &params, clock.deadline(Duration::from_secs(60))))
        });
    }
    group.finish();
}

fn greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy");
    group.sample_size(10);
    let clock = Clock::wall();
    for n in [6, 10] {
        let inst = instance(n, 0);
        let d = Decomposition::strips(n, 1).unwrap();
        group.bench_function(format!("{n}x{n} strips of 1"), |b| {
            b.iter(|| greedy_construct(&inst, &d, Duration::from_secs(10), &clock))
        });
    }
    group.finish();
}

criterion_group!(benches, hungarian, region_solver, clique_heuristic, greedy);
criterion_main!(benches);
