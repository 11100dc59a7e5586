use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fairmdp_bench::{example1, example2, random_lp};
use fairmdp_core::lp::{solve_lp, ObjectiveSense};
use fairmdp_core::models::build_occupation_lp;
use fairmdp_core::{
    greedy_min_cover, lorenz_grid_cover, pareto_grid_cover, random_instance,
    two_phase_lorenz_cover, GridConfig, Space,
};

fn greedy(c: &mut Criterion) {
    let b = example2(30);
    for space in [Space::Pareto, Space::Lorenz] {
        c.bench_function(&format!("greedy/example2-30/{space}/eps0.05"), |bench| {
            bench.iter(|| greedy_min_cover(black_box(&b), 0.05, space).unwrap())
        });
    }
}

fn grids(c: &mut Criterion) {
    let b = example1(20);
    let cfg = GridConfig::for_backend(&b, 0.1).unwrap();
    c.bench_function("pareto-grid/example1-20/eps0.1", |bench| {
        bench.iter(|| pareto_grid_cover(black_box(&b), &cfg).unwrap())
    });
    let b = example2(30);
    let cfg = GridConfig::for_backend(&b, 0.1).unwrap();
    c.bench_function("lorenz-grid/example2-30/eps0.1", |bench| {
        bench.iter(|| lorenz_grid_cover(black_box(&b), &cfg).unwrap())
    });
}

fn lp_covers(c: &mut Criterion) {
    let mut g = c.benchmark_group("lp");
    g.sample_size(10);
    let b = random_lp(1, 8, 3, 2, false);
    let cfg = GridConfig::for_backend(&b, 0.1).unwrap();
    g.bench_function("lorenz-grid/8x3x2", |bench| {
        bench.iter(|| lorenz_grid_cover(black_box(&b), &cfg).unwrap())
    });
    let d = random_lp(1, 8, 3, 2, true);
    g.bench_function("lorenz-grid-mip/8x3x2", |bench| {
        bench.iter(|| lorenz_grid_cover(black_box(&d), &cfg).unwrap())
    });
    let b = random_lp(100, 20, 5, 3, false);
    let cfg = GridConfig::for_backend(&b, 0.1).unwrap();
    g.bench_function("lorenz-grid/20x5x3", |bench| {
        bench.iter(|| lorenz_grid_cover(black_box(&b), &cfg).unwrap())
    });
    g.bench_function("two-phase/20x5x3", |bench| {
        bench.iter(|| two_phase_lorenz_cover(black_box(&b), &cfg).unwrap())
    });
    let m = random_instance(100, 20, 5, 3).unwrap();
    let mut h = build_occupation_lp(&m);
    let objective = h.weighted_z(&[1.0, 1.0, 1.0]);
    h.model.set_objective(ObjectiveSense::Maximize, objective);
    g.bench_function("simplex/occupation-20x5", |bench| {
        bench.iter(|| solve_lp(black_box(&h.model)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, greedy, grids, lp_covers);
criterion_main!(benches);
