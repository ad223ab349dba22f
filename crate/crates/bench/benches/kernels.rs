use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use crowdflux_core::grid::{Grid, Grid1D, Grid2D, ScalarField};
use crowdflux_core::particles::{
    density_estimate, drift_celllist, drift_naive, BoxDomain, KernelSpec, ParticleEnsemble, Point, Species,
};
use crowdflux_core::{pde1d, pde2d, Limiter, Nonlinearity};
use std::hint::black_box;

fn lattice(n: usize, dim: usize) -> Vec<Point> {
    // low-discrepancy points in the unit box
    (0..n)
        .map(|i| {
            let a = (i as f64 * 0.618_033_988_749_895) % 1.0;
            let b = (i as f64 * 0.754_877_666_246_693) % 1.0;
            [a, if dim == 2 { b } else { 0.0 }]
        })
        .collect()
}

fn ensemble(n: usize, dim: usize, eps: f64) -> ParticleEnsemble {
    let d = BoxDomain::new([0.0, 0.0], [1.0, 1.0], dim).unwrap();
    let pts = lattice(n, dim);
    let shifted: Vec<Point> = pts.iter().map(|p| [1.0 - p[0], if dim == 2 { 1.0 - p[1] } else { 0.0 }]).collect();
    ParticleEnsemble::new(pts, shifted, d, KernelSpec::new(eps, dim).unwrap(), 1).unwrap()
}

fn drift(c: &mut Criterion) {
    let mut g = c.benchmark_group("drift_2d_eps0.02");
    for n in [500, 1000, 2000] {
        let e = ensemble(n, 2, 0.02);
        g.bench_with_input(BenchmarkId::new("naive", n), &e, |b, e| b.iter(|| drift_naive(black_box(e))));
        g.bench_with_input(BenchmarkId::new("celllist", n), &e, |b, e| b.iter(|| drift_celllist(black_box(e))));
    }
    g.finish();
}

fn rhs(c: &mut Criterion) {
    let g1 = Grid1D::new(-2.0, 2.0, 400).unwrap();
    let u = ScalarField::from_fn_1d(g1, |x| 0.05 + (-x * x * 4.0).exp());
    let v = ScalarField::from_fn_1d(g1, |x| 0.05 + (-(x - 0.3) * (x - 0.3) * 2.0).exp());
    c.bench_function("rhs_1d_400", |b| {
        b.iter(|| pde1d::rhs(black_box(&u), black_box(&v), Nonlinearity::Identity, Limiter::None).unwrap())
    });
    let g2 = Grid2D::new(0.0, 1.0, 0.0, 1.0, 64, 64).unwrap();
    let u = ScalarField::from_fn(g2, |p| 0.05 + (-((p[0] - 0.4).powi(2) + (p[1] - 0.5).powi(2)) * 30.0).exp());
    let v = ScalarField::from_fn(g2, |p| 0.05 + (-((p[0] - 0.6).powi(2) + (p[1] - 0.5).powi(2)) * 30.0).exp());
    c.bench_function("rhs_2d_64x64", |b| {
        b.iter(|| pde2d::rhs2d(black_box(&u), black_box(&v), Nonlinearity::Identity, Limiter::VanLeer).unwrap())
    });
}

fn kde(c: &mut Criterion) {
    let e = ensemble(2000, 2, 0.1);
    let grid: Grid = Grid2D::new(0.0, 1.0, 0.0, 1.0, 40, 40).unwrap().into();
    c.bench_function("kde_2d_2000_40x40", |b| {
        b.iter(|| density_estimate(black_box(&e), Species::Both, &grid, 0.15).unwrap())
    });
}

criterion_group!(benches, drift, rhs, kde);
criterion_main!(benches);
