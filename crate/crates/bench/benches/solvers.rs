use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hbm::boundary_poincare::{bh_planar_estimate, reilly_residual, Domain, HarmonicBasis, Parity, PlanarBoundary};
use hbm::brunn_minkowski::mixed_volume;
use hbm::hbm_spectrum::{assemble, even_gap, solve_spectrum};
use hbm::poly::Poly2;
use hbm::stability::{analyze_fields, deficits, PChoice};
use hbm_bench::{body, field, grid};
use std::hint::black_box;

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("even_gap");
    for d in ["s1:N=512", "s1:N=2048", "s2:L=3", "s2:L=4"] {
        let gr = grid(d);
        let k = field(if gr.dim() == 2 { "ellipsoid:a=2,b=1" } else { "ellipsoid:a=2,b=1,c=0.7" }, &gr);
        g.bench_with_input(BenchmarkId::from_parameter(d), &k, |b, k| {
            b.iter(|| even_gap(&assemble(black_box(k)).unwrap()).unwrap().lambda_1e)
        });
    }
    g.finish();

    let gr = grid("s1:N=512");
    let forms = assemble(&field("lq:q=6", &gr)).unwrap();
    c.bench_function("full_spectrum/lq6/s1:N=512/k=8", |b| {
        b.iter(|| solve_spectrum(black_box(&forms), 8, false).unwrap())
    });
}

fn volumes(c: &mut Criterion) {
    let gr = grid("s1:N=1024");
    let (k, l) = (field("ellipsoid:a=2,b=1", &gr), field("lq:q=4", &gr));
    c.bench_function("mixed_volume/s1:N=1024", |b| b.iter(|| mixed_volume(&[black_box(&k), black_box(&l)]).unwrap()));
    let gr = grid("s2:L=4");
    let (k, l) = (field("ellipsoid:a=2,b=1,c=0.7", &gr), field("ball", &gr));
    c.bench_function("mixed_volume/s2:L=4", |b| b.iter(|| mixed_volume(&[&k, &k, black_box(&l)]).unwrap()));
}

fn boundary(c: &mut Criterion) {
    let square = PlanarBoundary::from_spec(&body("lq:q=inf", 2)).unwrap();
    let basis = HarmonicBasis::new(8, Parity::Even).unwrap();
    c.bench_function("bh_planar_estimate/square/deg8", |b| {
        b.iter(|| bh_planar_estimate(black_box(&square), &basis).unwrap())
    });
    let u = Poly2::parse("x^10 - 2*x^3*y^7 + y^6 + 1").unwrap();
    c.bench_function("reilly/square/deg10", |b| b.iter(|| reilly_residual(Domain::Square, black_box(&u)).unwrap()));
}

fn stability(c: &mut Criterion) {
    let gr = grid("s1:N=512");
    let (k, l) = (field("ellipsoid:a=1.5,b=0.7", &gr), field("lq:q=4", &gr));
    c.bench_function("stability/analyze/auto", |b| {
        b.iter(|| analyze_fields(black_box(&k), &l, PChoice::Auto).unwrap())
    });
    let (ks, ls) = (body("ellipsoid:a=1.5,b=0.7", 2), body("lq:q=4", 2));
    c.bench_function("stability/deficits", |b| b.iter(|| deficits(black_box(&ks), &ls).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = spectra, volumes, boundary, stability
}
criterion_main!(benches);
