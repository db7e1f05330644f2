use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use resolvkit::blowup::{strict_transform_hypersurface, Center, ChartMap};
use resolvkit::bundled::{find, EXAMPLES};
use resolvkit::faa_di_bruno::{compose_coefficient, CoefficientTable};
use resolvkit::parse::parse_polynomial;
use resolvkit::resolve::Config;
use resolvkit::series::substitute;
use resolvkit::{Multiindex, PolyMap};

fn kernels(c: &mut Criterion) {
    let t = 12;
    let f = parse_polynomial("1 + u + u*v + u^2*v^2 - v^3", t).unwrap().jet;
    let g = PolyMap::new(vec![
        parse_polynomial("x1 + x2^2 - x1*x2", t).unwrap().jet,
        parse_polynomial("x2 + 2*x1^3", t).unwrap().jet,
    ])
    .unwrap();
    c.bench_function("substitute 2x2 at T=12", |b| b.iter(|| substitute(black_box(&f), black_box(&g)).unwrap()));

    let ft = CoefficientTable::from_jet(&f);
    let gt: Vec<_> = g.components().iter().map(CoefficientTable::from_jet).collect();
    let gamma = Multiindex(vec![3, 3]);
    c.bench_function("compose_coefficient |γ|=6", |b| {
        b.iter(|| compose_coefficient(black_box(&ft), black_box(&gt), black_box(&gamma)).unwrap())
    });

    let h = parse_polynomial("x^2 + y^2 - z^2 + x*y*z", 16).unwrap().jet;
    let chart = ChartMap::new(Center::new(vec![0, 1, 2], 3).unwrap(), 2, 3).unwrap();
    c.bench_function("strict transform, 3 variables", |b| {
        b.iter(|| strict_transform_hypersurface(black_box(&h), black_box(&chart)).unwrap())
    });
}

fn resolutions(c: &mut Criterion) {
    let mut group = c.benchmark_group("resolve");
    group.sample_size(10);
    for name in ["cusp", "e8", "two-cusps", "cone", "cubic-cone", "cusp-and-axis"] {
        let ex = find(name).expect("bundled");
        group.bench_with_input(BenchmarkId::from_parameter(name), ex, |b, ex| b.iter(|| ex.run(&Config::default()).unwrap()));
    }
    group.finish();
    let mut all = c.benchmark_group("bundled");
    all.sample_size(10);
    all.bench_function("all examples, serial", |b| {
        b.iter(|| EXAMPLES.iter().map(|e| e.run(&Config::default()).unwrap().blowups).sum::<usize>())
    });
    all.finish();
}

criterion_group!(benches, kernels, resolutions);
criterion_main!(benches);
