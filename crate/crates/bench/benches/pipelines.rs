use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use spherecurve::classification::{caustic_cloud, classify_component};
use spherecurve::curve_model::make_circle_n;
use spherecurve::good_bands::{band_from_condensed, retract_to_good};
use spherecurve::grafting::{graft_antipodal_circles, graft_simplex_step};
use spherecurve::sphere_core::hemisphere_margin;
use spherecurve::{CurvatureBounds, ToleranceProfile};

fn classify(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let mut g = c.benchmark_group("classify");
    g.sample_size(20);
    for n in [256usize, 1024] {
        let curve = make_circle_n(0.8, 3, CurvatureBounds::lower(0.0).unwrap(), n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &curve, |b, curve| {
            b.iter(|| classify_component(black_box(curve), &tol).unwrap())
        });
    }
    g.finish();
}

fn caustic_lp(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let mut g = c.benchmark_group("hemisphere_margin");
    let condensed = make_circle_n(1.0, 2, CurvatureBounds::lower(-1.0).unwrap(), 1024).unwrap();
    let diffuse = make_circle_n(0.3, 2, CurvatureBounds::lower(-1.0).unwrap(), 1024).unwrap();
    for (name, curve) in [("condensed", condensed), ("diffuse", diffuse)] {
        let cloud = caustic_cloud(&curve, &tol).points;
        g.bench_function(name, |b| b.iter(|| hemisphere_margin(black_box(&cloud))));
    }
    g.finish();
}

fn graft(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let curve = make_circle_n(0.3, 2, CurvatureBounds::lower(-1.0).unwrap(), 256).unwrap();
    let mut g = c.benchmark_group("graft");
    g.sample_size(20);
    g.bench_function("antipodal", |b| b.iter(|| graft_antipodal_circles(black_box(&curve), 0.5, &tol).unwrap()));
    g.bench_function("simplex", |b| b.iter(|| graft_simplex_step(black_box(&curve), 0.5, &tol).unwrap()));
    g.finish();
}

fn retract(c: &mut Criterion) {
    let tol = ToleranceProfile { band_k: 1024, ..ToleranceProfile::default() };
    let curve = make_circle_n(1.2, 2, CurvatureBounds::lower(-1.0).unwrap(), 256).unwrap();
    let band = band_from_condensed(&curve, &tol).unwrap();
    let mut g = c.benchmark_group("retract");
    g.sample_size(10);
    g.bench_function("circle k=2", |b| b.iter(|| retract_to_good(black_box(&band), &tol).unwrap()));
    g.finish();
}

criterion_group!(benches, classify, caustic_lp, graft, retract);
criterion_main!(benches);
