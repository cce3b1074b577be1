use criterion::{criterion_group, criterion_main, Criterion};
use wcs_core::calculus::{QuadratureSpec, Rule};
use wcs_core::cs::{cs_class, CSConfig};
use wcs_core::exec::Strategy;
use wcs_core::geometry::BergerMetric;

fn config(strategy: Strategy) -> CSConfig {
    let quad = QuadratureSpec::new(4096, 1e-8, Rule::Simpson)
        .unwrap()
        .with_strategy(strategy);
    CSConfig::new(1.0, quad, 1e-3).unwrap()
}

fn class_value(c: &mut Criterion) {
    let m = BergerMetric::paper_family(2).unwrap();
    let mut group = c.benchmark_group("cs_class_a2_n4096");
    group.sample_size(10);
    for (name, strategy) in [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)] {
        let cfg = config(strategy);
        group.bench_function(name, |b| b.iter(|| cs_class(&m, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, class_value);
criterion_main!(benches);
