use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flatcg::{parse_str, run_analysis, AnalysisOptions};
use flatcg_bench::{synthetic, BANANAS, VISITOR};

fn fixtures(c: &mut Criterion) {
    for (name, src) in [("bananas", BANANAS), ("visitor", VISITOR)] {
        let p = parse_str(src).unwrap();
        c.bench_function(&format!("analyze/{name}"), |b| {
            b.iter(|| run_analysis(&p, p.entry_points(), AnalysisOptions::default()).unwrap())
        });
    }
    c.bench_function("parse/bananas", |b| b.iter(|| parse_str(BANANAS).unwrap()));
}

fn scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze/synthetic");
    for scale in [1, 2, 4, 8] {
        let p = parse_str(&synthetic(7, scale)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(scale), &p, |b, p| {
            b.iter(|| run_analysis(p, p.entry_points(), AnalysisOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fixtures, scaling);
criterion_main!(benches);
