use criterion::{criterion_group, criterion_main, Criterion};
use lemmaforge_bench::corpus;
use lemmaforge_core::pipeline::{check_source, elaborate_source, load, vcgen_source};
use lemmaforge_core::smtbackend::encode;
use lemmaforge_core::VcOptions;
use std::hint::black_box;

fn stages(c: &mut Criterion) {
    let files = corpus();
    let mut g = c.benchmark_group("corpus");
    g.bench_function("parse", |b| {
        b.iter(|| files.iter().map(|(n, t)| load(black_box(t), n).unwrap().decls.len()).sum::<usize>())
    });
    g.bench_function("check", |b| b.iter(|| files.iter().for_each(|(n, t)| drop(check_source(black_box(t), n).unwrap()))));
    g.bench_function("elaborate", |b| {
        b.iter(|| files.iter().for_each(|(n, t)| drop(elaborate_source(black_box(t), n).unwrap())))
    });
    g.bench_function("vcgen", |b| {
        b.iter(|| {
            files
                .iter()
                .map(|(n, t)| vcgen_source(black_box(t), n, VcOptions::default()).unwrap().1.iter().map(|f| f.vcs.len()).sum::<usize>())
                .sum::<usize>()
        })
    });
    g.finish();

    let (name, text) = files.iter().find(|(n, _)| n == "strchrnul.c").unwrap();
    let units = vcgen_source(text, name, VcOptions::default()).unwrap().1;
    c.bench_function("encode strchrnul", |b| {
        b.iter(|| units.iter().flat_map(|f| f.vcs.iter().map(move |v| encode(f, v).unwrap().len())).sum::<usize>())
    });
}

criterion_group!(benches, stages);
criterion_main!(benches);
