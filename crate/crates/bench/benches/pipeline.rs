use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wiregen_bench::{corrupted, markup, text_block, trees};
use wiregen_core::beautify::beautify;
use wiregen_core::render::render_svg;
use wiregen_core::{emit_dsl, lint_and_repair, optimize_typography, parse_dsl, LintConfig, RenderStyle};

fn typography(c: &mut Criterion) {
    let mut group = c.benchmark_group("typography");
    for words in [4, 8, 12, 24] {
        let (text, class, bbox) = text_block(words);
        group.bench_with_input(BenchmarkId::from_parameter(words), &text, |b, text| {
            b.iter(|| optimize_typography(black_box(text), class, bbox))
        });
    }
    group.finish();
}

fn dsl(c: &mut Criterion) {
    let trees = trees(50, 50);
    c.bench_function("emit_dsl/50 trees", |b| {
        b.iter(|| trees.iter().map(|t| emit_dsl(black_box(t)).len()).sum::<usize>())
    });
    let docs = markup(50, 50);
    c.bench_function("parse_dsl/50 documents", |b| {
        b.iter(|| {
            docs.iter()
                .map(|d| parse_dsl(black_box(d)).map(|p| p.len()).unwrap_or(0))
                .sum::<usize>()
        })
    });
}

fn repair(c: &mut Criterion) {
    let docs = corrupted(50);
    let cfg = LintConfig::default();
    c.bench_function("lint_and_repair/50 documents", |b| {
        b.iter(|| {
            docs.iter()
                .map(|d| lint_and_repair(black_box(d), &cfg).iterations)
                .sum::<usize>()
        })
    });
    c.bench_function("beautify+render/50 documents", |b| {
        b.iter(|| {
            docs.iter()
                .map(|d| {
                    let (clean, _) = beautify(black_box(d));
                    render_svg(&clean, &RenderStyle::default())
                        .map(|s| s.len())
                        .unwrap_or(0)
                })
                .sum::<usize>()
        })
    });
}

criterion_group!(benches, typography, dsl, repair);
criterion_main!(benches);
