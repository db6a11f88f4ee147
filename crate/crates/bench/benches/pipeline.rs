use criterion::{black_box, criterion_group, criterion_main, Criterion};

use sqlsmell_bench::synthetic_corpus;
use sqlsmell_core::config::BuildConfig;
use sqlsmell_core::context::build_context;
use sqlsmell_core::pipeline::{analyze_sql, AnalysisOptions};
use sqlsmell_core::rules::detect_all;
use sqlsmell_core::{parse_corpus, rank, MetricsTable, RankingConfig};

fn bench_parse(c: &mut Criterion) {
    let corpus = synthetic_corpus(20, 400);
    c.bench_function("parse_corpus_420_statements", |b| {
        b.iter(|| parse_corpus(black_box(&corpus), "bench"))
    });
}

fn bench_detect(c: &mut Criterion) {
    let corpus = synthetic_corpus(20, 400);
    let statements = parse_corpus(&corpus, "bench");
    let ctx = build_context(statements.clone(), None, BuildConfig::default());
    c.bench_function("detect_all_420_statements", |b| {
        b.iter(|| detect_all(black_box(&statements), black_box(&ctx)))
    });
}

fn bench_rank(c: &mut Criterion) {
    let corpus = synthetic_corpus(20, 400);
    let statements = parse_corpus(&corpus, "bench");
    let ctx = build_context(statements.clone(), None, BuildConfig::default());
    let findings = detect_all(&statements, &ctx);
    let cfg = RankingConfig::preset_c1();
    let metrics = MetricsTable::default();
    c.bench_function("rank_findings", |b| {
        b.iter(|| rank(black_box(&findings), &cfg, &metrics).unwrap())
    });
}

fn bench_end_to_end(c: &mut Criterion) {
    let corpus = synthetic_corpus(10, 100);
    let opts = AnalysisOptions::default();
    c.bench_function("analyze_110_statements", |b| {
        b.iter(|| analyze_sql(black_box(&corpus), "bench", &opts).unwrap())
    });
}

criterion_group!(benches, bench_parse, bench_detect, bench_rank, bench_end_to_end);
criterion_main!(benches);
