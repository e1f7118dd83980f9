use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use regreal_bench::pipeline_sources;
use regreal_core::analysis::graph_lookup;
use regreal_core::buchi::{determinize, DEFAULT_STATE_CAP};
use regreal_core::convert::{pwl_to_buchi, Pipeline, PipelineConfig};
use regreal_core::corpus::{delta_counted, f_tilde, StreamingEvaluator};
use regreal_core::digits::{canonical_expansion, rat};
use regreal_core::transducer::eval_exact_rational;
use regreal_core::BinaryWord;

fn pipeline_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline_build");
    group.sample_size(10);
    let config = PipelineConfig::default();
    for (name, f) in pipeline_sources() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &f, |b, f| {
            b.iter(|| Pipeline::build(black_box(f), &config).unwrap())
        });
    }
    group.finish();
}

fn graph_stages(c: &mut Criterion) {
    let mut group = c.benchmark_group("graph");
    for (name, f) in pipeline_sources() {
        let normalized = f.normalize_range().unwrap();
        group.bench_with_input(
            BenchmarkId::new("pwl_to_buchi", name),
            &normalized,
            |b, f| b.iter(|| pwl_to_buchi(black_box(f), DEFAULT_STATE_CAP).unwrap()),
        );
        let graph = pwl_to_buchi(&normalized, DEFAULT_STATE_CAP).unwrap();
        group.bench_with_input(BenchmarkId::new("determinize", name), &graph, |b, a| {
            b.iter(|| determinize(black_box(a), DEFAULT_STATE_CAP).unwrap())
        });
        let x = canonical_expansion(&rat(5, 7)).unwrap();
        group.bench_with_input(BenchmarkId::new("graph_lookup", name), &graph, |b, a| {
            b.iter(|| graph_lookup(black_box(a), &x).unwrap())
        });
    }
    group.finish();
}

fn exact_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval_exact_rational");
    let config = PipelineConfig::default();
    for (name, f) in pipeline_sources() {
        let p = Pipeline::build(&f, &config).unwrap();
        for (label, x) in [("1/3", rat(1, 3)), ("5/47", rat(5, 47))] {
            let w = canonical_expansion(&x).unwrap().map(|b| b as i8);
            group.bench_with_input(BenchmarkId::new(name, label), &w, |b, w| {
                b.iter(|| eval_exact_rational(&p.ad, black_box(w)).unwrap())
            });
        }
    }
    group.finish();
}

fn witnesses(c: &mut Criterion) {
    let mut group = c.benchmark_group("witness");
    for len in [16usize, 64, 256] {
        // 0^{n-1} 1 0^n ...: the longest scan for both evaluators.
        let n = len / 4;
        let bits: Vec<u8> = (1..=len).map(|p| u8::from(p == n)).collect();
        let sigma = BinaryWord::new(bits).unwrap();
        group.bench_with_input(BenchmarkId::new("delta", len), &sigma, |b, s| {
            b.iter(|| delta_counted(black_box(s)))
        });
        group.bench_with_input(BenchmarkId::new("ftilde", len), &sigma, |b, s| {
            b.iter(|| f_tilde().eval_word(black_box(s), s.len()))
        });
    }
    group.finish();
}

criterion_group!(benches, pipeline_build, graph_stages, exact_eval, witnesses);
criterion_main!(benches);
