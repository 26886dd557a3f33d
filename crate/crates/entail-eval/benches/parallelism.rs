//! Sequential fallback vs. rayon pool on the crate's batch-shaped
//! workloads: the replay evaluation pipeline, token-F1 scoring, and
//! pairwise corpus BLEU. Run with `cargo bench`.

use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use entail_eval::entailment::token_f1;
use entail_eval::gateway::{Gateway, TranscriptCache};
use entail_eval::harness::{ingest, run_evaluate, DatasetFile, DatasetFormat, RunOptions};
use entail_eval::model::{BackendConfig, EvalItem};
use entail_eval::parallel::{map_items, map_items_sequential};
use entail_eval::stats::corpus_bleu;

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// The ten fixture items replicated under fresh ids. Transcript keys do not
/// depend on item ids, so every copy still answers from the replay cache.
fn replicated_items(copies: usize) -> Vec<EvalItem> {
    let dataset = DatasetFile {
        path: fixtures_dir().join("eval10.jsonl"),
        format: DatasetFormat::Normalized,
        field_map: None,
    };
    let base = ingest(&dataset, 0.0).expect("fixture dataset").items;
    let mut items = Vec::with_capacity(base.len() * copies);
    for copy in 0..copies {
        for item in &base {
            let mut item = item.clone();
            item.id = format!("{}-{copy}", item.id);
            items.push(item);
        }
    }
    items
}

fn bench_pipeline(c: &mut Criterion) {
    let cache = TranscriptCache::load_read_only(&fixtures_dir().join("replay_cache.jsonl"))
        .expect("fixture cache");
    let gateway = Gateway::replay_only(cache);
    let config = BackendConfig::default();
    let items = replicated_items(8);

    let mut group = c.benchmark_group("pipeline_replay");
    group.sample_size(10);
    group.throughput(Throughput::Elements(items.len() as u64));
    for workers in [1usize, 8] {
        group.bench_with_input(BenchmarkId::new("workers", workers), &workers, |b, &workers| {
            let options = RunOptions { workers, ordering: false, ..RunOptions::default() };
            b.iter(|| run_evaluate(&gateway, items.clone(), &config, &options).unwrap());
        });
    }
    group.finish();
}

fn bench_token_f1(c: &mut Criterion) {
    let pairs: Vec<(String, Vec<String>)> = (0..20_000)
        .map(|i| {
            let candidate = format!("the answer {i} lies on island {} near the coast", i % 7);
            let golds = vec![
                format!("island {}", i % 7),
                format!("on the coast near island {}", (i + 1) % 7),
            ];
            (candidate, golds)
        })
        .collect();

    let mut group = c.benchmark_group("token_f1_batch");
    group.throughput(Throughput::Elements(pairs.len() as u64));
    group.bench_function("sequential", |b| {
        b.iter(|| map_items_sequential(pairs.clone(), |(c, g)| token_f1(&c, &g)));
    });
    group.bench_function("parallel", |b| {
        b.iter(|| map_items(pairs.clone(), 8, |(c, g)| token_f1(&c, &g)));
    });
    group.finish();
}

fn bench_pairwise_bleu(c: &mut Criterion) {
    let corpora: Vec<Vec<String>> = (0..6)
        .map(|seed| {
            (0..400)
                .map(|i| {
                    format!(
                        "statement {i} claims the show is filmed on island {} of region {seed}",
                        (i * 7 + seed) % 11
                    )
                })
                .collect()
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..corpora.len())
        .flat_map(|a| ((a + 1)..corpora.len()).map(move |b| (a, b)))
        .collect();

    let mut group = c.benchmark_group("pairwise_bleu");
    group.sample_size(20);
    group.throughput(Throughput::Elements(pairs.len() as u64));
    group.bench_function("sequential", |b| {
        b.iter(|| {
            map_items_sequential(pairs.clone(), |(x, y)| {
                corpus_bleu(&corpora[x], &corpora[y]).unwrap()
            })
        });
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            map_items(pairs.clone(), 8, |(x, y)| corpus_bleu(&corpora[x], &corpora[y]).unwrap())
        });
    });
    group.finish();
}

criterion_group!(benches, bench_pipeline, bench_token_f1, bench_pairwise_bleu);
criterion_main!(benches);
