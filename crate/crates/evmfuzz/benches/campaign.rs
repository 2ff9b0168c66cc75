//! Campaign throughput: one isolated session per contract, scheduled
//! sequentially or data-parallel across the corpus with rayon.
//!
//! Run with `cargo bench -p evmfuzz`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use evmfuzz::campaign::{run_campaign_with_artifacts, CampaignConfig, ExecutionMode};
use evmfuzz::corpus::{load_corpus, ContractArtifact};
use evmfuzz::fixtures;

fn fixture_artifacts() -> Vec<ContractArtifact> {
    let dir = tempfile::tempdir().expect("tempdir");
    fixtures::write_corpus(dir.path()).expect("materialize fixtures");
    load_corpus(dir.path()).expect("load fixtures")
}

fn bench_campaign(c: &mut Criterion) {
    let artifacts = fixture_artifacts();
    let mut group = c.benchmark_group("campaign");
    group.sample_size(10);

    for max_calls in [50usize, 200] {
        let config = CampaignConfig {
            max_calls_per_contract: max_calls,
            ..CampaignConfig::default()
        };

        group.bench_with_input(
            BenchmarkId::new("sequential", max_calls),
            &config,
            |b, config| {
                b.iter(|| {
                    run_campaign_with_artifacts(config, &artifacts, ExecutionMode::Sequential)
                        .expect("campaign runs")
                })
            },
        );

        #[cfg(feature = "parallel")]
        group.bench_with_input(
            BenchmarkId::new("parallel", max_calls),
            &config,
            |b, config| {
                b.iter(|| {
                    run_campaign_with_artifacts(config, &artifacts, ExecutionMode::Parallel)
                        .expect("campaign runs")
                })
            },
        );
    }
    group.finish();
}

fn bench_single_session(c: &mut Criterion) {
    let artifacts = fixture_artifacts();
    let config = CampaignConfig { max_calls_per_contract: 100, ..CampaignConfig::default() };
    let prepared = evmfuzz::campaign::prepare_campaign(&artifacts, &config);
    let bounty = prepared
        .contracts
        .iter()
        .position(|contract| contract.name == "bounty_hunt")
        .expect("bounty fixture present");

    c.bench_function("session/bounty_hunt_100_calls", |b| {
        b.iter(|| evmfuzz::campaign::run_contract_session(&prepared, bounty, &config, false))
    });
}

criterion_group!(benches, bench_campaign, bench_single_session);
criterion_main!(benches);
