use std::hint::black_box;

use coordplan_bench::{corner_config, maze, sweep_history, swept_belief};
use coordplan_core::belief::{BeliefTable, ConfidenceFactors};
use coordplan_core::game::oracle_episode_length;
use coordplan_core::mcts::search;
use coordplan_core::{plan_intent, EdgeCostModel, IntentTrajectory, PlannerParams, PlayerId, RewardScheme};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    let pair = maze(9);
    let config = corner_config(&pair);
    let belief = swept_belief(&pair);
    let intent = plan_intent(pair.side(PlayerId::E), &belief, config.init, config.goal, &EdgeCostModel::default());
    for iterations in [100, 400] {
        for (name, scheme, intent) in [
            ("none", RewardScheme::None, IntentTrajectory::empty()),
            ("discounted", RewardScheme::Discounted, intent.clone()),
        ] {
            let params = PlannerParams {
                iterations,
                scheme,
                ..PlannerParams::default()
            };
            group.bench_with_input(BenchmarkId::new(name, iterations), &params, |b, params| {
                b.iter(|| {
                    search(config.initial_state(), pair.side(PlayerId::E), &belief, &intent, config.goal, params).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn bench_intent(c: &mut Criterion) {
    let mut group = c.benchmark_group("plan_intent");
    for size in [9, 25] {
        let pair = maze(size);
        let config = corner_config(&pair);
        let belief = swept_belief(&pair);
        let costs = EdgeCostModel::default();
        group.bench_function(BenchmarkId::from_parameter(size), |b| {
            b.iter(|| plan_intent(pair.side(PlayerId::H), &belief, black_box(config.init), config.goal, &costs))
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    for size in [9, 25] {
        let pair = maze(size);
        let config = corner_config(&pair);
        group.bench_function(BenchmarkId::from_parameter(size), |b| {
            b.iter(|| oracle_episode_length(&pair, black_box(&config)).unwrap())
        });
    }
    group.finish();
}

fn bench_belief(c: &mut Criterion) {
    let pair = maze(9);
    let factors = ConfidenceFactors::default();
    c.bench_function("belief_ingest_sweep_9", |b| {
        b.iter_batched(
            || (BeliefTable::new(9, 9), sweep_history(&pair)),
            |(mut table, mut history)| {
                table.ingest_history(&mut history, &factors);
                table
            },
            criterion::BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_search, bench_intent, bench_oracle, bench_belief);
criterion_main!(benches);
