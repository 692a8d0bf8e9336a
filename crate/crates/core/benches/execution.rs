use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng as _;

use exitlab::eval::{alpha_sweep, tournament, AgentSpec, PayoffTable};
use exitlab::game::GameKind;
use exitlab::par::Execution;
use exitlab::search::AgentKind;
use exitlab::seed;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_tournament(c: &mut Criterion) {
    let agents = vec![
        AgentSpec::baseline(AgentKind::Uct).unwrap(),
        AgentSpec::baseline(AgentKind::McGrave).unwrap(),
        AgentSpec::baseline(AgentKind::Uct).unwrap(),
        AgentSpec::baseline(AgentKind::McGrave).unwrap(),
    ];
    let mut group = c.benchmark_group("tournament_tictactoe");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| tournament(&agents, GameKind::TicTacToe, 4, 100, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let n = 6;
    let mut rng = seed::rng(3);
    let rates = (0..n).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
    let table = PayoffTable::new((0..n).map(|i| format!("a{i}")).collect(), rates).unwrap();
    let mut group = c.benchmark_group("alpha_sweep_6_agents");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| alpha_sweep(&table, 50, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_tournament, bench_sweep);
criterion_main!(benches);
