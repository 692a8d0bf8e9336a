use rand::Rng as _;

use exitlab::eval::{
    aggregate, alpha_grid, alpha_rank, alpha_sweep, play_match, tournament, unordered_pairs, AgentSpec,
    AlphaRankResult, MatchSpec, PayoffTable,
};
use exitlab::game::GameKind;
use exitlab::par::Execution;
use exitlab::search::AgentKind;
use exitlab::seed;
use exitlab::train::{TrainConfig, Trainer, Variant};

fn table(names: &[&str], rates: Vec<Vec<f64>>) -> PayoffTable {
    PayoffTable::new(names.iter().map(|s| s.to_string()).collect(), rates).unwrap()
}

fn dominant() -> PayoffTable {
    table(&["A", "B"], vec![vec![0.5, 0.9], vec![0.1, 0.5]])
}

fn rps() -> PayoffTable {
    table(
        &["R", "P", "S"],
        vec![vec![0.5, 0.0, 1.0], vec![1.0, 0.5, 0.0], vec![0.0, 1.0, 0.5]],
    )
}

/// Fixation probability written in its textbook form, rescaled for
/// negative exponents.
fn oracle_fixation(delta: f64, alpha: f64, m: f64) -> f64 {
    let x = alpha * delta;
    if x == 0.0 {
        1.0 / m
    } else if x > 0.0 {
        (1.0 - (-x).exp()) / (1.0 - (-m * x).exp())
    } else {
        ((m * x).exp() - ((m - 1.0) * x).exp()) / ((m * x).exp() - 1.0)
    }
}

/// Two-role chain built profile by profile and solved by power iteration.
fn oracle_alpha_rank(w: &[Vec<f64>], alpha: f64, m: f64) -> Vec<f64> {
    let n = w.len();
    let eta = 1.0 / (2.0 * (n as f64 - 1.0));
    let idx = |i: usize, j: usize| i * n + j;
    let mut c = vec![vec![0.0; n * n]; n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if k != i {
                    // Player one switches i -> k against column j.
                    c[idx(i, j)][idx(k, j)] = eta * oracle_fixation(w[k][j] - w[i][j], alpha, m);
                }
                if k != j {
                    // Player two switches j -> k; its payoff is 1 - w.
                    let gain = (1.0 - w[i][k]) - (1.0 - w[i][j]);
                    c[idx(i, j)][idx(i, k)] = eta * oracle_fixation(gain, alpha, m);
                }
            }
            let out: f64 = c[idx(i, j)].iter().sum();
            c[idx(i, j)][idx(i, j)] = 1.0 - out;
        }
    }
    let mut pi = vec![1.0 / (n * n) as f64; n * n];
    for _ in 0..2_000_000 {
        let mut next = vec![0.0; n * n];
        for (a, row) in c.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                next[b] += pi[a] * x;
            }
        }
        let diff = next.iter().zip(&pi).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        pi = next;
        if diff < 1e-15 {
            break;
        }
    }
    pi
}

#[test]
fn dominant_profile_takes_the_mass() {
    let r = alpha_rank(&dominant(), 100.0, 50).unwrap();
    assert!(r.profile_mass(0, 0) >= 0.99, "{:?}", r.masses);
    assert!(r.residual < 1e-9);
    let oracle = oracle_alpha_rank(&dominant().rates, 100.0, 50.0);
    for (a, b) in r.masses.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!((r.agent_mass.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn rock_paper_scissors_is_cyclically_symmetric() {
    for alpha in [0.1, 1.0, 10.0, 100.0] {
        let r = alpha_rank(&rps(), alpha, 50).unwrap();
        assert!(r.residual < 1e-9);
        for i in 0..3 {
            for j in 0..3 {
                let shifted = r.profile_mass((i + 1) % 3, (j + 1) % 3);
                assert!((r.profile_mass(i, j) - shifted).abs() < 1e-9, "alpha {alpha}");
            }
        }
        for k in 0..3 {
            assert!((r.agent_mass[k] - 1.0 / 3.0).abs() < 1e-9);
        }
    }
}

#[test]
fn random_tables_match_power_iteration_oracle() {
    let mut rng = seed::rng(71);
    for _ in 0..20 {
        let n = rng.random_range(2..5);
        let rates: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
        let names: Vec<String> = (0..n).map(|k| format!("a{k}")).collect();
        let t = PayoffTable::new(names, rates.clone()).unwrap();
        let alpha = rng.random_range(0.1..5.0);
        let r = alpha_rank(&t, alpha, 20).unwrap();
        let oracle = oracle_alpha_rank(&rates, alpha, 20.0);
        assert!(r.residual < 1e-9);
        assert!((r.masses.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for (a, b) in r.masses.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }
}

#[test]
fn sweep_cases() {
    let d = alpha_sweep(&dominant(), 50, Execution::Sequential).unwrap();
    assert!(!d.warning);
    assert_eq!(d.alpha, alpha_grid()[0]);
    assert_eq!(d.top_profile(), (0, 0));

    let r = alpha_sweep(&rps(), 50, Execution::Sequential).unwrap();
    assert!(!r.warning);
    assert!(r.top_set().len().is_multiple_of(3));
    let p = alpha_sweep(&rps(), 50, Execution::Parallel).unwrap();
    assert_eq!(p, r);
}

fn result(agents: &[&str], masses: Vec<f64>) -> AlphaRankResult {
    let n = agents.len();
    let mut role_mass = [vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        for j in 0..n {
            role_mass[0][i] += masses[i * n + j];
            role_mass[1][j] += masses[i * n + j];
        }
    }
    let agent_mass = (0..n).map(|k| 0.5 * (role_mass[0][k] + role_mass[1][k])).collect();
    AlphaRankResult {
        agents: agents.iter().map(|s| s.to_string()).collect(),
        alpha: 1.0,
        population: 50,
        masses,
        role_mass,
        agent_mass,
        residual: 0.0,
        warning: false,
    }
}

#[test]
fn three_game_aggregation_matches_hand_totals() {
    let games = [
        result(&["a@1", "b@1"], vec![0.7, 0.1, 0.1, 0.1]),
        result(
            &["a@1", "a@51", "b@1"],
            vec![0.2, 0.0, 0.0, 0.0, 0.0, 0.3, 0.0, 0.5, 0.0],
        ),
        result(&["b@1", "c@1"], vec![0.1, 0.2, 0.3, 0.4]),
    ];
    let rows = aggregate(&games);
    let names: Vec<&str> = rows.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["a", "b", "c"]);
    let tops: Vec<usize> = rows.iter().map(|r| r.top_ranks).collect();
    assert_eq!(tops, [3, 1, 2]);
    let expected = [(0.8 + 0.6) / 3.0, (0.2 + 0.4 + 0.35) / 3.0, 0.65 / 3.0];
    for (r, e) in rows.iter().zip(expected) {
        assert!((r.mean_mass - e).abs() < 1e-12, "{}: {}", r.name, r.mean_mass);
    }
    assert!((rows.iter().map(|r| r.mean_mass).sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn uct_beats_or_draws_an_untrained_apprentice() {
    let trainer = Trainer::new(TrainConfig::new(GameKind::TicTacToe, Variant::Exit)).unwrap();
    let mut spec = MatchSpec::new(
        GameKind::TicTacToe,
        AgentSpec::baseline(AgentKind::Uct).unwrap(),
        AgentSpec::expert(trainer.checkpoint()),
        17,
    );
    spec.games = 100;
    let records = play_match(&spec).unwrap();
    let ok = records.iter().filter(|r| r.winner() != Some(1)).count();
    assert!(ok >= 90, "{ok}/100");
}

#[test]
fn seats_split_evenly() {
    let uct = AgentSpec::baseline(AgentKind::Uct).unwrap();
    let mut spec = MatchSpec::new(GameKind::TicTacToe, uct.clone(), uct, 3);
    spec.iterations = 5;
    let records = play_match(&spec).unwrap();
    assert_eq!(records.len(), 120);
    assert_eq!(records.iter().filter(|r| r.first == 0).count(), 60);
    spec.games = 2;
    let two = play_match(&spec).unwrap();
    assert_eq!([two[0].first, two[1].first], [0, 1]);
}

#[test]
fn tournament_schedule_and_determinism() {
    let one = vec![AgentSpec::baseline(AgentKind::Uct).unwrap()];
    let t = tournament(&one, GameKind::TicTacToe, 4, 10, 1, Execution::Sequential).unwrap();
    assert_eq!(t.tallies.as_ref().unwrap()[0][0].games, 4);

    let mut four: Vec<AgentSpec> = [AgentKind::Uct, AgentKind::McGrave, AgentKind::Uct, AgentKind::McGrave]
        .into_iter()
        .map(|k| AgentSpec::baseline(k).unwrap())
        .collect();
    exitlab::eval::dedupe_names(&mut four);
    assert_eq!(unordered_pairs(4).len(), 10);
    let a = tournament(&four, GameKind::TicTacToe, 6, 10, 5, Execution::Sequential).unwrap();
    let b = tournament(&four, GameKind::TicTacToe, 6, 10, 5, Execution::Parallel).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.tallies, b.tallies);
    let tallies = a.tallies.unwrap();
    let total: u32 = tallies.iter().flatten().map(|t| t.games).sum();
    assert_eq!(total, 10 * 6);
    for i in 0..4 {
        assert_eq!(tallies[i][i].games, 6);
        for j in 0..4 {
            if i != j {
                assert_eq!(tallies[i][j].games, 3);
            }
        }
    }
}
