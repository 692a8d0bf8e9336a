use std::path::Path;
use std::sync::Arc;

use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};
use crate::game::{Action, GameKind, GameState, Outcome, Player};
use crate::par::{self, Execution};
use crate::search::{AgentKind, Guide, SearchConfig, SearchTree, DEFAULT_ITERATIONS};
use crate::seed::{self, tags};

use super::{PayoffTable, Tally};

pub const DEFAULT_GAMES_PER_PAIR: usize = 120;

/// A tournament participant: a trained checkpoint or a search baseline.
#[derive(Debug, Clone)]
pub struct AgentSpec {
    pub name: String,
    pub kind: AgentKind,
    pub checkpoint: Option<Arc<Checkpoint>>,
}

impl AgentSpec {
    pub fn baseline(kind: AgentKind) -> Result<Self> {
        if kind == AgentKind::Exit {
            return Err(Error::InvalidConfig("an expert agent needs a checkpoint".into()));
        }
        Ok(AgentSpec {
            name: kind.name().to_string(),
            kind,
            checkpoint: None,
        })
    }

    pub fn expert(checkpoint: Checkpoint) -> Self {
        AgentSpec {
            name: checkpoint.label(),
            kind: AgentKind::Exit,
            checkpoint: Some(Arc::new(checkpoint)),
        }
    }

    /// `uct`, `mc-grave`, or a checkpoint path.
    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "uct" => AgentSpec::baseline(AgentKind::Uct),
            "mc-grave" => AgentSpec::baseline(AgentKind::McGrave),
            path => Checkpoint::load(Path::new(path)).map(AgentSpec::expert),
        }
    }

    pub fn check_game(&self, game: GameKind) -> Result<()> {
        match &self.checkpoint {
            Some(c) if c.game != game => Err(Error::InvalidConfig(format!(
                "agent '{}' was trained on {}, not {}",
                self.name, c.game, game
            ))),
            _ => Ok(()),
        }
    }

    fn guide(&self) -> Option<Guide<'_>> {
        self.checkpoint.as_ref().map(|c| Guide::new(&c.features, &c.params))
    }
}

/// Appends `#2`, `#3`, ... to repeated names so table labels are unique.
pub fn dedupe_names(agents: &mut [AgentSpec]) {
    let mut seen: Vec<String> = Vec::new();
    for a in agents.iter_mut() {
        let base = a.name.clone();
        let mut k = 1;
        while seen.contains(&a.name) {
            k += 1;
            a.name = format!("{base}#{k}");
        }
        seen.push(a.name.clone());
    }
}

#[derive(Debug, Clone)]
pub struct MatchSpec {
    pub game: GameKind,
    pub agents: [AgentSpec; 2],
    pub games: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl MatchSpec {
    pub fn new(game: GameKind, a: AgentSpec, b: AgentSpec, seed: u64) -> Self {
        MatchSpec {
            game,
            agents: [a, b],
            games: DEFAULT_GAMES_PER_PAIR,
            iterations: DEFAULT_ITERATIONS,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameRecord {
    /// Index into `MatchSpec::agents` of the agent playing player one.
    pub first: usize,
    pub outcome: Outcome,
    pub plies: u32,
}

impl GameRecord {
    /// Agent index of the winner, if any.
    pub fn winner(&self) -> Option<usize> {
        self.outcome.winner().map(|p| match p {
            Player::One => self.first,
            Player::Two => 1 - self.first,
        })
    }
}

fn play_game(spec: &MatchSpec, first: usize, game_seed: u64) -> Result<GameRecord> {
    let seats = [first, 1 - first];
    let configs = seats.map(|a| SearchConfig::new(spec.agents[a].kind));
    let mut rng = seed::rng(game_seed);
    let mut state = GameState::new(spec.game);
    let mut trees: [Option<SearchTree>; 2] = [None, None];
    let mut pending: [Vec<Action>; 2] = [Vec::new(), Vec::new()];
    while !state.is_terminal() {
        let seat = state.mover().index();
        let agent = &spec.agents[seats[seat]];
        let mut tree = match trees[seat].take() {
            Some(mut t) => {
                for a in pending[seat].drain(..) {
                    t.advance(a)?;
                }
                t
            }
            None => SearchTree::new(state.clone()),
        };
        pending[seat].clear();
        let result = tree.search(spec.iterations, &configs[seat], agent.guide(), &mut rng)?;
        let index = result.greedy_action(&mut rng).ok_or(Error::ZeroVisits)?;
        let action = result.actions[index];
        trees[seat] = Some(tree);
        state = state.apply(action)?;
        for p in &mut pending {
            p.push(action);
        }
    }
    Ok(GameRecord {
        first,
        outcome: state.utilities()?,
        plies: state.ply() as u32,
    })
}

/// Plays `spec.games` games, alternating seats: agent A is player one in
/// even-numbered games.
pub fn play_match(spec: &MatchSpec) -> Result<Vec<GameRecord>> {
    for a in &spec.agents {
        a.check_game(spec.game)?;
    }
    (0..spec.games)
        .map(|g| play_game(spec, g % 2, seed::derive(spec.seed, tags::MATCH, g as u64)))
        .collect()
}

/// All unordered pairs `(i, j)` with `i <= j`.
pub fn unordered_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

/// Round robin over all unordered pairs, self-pairs included. Each pair's
/// match is seeded from its position in the schedule, so the result does
/// not depend on `exec`.
pub fn tournament(
    agents: &[AgentSpec],
    game: GameKind,
    games_per_pair: usize,
    iterations: usize,
    seed: u64,
    exec: Execution,
) -> Result<PayoffTable> {
    if agents.is_empty() {
        return Err(Error::EmptyInput);
    }
    if games_per_pair == 0 || iterations == 0 {
        return Err(Error::InvalidConfig("games per pair and iterations must be positive".into()));
    }
    for a in agents {
        a.check_game(game)?;
    }
    let pairs: Vec<(usize, (usize, usize))> = unordered_pairs(agents.len()).into_iter().enumerate().collect();
    let results = par::try_map(exec, &pairs, |&(k, (i, j))| {
        let spec = MatchSpec {
            game,
            agents: [agents[i].clone(), agents[j].clone()],
            games: games_per_pair,
            iterations,
            seed: seed::derive(seed, tags::MATCH, k as u64),
        };
        play_match(&spec).map(|records| (i, j, records))
    })?;
    let n = agents.len();
    let mut tallies = vec![vec![Tally::default(); n]; n];
    for (i, j, records) in results {
        let ids = [i, j];
        for r in records {
            let cell = &mut tallies[ids[r.first]][ids[1 - r.first]];
            cell.games += 1;
            match r.outcome.winner() {
                Some(Player::One) => cell.p1_wins += 1,
                Some(Player::Two) => {}
                None => cell.draws += 1,
            }
        }
    }
    PayoffTable::from_tallies(agents.iter().map(|a| a.name.clone()).collect(), tallies)
}
