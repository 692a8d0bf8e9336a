//! Monte-Carlo tree search: the apprentice-guided PUCT expert and the UCT and
//! MC-GRAVE baselines.
//!
//! Each iteration selects down the tree, expands a single node, plays out to
//! the end of the game and backs up the terminal utilities. Edge statistics
//! are stored from the perspective of the player to move at the edge's
//! parent, so backing up is negamax by construction.

use std::collections::HashMap;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::features::FeatureSets;
use crate::game::{Action, GameState, Outcome, Player};
use crate::policy::{softmax_into, PolicyParams};
use crate::seed::Rng;

pub const DEFAULT_ITERATIONS: usize = 800;
pub const DEFAULT_C_PUCT: f64 = 2.5;
pub const UNVISITED_GRAVE_VALUE: f64 = 10_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentKind {
    Exit,
    Uct,
    McGrave,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Exit => "exit",
            AgentKind::Uct => "uct",
            AgentKind::McGrave => "mc-grave",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub kind: AgentKind,
    pub c_puct: f64,
    pub uct_c: f64,
    pub grave_ref: u32,
    pub grave_bias: f64,
}

impl SearchConfig {
    pub fn new(kind: AgentKind) -> Self {
        SearchConfig {
            kind,
            c_puct: DEFAULT_C_PUCT,
            uct_c: std::f64::consts::SQRT_2,
            grave_ref: 100,
            grave_bias: 1e-6,
        }
    }
}

/// Apprentice used by the PUCT expert for priors and playouts.
#[derive(Debug, Clone, Copy)]
pub struct Guide<'a> {
    pub features: &'a FeatureSets,
    pub params: [&'a PolicyParams; 2],
}

impl<'a> Guide<'a> {
    pub fn new(features: &'a FeatureSets, params: &'a [PolicyParams; 2]) -> Self {
        Guide {
            features,
            params: [&params[0], &params[1]],
        }
    }

    fn distribution_into(&self, state: &GameState, actions: &[Action], logits: &mut Vec<f64>, out: &mut Vec<f64>) {
        let player = state.mover();
        self.features
            .get(player)
            .logits_into(state, actions, &self.params[player.index()].theta, logits);
        softmax_into(logits, out);
    }
}

/// Read-only view of one node's edge statistics.
#[derive(Debug, Clone, Copy)]
pub struct NodeStats<'a> {
    pub visits: &'a [u32],
    pub value_sums: &'a [f64],
    pub priors: &'a [f64],
    /// Value used for unvisited edges: the node's own mean value.
    pub parent_estimate: f64,
}

impl NodeStats<'_> {
    fn q(&self, a: usize) -> f64 {
        if self.visits[a] == 0 {
            self.parent_estimate
        } else {
            self.value_sums[a] / self.visits[a] as f64
        }
    }

    fn total_visits(&self) -> u64 {
        self.visits.iter().map(|&n| n as u64).sum()
    }
}

/// Index of a maximal score; exact ties are broken uniformly at random.
pub fn argmax_random_tie(scores: impl IntoIterator<Item = f64>, rng: &mut Rng) -> Option<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = None;
    let mut ties = 0u32;
    for (i, s) in scores.into_iter().enumerate() {
        if s > best || best_idx.is_none() {
            best = s;
            best_idx = Some(i);
            ties = 1;
        } else if s == best {
            ties += 1;
            if rng.random_range(0..ties) == 0 {
                best_idx = Some(i);
            }
        }
    }
    best_idx
}

pub fn puct_scores(stats: &NodeStats, c: f64) -> Vec<f64> {
    let sqrt_total = (stats.total_visits() as f64).sqrt();
    (0..stats.visits.len())
        .map(|a| stats.q(a) + c * stats.priors[a] * sqrt_total / (1.0 + stats.visits[a] as f64))
        .collect()
}

pub fn puct_select(stats: &NodeStats, c: f64, rng: &mut Rng) -> Result<usize> {
    argmax_random_tie(puct_scores(stats, c), rng).ok_or(Error::TerminalState)
}

/// UCB1; unvisited edges use the parent estimate and the exploration term of
/// a single visit.
pub fn uct_scores(stats: &NodeStats, c: f64) -> Vec<f64> {
    let log_total = (stats.total_visits().max(1) as f64).ln();
    (0..stats.visits.len())
        .map(|a| stats.q(a) + c * (log_total / stats.visits[a].max(1) as f64).sqrt())
        .collect()
}

pub fn uct_select(stats: &NodeStats, c: f64, rng: &mut Rng) -> Result<usize> {
    argmax_random_tie(uct_scores(stats, c), rng).ok_or(Error::TerminalState)
}

/// GRAVE blend of an edge's mean with all-moves-as-first statistics:
/// `beta = amaf_n / (amaf_n + n + bias * amaf_n * n)`.
pub fn grave_value(visits: u32, value_sum: f64, amaf_visits: u32, amaf_sum: f64, bias: f64) -> f64 {
    let n = visits as f64;
    let an = amaf_visits as f64;
    let mean = if visits > 0 { value_sum / n } else { 0.0 };
    if amaf_visits == 0 {
        return mean;
    }
    let beta = an / (an + n + bias * an * n);
    (1.0 - beta) * mean + beta * (amaf_sum / an)
}

/// Greedy GRAVE selection without exploration term. `amaf[a]` holds the
/// reference node's (count, value sum) for edge `a`'s move.
pub fn grave_select(stats: &NodeStats, amaf: &[(u32, f64)], bias: f64, rng: &mut Rng) -> Result<usize> {
    let scores = (0..stats.visits.len()).map(|a| {
        if stats.visits[a] == 0 {
            UNVISITED_GRAVE_VALUE
        } else {
            grave_value(stats.visits[a], stats.value_sums[a], amaf[a].0, amaf[a].1, bias)
        }
    });
    argmax_random_tie(scores, rng).ok_or(Error::TerminalState)
}

/// Normalised visit counts.
pub fn visit_count_policy(visits: &[u32]) -> Result<Vec<f64>> {
    let total: u64 = visits.iter().map(|&n| n as u64).sum();
    if total == 0 {
        return Err(Error::ZeroVisits);
    }
    Ok(visits.iter().map(|&n| n as f64 / total as f64).collect())
}

#[derive(Debug, Clone)]
struct Node {
    state: GameState,
    actions: Vec<Action>,
    priors: Option<Vec<f64>>,
    visits: Vec<u32>,
    value_sums: Vec<f64>,
    children: Vec<Option<u32>>,
    /// Iterations through this node, including the one that created it.
    node_visits: u32,
    /// Sum of backed-up values from the perspective of `state.mover()`.
    node_value: f64,
    amaf: HashMap<u32, (u32, f64)>,
}

impl Node {
    fn new(state: GameState) -> Self {
        let actions = state.legal_actions();
        let n = actions.len();
        Node {
            state,
            actions,
            priors: None,
            visits: vec![0; n],
            value_sums: vec![0.0; n],
            children: vec![None; n],
            node_visits: 0,
            node_value: 0.0,
            amaf: HashMap::new(),
        }
    }

    fn estimate(&self) -> f64 {
        if self.node_visits == 0 {
            0.0
        } else {
            self.node_value / self.node_visits as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub actions: Vec<Action>,
    pub visits: Vec<u32>,
    /// Mean value per root action for its mover; `None` if never tried.
    pub q: Vec<Option<f64>>,
    pub iterations: usize,
}

impl SearchResult {
    pub fn policy(&self) -> Result<Vec<f64>> {
        visit_count_policy(&self.visits)
    }

    /// Most-visited root action, ties broken at random.
    pub fn greedy_action(&self, rng: &mut Rng) -> Option<usize> {
        argmax_random_tie(self.visits.iter().map(|&n| n as f64), rng)
    }
}

/// Arena-backed search tree, reusable across moves.
#[derive(Debug, Clone)]
pub struct SearchTree {
    nodes: Vec<Node>,
    root: u32,
}

struct Scratch {
    path: Vec<(u32, usize)>,
    moves: Vec<(Player, u32)>,
    actions: Vec<Action>,
    logits: Vec<f64>,
    probs: Vec<f64>,
    amaf: Vec<(u32, f64)>,
}

impl SearchTree {
    pub fn new(root: GameState) -> Self {
        SearchTree {
            nodes: vec![Node::new(root)],
            root: 0,
        }
    }

    pub fn root_state(&self) -> &GameState {
        &self.nodes[self.root as usize].state
    }

    /// Sum of root edge visits.
    pub fn root_visits(&self) -> u64 {
        self.nodes[self.root as usize].visits.iter().map(|&n| n as u64).sum()
    }

    /// Iterations that passed through the root, including the one that
    /// created it when the tree was carried over from an earlier search.
    pub fn root_node_visits(&self) -> u32 {
        self.nodes[self.root as usize].node_visits
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root_stats(&self) -> NodeStats<'_> {
        let node = &self.nodes[self.root as usize];
        NodeStats {
            visits: &node.visits,
            value_sums: &node.value_sums,
            priors: node.priors.as_deref().unwrap_or(&[]),
            parent_estimate: node.estimate(),
        }
    }

    /// Re-roots the tree at the child reached by `action`, keeping that
    /// subtree's statistics. An unexplored child becomes a fresh root.
    pub fn advance(&mut self, action: Action) -> Result<()> {
        let root = &self.nodes[self.root as usize];
        let child = root
            .actions
            .iter()
            .position(|a| *a == action)
            .ok_or_else(|| Error::IllegalAction(format!("{action} in {}", root.state)))?;
        match root.children[child] {
            Some(id) => self.compact(id),
            None => {
                let state = root.state.apply(action)?;
                *self = SearchTree::new(state);
            }
        }
        Ok(())
    }

    fn compact(&mut self, new_root: u32) {
        let mut old: Vec<Option<Node>> = std::mem::take(&mut self.nodes).into_iter().map(Some).collect();
        let mut order = vec![new_root];
        let mut remap = HashMap::new();
        remap.insert(new_root, 0u32);
        let mut i = 0;
        while i < order.len() {
            let node = old[order[i] as usize].as_ref().expect("tree nodes have one parent");
            for &child in node.children.iter().flatten() {
                remap.insert(child, order.len() as u32);
                order.push(child);
            }
            i += 1;
        }
        self.nodes = order
            .into_iter()
            .map(|id| {
                let mut node = old[id as usize].take().expect("visited once");
                for c in node.children.iter_mut().flatten() {
                    *c = remap[c];
                }
                node
            })
            .collect();
        self.root = 0;
    }

    /// Runs `iterations` more iterations from the current root.
    pub fn search(
        &mut self,
        iterations: usize,
        config: &SearchConfig,
        guide: Option<Guide<'_>>,
        rng: &mut Rng,
    ) -> Result<SearchResult> {
        if self.root_state().is_terminal() {
            return Err(Error::TerminalState);
        }
        if config.kind == AgentKind::Exit && guide.is_none() {
            return Err(Error::InvalidConfig("PUCT search needs an apprentice policy".into()));
        }
        let mut scratch = Scratch {
            path: Vec::new(),
            moves: Vec::new(),
            actions: Vec::new(),
            logits: Vec::new(),
            probs: Vec::new(),
            amaf: Vec::new(),
        };
        for _ in 0..iterations {
            self.iterate(config, guide.as_ref(), rng, &mut scratch)?;
        }
        let root = &self.nodes[self.root as usize];
        Ok(SearchResult {
            actions: root.actions.clone(),
            visits: root.visits.clone(),
            q: root
                .visits
                .iter()
                .zip(&root.value_sums)
                .map(|(&n, &w)| (n > 0).then(|| w / n as f64))
                .collect(),
            iterations,
        })
    }

    fn select(
        &mut self,
        id: u32,
        amaf_ref: u32,
        config: &SearchConfig,
        guide: Option<&Guide<'_>>,
        rng: &mut Rng,
        scratch: &mut Scratch,
    ) -> Result<usize> {
        if config.kind == AgentKind::Exit && self.nodes[id as usize].priors.is_none() {
            let node = &self.nodes[id as usize];
            let guide = guide.expect("checked in search");
            guide.distribution_into(&node.state, &node.actions, &mut scratch.logits, &mut scratch.probs);
            self.nodes[id as usize].priors = Some(scratch.probs.clone());
        }
        let node = &self.nodes[id as usize];
        let stats = NodeStats {
            visits: &node.visits,
            value_sums: &node.value_sums,
            priors: node.priors.as_deref().unwrap_or(&[]),
            parent_estimate: node.estimate(),
        };
        match config.kind {
            AgentKind::Exit => puct_select(&stats, config.c_puct, rng),
            AgentKind::Uct => uct_select(&stats, config.uct_c, rng),
            AgentKind::McGrave => {
                let reference = &self.nodes[amaf_ref as usize].amaf;
                let cells = node.state.kind().cells();
                scratch.amaf.clear();
                scratch.amaf.extend(
                    node.actions
                        .iter()
                        .map(|a| reference.get(&a.code(cells)).copied().unwrap_or((0, 0.0))),
                );
                grave_select(&stats, &scratch.amaf, config.grave_bias, rng)
            }
        }
    }

    fn iterate(
        &mut self,
        config: &SearchConfig,
        guide: Option<&Guide<'_>>,
        rng: &mut Rng,
        scratch: &mut Scratch,
    ) -> Result<()> {
        scratch.path.clear();
        scratch.moves.clear();
        let cells = self.root_state().kind().cells();
        let mut cur = self.root;
        let mut amaf_ref = self.root;
        let outcome = loop {
            let node = &self.nodes[cur as usize];
            if node.state.is_terminal() {
                break node.state.utilities()?;
            }
            if node.node_visits >= config.grave_ref {
                amaf_ref = cur;
            }
            let a = self.select(cur, amaf_ref, config, guide, rng, scratch)?;
            let node = &self.nodes[cur as usize];
            scratch.path.push((cur, a));
            scratch.moves.push((node.state.mover(), node.actions[a].code(cells)));
            if let Some(child) = node.children[a] {
                cur = child;
                continue;
            }
            let mut state = node.state.clone();
            state.apply_unchecked(node.actions[a]);
            let child = self.nodes.len() as u32;
            self.nodes.push(Node::new(state.clone()));
            self.nodes[cur as usize].children[a] = Some(child);
            cur = child;
            break self.playout(state, config, guide, rng, scratch);
        };
        self.backup(cur, outcome, config.kind == AgentKind::McGrave, scratch);
        Ok(())
    }

    fn playout(
        &self,
        mut state: GameState,
        config: &SearchConfig,
        guide: Option<&Guide<'_>>,
        rng: &mut Rng,
        scratch: &mut Scratch,
    ) -> Outcome {
        let cells = state.kind().cells();
        let record = config.kind == AgentKind::McGrave;
        while !state.is_terminal() {
            state.legal_actions_into(&mut scratch.actions);
            let idx = match (config.kind, guide) {
                (AgentKind::Exit, Some(g)) => {
                    g.distribution_into(&state, &scratch.actions, &mut scratch.logits, &mut scratch.probs);
                    sample_index(&scratch.probs, rng)
                }
                _ => rng.random_range(0..scratch.actions.len()),
            };
            let action = scratch.actions[idx];
            if record {
                scratch.moves.push((state.mover(), action.code(cells)));
            }
            state.apply_unchecked(action);
        }
        state.utilities().expect("playout ends in a terminal state")
    }

    fn backup(&mut self, leaf: u32, outcome: Outcome, amaf: bool, scratch: &Scratch) {
        let leaf_node = &mut self.nodes[leaf as usize];
        let mover = leaf_node.state.mover();
        leaf_node.node_visits += 1;
        leaf_node.node_value += outcome.utility(mover);
        if amaf {
            update_amaf(leaf_node, &scratch.moves[scratch.path.len()..], outcome);
        }
        for (depth, &(id, a)) in scratch.path.iter().enumerate().rev() {
            let node = &mut self.nodes[id as usize];
            let value = outcome.utility(node.state.mover());
            node.visits[a] += 1;
            node.value_sums[a] += value;
            node.node_visits += 1;
            node.node_value += value;
            if amaf {
                update_amaf(node, &scratch.moves[depth..], outcome);
            }
        }
    }

    /// `(edge visits, edge value sum, child visits, child value)` for every
    /// expanded edge, for invariant checks.
    pub fn edges(&self) -> Vec<(u32, f64, u32, f64)> {
        self.nodes
            .iter()
            .flat_map(|n| {
                n.children.iter().enumerate().filter_map(move |(a, c)| {
                    c.map(|c| (n.visits[a], n.value_sums[a], self.nodes[c as usize].node_visits, self.nodes[c as usize].node_value))
                })
            })
            .collect()
    }
}

fn update_amaf(node: &mut Node, moves: &[(Player, u32)], outcome: Outcome) {
    let mover = node.state.mover();
    let value = outcome.utility(mover);
    for &(player, code) in moves {
        if player == mover {
            let e = node.amaf.entry(code).or_insert((0, 0.0));
            e.0 += 1;
            e.1 += value;
        }
    }
}

pub(crate) fn sample_index(probs: &[f64], rng: &mut Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left u above the cumulative sum; take the last non-zero entry.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Fresh-tree search from `root`.
pub fn run_mcts(
    root: &GameState,
    iterations: usize,
    config: &SearchConfig,
    guide: Option<Guide<'_>>,
    rng: &mut Rng,
) -> Result<SearchResult> {
    if iterations == 0 {
        return Err(Error::InvalidConfig("iterations must be at least 1".into()));
    }
    SearchTree::new(root.clone()).search(iterations, config, guide, rng)
}

/// Keeps the subtree reached after our move and the opponent's reply.
pub fn reuse_tree(mut tree: SearchTree, chosen: Action, reply: Action) -> SearchTree {
    for action in [chosen, reply] {
        if tree.advance(action).is_err() {
            return tree;
        }
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameKind;
    use crate::seed;

    fn stats<'a>(visits: &'a [u32], sums: &'a [f64], priors: &'a [f64], parent: f64) -> NodeStats<'a> {
        NodeStats {
            visits,
            value_sums: sums,
            priors,
            parent_estimate: parent,
        }
    }

    #[test]
    fn puct_hand_scores() {
        let s = stats(&[1, 3], &[0.0, 0.0], &[0.5, 0.5], 0.0);
        let scores = puct_scores(&s, 2.5);
        assert!((scores[0] - 1.25).abs() < 1e-12);
        assert!((scores[1] - 0.625).abs() < 1e-12);
        assert_eq!(puct_select(&s, 2.5, &mut seed::rng(0)).unwrap(), 0);
    }

    #[test]
    fn puct_unvisited_node_picks_uniformly() {
        let s = stats(&[0, 0, 0, 0], &[0.0; 4], &[0.7, 0.1, 0.1, 0.1], 0.3);
        let mut rng = seed::rng(1);
        let mut counts = [0; 4];
        for _ in 0..4000 {
            counts[puct_select(&s, 2.5, &mut rng).unwrap()] += 1;
        }
        assert!(counts.iter().all(|&c| c > 850 && c < 1150), "{counts:?}");
    }

    #[test]
    fn puct_prefers_dominant_value() {
        let s = stats(&[100, 100], &[100.0, -100.0], &[0.5, 0.5], 0.0);
        assert_eq!(puct_select(&s, 2.5, &mut seed::rng(0)).unwrap(), 0);
    }

    #[test]
    fn selection_on_terminal_node_is_an_error() {
        let s = stats(&[], &[], &[], 0.0);
        let mut rng = seed::rng(0);
        assert!(puct_select(&s, 2.5, &mut rng).is_err());
        assert!(uct_select(&s, 1.4, &mut rng).is_err());
        assert!(grave_select(&s, &[], 1e-6, &mut rng).is_err());
    }

    #[test]
    fn uct_hand_choice() {
        let s = stats(&[1, 2], &[0.0, 0.0], &[], 0.0);
        let scores = uct_scores(&s, std::f64::consts::SQRT_2);
        assert!((scores[0] - (2.0 * 3f64.ln()).sqrt()).abs() < 1e-12);
        assert_eq!(uct_select(&s, std::f64::consts::SQRT_2, &mut seed::rng(0)).unwrap(), 0);
        let s = stats(&[5, 5], &[5.0, -5.0], &[], 0.0);
        assert_eq!(uct_select(&s, std::f64::consts::SQRT_2, &mut seed::rng(0)).unwrap(), 0);
    }

    #[test]
    fn uct_all_unvisited_is_uniform() {
        let s = stats(&[0, 0, 0], &[0.0; 3], &[], 0.0);
        let mut rng = seed::rng(2);
        let mut counts = [0; 3];
        for _ in 0..3000 {
            counts[uct_select(&s, 1.4, &mut rng).unwrap()] += 1;
        }
        assert!(counts.iter().all(|&c| c > 850 && c < 1150), "{counts:?}");
    }

    #[test]
    fn grave_unvisited_first_and_blend_limits() {
        let s = stats(&[10, 0, 4], &[9.0, 0.0, -4.0], &[], 0.0);
        let amaf = [(50, 40.0), (0, 0.0), (20, -20.0)];
        assert_eq!(grave_select(&s, &amaf, 1e-6, &mut seed::rng(0)).unwrap(), 1);
        assert!((grave_value(0, 0.0, 8, 6.0, 1e-6) - 0.75).abs() < 1e-15);
        assert!((grave_value(4, 2.0, 0, 0.0, 1e-6) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grave_blend_hand_value() {
        // n = 10, w = 6, amaf n = 30, w = 12, b = 1e-6
        let beta: f64 = 30.0 / (30.0 + 10.0 + 1e-6 * 30.0 * 10.0);
        let expected = (1.0 - beta) * 0.6 + beta * 0.4;
        assert!((grave_value(10, 6.0, 30, 12.0, 1e-6) - expected).abs() < 1e-12);
        assert!((expected - 0.450_001_125).abs() < 1e-9);
    }

    #[test]
    fn visit_count_policy_cases() {
        assert_eq!(visit_count_policy(&[30, 10]).unwrap(), vec![0.75, 0.25]);
        assert_eq!(visit_count_policy(&[0, 7, 0]).unwrap(), vec![0.0, 1.0, 0.0]);
        assert_eq!(visit_count_policy(&[1, 1, 1, 1]).unwrap(), vec![0.25; 4]);
        assert!(matches!(visit_count_policy(&[0, 0]), Err(Error::ZeroVisits)));
    }

    #[test]
    fn single_iteration_is_one_hot() {
        let s = GameKind::Hex5.initial_state();
        let r = run_mcts(&s, 1, &SearchConfig::new(AgentKind::Uct), None, &mut seed::rng(3)).unwrap();
        let p = r.policy().unwrap();
        assert_eq!(p.iter().filter(|&&x| x == 1.0).count(), 1);
        assert_eq!(p.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn terminal_root_is_rejected() {
        let s = GameState::from_text("tictactoe XXX/OO./... 2 5").unwrap();
        let r = run_mcts(&s, 10, &SearchConfig::new(AgentKind::Uct), None, &mut seed::rng(0));
        assert!(matches!(r, Err(Error::TerminalState)));
    }

    #[test]
    fn exit_search_requires_a_guide() {
        let s = GameKind::TicTacToe.initial_state();
        assert!(run_mcts(&s, 10, &SearchConfig::new(AgentKind::Exit), None, &mut seed::rng(0)).is_err());
    }

    #[test]
    fn advance_into_unexplored_child_gives_fresh_root() {
        let s = GameKind::TicTacToe.initial_state();
        let mut tree = SearchTree::new(s.clone());
        tree.search(3, &SearchConfig::new(AgentKind::Uct), None, &mut seed::rng(0)).unwrap();
        let unexplored = tree.root_stats().visits.iter().position(|&n| n == 0).unwrap();
        let action = s.legal_actions()[unexplored];
        tree.advance(action).unwrap();
        assert_eq!(tree.root_visits(), 0);
        assert_eq!(tree.len(), 1);
        assert_eq!(tree.root_state(), &s.apply(action).unwrap());
    }

    #[test]
    fn sample_index_follows_probabilities() {
        let mut rng = seed::rng(9);
        let probs = [0.2, 0.0, 0.8];
        let mut counts = [0usize; 3];
        for _ in 0..10_000 {
            counts[sample_index(&probs, &mut rng)] += 1;
        }
        assert_eq!(counts[1], 0);
        assert!((counts[0] as f64 / 10_000.0 - 0.2).abs() < 0.02);
    }
}
