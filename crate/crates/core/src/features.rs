//! Binary local-pattern features for state-action pairs.
//!
//! Every pattern is anchored at the action's destination square and tests a
//! single neighbouring square (or, for movement games, the direction the
//! piece came from). Offsets are stored in board coordinates; the second
//! player's set uses the mirrored offsets of the first player's set so that
//! both colours see equivalent positions identically.

use std::fmt;

use crate::error::{Error, Result};
use crate::game::{Action, Cell, GameKind, GameState, Player};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellTest {
    Empty,
    Friend,
    Enemy,
    OffBoard,
}

impl CellTest {
    const ALL: [CellTest; 4] = [CellTest::Empty, CellTest::Friend, CellTest::Enemy, CellTest::OffBoard];

    fn name(self) -> &'static str {
        match self {
            CellTest::Empty => "empty",
            CellTest::Friend => "friend",
            CellTest::Enemy => "enemy",
            CellTest::OffBoard => "off",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }

    fn observe(state: &GameState, anchor: u16, offset: (i8, i8), player: Player) -> CellTest {
        match state.kind().offset(anchor, offset) {
            None => CellTest::OffBoard,
            Some(sq) => match state.cell(sq) {
                Cell::Empty => CellTest::Empty,
                Cell::Piece(p) if p == player => CellTest::Friend,
                Cell::Piece(_) => CellTest::Enemy,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pattern {
    Bias,
    Cell { offset: (i8, i8), test: CellTest },
    /// The moved piece came from `to + offset`.
    Origin { offset: (i8, i8) },
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Bias => write!(f, "bias"),
            Pattern::Cell { offset, test } => write!(f, "cell {} {} {}", offset.0, offset.1, test.name()),
            Pattern::Origin { offset } => write!(f, "origin {} {}", offset.0, offset.1),
        }
    }
}

impl std::str::FromStr for Pattern {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let num = |t: &str| t.parse::<i8>().map_err(|_| format!("bad offset '{t}'"));
        match parts.as_slice() {
            ["bias"] => Ok(Pattern::Bias),
            ["cell", dr, dc, test] => {
                let test = CellTest::ALL
                    .into_iter()
                    .find(|t| t.name() == *test)
                    .ok_or_else(|| format!("bad cell test '{test}'"))?;
                Ok(Pattern::Cell {
                    offset: (num(dr)?, num(dc)?),
                    test,
                })
            }
            ["origin", dr, dc] => Ok(Pattern::Origin {
                offset: (num(dr)?, num(dc)?),
            }),
            _ => Err(format!("bad pattern '{s}'")),
        }
    }
}

/// Sorted active pattern indices of one state-action pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FeatureVector {
    indices: Vec<u32>,
    dim: u32,
}

impl FeatureVector {
    pub fn new(mut indices: Vec<u32>, dim: usize) -> Self {
        indices.sort_unstable();
        indices.dedup();
        debug_assert!(indices.iter().all(|&i| (i as usize) < dim));
        FeatureVector {
            indices,
            dim: dim as u32,
        }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&(index as u32)).is_ok()
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.indices.iter().map(|&i| weights[i as usize]).sum()
    }

    /// `target += scale * self`.
    pub fn add_scaled_to(&self, target: &mut [f64], scale: f64) {
        for &i in &self.indices {
            target[i as usize] += scale;
        }
    }
}

#[derive(Debug, Clone)]
struct OffsetGroup {
    offset: (i8, i8),
    slots: [Option<u32>; 4],
}

/// Fixed pattern list for one player of one game.
#[derive(Debug, Clone)]
pub struct FeatureSet {
    kind: GameKind,
    player: Player,
    patterns: Vec<Pattern>,
    cell_groups: Vec<OffsetGroup>,
    origins: Vec<((i8, i8), u32)>,
}

impl PartialEq for FeatureSet {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.player == other.player && self.patterns == other.patterns
    }
}

impl FeatureSet {
    /// Bias, then one pattern per (neighbour offset, cell test), then for
    /// movement games one origin pattern per backward direction.
    pub fn atomic(kind: GameKind, player: Player) -> FeatureSet {
        let orient = |off: (i8, i8)| match player {
            Player::One => off,
            Player::Two => kind.mirror().apply_offset(off),
        };
        let mut patterns = vec![Pattern::Bias];
        for &off in kind.neighbours() {
            for test in CellTest::ALL {
                patterns.push(Pattern::Cell {
                    offset: orient(off),
                    test,
                });
            }
        }
        if kind.is_movement() {
            // Player one moves towards row 0, so pieces arrive from below.
            for dc in [-1, 0, 1] {
                patterns.push(Pattern::Origin {
                    offset: orient((1, dc)),
                });
            }
        }
        FeatureSet::from_patterns(kind, player, patterns).expect("atomic patterns are well formed")
    }

    pub fn from_patterns(kind: GameKind, player: Player, patterns: Vec<Pattern>) -> Result<FeatureSet> {
        if patterns.first() != Some(&Pattern::Bias) {
            return Err(Error::InvalidConfig("feature set must start with the bias pattern".into()));
        }
        let mut cell_groups: Vec<OffsetGroup> = Vec::new();
        let mut origins = Vec::new();
        for (i, p) in patterns.iter().enumerate() {
            let i = i as u32;
            match *p {
                Pattern::Bias if i > 0 => {
                    return Err(Error::InvalidConfig("duplicate bias pattern".into()));
                }
                Pattern::Bias => {}
                Pattern::Cell { offset, test } => {
                    let group = match cell_groups.iter_mut().position(|g| g.offset == offset) {
                        Some(pos) => &mut cell_groups[pos],
                        None => {
                            cell_groups.push(OffsetGroup {
                                offset,
                                slots: [None; 4],
                            });
                            cell_groups.last_mut().unwrap()
                        }
                    };
                    if group.slots[test.slot()].replace(i).is_some() {
                        return Err(Error::InvalidConfig(format!("duplicate pattern '{p}'")));
                    }
                }
                Pattern::Origin { offset } => origins.push((offset, i)),
            }
        }
        Ok(FeatureSet {
            kind,
            player,
            patterns,
            cell_groups,
            origins,
        })
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn dim(&self) -> usize {
        self.patterns.len()
    }

    /// Pattern list, one per line.
    pub fn describe(&self) -> String {
        self.patterns.iter().map(|p| format!("{p}\n")).collect()
    }

    pub fn featurize(&self, state: &GameState, action: Action) -> Result<FeatureVector> {
        if state.kind() != self.kind || state.mover() != self.player {
            return Err(Error::InvalidConfig(format!(
                "feature set for {} player {} used on {} with mover {}",
                self.kind,
                self.player,
                state.kind(),
                state.mover()
            )));
        }
        if !state.legal_actions().contains(&action) {
            return Err(Error::IllegalAction(format!("{action} in {state}")));
        }
        Ok(self.featurize_unchecked(state, action))
    }

    /// Features of every legal action of `state`, in legal-action order.
    pub fn featurize_all(&self, state: &GameState, actions: &[Action]) -> Vec<FeatureVector> {
        actions.iter().map(|&a| self.featurize_unchecked(state, a)).collect()
    }

    pub(crate) fn featurize_unchecked(&self, state: &GameState, action: Action) -> FeatureVector {
        let mut indices = Vec::with_capacity(self.cell_groups.len() + 2);
        indices.push(0);
        for group in &self.cell_groups {
            let observed = CellTest::observe(state, action.to, group.offset, self.player);
            if let Some(i) = group.slots[observed.slot()] {
                indices.push(i);
            }
        }
        if let Some(from) = action.from {
            for &(offset, i) in &self.origins {
                if state.kind().offset(action.to, offset) == Some(from) {
                    indices.push(i);
                }
            }
        }
        FeatureVector::new(indices, self.dim())
    }

    /// Logits `theta . phi(s, a)` for each legal action, without allocating
    /// feature vectors.
    pub(crate) fn logits_into(&self, state: &GameState, actions: &[Action], theta: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for &action in actions {
            let mut z = theta[0];
            for group in &self.cell_groups {
                let observed = CellTest::observe(state, action.to, group.offset, self.player);
                if let Some(i) = group.slots[observed.slot()] {
                    z += theta[i as usize];
                }
            }
            if let Some(from) = action.from {
                for &(offset, i) in &self.origins {
                    if state.kind().offset(action.to, offset) == Some(from) {
                        z += theta[i as usize];
                    }
                }
            }
            out.push(z);
        }
    }
}

/// Per-player feature sets of one game.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSets {
    sets: [FeatureSet; 2],
}

impl FeatureSets {
    pub fn atomic(kind: GameKind) -> Self {
        FeatureSets {
            sets: [FeatureSet::atomic(kind, Player::One), FeatureSet::atomic(kind, Player::Two)],
        }
    }

    pub fn new(one: FeatureSet, two: FeatureSet) -> Result<Self> {
        if one.player != Player::One || two.player != Player::Two || one.kind != two.kind {
            return Err(Error::InvalidConfig("feature sets must cover players 1 and 2 of one game".into()));
        }
        Ok(FeatureSets { sets: [one, two] })
    }

    pub fn get(&self, player: Player) -> &FeatureSet {
        &self.sets[player.index()]
    }

    pub fn kind(&self) -> GameKind {
        self.sets[0].kind
    }
}
