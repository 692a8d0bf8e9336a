//! Two-player, deterministic, perfect-information board games.
//!
//! All built-in games share one board representation: a row-major array of
//! cells, each empty or holding a piece of one of the two players. Rules are
//! dispatched on [`GameKind`].

mod breakthrough;
mod connection;
mod line;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Square = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn id(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    pub fn index(self) -> usize {
        self.id() as usize - 1
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn from_id(id: u8) -> Option<Player> {
        match id {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Empty,
    Piece(Player),
}

impl Cell {
    fn to_char(self) -> char {
        match self {
            Cell::Empty => '.',
            Cell::Piece(Player::One) => 'X',
            Cell::Piece(Player::Two) => 'O',
        }
    }

    fn from_char(c: char) -> Option<Cell> {
        match c {
            '.' => Some(Cell::Empty),
            'X' => Some(Cell::Piece(Player::One)),
            'O' => Some(Cell::Piece(Player::Two)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ongoing,
    Win(Player),
    Draw,
}

/// Zero-sum terminal utilities, indexed by [`Player::index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub utilities: [f64; 2],
}

impl Outcome {
    pub const DRAW: Outcome = Outcome {
        utilities: [0.0, 0.0],
    };

    pub fn win(player: Player) -> Outcome {
        let mut utilities = [-1.0; 2];
        utilities[player.index()] = 1.0;
        Outcome { utilities }
    }

    pub fn utility(&self, player: Player) -> f64 {
        self.utilities[player.index()]
    }

    pub fn winner(&self) -> Option<Player> {
        Player::BOTH.into_iter().find(|p| self.utility(*p) > 0.0)
    }
}

/// A placement (`from == None`) or a piece movement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub from: Option<Square>,
    pub to: Square,
}

impl Action {
    pub fn place(to: Square) -> Self {
        Action { from: None, to }
    }

    pub fn step(from: Square, to: Square) -> Self {
        Action {
            from: Some(from),
            to,
        }
    }

    /// Dense code unique among all actions of a game with `cells` squares.
    pub fn code(&self, cells: usize) -> u32 {
        let to = self.to as u32;
        match self.from {
            None => to,
            Some(from) => (from as u32 + 1) * cells as u32 + to,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.from {
            None => write!(f, "{}", self.to),
            Some(from) => write!(f, "{}-{}", from, self.to),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameKind {
    TicTacToe,
    Hex5,
    Hex7,
    Gomoku9,
    Breakthrough6,
}

const SQUARE_NEIGHBOURS: [(i8, i8); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

// Rhombus layout: row r, column c touches (r-1, c), (r-1, c+1), (r, c-1),
// (r, c+1), (r+1, c-1), (r+1, c).
const HEX_NEIGHBOURS: [(i8, i8); 6] = [(-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0)];

/// Board geometry transform that maps a position for one colour onto the
/// equivalent position for the other colour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mirror {
    Identity,
    Transpose,
    FlipRows,
}

impl Mirror {
    pub fn apply_offset(self, (dr, dc): (i8, i8)) -> (i8, i8) {
        match self {
            Mirror::Identity => (dr, dc),
            Mirror::Transpose => (dc, dr),
            Mirror::FlipRows => (-dr, dc),
        }
    }

    pub fn apply_coord(self, rows: usize, (r, c): (usize, usize)) -> (usize, usize) {
        match self {
            Mirror::Identity => (r, c),
            Mirror::Transpose => (c, r),
            Mirror::FlipRows => (rows - 1 - r, c),
        }
    }
}

impl GameKind {
    pub const ALL: [GameKind; 5] = [
        GameKind::TicTacToe,
        GameKind::Hex5,
        GameKind::Hex7,
        GameKind::Gomoku9,
        GameKind::Breakthrough6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::TicTacToe => "tictactoe",
            GameKind::Hex5 => "hex5",
            GameKind::Hex7 => "hex7",
            GameKind::Gomoku9 => "gomoku9",
            GameKind::Breakthrough6 => "breakthrough6",
        }
    }

    pub fn side(self) -> usize {
        match self {
            GameKind::TicTacToe => 3,
            GameKind::Hex5 => 5,
            GameKind::Hex7 => 7,
            GameKind::Gomoku9 => 9,
            GameKind::Breakthrough6 => 6,
        }
    }

    pub fn rows(self) -> usize {
        self.side()
    }

    pub fn cols(self) -> usize {
        self.side()
    }

    pub fn cells(self) -> usize {
        self.rows() * self.cols()
    }

    pub fn default_ply_cap(self) -> u16 {
        4 * self.cells() as u16
    }

    pub fn neighbours(self) -> &'static [(i8, i8)] {
        match self {
            GameKind::Hex5 | GameKind::Hex7 => &HEX_NEIGHBOURS,
            _ => &SQUARE_NEIGHBOURS,
        }
    }

    pub fn mirror(self) -> Mirror {
        match self {
            GameKind::Hex5 | GameKind::Hex7 => Mirror::Transpose,
            GameKind::Breakthrough6 => Mirror::FlipRows,
            GameKind::TicTacToe | GameKind::Gomoku9 => Mirror::Identity,
        }
    }

    pub fn is_movement(self) -> bool {
        matches!(self, GameKind::Breakthrough6)
    }

    pub fn square(self, r: usize, c: usize) -> Square {
        (r * self.cols() + c) as Square
    }

    pub fn coord(self, sq: Square) -> (usize, usize) {
        let sq = sq as usize;
        (sq / self.cols(), sq % self.cols())
    }

    /// Square at `(r + dr, c + dc)`, or `None` when off the board.
    pub fn offset(self, sq: Square, (dr, dc): (i8, i8)) -> Option<Square> {
        let (r, c) = self.coord(sq);
        let r = r as isize + dr as isize;
        let c = c as isize + dc as isize;
        if r < 0 || c < 0 || r >= self.rows() as isize || c >= self.cols() as isize {
            None
        } else {
            Some(self.square(r as usize, c as usize))
        }
    }

    pub fn initial_state(self) -> GameState {
        GameState::new(self)
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GameKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown game '{s}'")))
    }
}

/// Immutable position snapshot. `apply` returns a new state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    kind: GameKind,
    cells: Vec<Cell>,
    mover: Player,
    ply: u16,
    ply_cap: u16,
    status: Status,
}

impl GameState {
    pub fn new(kind: GameKind) -> Self {
        Self::with_ply_cap(kind, kind.default_ply_cap())
    }

    pub fn with_ply_cap(kind: GameKind, ply_cap: u16) -> Self {
        let mut cells = vec![Cell::Empty; kind.cells()];
        if kind == GameKind::Breakthrough6 {
            breakthrough::setup(kind, &mut cells);
        }
        let mut state = GameState {
            kind,
            cells,
            mover: Player::One,
            ply: 0,
            ply_cap,
            status: Status::Ongoing,
        };
        state.status = state.evaluate_status();
        state
    }

    /// Builds a state from raw parts, recomputing the terminal status.
    pub fn from_parts(
        kind: GameKind,
        cells: Vec<Cell>,
        mover: Player,
        ply: u16,
        ply_cap: u16,
    ) -> Result<Self> {
        if cells.len() != kind.cells() {
            return Err(Error::DimensionMismatch {
                expected: kind.cells(),
                actual: cells.len(),
            });
        }
        let mut state = GameState {
            kind,
            cells,
            mover,
            ply,
            ply_cap,
            status: Status::Ongoing,
        };
        state.status = state.evaluate_status();
        Ok(state)
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, sq: Square) -> Cell {
        self.cells[sq as usize]
    }

    pub fn mover(&self) -> Player {
        self.mover
    }

    pub fn ply(&self) -> u16 {
        self.ply
    }

    pub fn ply_cap(&self) -> u16 {
        self.ply_cap
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_terminal(&self) -> bool {
        self.status != Status::Ongoing
    }

    /// Legal actions in row-major scan order; empty iff terminal.
    pub fn legal_actions(&self) -> Vec<Action> {
        let mut out = Vec::new();
        self.legal_actions_into(&mut out);
        out
    }

    pub fn legal_actions_into(&self, out: &mut Vec<Action>) {
        out.clear();
        if self.is_terminal() {
            return;
        }
        self.generate_moves(self.mover, out);
    }

    fn generate_moves(&self, player: Player, out: &mut Vec<Action>) {
        if self.kind.is_movement() {
            breakthrough::moves(self.kind, &self.cells, player, out);
        } else {
            out.extend(
                self.cells
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c == Cell::Empty)
                    .map(|(i, _)| Action::place(i as Square)),
            );
        }
    }

    fn is_legal(&self, action: Action) -> bool {
        if self.is_terminal() || action.to as usize >= self.cells.len() {
            return false;
        }
        if self.kind.is_movement() {
            breakthrough::is_legal(self.kind, &self.cells, self.mover, action)
        } else {
            action.from.is_none() && self.cells[action.to as usize] == Cell::Empty
        }
    }

    pub fn apply(&self, action: Action) -> Result<GameState> {
        if !self.is_legal(action) {
            return Err(Error::IllegalAction(format!(
                "{action} in {}",
                self.to_text()
            )));
        }
        let mut next = self.clone();
        next.apply_unchecked(action);
        Ok(next)
    }

    /// In-place successor for search playouts; `action` must be legal.
    pub(crate) fn apply_unchecked(&mut self, action: Action) {
        let player = self.mover;
        if let Some(from) = action.from {
            self.cells[from as usize] = Cell::Empty;
        }
        self.cells[action.to as usize] = Cell::Piece(player);
        self.ply += 1;
        self.mover = player.opponent();
        self.status = if self.wins_after(player, action) {
            Status::Win(player)
        } else {
            self.non_win_status()
        };
    }

    fn wins_after(&self, player: Player, action: Action) -> bool {
        match self.kind {
            GameKind::TicTacToe => line::completes_line(self.kind, &self.cells, action.to, 3),
            GameKind::Gomoku9 => line::completes_line(self.kind, &self.cells, action.to, 5),
            GameKind::Hex5 | GameKind::Hex7 => {
                connection::connects_from(self.kind, &self.cells, action.to, player)
            }
            GameKind::Breakthrough6 => breakthrough::wins_after(self.kind, &self.cells, player, action),
        }
    }

    fn non_win_status(&self) -> Status {
        if self.ply >= self.ply_cap {
            return Status::Draw;
        }
        let has_move = if self.kind.is_movement() {
            breakthrough::has_move(self.kind, &self.cells, self.mover)
        } else {
            self.cells.contains(&Cell::Empty)
        };
        match (has_move, self.kind.is_movement()) {
            (true, _) => Status::Ongoing,
            // A Breakthrough player who cannot move loses.
            (false, true) => Status::Win(self.mover.opponent()),
            (false, false) => Status::Draw,
        }
    }

    /// Status from scratch, independent of the move that led here.
    fn evaluate_status(&self) -> Status {
        for player in Player::BOTH {
            let won = match self.kind {
                GameKind::TicTacToe => line::has_line(self.kind, &self.cells, player, 3),
                GameKind::Gomoku9 => line::has_line(self.kind, &self.cells, player, 5),
                GameKind::Hex5 | GameKind::Hex7 => {
                    connection::connected(self.kind, &self.cells, player)
                }
                GameKind::Breakthrough6 => breakthrough::has_won(self.kind, &self.cells, player),
            };
            if won {
                return Status::Win(player);
            }
        }
        self.non_win_status()
    }

    pub fn utilities(&self) -> Result<Outcome> {
        match self.status {
            Status::Ongoing => Err(Error::NonTerminalState),
            Status::Draw => Ok(Outcome::DRAW),
            Status::Win(p) => Ok(Outcome::win(p)),
        }
    }

    /// One-line text form: `game board mover ply`, with rows of the board
    /// separated by `/`. A non-default ply cap is appended to the game name
    /// as `@cap=N`.
    pub fn to_text(&self) -> String {
        let mut board = String::with_capacity(self.cells.len() + self.kind.rows());
        for (i, row) in self.cells.chunks(self.kind.cols()).enumerate() {
            if i > 0 {
                board.push('/');
            }
            board.extend(row.iter().map(|c| c.to_char()));
        }
        let game = if self.ply_cap == self.kind.default_ply_cap() {
            self.kind.name().to_string()
        } else {
            format!("{}@cap={}", self.kind.name(), self.ply_cap)
        };
        format!("{} {} {} {}", game, board, self.mover, self.ply)
    }

    pub fn from_text(line: &str) -> Result<GameState> {
        let bad = |msg: &str| Error::parse(1, format!("{msg}: '{line}'"));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let (name, cap) = match fields[0].split_once("@cap=") {
            Some((name, cap)) => (name, Some(cap.parse::<u16>().map_err(|_| bad("bad cap"))?)),
            None => (fields[0], None),
        };
        let kind: GameKind = name.parse().map_err(|_| bad("unknown game"))?;
        let rows: Vec<&str> = fields[1].split('/').collect();
        if rows.len() != kind.rows() || rows.iter().any(|r| r.chars().count() != kind.cols()) {
            return Err(bad("board has wrong shape"));
        }
        let cells = rows
            .iter()
            .flat_map(|r| r.chars())
            .map(|c| Cell::from_char(c).ok_or_else(|| bad("bad cell character")))
            .collect::<Result<Vec<_>>>()?;
        let mover = fields[2]
            .parse::<u8>()
            .ok()
            .and_then(Player::from_id)
            .ok_or_else(|| bad("bad mover"))?;
        let ply = fields[3].parse::<u16>().map_err(|_| bad("bad ply"))?;
        GameState::from_parts(kind, cells, mover, ply, cap.unwrap_or(kind.default_ply_cap()))
    }

    /// Colour-swapped, geometrically mirrored copy: the same position seen
    /// from the other player's side.
    pub fn mirrored(&self) -> GameState {
        let kind = self.kind;
        let mirror = kind.mirror();
        let mut cells = vec![Cell::Empty; self.cells.len()];
        for (i, cell) in self.cells.iter().enumerate() {
            let (r, c) = mirror.apply_coord(kind.rows(), kind.coord(i as Square));
            cells[kind.square(r, c) as usize] = match cell {
                Cell::Empty => Cell::Empty,
                Cell::Piece(p) => Cell::Piece(p.opponent()),
            };
        }
        GameState {
            kind,
            cells,
            mover: self.mover.opponent(),
            ply: self.ply,
            ply_cap: self.ply_cap,
            status: match self.status {
                Status::Win(p) => Status::Win(p.opponent()),
                s => s,
            },
        }
    }

    pub fn mirror_action(&self, action: Action) -> Action {
        let kind = self.kind;
        let m = |sq: Square| {
            let (r, c) = kind.mirror().apply_coord(kind.rows(), kind.coord(sq));
            kind.square(r, c)
        };
        Action {
            from: action.from.map(m),
            to: m(action.to),
        }
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
