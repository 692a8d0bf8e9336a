//! Breakthrough: player one starts on the bottom two rows and moves up,
//! player two starts on the top two rows and moves down. Pawns step straight
//! forward onto empty squares or diagonally forward onto empty or enemy
//! squares. Reaching the far row, capturing every enemy pawn, or leaving the
//! opponent without a move wins.

use super::{Action, Cell, GameKind, Player, Square};

pub(super) fn forward(player: Player) -> i8 {
    match player {
        Player::One => -1,
        Player::Two => 1,
    }
}

fn goal_row(kind: GameKind, player: Player) -> usize {
    match player {
        Player::One => 0,
        Player::Two => kind.rows() - 1,
    }
}

pub(super) fn setup(kind: GameKind, cells: &mut [Cell]) {
    let rows = kind.rows();
    for c in 0..kind.cols() {
        for r in 0..2 {
            cells[kind.square(r, c) as usize] = Cell::Piece(Player::Two);
            cells[kind.square(rows - 1 - r, c) as usize] = Cell::Piece(Player::One);
        }
    }
}

fn targets(kind: GameKind, cells: &[Cell], player: Player, from: Square) -> impl Iterator<Item = Square> + '_ {
    let dr = forward(player);
    [-1i8, 0, 1].into_iter().filter_map(move |dc| {
        let to = kind.offset(from, (dr, dc))?;
        match cells[to as usize] {
            Cell::Empty => Some(to),
            Cell::Piece(p) if p != player && dc != 0 => Some(to),
            _ => None,
        }
    })
}

pub(super) fn moves(kind: GameKind, cells: &[Cell], player: Player, out: &mut Vec<Action>) {
    for from in 0..cells.len() as Square {
        if cells[from as usize] == Cell::Piece(player) {
            out.extend(targets(kind, cells, player, from).map(|to| Action::step(from, to)));
        }
    }
}

pub(super) fn has_move(kind: GameKind, cells: &[Cell], player: Player) -> bool {
    (0..cells.len() as Square).any(|from| {
        cells[from as usize] == Cell::Piece(player) && targets(kind, cells, player, from).next().is_some()
    })
}

pub(super) fn is_legal(kind: GameKind, cells: &[Cell], player: Player, action: Action) -> bool {
    match action.from {
        Some(from) if (from as usize) < cells.len() && cells[from as usize] == Cell::Piece(player) => {
            targets(kind, cells, player, from).any(|to| to == action.to)
        }
        _ => false,
    }
}

/// Win check after `player` made `action` (board already updated).
pub(super) fn wins_after(kind: GameKind, cells: &[Cell], player: Player, action: Action) -> bool {
    kind.coord(action.to).0 == goal_row(kind, player)
        || !cells.contains(&Cell::Piece(player.opponent()))
}

pub(super) fn has_won(kind: GameKind, cells: &[Cell], player: Player) -> bool {
    let goal = goal_row(kind, player);
    let opponent_alive = cells.contains(&Cell::Piece(player.opponent()));
    let reached = (0..kind.cols()).any(|c| cells[kind.square(goal, c) as usize] == Cell::Piece(player));
    reached || (!opponent_alive && cells.contains(&Cell::Piece(player)))
}
