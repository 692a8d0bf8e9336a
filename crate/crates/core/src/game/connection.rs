//! Hex edge-to-edge connection. Player one joins the first and last rows,
//! player two the first and last columns.

use super::{Cell, GameKind, Player, Square};

fn edges(kind: GameKind, player: Player, sq: Square) -> (bool, bool) {
    let (r, c) = kind.coord(sq);
    let (pos, last) = match player {
        Player::One => (r, kind.rows() - 1),
        Player::Two => (c, kind.cols() - 1),
    };
    (pos == 0, pos == last)
}

fn flood(kind: GameKind, cells: &[Cell], player: Player, seeds: impl Iterator<Item = Square>) -> bool {
    let piece = Cell::Piece(player);
    let mut seen = vec![false; cells.len()];
    let mut stack: Vec<Square> = Vec::new();
    for s in seeds {
        if cells[s as usize] == piece && !seen[s as usize] {
            seen[s as usize] = true;
            stack.push(s);
        }
    }
    let (mut start, mut end) = (false, false);
    while let Some(sq) = stack.pop() {
        let (a, b) = edges(kind, player, sq);
        start |= a;
        end |= b;
        if start && end {
            return true;
        }
        for &off in kind.neighbours() {
            if let Some(n) = kind.offset(sq, off) {
                if cells[n as usize] == piece && !seen[n as usize] {
                    seen[n as usize] = true;
                    stack.push(n);
                }
            }
        }
    }
    false
}

/// Whether the group containing `sq` touches both of `player`'s edges.
pub(super) fn connects_from(kind: GameKind, cells: &[Cell], sq: Square, player: Player) -> bool {
    flood(kind, cells, player, std::iter::once(sq))
}

pub(super) fn connected(kind: GameKind, cells: &[Cell], player: Player) -> bool {
    let starts: Vec<Square> = (0..cells.len() as Square)
        .filter(|&sq| edges(kind, player, sq).0)
        .collect();
    // A single flood from every start-edge stone; the start flag is then
    // always set, so success means some group reaches the far edge.
    flood(kind, cells, player, starts.into_iter())
}
