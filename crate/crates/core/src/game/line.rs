//! n-in-a-row detection for Tic-tac-toe and free-style Gomoku.

use super::{Cell, GameKind, Player, Square};

const DIRECTIONS: [(i8, i8); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

fn run_length(kind: GameKind, cells: &[Cell], from: Square, dir: (i8, i8), piece: Cell) -> usize {
    let mut len = 0;
    let mut sq = from;
    while let Some(next) = kind.offset(sq, dir) {
        if cells[next as usize] != piece {
            break;
        }
        len += 1;
        sq = next;
    }
    len
}

/// Whether the piece on `sq` is part of a line of at least `n`.
pub(super) fn completes_line(kind: GameKind, cells: &[Cell], sq: Square, n: usize) -> bool {
    let piece = cells[sq as usize];
    if piece == Cell::Empty {
        return false;
    }
    DIRECTIONS.iter().any(|&(dr, dc)| {
        1 + run_length(kind, cells, sq, (dr, dc), piece) + run_length(kind, cells, sq, (-dr, -dc), piece)
            >= n
    })
}

pub(super) fn has_line(kind: GameKind, cells: &[Cell], player: Player, n: usize) -> bool {
    let piece = Cell::Piece(player);
    (0..cells.len() as Square).any(|sq| {
        cells[sq as usize] == piece
            && DIRECTIONS
                .iter()
                .any(|&dir| 1 + run_length(kind, cells, sq, dir, piece) >= n)
    })
}
