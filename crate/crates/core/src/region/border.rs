use crate::clock::Deadline;
use crate::puzzle::{Board, Instance, Pos, TileId};

use super::engine::{CellSearch, Mode};

/// The outer ring unrolled clockwise from the top-left corner.
pub fn ring_positions(n: usize) -> Vec<Pos> {
    let mut v = Vec::with_capacity(4 * n - 4);
    v.extend((0..n).map(|c| Pos::new(0, c)));
    v.extend((1..n).map(|r| Pos::new(r, n - 1)));
    v.extend((0..n - 1).rev().map(|c| Pos::new(n - 1, c)));
    v.extend((1..n - 1).rev().map(|r| Pos::new(r, 0)));
    v
}

/// Re-places the border tiles around the fixed interior.
///
/// The current border is the initial incumbent, so the result never scores
/// worse; it is optimal whenever the search closes before `deadline`.
pub fn solve_border(inst: &Instance, board: &Board, deadline: Deadline<'_>) -> Board {
    let ring = ring_positions(inst.n);
    let mut context = board.clone();
    let current: Option<Vec<_>> = ring.iter().map(|&p| context.clear(p)).collect();
    let Some(current) = current else {
        return board.clone();
    };
    let tiles: Vec<TileId> = current.iter().map(|p| p.tile).collect();

    let mut search = CellSearch::new(inst, &context, ring.clone(), &tiles, &[], Mode::Minimize, deadline);
    let incumbent = search.evaluate(&current).map(|obj| (current.clone(), obj));
    let result = search.run(incumbent);
    match result.best {
        Some((sol, _)) => {
            for (&pos, p) in ring.iter().zip(sol) {
                context.set(pos, p);
            }
            context
        }
        None => board.clone(),
    }
}
