//! The five neighbourhoods. Each one leaves the board at least as good as
//! it found it and never moves a tile out of its frame class (corner, edge
//! or inner).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::clique::{build_conflict_graph, clique_to_partial_board, max_clique_heuristic, CliqueParams, Scope};
use crate::clock::Deadline;
use crate::construct::cell_class;
use crate::matching::{apply_assignment, build_ta_cost_matrix, hungarian_solve};
use crate::puzzle::{cell_pool, Board, Instance, Placement, Pool, Pos, Side, TileId};
use crate::region::{fill_holes, solve_border, Region, Status};

/// Matched inner edges of a complete board.
pub fn matched(inst: &Instance, board: &Board) -> u32 {
    crate::puzzle::score_partial(inst, board).matched_inner
}

/// Unmatched edges touching any of `cells`, each edge counted once.
fn local_cost(inst: &Instance, board: &Board, cells: &[Pos]) -> u32 {
    let n = inst.n;
    let mut cost = 0;
    for (i, &pos) in cells.iter().enumerate() {
        let Some(p) = board.get(pos) else { continue };
        for side in Side::ALL {
            let Some(q) = pos.neighbor(side, n) else { continue };
            if cells[..i].contains(&q) {
                continue;
            }
            if let Some(c) = board.color(inst, q, side.opposite()) {
                cost += (inst.color(p, side) != c) as u32;
            }
        }
    }
    cost
}

/// Re-places the tiles on `slots` (pairwise non-adjacent) optimally among
/// those slots, one matching per frame class.
pub(crate) fn reassign(inst: &Instance, board: &mut Board, slots: &[Pos]) {
    for class in 0..=2 {
        let group: Vec<Pos> = slots.iter().copied().filter(|&p| cell_class(inst.n, p) == class).collect();
        if group.len() < 2 {
            continue;
        }
        let tiles: Vec<TileId> = group.iter().map(|&p| board.get(p).expect("complete board").tile).collect();
        let m = build_ta_cost_matrix(inst, board, &group, &tiles).expect("slots are non-adjacent");
        let a = hungarian_solve(&m.costs);
        apply_assignment(board, &group, &tiles, &m, &a.perm);
    }
}

/// Tile assignment: picks up to `k` pairwise non-adjacent cells of `pool`,
/// favouring cells with unmatched edges, and reinserts their tiles
/// optimally.
pub fn ta_move(inst: &Instance, board: &mut Board, k: usize, pool: Pool, rng: &mut ChaCha8Rng) {
    let n = inst.n;
    let mut cells: Vec<(Pos, u64)> = inst
        .positions()
        .filter(|&p| cell_pool(n, p) == pool)
        .map(|p| (p, (1 + board.defects_at(inst, p) as u64).pow(2)))
        .collect();
    let mut slots = Vec::with_capacity(k);
    while slots.len() < k && !cells.is_empty() {
        let total: u64 = cells.iter().map(|c| c.1).sum();
        let mut x = rng.gen_range(0..total);
        let i = cells
            .iter()
            .position(|&(_, w)| {
                if x < w {
                    return true;
                }
                x -= w;
                false
            })
            .expect("draw below total weight");
        let (pos, _) = cells.swap_remove(i);
        slots.push(pos);
        cells.retain(|&(q, _)| !q.is_adjacent(pos));
    }
    reassign(inst, board, &slots);
}

/// Border optimisation around the fixed interior.
pub fn bo_move(inst: &Instance, board: &mut Board, deadline: Deadline<'_>) {
    *board = solve_border(inst, board, deadline);
}

/// Black-and-white reinsertion: reassigns all cells of one checkerboard
/// colour at once, then the other, until a full pass gains nothing.
pub fn bw_move(inst: &Instance, board: &mut Board, deadline: Deadline<'_>) {
    let by_parity: [Vec<Pos>; 2] =
        [0, 1].map(|parity| inst.positions().filter(|p| (p.row + p.col) % 2 == parity).collect());
    let mut score = matched(inst, board);
    loop {
        for cells in &by_parity {
            if deadline.expired() {
                return;
            }
            reassign(inst, board, cells);
        }
        let now = matched(inst, board);
        if now <= score {
            return;
        }
        score = now;
    }
}

/// Swaps and rotations: scans every pair of cells of one frame class (a
/// cell paired with itself means turning its tile) over all frame-feasible
/// rotations, applying the first improvement found, until a full scan
/// finds none.
pub fn tsr_move(inst: &Instance, board: &mut Board, deadline: Deadline<'_>) {
    let cells: Vec<Pos> = inst.positions().collect();
    let classes: Vec<u32> = cells.iter().map(|&p| cell_class(inst.n, p)).collect();
    loop {
        let mut improved = false;
        for (i, &a) in cells.iter().enumerate() {
            if deadline.expired() {
                return;
            }
            for (j, &b) in cells.iter().enumerate().skip(i) {
                if classes[i] != classes[j] {
                    continue;
                }
                improved |= try_swap(inst, board, a, b);
            }
        }
        if !improved {
            return;
        }
    }
}

/// Applies the first improving exchange (with rotations) of the tiles at
/// `a` and `b`, or turn of the tile at `a` when `a == b`.
fn try_swap(inst: &Instance, board: &mut Board, a: Pos, b: Pos) -> bool {
    let pa = board.get(a).expect("complete board");
    let pb = board.get(b).expect("complete board");
    let pair = [a, b];
    let cells: &[Pos] = if a == b { &pair[..1] } else { &pair };
    let before = local_cost(inst, board, cells);
    if before == 0 {
        return false;
    }
    if a == b {
        for rot in inst.feasible_rotations(pa.tile, a) {
            if rot == pa.rot {
                continue;
            }
            board.set(a, Placement::new(pa.tile, rot));
            if local_cost(inst, board, cells) < before {
                return true;
            }
        }
        board.set(a, pa);
        return false;
    }
    for ra in inst.feasible_rotations(pb.tile, a) {
        board.set(a, Placement::new(pb.tile, ra));
        for rb in inst.feasible_rotations(pa.tile, b) {
            board.set(b, Placement::new(pa.tile, rb));
            if local_cost(inst, board, cells) < before {
                return true;
            }
        }
    }
    board.set(a, pa);
    board.set(b, pb);
    false
}

/// Region optimisation: re-solves a random `w`×`h` window (clamped to the
/// board) with [`ro_move_at`]. Returns true when the new window was kept.
#[allow(clippy::too_many_arguments)]
pub fn ro_move(
    inst: &Instance,
    board: &mut Board,
    w: usize,
    h: usize,
    q: u64,
    rng: &mut ChaCha8Rng,
    clique_deadline: Deadline<'_>,
    fill_deadline: Deadline<'_>,
) -> bool {
    let n = inst.n;
    let (w, h) = (w.min(n), h.min(n));
    let r = rng.gen_range(1..=n - h + 1);
    let c = rng.gen_range(1..=n - w + 1);
    let region = Region { r_min: r, c_min: c, r_max: r + h - 1, c_max: c + w - 1 };
    ro_move_at(inst, board, region, q, rng.gen(), clique_deadline, fill_deadline)
}

/// Re-solves `region` through the clique reduction with the rest of the
/// board fixed, then completes any cells the clique leaves empty with the
/// exact region solver. The new window is kept only if the board does not
/// get worse.
pub fn ro_move_at(
    inst: &Instance,
    board: &mut Board,
    region: Region,
    q: u64,
    seed: u64,
    clique_deadline: Deadline<'_>,
    fill_deadline: Deadline<'_>,
) -> bool {
    let mut context = board.clone();
    for pos in region.positions() {
        context.clear(pos);
    }
    let graph = build_conflict_graph(inst, Some(&Scope { region, context: &context }));
    let params = CliqueParams::new(q, seed).with_target(region.cell_count());
    let clique = max_clique_heuristic(&graph.graph, &params, clique_deadline);
    let placed = clique_to_partial_board(inst, &graph, &clique.clique).expect("heuristic returns a clique");
    for (pos, p) in placed.placements() {
        context.set(pos, p);
    }
    let (candidate, status) = fill_holes(inst, &context, fill_deadline);
    if matches!(status, Status::Infeasible { .. }) || !candidate.is_complete() {
        return false;
    }
    if matched(inst, &candidate) >= matched(inst, board) {
        *board = candidate;
        return true;
    }
    false
}
