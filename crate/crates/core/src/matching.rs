//! Square assignment problems and the tile reinsertion cost matrix.
//!
//! [`hungarian_solve`] runs the O(k³) shortest augmenting path method with
//! row and column potentials. Among all optimal permutations it returns the
//! lexicographically smallest: any optimal assignment uses only edges that
//! are tight under the final potentials, so rows are fixed one by one to
//! their smallest tight column that still admits a perfect tight matching.

use thiserror::Error;

use crate::puzzle::{frame_feasible, frame_mask, Board, Instance, Placement, Pos, Rotation, Side, TileId};

/// Cost of putting a tile where no rotation fits the frame. Exceeds the
/// worst real cost of four unmatched edges.
pub const PROHIBITIVE: i64 = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("cost matrix is not square: row {row} has {len} entries, expected {size}")]
    NotSquare { row: usize, len: usize, size: usize },
    #[error("slots {0} and {1} are orthogonally adjacent")]
    AdjacentSlots(Pos, Pos),
    #[error("{slots} slots but {tiles} tiles")]
    LengthMismatch { slots: usize, tiles: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostMatrix {
    size: usize,
    costs: Vec<i64>,
}

impl CostMatrix {
    pub fn zeros(size: usize) -> Self {
        CostMatrix { size, costs: vec![0; size * size] }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, MatchingError> {
        let size = rows.len();
        let mut costs = Vec::with_capacity(size * size);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != size {
                return Err(MatchingError::NotSquare { row, len: r.len(), size });
            }
            costs.extend(r);
        }
        Ok(CostMatrix { size, costs })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.costs[row * self.size + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, cost: i64) {
        self.costs[row * self.size + col] = cost;
    }

    /// Sum of the entries picked by `perm` (row `i` takes column `perm[i]`).
    pub fn total(&self, perm: &[usize]) -> i64 {
        perm.iter().enumerate().map(|(i, &j)| self.get(i, j)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    /// Column assigned to each row.
    pub perm: Vec<usize>,
    pub total: i64,
}

/// Minimum-cost perfect assignment, lexicographically smallest among ties.
pub fn hungarian_solve(m: &CostMatrix) -> Assignment {
    let k = m.size();
    if k == 0 {
        return Assignment { perm: Vec::new(), total: 0 };
    }
    const NONE: usize = usize::MAX;
    // 1-based working arrays; column 0 is the virtual root.
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = m.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let tight = |i: usize, j: usize| m.get(i, j) - u[i + 1] - v[j + 1] == 0;
    let mut row_of: Vec<usize> = (1..=k).map(|j| owner[j] - 1).collect();
    let mut col_of = vec![0usize; k];
    for (j, &i) in row_of.iter().enumerate() {
        col_of[i] = j;
    }

    // Kuhn augmentation through tight edges of unfixed columns.
    fn augment(
        r: usize,
        tight: &dyn Fn(usize, usize) -> bool,
        fixed: &[bool],
        seen: &mut [bool],
        row_of: &mut [usize],
        col_of: &mut [usize],
    ) -> bool {
        for c in 0..fixed.len() {
            if fixed[c] || seen[c] || !tight(r, c) {
                continue;
            }
            seen[c] = true;
            if row_of[c] == NONE || augment(row_of[c], tight, fixed, seen, row_of, col_of) {
                row_of[c] = r;
                col_of[r] = c;
                return true;
            }
        }
        false
    }

    let mut fixed = vec![false; k];
    let mut seen = vec![false; k];
    for i in 0..k {
        for j in 0..k {
            if fixed[j] || !tight(i, j) {
                continue;
            }
            if col_of[i] == j {
                break;
            }
            let (displaced, freed) = (row_of[j], col_of[i]);
            fixed[j] = true;
            row_of[j] = i;
            col_of[i] = j;
            row_of[freed] = NONE;
            seen.iter_mut().for_each(|s| *s = false);
            if augment(displaced, &tight, &fixed, &mut seen, &mut row_of, &mut col_of) {
                break;
            }
            fixed[j] = false;
            row_of[j] = displaced;
            col_of[i] = freed;
            row_of[freed] = i;
        }
        fixed[col_of[i]] = true;
    }
    let total = m.total(&col_of);
    Assignment { perm: col_of, total }
}

/// Reinsertion costs of `tiles` (rows) into `slots` (columns), with the
/// cheapest rotation of each pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaMatrix {
    pub costs: CostMatrix,
    rotations: Vec<Rotation>,
}

impl TaMatrix {
    pub fn rotation(&self, tile: usize, slot: usize) -> Rotation {
        self.rotations[tile * self.costs.size() + slot]
    }
}

/// Builds the cost of every tile at every slot against the slots' fixed
/// neighbours. Slots must be pairwise orthogonally non-adjacent, so the
/// costs add up to the defects around the slots.
pub fn build_ta_cost_matrix(
    inst: &Instance,
    board: &Board,
    slots: &[Pos],
    tiles: &[TileId],
) -> Result<TaMatrix, MatchingError> {
    if slots.len() != tiles.len() {
        return Err(MatchingError::LengthMismatch { slots: slots.len(), tiles: tiles.len() });
    }
    for (a, &p) in slots.iter().enumerate() {
        if let Some(&q) = slots[a + 1..].iter().find(|q| p.is_adjacent(**q)) {
            return Err(MatchingError::AdjacentSlots(p, q));
        }
    }
    let k = slots.len();
    let n = inst.n;
    let mut costs = CostMatrix::zeros(k);
    let mut rotations = vec![Rotation::new(0); k * k];
    for (j, &pos) in slots.iter().enumerate() {
        let mask = frame_mask(n, pos);
        let around = Side::ALL.map(|s| pos.neighbor(s, n).and_then(|q| board.color(inst, q, s.opposite())));
        for (i, &t) in tiles.iter().enumerate() {
            let tile = inst.tile(t);
            let mut best = (PROHIBITIVE, Rotation::new(0));
            for rot in Rotation::ALL {
                if !frame_feasible(tile, rot, mask) {
                    continue;
                }
                let c = Side::ALL
                    .iter()
                    .filter(|&&s| around[s.index()].is_some_and(|col| col != tile.color_at(rot, s)))
                    .count() as i64;
                if c < best.0 {
                    best = (c, rot);
                }
            }
            costs.set(i, j, best.0);
            rotations[i * k + j] = best.1;
        }
    }
    Ok(TaMatrix { costs, rotations })
}

/// Puts tile `i` on slot `perm[i]` with its recorded rotation.
pub fn apply_assignment(board: &mut Board, slots: &[Pos], tiles: &[TileId], m: &TaMatrix, perm: &[usize]) {
    for (i, &j) in perm.iter().enumerate() {
        board.set(slots[j], Placement::new(tiles[i], m.rotation(i, j)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::score_board;
    use crate::testutil::{planted, scramble};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out.sort();
        out
    }

    /// Optimal cost and the lexicographically first permutation reaching it.
    fn brute(m: &CostMatrix) -> (i64, Vec<usize>) {
        let mut best: Option<(i64, Vec<usize>)> = None;
        for p in permutations(m.size()) {
            let c = m.total(&p);
            if best.as_ref().is_none_or(|b| c < b.0) {
                best = Some((c, p));
            }
        }
        best.unwrap()
    }

    fn random_matrix(rng: &mut impl Rng, k: usize, max: i64) -> CostMatrix {
        let rows = (0..k).map(|_| (0..k).map(|_| rng.gen_range(0..=max)).collect()).collect();
        CostMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn small_fixtures() {
        let a = hungarian_solve(&CostMatrix::from_rows(vec![vec![0]]).unwrap());
        assert_eq!((a.perm, a.total), (vec![0], 0));
        let m = CostMatrix::from_rows(vec![vec![0, 9, 9], vec![9, 0, 9], vec![9, 9, 0]]).unwrap();
        let a = hungarian_solve(&m);
        assert_eq!((a.perm, a.total), (vec![0, 1, 2], 0));
        let all_equal = CostMatrix::from_rows(vec![vec![1; 4]; 4]).unwrap();
        assert_eq!(hungarian_solve(&all_equal).perm, vec![0, 1, 2, 3]);
        assert_eq!(
            CostMatrix::from_rows(vec![vec![1, 2], vec![3]]),
            Err(MatchingError::NotSquare { row: 1, len: 1, size: 2 })
        );
    }

    #[test]
    fn matches_factorial_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let k = 5 + trial % 3;
            // Narrow ranges create many ties for the tie-break rule.
            let max = [4, 9, 100][trial % 3];
            let m = random_matrix(&mut rng, k, max);
            let a = hungarian_solve(&m);
            let (cost, first) = brute(&m);
            assert_eq!(a.total, cost, "trial {trial}");
            assert_eq!(a.perm, first, "trial {trial}");
        }
    }

    proptest! {
        #[test]
        fn shift_keeps_the_argmin(seed in any::<u64>(), k in 1usize..7, shift in 0i64..50) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, k, 5);
            let mut shifted = m.clone();
            for i in 0..k {
                for j in 0..k {
                    shifted.set(i, j, m.get(i, j) + shift);
                }
            }
            let a = hungarian_solve(&m);
            let b = hungarian_solve(&shifted);
            prop_assert_eq!(&a.perm, &b.perm);
            prop_assert_eq!(a.total + shift * k as i64, b.total);
        }
    }

    fn sample_slots(rng: &mut impl Rng, n: usize, k: usize, inner: bool) -> Vec<Pos> {
        let mut slots: Vec<Pos> = Vec::new();
        while slots.len() < k {
            let p = Pos::new(rng.gen_range(0..n), rng.gen_range(0..n));
            let ring = frame_mask(n, p) != 0;
            if ring == inner || slots.iter().any(|q| *q == p || q.is_adjacent(p)) {
                continue;
            }
            slots.push(p);
        }
        slots
    }

    fn defects_around(inst: &Instance, board: &Board, slots: &[Pos]) -> i64 {
        slots.iter().map(|&p| board.defects_at(inst, p) as i64).sum()
    }

    #[test]
    fn identity_cost_and_planted_optimum() {
        let (inst, board) = planted(8, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let slots = sample_slots(&mut rng, 8, 6, true);
            let tiles: Vec<TileId> = slots.iter().map(|&p| board.get(p).unwrap().tile).collect();
            let m = build_ta_cost_matrix(&inst, &board, &slots, &tiles).unwrap();
            let identity: Vec<usize> = (0..slots.len()).collect();
            assert_eq!(m.costs.total(&identity), 0);
            assert_eq!(hungarian_solve(&m.costs).total, 0);
        }

        let mut scrambled = board.clone();
        scramble(&inst, &mut scrambled, 10, false, &mut rng);
        for inner in [true, false] {
            let slots = sample_slots(&mut rng, 8, 5, inner);
            let tiles: Vec<TileId> = slots.iter().map(|&p| scrambled.get(p).unwrap().tile).collect();
            let m = build_ta_cost_matrix(&inst, &scrambled, &slots, &tiles).unwrap();
            let identity: Vec<usize> = (0..slots.len()).collect();
            // Current rotations may not be the cheapest ones.
            assert!(m.costs.total(&identity) <= defects_around(&inst, &scrambled, &slots));
        }
    }

    #[test]
    fn reinsertion_never_hurts_and_costs_add_up() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..100 {
            let (inst, mut board) = planted(10, trial);
            scramble(&inst, &mut board, 40, false, &mut rng);
            let inner = trial % 2 == 0;
            let slots = sample_slots(&mut rng, 10, if inner { 16 } else { 10 }, inner);
            let tiles: Vec<TileId> = slots.iter().map(|&p| board.get(p).unwrap().tile).collect();
            let before = score_board(&inst, &board).unwrap();
            let m = build_ta_cost_matrix(&inst, &board, &slots, &tiles).unwrap();
            let a = hungarian_solve(&m.costs);
            let mut after = board.clone();
            apply_assignment(&mut after, &slots, &tiles, &m, &a.perm);
            let s = score_board(&inst, &after).unwrap();
            assert!(s.unmatched_inner <= before.unmatched_inner, "trial {trial}");
            assert_eq!(s.frame_violations, 0);
            assert_eq!(defects_around(&inst, &after, &slots), a.total);
        }
    }

    #[test]
    fn adjacent_slots_are_rejected() {
        let (inst, board) = planted(4, 1);
        let slots = [Pos::new(1, 1), Pos::new(1, 2)];
        let tiles: Vec<TileId> = slots.iter().map(|&p| board.get(p).unwrap().tile).collect();
        assert_eq!(
            build_ta_cost_matrix(&inst, &board, &slots, &tiles),
            Err(MatchingError::AdjacentSlots(slots[0], slots[1]))
        );
        let diagonal = [Pos::new(1, 1), Pos::new(2, 2)];
        assert!(build_ta_cost_matrix(&inst, &board, &diagonal, &tiles).is_ok());
    }

    #[test]
    fn frame_infeasible_pairs_are_prohibitive() {
        let (inst, board) = planted(4, 2);
        let slots = [Pos::new(0, 0), Pos::new(1, 1)];
        let tiles: Vec<TileId> = slots.iter().map(|&p| board.get(p).unwrap().tile).collect();
        let m = build_ta_cost_matrix(&inst, &board, &slots, &tiles).unwrap();
        assert_eq!(m.costs.get(0, 1), PROHIBITIVE);
        assert_eq!(m.costs.get(1, 0), PROHIBITIVE);
        assert_eq!(hungarian_solve(&m.costs).perm, vec![0, 1]);
    }
}
