//! Constructive heuristics over an ordered decomposition of the board.
//!
//! The greedy constructor fills the regions one after another, each with
//! the fewest unmatched edges it can reach given everything placed before.
//! The backtracking constructor insists on zero-defect regions: when a
//! region admits none, the previous region's solution is cut off and that
//! region is solved again. If time runs out, the deepest zero-defect
//! partial board is completed greedily.

use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clock::Clock;
use crate::puzzle::{frame_mask, Board, Instance, Placement, Pos, TileId};
use crate::region::{solve_region, PlacementSet, Region, RegionProblem, SolveMode, Status};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("strip height must be 1 or 2, got {0}")]
    StripHeight(usize),
    #[error("region {0} does not fit the board")]
    OutOfBounds(Region),
    #[error("cell ({0},{1}) is covered twice")]
    Overlap(usize, usize),
    #[error("cell ({0},{1}) is not covered")]
    Uncovered(usize, usize),
}

/// Ordered regions partitioning the board.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    n: usize,
    regions: Vec<Region>,
}

impl Decomposition {
    pub fn new(n: usize, regions: Vec<Region>) -> Result<Self, DecompositionError> {
        let mut seen = vec![false; n * n];
        for r in &regions {
            Region::new(r.r_min, r.c_min, r.r_max, r.c_max, n).map_err(|_| DecompositionError::OutOfBounds(*r))?;
            for pos in r.positions() {
                let cell = &mut seen[pos.row * n + pos.col];
                if *cell {
                    return Err(DecompositionError::Overlap(pos.row + 1, pos.col + 1));
                }
                *cell = true;
            }
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return Err(DecompositionError::Uncovered(i / n + 1, i % n + 1));
        }
        Ok(Decomposition { n, regions })
    }

    /// Full-width strips of `height` rows, top to bottom. When `height`
    /// does not divide `n`, the last strip is shorter.
    pub fn strips(n: usize, height: usize) -> Result<Self, DecompositionError> {
        if !(1..=2).contains(&height) {
            return Err(DecompositionError::StripHeight(height));
        }
        let regions = (1..=n)
            .step_by(height)
            .map(|r| Region { r_min: r, c_min: 1, r_max: (r + height - 1).min(n), c_max: n })
            .collect();
        Decomposition::new(n, regions)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }
}

/// Default time allowed for one region solve.
pub fn default_region_budget(n: usize) -> Duration {
    if n <= 12 {
        Duration::from_secs(10)
    } else {
        Duration::from_secs(30)
    }
}

/// Solves the regions in order, each minimising unmatched edges with all
/// unused tiles as candidates.
pub fn greedy_construct(inst: &Instance, decomp: &Decomposition, per_region: Duration, clock: &Clock) -> Board {
    greedy_from(inst, decomp, 0, Board::empty(inst.n), per_region, clock)
}

/// Greedy completion of `board`, whose first `start` regions are filled.
fn greedy_from(
    inst: &Instance,
    decomp: &Decomposition,
    start: usize,
    mut board: Board,
    per_region: Duration,
    clock: &Clock,
) -> Board {
    for &region in &decomp.regions[start..] {
        let problem = RegionProblem::new(inst, region, &board, SolveMode::MinimizeDefects);
        let sol = solve_region(&problem, clock.deadline(per_region)).expect("unused tiles fill the region");
        if sol.placements.is_empty() {
            log::warn!("region {region}: no placement found in budget, filling by frame class");
            frame_fill(inst, &mut board, &region.positions(), &mut ChaCha8Rng::seed_from_u64(0));
        } else {
            sol.apply(&mut board);
        }
    }
    board
}

/// Frame class of a cell or a tile: 0 inner, 1 edge, 2 corner.
pub(crate) fn cell_class(n: usize, pos: Pos) -> u32 {
    frame_mask(n, pos).count_ones()
}

pub(crate) fn tile_class(inst: &Instance, t: TileId) -> u32 {
    inst.tile(t).grey_count()
}

/// Places the unused tiles on `cells` (holes of `board`) in random order,
/// each on a cell of its frame class with its frame-feasible rotation
/// (inner tiles get a random one).
pub fn frame_fill(inst: &Instance, board: &mut Board, cells: &[Pos], rng: &mut ChaCha8Rng) {
    let used = board.tile_positions(inst.tiles.len());
    let mut free: Vec<TileId> = inst.tile_ids().filter(|t| used[t.index()].is_none()).collect();
    free.shuffle(rng);
    for &pos in cells {
        let class = cell_class(inst.n, pos);
        let Some(k) = free.iter().position(|&t| tile_class(inst, t) == class) else { continue };
        let t = free.remove(k);
        let rots: Vec<_> = inst.feasible_rotations(t, pos).collect();
        board.set(pos, Placement::new(t, *rots.choose(rng).expect("class fits")));
    }
}

/// What happened at one level of the backtracking search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BacktrackEvent {
    /// A zero-defect solution of region `level` was placed.
    Solved { level: usize, placements: PlacementSet },
    /// No (further) zero-defect solution of region `level` was found.
    Infeasible { level: usize, timed_out: bool },
    /// The solution of region `level` was removed and cut off.
    Excluded { level: usize, placements: PlacementSet },
    /// Region `level` got a new parent solution; its cuts were dropped.
    Reset { level: usize },
}

#[derive(Clone, Debug)]
pub struct BacktrackRun {
    pub board: Board,
    pub events: Vec<BacktrackEvent>,
    /// Regions solved without defect in the partial board that was completed.
    pub depth: usize,
    /// True when the overall timeout stopped the search.
    pub timed_out: bool,
}

/// Zero-defect region-by-region search with backtracking.
///
/// A region that has no zero-defect solution (or none found within
/// `per_region`) sends the search back one level, where the current
/// solution is excluded and the region re-solved. On timeout, or when the
/// first region runs out of solutions, the deepest partial board reached is
/// completed with [`greedy_construct`]'s procedure. A zero `timeout` gives
/// exactly the greedy board.
pub fn backtrack_construct(
    inst: &Instance,
    decomp: &Decomposition,
    timeout: Duration,
    per_region: Duration,
    clock: &Clock,
) -> BacktrackRun {
    let k = decomp.regions.len();
    let deadline = clock.deadline(timeout);
    let mut board = Board::empty(inst.n);
    let mut solutions: Vec<PlacementSet> = Vec::with_capacity(k);
    let mut excluded: Vec<Vec<PlacementSet>> = vec![Vec::new(); k];
    let mut events = Vec::new();
    let mut deepest = (0, board.clone());
    let mut timed_out = false;

    while solutions.len() < k {
        if deadline.passed() {
            timed_out = true;
            break;
        }
        let level = solutions.len();
        let region = decomp.regions[level];
        let mut problem = RegionProblem::new(inst, region, &board, SolveMode::ZeroDefectOnly);
        problem.excluded = excluded[level].clone();
        let sol = solve_region(&problem, deadline.within(per_region)).expect("unused tiles fill the region");
        if sol.status == Status::Optimal {
            sol.apply(&mut board);
            events.push(BacktrackEvent::Solved { level, placements: sol.placements.clone() });
            solutions.push(sol.placements);
            if level + 1 < k && !excluded[level + 1].is_empty() {
                excluded[level + 1].clear();
                events.push(BacktrackEvent::Reset { level: level + 1 });
            }
            if solutions.len() > deepest.0 {
                deepest = (solutions.len(), board.clone());
            }
            continue;
        }
        let Status::Infeasible { timed_out: hit } = sol.status else { unreachable!("zero-defect mode") };
        if hit {
            log::info!("region {level}: budget hit without a zero-defect solution, backtracking");
        }
        events.push(BacktrackEvent::Infeasible { level, timed_out: hit });
        if level == 0 {
            break;
        }
        let prev = solutions.pop().expect("level above zero has a parent");
        for &(pos, _) in &prev {
            board.clear(pos);
        }
        events.push(BacktrackEvent::Excluded { level: level - 1, placements: prev.clone() });
        excluded[level - 1].push(prev);
    }

    if solutions.len() == k {
        return BacktrackRun { board, events, depth: k, timed_out };
    }
    let (depth, partial) = deepest;
    let board = greedy_from(inst, decomp, depth, partial, per_region, clock);
    BacktrackRun { board, events, depth, timed_out }
}
