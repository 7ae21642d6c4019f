//! The region model: place candidate tiles on a rectangle of cells, given a
//! fixed context around it, minimising unmatched edges.
//!
//! The objective counts edges inside the region and edges between the region
//! and placed context tiles. Grey-frame constraints are hard: a cell only
//! accepts tile rotations that show grey on exactly its outward sides.

mod border;
mod engine;
pub mod lp;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::clock::Deadline;
use crate::puzzle::{Board, Instance, Placement, Pos, TileId};
use engine::{CellSearch, Mode, Outcome};

pub use border::{ring_positions, solve_border};

/// Rectangle of cells with inclusive, 1-based bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    pub r_min: usize,
    pub c_min: usize,
    pub r_max: usize,
    pub c_max: usize,
}

impl Region {
    pub fn new(r_min: usize, c_min: usize, r_max: usize, c_max: usize, n: usize) -> Result<Self, RegionError> {
        let r = Region { r_min, c_min, r_max, c_max };
        if r_min < 1 || c_min < 1 || r_min > r_max || c_min > c_max || r_max > n || c_max > n {
            return Err(RegionError::Bounds(r, n));
        }
        Ok(r)
    }

    pub fn full(n: usize) -> Self {
        Region { r_min: 1, c_min: 1, r_max: n, c_max: n }
    }

    pub fn height(&self) -> usize {
        self.r_max - self.r_min + 1
    }

    pub fn width(&self) -> usize {
        self.c_max - self.c_min + 1
    }

    pub fn cell_count(&self) -> usize {
        self.height() * self.width()
    }

    pub fn contains(&self, pos: Pos) -> bool {
        (self.r_min..=self.r_max).contains(&(pos.row + 1)) && (self.c_min..=self.c_max).contains(&(pos.col + 1))
    }

    /// Cells in row-major order, as 0-based positions.
    pub fn positions(&self) -> Vec<Pos> {
        let mut v = Vec::with_capacity(self.cell_count());
        for r in self.r_min..=self.r_max {
            for c in self.c_min..=self.c_max {
                v.push(Pos::new(r - 1, c - 1));
            }
        }
        v
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})x({},{})", self.r_min, self.c_min, self.r_max, self.c_max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    MinimizeDefects,
    /// Only a placement without any unmatched edge is acceptable.
    ZeroDefectOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    /// No acceptable placement exists, or none was found before the budget
    /// ran out (`timed_out`).
    Infeasible {
        timed_out: bool,
    },
    /// Budget exhausted; the placement is the best one found.
    TimeoutBestKnown,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegionError {
    #[error("region {0} does not fit a {1}x{1} board")]
    Bounds(Region, usize),
    #[error("context has a tile at {0}, inside the region")]
    ContextOverlap(Pos),
    #[error("candidate tile {0} is already placed in the context")]
    CandidateInContext(TileId),
    #[error("candidate tile {0} does not exist")]
    UnknownCandidate(TileId),
    #[error("{candidates} candidate tiles cannot fill {cells} cells")]
    TooFewCandidates { candidates: usize, cells: usize },
}

/// One placement-set to forbid: the exclusion cut of a previous solution.
pub type PlacementSet = Vec<(Pos, Placement)>;

#[derive(Clone, Debug)]
pub struct RegionProblem<'a> {
    pub instance: &'a Instance,
    pub region: Region,
    pub context: &'a Board,
    pub candidates: Vec<TileId>,
    pub excluded: Vec<PlacementSet>,
    pub mode: SolveMode,
}

impl<'a> RegionProblem<'a> {
    /// Problem with every tile absent from `context` as a candidate.
    pub fn new(instance: &'a Instance, region: Region, context: &'a Board, mode: SolveMode) -> Self {
        let used: HashSet<TileId> = context.placements().map(|(_, p)| p.tile).collect();
        let candidates = instance.tile_ids().filter(|t| !used.contains(t)).collect();
        RegionProblem { instance, region, context, candidates, excluded: Vec::new(), mode }
    }

    pub fn validate(&self) -> Result<(), RegionError> {
        let n = self.instance.n;
        Region::new(self.region.r_min, self.region.c_min, self.region.r_max, self.region.c_max, n)?;
        for (pos, _) in self.context.placements() {
            if self.region.contains(pos) {
                return Err(RegionError::ContextOverlap(pos));
            }
        }
        let used: HashSet<TileId> = self.context.placements().map(|(_, p)| p.tile).collect();
        for &t in &self.candidates {
            if t.0 == 0 || t.index() >= self.instance.tiles.len() {
                return Err(RegionError::UnknownCandidate(t));
            }
            if used.contains(&t) {
                return Err(RegionError::CandidateInContext(t));
            }
        }
        let distinct: HashSet<_> = self.candidates.iter().collect();
        if distinct.len() < self.region.cell_count() {
            return Err(RegionError::TooFewCandidates { candidates: distinct.len(), cells: self.region.cell_count() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionSolution {
    /// One placement per region cell, row-major; empty when infeasible.
    pub placements: PlacementSet,
    pub objective: u32,
    pub status: Status,
    pub nodes: u64,
}

impl RegionSolution {
    pub fn apply(&self, board: &mut Board) {
        for &(pos, p) in &self.placements {
            board.set(pos, p);
        }
    }
}

/// Solves a region problem exactly, within `deadline`.
pub fn solve_region(problem: &RegionProblem<'_>, deadline: Deadline<'_>) -> Result<RegionSolution, RegionError> {
    problem.validate()?;
    let cells = problem.region.positions();
    Ok(solve_cells(
        problem.instance,
        problem.context,
        cells,
        &problem.candidates,
        &problem.excluded,
        problem.mode,
        deadline,
    ))
}

/// Solves an arbitrary ordered cell list (cells must be empty in `context`).
pub(crate) fn solve_cells(
    inst: &Instance,
    context: &Board,
    cells: Vec<Pos>,
    candidates: &[TileId],
    excluded: &[PlacementSet],
    mode: SolveMode,
    deadline: Deadline<'_>,
) -> RegionSolution {
    let excluded: Vec<Vec<Placement>> = excluded.iter().filter_map(|set| align(set, &cells)).collect();
    let engine_mode = match mode {
        SolveMode::MinimizeDefects => Mode::Minimize,
        SolveMode::ZeroDefectOnly => Mode::ZeroOnly,
    };
    let mut search = CellSearch::new(inst, context, cells.clone(), candidates, &excluded, engine_mode, deadline);
    let incumbent = match mode {
        SolveMode::MinimizeDefects => search.greedy(),
        SolveMode::ZeroDefectOnly => None,
    };
    let result = search.run(incumbent);
    let status = match (&result.best, result.outcome, mode) {
        (Some(_), Outcome::Complete, _) => Status::Optimal,
        (Some(_), Outcome::TimedOut, SolveMode::ZeroDefectOnly) => Status::Optimal,
        (Some(_), Outcome::TimedOut, SolveMode::MinimizeDefects) => Status::TimeoutBestKnown,
        (None, outcome, _) => Status::Infeasible { timed_out: outcome == Outcome::TimedOut },
    };
    match result.best {
        Some((sol, objective)) => {
            RegionSolution { placements: cells.into_iter().zip(sol).collect(), objective, status, nodes: result.nodes }
        }
        None => RegionSolution { placements: Vec::new(), objective: 0, status, nodes: result.nodes },
    }
}

/// Reorders a placement-set to follow `cells`; `None` if it covers other cells.
fn align(set: &PlacementSet, cells: &[Pos]) -> Option<Vec<Placement>> {
    if set.len() != cells.len() {
        return None;
    }
    cells.iter().map(|c| set.iter().find(|(p, _)| p == c).map(|&(_, pl)| pl)).collect()
}

/// Fills every hole of `board` with the unused tiles, minimising unmatched
/// edges with the placed tiles fixed.
pub fn fill_holes(inst: &Instance, board: &Board, deadline: Deadline<'_>) -> (Board, Status) {
    let holes: Vec<Pos> = board.holes().collect();
    if holes.is_empty() {
        return (board.clone(), Status::Optimal);
    }
    let used: HashSet<TileId> = board.placements().map(|(_, p)| p.tile).collect();
    let candidates: Vec<TileId> = inst.tile_ids().filter(|t| !used.contains(t)).collect();
    let sol = solve_cells(inst, board, holes, &candidates, &[], SolveMode::MinimizeDefects, deadline);
    let mut out = board.clone();
    sol.apply(&mut out);
    (out, sol.status)
}
