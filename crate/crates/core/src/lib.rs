//! Solvers for unsigned square edge-matching puzzles.
//!
//! The crate is organised around a handful of building blocks:
//!
//! * [`puzzle`]: tiles, rotations, boards and scoring.
//! * [`io`]: planted-solution instance generation and the text file formats.
//! * [`region`]: the exact region optimiser (branch-and-bound), border
//!   optimisation, and LP export of the region model.
//! * [`clique`]: the conflict-graph reduction, DIMACS export and a budgeted
//!   max-clique heuristic.
//! * [`matching`]: Hungarian assignment used by the tile reinsertion moves.
//! * [`construct`]: region-by-region greedy and backtracking constructors.
//! * [`search`]: the multi-neighbourhood steepest-descent local search.
//! * [`pipeline`]: end-to-end solver pipelines combining the above.

pub mod clique;
pub mod clock;
pub mod construct;
pub mod io;
pub mod matching;
pub mod pipeline;
pub mod puzzle;
pub mod region;
pub mod search;

pub use clock::{Clock, Deadline};
pub use puzzle::{Board, Color, Instance, Placement, Pos, Rotation, Score, Side, Tile, TileId, GREY};

#[cfg(test)]
mod testutil;
