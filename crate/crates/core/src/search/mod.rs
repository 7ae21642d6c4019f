//! Multi-neighbourhood steepest descent.
//!
//! One cycle runs `ta_n` tile-assignment moves (alternating between the
//! inner and the border pool), one border optimisation, black-and-white
//! reinsertion and swap/rotate to their local optima, and `clique_n`
//! region optimisations. Cycles repeat until one brings no improvement or
//! the time limit passes. Every move is accepted only if it does not lower
//! the number of matched edges, so the search ends in a local optimum of
//! all five neighbourhoods.

mod moves;

use std::fmt;
use std::io::{self, Write};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clock::Clock;
use crate::puzzle::{Board, Instance, Pool};

pub use moves::{bo_move, bw_move, matched, ro_move, ro_move_at, ta_move, tsr_move};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LSParams {
    /// Tiles picked per tile-assignment move.
    pub ta_k: usize,
    /// Tile-assignment moves per cycle.
    pub ta_n: usize,
    /// Region optimisation window, in columns and rows. Clamped to the board.
    pub clique_w: usize,
    pub clique_h: usize,
    /// Region optimisations per cycle.
    pub clique_n: usize,
    /// Clique heuristic selections per region.
    pub clique_budget: u64,
    /// Time for one border optimisation, and for filling one region's holes.
    pub bo_budget: Duration,
    pub time_limit: Duration,
    pub seed: u64,
}

impl Default for LSParams {
    fn default() -> Self {
        LSParams {
            ta_k: 16,
            ta_n: 1000,
            clique_w: 6,
            clique_h: 6,
            clique_n: 10,
            clique_budget: 100_000,
            bo_budget: Duration::from_secs(2),
            time_limit: Duration::from_secs(60),
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamsError {
    #[error("ta_k must be at least 2")]
    TaK,
    #[error("{0} must be positive")]
    Zero(&'static str),
}

impl LSParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.ta_k < 2 {
            return Err(ParamsError::TaK);
        }
        let counts = [
            ("ta_n", self.ta_n as u64),
            ("clique_w", self.clique_w as u64),
            ("clique_h", self.clique_h as u64),
            ("clique_n", self.clique_n as u64),
            ("clique_budget", self.clique_budget),
        ];
        if let Some((name, _)) = counts.iter().find(|c| c.1 == 0) {
            return Err(ParamsError::Zero(name));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoveTag {
    Ta,
    Bo,
    Bw,
    Tsr,
    Ro,
}

impl fmt::Display for MoveTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoveTag::Ta => "TA",
            MoveTag::Bo => "BO",
            MoveTag::Bw => "BW",
            MoveTag::Tsr => "TSR",
            MoveTag::Ro => "RO",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub tag: MoveTag,
    /// Matched inner edges before and after the move.
    pub before: u32,
    pub after: u32,
    /// Time since the search started.
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn write_csv<W: Write>(&self, mut sink: W) -> io::Result<()> {
        writeln!(sink, "move,before,after,elapsed_ms")?;
        for r in &self.records {
            writeln!(sink, "{},{},{},{}", r.tag, r.before, r.after, r.elapsed_ms)?;
        }
        sink.flush()
    }

    pub fn is_monotone(&self) -> bool {
        self.records.iter().all(|r| r.after >= r.before)
    }
}

/// Runs the cycle of neighbourhoods from `start` (a complete board) and
/// returns the final board with the trace of every move.
pub fn run_multi_neighbourhood(inst: &Instance, start: &Board, params: &LSParams, clock: &Clock) -> (Board, Trace) {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let deadline = clock.deadline(params.time_limit);
    let t0 = clock.elapsed();
    let mut board = start.clone();
    let mut trace = Trace::default();
    let mut score = matched(inst, &board);
    let mut record = |tag: MoveTag, before: &mut u32, board: &Board| {
        let after = matched(inst, board);
        let elapsed_ms = (clock.elapsed().saturating_sub(t0)).as_millis() as u64;
        trace.records.push(TraceRecord { tag, before: *before, after, elapsed_ms });
        *before = after;
    };
    let mut pool = Pool::Inner;

    loop {
        let cycle_start = score;
        for _ in 0..params.ta_n {
            if deadline.expired() {
                break;
            }
            ta_move(inst, &mut board, params.ta_k, pool, &mut rng);
            record(MoveTag::Ta, &mut score, &board);
            pool = match pool {
                Pool::Inner => Pool::Border,
                Pool::Border => Pool::Inner,
            };
        }
        if !deadline.expired() {
            bo_move(inst, &mut board, deadline.within(params.bo_budget));
            record(MoveTag::Bo, &mut score, &board);
        }
        if !deadline.expired() {
            bw_move(inst, &mut board, deadline);
            record(MoveTag::Bw, &mut score, &board);
        }
        if !deadline.expired() {
            tsr_move(inst, &mut board, deadline);
            record(MoveTag::Tsr, &mut score, &board);
        }
        for _ in 0..params.clique_n {
            if deadline.expired() {
                break;
            }
            let (w, h, q) = (params.clique_w, params.clique_h, params.clique_budget);
            ro_move(inst, &mut board, w, h, q, &mut rng, deadline, deadline.within(params.bo_budget));
            record(MoveTag::Ro, &mut score, &board);
        }
        if score <= cycle_start || score == inst.inner_edge_count() || deadline.passed() {
            break;
        }
    }
    (board, trace)
}
