//! End-to-end solvers: a constructor, optionally followed by local search,
//! or the clique reduction of the whole board.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clique::{build_conflict_graph, clique_to_partial_board, max_clique_heuristic, CliqueParams};
use crate::clock::Clock;
use crate::construct::{
    backtrack_construct, default_region_budget, frame_fill, greedy_construct, BacktrackEvent, Decomposition,
    DecompositionError,
};
use crate::puzzle::{score_board, Board, Instance, Pos, Score};
use crate::region::fill_holes;
use crate::search::{run_multi_neighbourhood, LSParams, ParamsError, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pipeline {
    Greedy,
    Backtrack,
    LsRandom,
    GreedyLs,
    BacktrackLs,
    CliqueFull,
}

impl Pipeline {
    pub const ALL: [Pipeline; 6] = [
        Pipeline::Greedy,
        Pipeline::Backtrack,
        Pipeline::LsRandom,
        Pipeline::GreedyLs,
        Pipeline::BacktrackLs,
        Pipeline::CliqueFull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Greedy => "greedy",
            Pipeline::Backtrack => "backtrack",
            Pipeline::LsRandom => "ls-random",
            Pipeline::GreedyLs => "greedy+ls",
            Pipeline::BacktrackLs => "backtrack+ls",
            Pipeline::CliqueFull => "clique-full",
        }
    }

    /// Whether the pipeline splits the board into strips.
    pub fn uses_strips(self) -> bool {
        matches!(self, Pipeline::Greedy | Pipeline::Backtrack | Pipeline::GreedyLs | Pipeline::BacktrackLs)
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown pipeline `{0}` (expected greedy, backtrack, ls-random, greedy+ls, backtrack+ls or clique-full)")]
pub struct UnknownPipeline(pub String);

impl FromStr for Pipeline {
    type Err = UnknownPipeline;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pipeline::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| UnknownPipeline(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub strip_height: usize,
    pub region_budget: Duration,
    pub backtrack_timeout: Duration,
    pub ls: LSParams,
    /// Selections for the whole-board clique search.
    pub clique_q: u64,
    pub clique_time: Duration,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        PipelineConfig {
            strip_height: 1,
            region_budget: default_region_budget(n),
            backtrack_timeout: Duration::from_secs(60),
            ls: LSParams { seed, ..LSParams::default() },
            clique_q: 10_000_000,
            clique_time: Duration::from_secs(120),
            seed,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub board: Board,
    pub score: Score,
    pub trace: Option<Trace>,
    pub events: Vec<BacktrackEvent>,
    pub construct_time: Duration,
    pub ls_time: Duration,
}

/// A complete board with every tile on a random cell of its frame class.
pub fn random_board(inst: &Instance, seed: u64) -> Board {
    let mut board = Board::empty(inst.n);
    let cells: Vec<Pos> = inst.positions().collect();
    frame_fill(inst, &mut board, &cells, &mut ChaCha8Rng::seed_from_u64(seed));
    board
}

/// Solves `inst` with one pipeline. Budgets are read from `clock`, so a
/// logical clock makes the run reproducible.
pub fn run_pipeline(
    inst: &Instance,
    pipeline: Pipeline,
    cfg: &PipelineConfig,
    clock: &Clock,
) -> Result<PipelineRun, PipelineError> {
    let decomp = Decomposition::strips(inst.n, cfg.strip_height)?;
    if matches!(pipeline, Pipeline::LsRandom | Pipeline::GreedyLs | Pipeline::BacktrackLs) {
        cfg.ls.validate()?;
    }
    let t0 = clock.elapsed();
    let mut events = Vec::new();
    let start = match pipeline {
        Pipeline::Greedy | Pipeline::GreedyLs => greedy_construct(inst, &decomp, cfg.region_budget, clock),
        Pipeline::Backtrack | Pipeline::BacktrackLs => {
            let run = backtrack_construct(inst, &decomp, cfg.backtrack_timeout, cfg.region_budget, clock);
            events = run.events;
            run.board
        }
        Pipeline::LsRandom => random_board(inst, cfg.seed),
        Pipeline::CliqueFull => solve_by_clique(inst, cfg, clock),
    };
    let t1 = clock.elapsed();
    let (board, trace) = match pipeline {
        Pipeline::LsRandom | Pipeline::GreedyLs | Pipeline::BacktrackLs => {
            let (b, t) = run_multi_neighbourhood(inst, &start, &cfg.ls, clock);
            (b, Some(t))
        }
        _ => (start, None),
    };
    let t2 = clock.elapsed();
    let score = score_board(inst, &board).expect("pipelines return complete boards");
    Ok(PipelineRun { board, score, trace, events, construct_time: t1 - t0, ls_time: t2 - t1 })
}

/// Largest clique found in the whole-board conflict graph, with any cells
/// it leaves empty filled by the exact region solver.
fn solve_by_clique(inst: &Instance, cfg: &PipelineConfig, clock: &Clock) -> Board {
    let graph = build_conflict_graph(inst, None);
    let params = CliqueParams::new(cfg.clique_q, cfg.seed).with_target(inst.n * inst.n);
    let found = max_clique_heuristic(&graph.graph, &params, clock.deadline(cfg.clique_time));
    let partial = clique_to_partial_board(inst, &graph, &found.clique).expect("heuristic returns a clique");
    let (board, _) = fill_holes(inst, &partial, clock.deadline(cfg.region_budget));
    if board.is_complete() {
        return board;
    }
    let mut board = board;
    let holes: Vec<Pos> = board.holes().collect();
    frame_fill(inst, &mut board, &holes, &mut ChaCha8Rng::seed_from_u64(cfg.seed));
    board
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{generate, GeneratorParams};

    fn quick(n: usize, seed: u64) -> PipelineConfig {
        let mut cfg = PipelineConfig::new(n, seed);
        cfg.region_budget = Duration::from_millis(500);
        cfg.backtrack_timeout = Duration::from_secs(2);
        cfg.ls = LSParams {
            ta_n: 100,
            clique_n: 2,
            clique_budget: 5_000,
            bo_budget: Duration::from_millis(100),
            time_limit: Duration::from_secs(3),
            seed,
            ..LSParams::default()
        };
        cfg.clique_q = 200_000;
        cfg.clique_time = Duration::from_secs(10);
        cfg
    }

    #[test]
    fn names_round_trip() {
        for p in Pipeline::ALL {
            assert_eq!(p.name().parse::<Pipeline>(), Ok(p));
        }
        let err = "tabu".parse::<Pipeline>().unwrap_err();
        assert!(err.to_string().starts_with("unknown pipeline `tabu`"));
    }

    #[test]
    fn every_pipeline_returns_a_frame_clean_board() {
        for n in [4, 6] {
            let inst = generate(&GeneratorParams::scaled(n, 2)).unwrap();
            for p in Pipeline::ALL {
                let run = run_pipeline(&inst, p, &quick(n, 2), &Clock::logical(10_000)).unwrap();
                assert_eq!(run.score.frame_violations, 0, "{p}");
                assert_eq!(
                    run.trace.is_some(),
                    matches!(p, Pipeline::LsRandom | Pipeline::GreedyLs | Pipeline::BacktrackLs)
                );
            }
        }
    }

    #[test]
    fn clique_full_solves_small_boards() {
        for n in 3..=5 {
            let inst = generate(&GeneratorParams::scaled(n, 1)).unwrap();
            let run = run_pipeline(&inst, Pipeline::CliqueFull, &quick(n, 1), &Clock::wall()).unwrap();
            assert_eq!(run.score.unmatched_inner, 0);
        }
    }

    #[test]
    fn random_boards_depend_on_the_seed() {
        let inst = generate(&GeneratorParams::scaled(6, 0)).unwrap();
        assert_eq!(random_board(&inst, 1), random_board(&inst, 1));
        assert_ne!(random_board(&inst, 1), random_board(&inst, 2));
        assert_eq!(score_board(&inst, &random_board(&inst, 3)).unwrap().frame_violations, 0);
    }

    #[test]
    fn bad_strip_height_is_an_error() {
        let inst = generate(&GeneratorParams::scaled(4, 0)).unwrap();
        let cfg = PipelineConfig { strip_height: 3, ..quick(4, 0) };
        let err = run_pipeline(&inst, Pipeline::Greedy, &cfg, &Clock::wall()).unwrap_err();
        assert_eq!(err, PipelineError::Decomposition(DecompositionError::StripHeight(3)));
    }
}
