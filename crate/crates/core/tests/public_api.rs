//! The public API used end to end, as a downstream crate would.

use std::time::Duration;

use edgematch::clique::{build_conflict_graph, export_dimacs, import_dimacs};
use edgematch::io::{generate, read_instance, read_solution, write_instance, write_solution, GeneratorParams};
use edgematch::pipeline::{run_pipeline, Pipeline, PipelineConfig};
use edgematch::puzzle::score_board;
use edgematch::search::LSParams;
use edgematch::{Board, Clock, Pos};

fn small_config(n: usize, seed: u64) -> PipelineConfig {
    let mut cfg = PipelineConfig::new(n, seed);
    cfg.region_budget = Duration::from_millis(300);
    cfg.backtrack_timeout = Duration::from_secs(1);
    cfg.clique_q = 100_000;
    cfg.clique_time = Duration::from_secs(5);
    cfg.ls = LSParams {
        ta_n: 50,
        clique_n: 2,
        clique_budget: 5_000,
        bo_budget: Duration::from_millis(50),
        time_limit: Duration::from_secs(1),
        seed,
        ..LSParams::default()
    };
    cfg
}

#[test]
fn generate_write_read_solve_score() {
    let inst = generate(&GeneratorParams::scaled(5, 11)).unwrap();
    let mut text = Vec::new();
    write_instance(&inst, &mut text).unwrap();
    let inst = read_instance(text.as_slice()).unwrap();
    assert_eq!(inst.planted.as_ref().map(|b| score_board(&inst, b).unwrap().unmatched_inner), Some(0));

    for pipeline in Pipeline::ALL {
        let clock = Clock::logical(10_000);
        let run = run_pipeline(&inst, pipeline, &small_config(5, 3), &clock).unwrap();
        let mut sol = Vec::new();
        write_solution(&run.board, &mut sol).unwrap();
        let back = read_solution(sol.as_slice(), &inst).unwrap();
        assert_eq!(score_board(&inst, &back).unwrap(), run.score, "{pipeline}");
        assert_eq!(run.score.frame_violations, 0);
        assert_eq!(run.score.matched_inner + run.score.unmatched_inner, 40);
    }
}

#[test]
fn partial_solutions_keep_their_holes() {
    let inst = generate(&GeneratorParams::scaled(4, 0)).unwrap();
    let mut board = inst.planted.clone().unwrap();
    board.clear(Pos::new(1, 2));
    let mut sol = Vec::new();
    write_solution(&board, &mut sol).unwrap();
    let back: Board = read_solution(sol.as_slice(), &inst).unwrap();
    assert_eq!(back, board);
    assert!(score_board(&inst, &back).is_err());
}

#[test]
fn dimacs_round_trip_of_a_full_graph() {
    let inst = generate(&GeneratorParams::scaled(3, 5)).unwrap();
    let graph = build_conflict_graph(&inst, None);
    let mut out = Vec::new();
    export_dimacs(&graph, &mut out).unwrap();
    let back = import_dimacs(out.as_slice()).unwrap();
    assert_eq!(back.graph, graph.graph);
    assert_eq!(back.legend, graph.nodes);
}
