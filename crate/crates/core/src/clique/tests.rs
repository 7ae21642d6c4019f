use std::io::{self, Write};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::clock::Clock;
use crate::puzzle::{score_board, score_partial};
use crate::testutil::{planted, scramble};

fn complete(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            g.add_edge(i, j);
        }
    }
    g
}

fn brute_max_clique(g: &Graph) -> usize {
    let n = g.node_count();
    (0u32..1 << n)
        .filter(|&mask| {
            let v: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            is_clique(g, &v)
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap()
}

fn run(g: &Graph, params: CliqueParams) -> CliqueResult {
    let clock = Clock::wall();
    max_clique_heuristic(g, &params, clock.unlimited())
}

#[test]
fn small_graphs() {
    assert_eq!(run(&complete(5), CliqueParams::new(1, 0)).clique.len(), 1);
    assert_eq!(run(&complete(5), CliqueParams::new(10, 0)).clique, vec![0, 1, 2, 3, 4]);
    let mut g = Graph::new(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    assert_eq!(brute_max_clique(&g), 3);
    assert_eq!(run(&g, CliqueParams::new(100, 3)).clique, vec![0, 1, 2]);
    assert_eq!(g.edge_count(), 3);
    assert!((g.density() - 0.5).abs() < 1e-12);
}

#[test]
fn random_graphs_against_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..60 {
        let n = rng.gen_range(4..=14);
        let p = rng.gen_range(0.3..0.9);
        let mut g = Graph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(i, j);
                }
            }
        }
        let found = run(&g, CliqueParams::new(5_000, trial));
        assert!(is_clique(&g, &found.clique));
        assert_eq!(found.clique.len(), brute_max_clique(&g), "trial {trial}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn larger_budget_never_worse(seed in any::<u64>(), q in 1u64..400) {
        let (inst, _) = planted(4, seed % 50);
        let g = build_conflict_graph(&inst, None);
        let a = run(&g.graph, CliqueParams::new(q, seed));
        let b = run(&g.graph, CliqueParams::new(q * 2, seed));
        prop_assert!(a.clique.len() <= b.clique.len());
        prop_assert!(is_clique(&g.graph, &b.clique));
    }
}

#[test]
fn runs_are_deterministic() {
    let (inst, _) = planted(5, 2);
    let g = build_conflict_graph(&inst, None);
    let a = run(&g.graph, CliqueParams::new(3_000, 9));
    let b = run(&g.graph, CliqueParams::new(3_000, 9));
    assert_eq!(a, b);
}

#[test]
fn node_count_matches_independent_count() {
    for n in 3..=5 {
        let (inst, _) = planted(n, n as u64);
        let g = build_conflict_graph(&inst, None);
        let expect: usize = inst
            .positions()
            .map(|pos| inst.tile_ids().map(|t| inst.feasible_rotations(t, pos).count()).sum::<usize>())
            .sum();
        assert_eq!(g.node_count(), expect);
        assert!(g.node_count() <= 4 * n.pow(4));
        for i in 0..g.node_count() {
            assert!(!g.graph.has_edge(i, i));
            for j in g.graph.neighbors(i) {
                assert!(g.graph.has_edge(j, i));
            }
        }
        let sorted = g.nodes.windows(2).all(|w| (w[0].pos, w[0].tile, w[0].rot) < (w[1].pos, w[1].tile, w[1].rot));
        assert!(sorted);
    }
}

#[test]
fn reduction_is_sound_both_ways() {
    for n in 3..=5 {
        for seed in 0..5 {
            let (inst, board) = planted(n, seed);
            let g = build_conflict_graph(&inst, None);
            let nodes = board_nodes(&g, &board);
            assert_eq!(nodes.len(), n * n);
            assert!(is_clique(&g.graph, &nodes));
            let back = clique_to_partial_board(&inst, &g, &nodes).unwrap();
            assert_eq!(back, board);

            let found = run(&g.graph, CliqueParams::new(1_000_000, seed).with_target(n * n));
            assert_eq!(found.clique.len(), n * n, "n {n} seed {seed}");
            let solved = clique_to_partial_board(&inst, &g, &found.clique).unwrap();
            let score = score_board(&inst, &solved).unwrap();
            assert_eq!((score.unmatched_inner, score.frame_violations), (0, 0));
        }
    }
}

#[test]
fn partial_cliques_and_conflicts() {
    let (inst, board) = planted(4, 6);
    let g = build_conflict_graph(&inst, None);
    assert_eq!(clique_to_partial_board(&inst, &g, &[]).unwrap(), Board::empty(4));
    let mut nodes = board_nodes(&g, &board);
    nodes.retain(|&i| g.nodes[i].pos != Pos::new(0, 0) && g.nodes[i].pos != Pos::new(2, 2));
    let partial = clique_to_partial_board(&inst, &g, &nodes).unwrap();
    assert_eq!(partial.holes().collect::<Vec<_>>(), vec![Pos::new(0, 0), Pos::new(2, 2)]);
    assert_eq!(score_partial(&inst, &partial).unmatched_inner, 0);

    // Same tile twice.
    let t = g.nodes[nodes[0]].tile;
    let other = (0..g.node_count()).find(|&i| g.nodes[i].tile == t && i != nodes[0]).unwrap();
    let (a, b) = (nodes[0].min(other), nodes[0].max(other));
    let err = clique_to_partial_board(&inst, &g, &[nodes[0], other]).unwrap_err();
    assert_eq!(err, CliqueError::Conflict(a, b));
    assert_eq!(err.to_string(), format!("conflicting nodes ({a}, {b})"));
}

#[test]
fn single_cell_scope_with_forcing_context() {
    let (inst, board) = planted(5, 1);
    // An inner cell whose tile fits its neighbours in one rotation only.
    let forced = inst.positions().find_map(|pos| {
        let p = board.get(pos)?;
        let mut ctx = board.clone();
        ctx.clear(pos);
        let region = Region::new(pos.row + 1, pos.col + 1, pos.row + 1, pos.col + 1, 5).unwrap();
        let g = build_conflict_graph(&inst, Some(&Scope { region, context: &ctx }));
        (g.node_count() == 1).then_some((g, pos, p))
    });
    let (g, pos, p) = forced.expect("some cell is forced");
    assert_eq!(g.edge_count(), 0);
    assert_eq!(g.nodes[0], CliqueNode { tile: p.tile, pos, rot: p.rot });
}

#[test]
fn scoped_cliques_place_without_defects() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for seed in 0..10 {
        let (inst, mut board) = planted(8, seed);
        scramble(&inst, &mut board, 12, false, &mut rng);
        let r = rng.gen_range(1..=4);
        let c = rng.gen_range(1..=4);
        let region = Region::new(r, c, r + 3, c + 3, 8).unwrap();
        let mut ctx = board.clone();
        for pos in region.positions() {
            ctx.clear(pos);
        }
        let g = build_conflict_graph(&inst, Some(&Scope { region, context: &ctx }));
        let found = run(&g.graph, CliqueParams::new(20_000, seed).with_target(16));
        let placed = clique_to_partial_board(&inst, &g, &found.clique).unwrap();
        let mut merged = ctx.clone();
        for (pos, p) in placed.placements() {
            assert!(region.contains(pos));
            merged.set(pos, p);
            assert_eq!(merged.defects_at(&inst, pos), 0);
        }
    }
}

#[test]
fn dimacs_round_trip() {
    let mut text = Vec::new();
    let k4 = ConflictGraph { nodes: Vec::new(), graph: complete(4) };
    export_dimacs(&k4, &mut text).unwrap();
    assert_eq!(String::from_utf8(text.clone()).unwrap(), "p edge 4 6\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n");
    let back = import_dimacs(&text[..]).unwrap();
    assert_eq!(back.graph, k4.graph);

    let (inst, _) = planted(3, 4);
    let g = build_conflict_graph(&inst, None);
    let mut text = Vec::new();
    export_dimacs(&g, &mut text).unwrap();
    let s = String::from_utf8(text.clone()).unwrap();
    let header = s.lines().find(|l| l.starts_with("p ")).unwrap();
    assert_eq!(header, format!("p edge {} {}", g.node_count(), g.edge_count()));
    let back = import_dimacs(&text[..]).unwrap();
    assert_eq!(back.graph, g.graph);
    assert_eq!(back.legend, g.nodes);
}

#[test]
fn streamed_export_is_identical() {
    let (inst, board) = planted(4, 2);
    let g = build_conflict_graph(&inst, None);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    export_dimacs(&g, &mut a).unwrap();
    let edges = export_dimacs_streamed(&inst, None, &mut b).unwrap();
    assert_eq!(a, b);
    assert_eq!(edges, g.edge_count());

    let region = Region::new(2, 2, 3, 4, 4).unwrap();
    let mut ctx = board.clone();
    for pos in region.positions() {
        ctx.clear(pos);
    }
    let scope = Scope { region, context: &ctx };
    let (mut a, mut b) = (Vec::new(), Vec::new());
    export_dimacs(&build_conflict_graph(&inst, Some(&scope)), &mut a).unwrap();
    export_dimacs_streamed(&inst, Some(&scope), &mut b).unwrap();
    assert_eq!(a, b);
}

#[derive(Default)]
struct CountingSink(u64);

impl Write for CountingSink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0 += buf.len() as u64;
        Ok(buf.len())
    }
    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

#[test]
fn streamed_9x9_export_is_hundreds_of_megabytes() {
    let (inst, _) = planted(9, 1);
    let mut sink = io::BufWriter::with_capacity(1 << 20, CountingSink::default());
    let edges = export_dimacs_streamed(&inst, None, &mut sink).unwrap();
    let bytes = sink.into_inner().map_err(|e| e.into_error()).unwrap().0;
    assert!(edges > 10_000_000, "{edges} edges");
    assert!(bytes > 100_000_000, "{bytes} bytes");
}

#[test]
fn dimacs_errors_name_lines() {
    let cases = [
        ("p edge x 1\n", "line 1: malformed problem line"),
        ("e 1 2\n", "line 1: edge before the problem line"),
        ("c hi\np edge 2 1\ne 1 3\n", "line 3: vertex 3 out of range 1..=2"),
        ("p edge 2 1\ne 1\n", "line 2: malformed edge line"),
        ("p edge 3 2\ne 1 2\n", "header announces 2 edges, found 1"),
        ("c node 2 = t1 r1 c1 a0\n", "line 1: malformed node legend"),
    ];
    for (text, msg) in cases {
        let err = import_dimacs(text.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), msg);
    }
}
