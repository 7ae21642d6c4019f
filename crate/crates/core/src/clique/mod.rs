//! Reduction of the puzzle to maximum clique.
//!
//! Nodes are frame-feasible placements `(tile, position, rotation)`; two
//! nodes are joined when they can coexist on one board: different tiles on
//! different positions, with equal colours on the shared edge if the
//! positions are neighbours. A clique of size `n²` is a perfect solution.
//!
//! A graph may be scoped to a region with the rest of the board fixed: only
//! tiles absent from the context are used, and placements that mismatch an
//! adjacent context tile are left out.

mod dimacs;
mod heuristic;

use thiserror::Error;

use crate::puzzle::{frame_feasible, frame_mask, Board, Color, Instance, Placement, Pos, Rotation, Side, TileId};
use crate::region::Region;

pub use dimacs::{export_dimacs, export_dimacs_streamed, import_dimacs, DimacsError, Imported};
pub use heuristic::{is_clique, max_clique_heuristic, CliqueParams, CliqueResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CliqueNode {
    pub tile: TileId,
    pub pos: Pos,
    pub rot: Rotation,
}

/// Undirected graph with a bit-matrix adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    edges: u64,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Graph { n, words, bits: vec![0; n * words], edges: 0 }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> u64 {
        self.edges
    }

    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        2.0 * self.edges as f64 / (self.n as f64 * (self.n - 1) as f64)
    }

    /// Adds the edge `{i, j}`; self-loops and repeats are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i == j || self.has_edge(i, j) {
            return;
        }
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.bits[j * self.words + i / 64] |= 1 << (i % 64);
        self.edges += 1;
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(w, &bits)| BitIter(bits).map(move |b| w * 64 + b))
    }
}

pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// A region of the board with the placements around it held fixed.
#[derive(Clone, Copy, Debug)]
pub struct Scope<'a> {
    pub region: Region,
    pub context: &'a Board,
}

#[derive(Clone, Debug)]
pub struct ConflictGraph {
    pub nodes: Vec<CliqueNode>,
    pub graph: Graph,
}

impl ConflictGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.graph.edge_count()
    }

    pub fn density(&self) -> f64 {
        self.graph.density()
    }

    /// Index of a node, by binary search on the row-major node order.
    pub fn index_of(&self, node: &CliqueNode) -> Option<usize> {
        let key = |m: &CliqueNode| (m.pos, m.tile, m.rot);
        self.nodes.binary_search_by_key(&key(node), key).ok()
    }
}

/// Node list in row-major order of (row, column, tile id, rotation), with
/// the colours each node shows.
pub(crate) fn conflict_nodes(inst: &Instance, scope: Option<&Scope<'_>>) -> Vec<(CliqueNode, [Color; 4])> {
    let n = inst.n;
    let (positions, context) = match scope {
        Some(s) => (s.region.positions(), Some(s.context)),
        None => (Region::full(n).positions(), None),
    };
    let mut used = vec![false; inst.tiles.len()];
    if let Some(ctx) = context {
        for (_, p) in ctx.placements() {
            used[p.tile.index()] = true;
        }
    }
    let mut nodes = Vec::new();
    for pos in positions {
        let mask = frame_mask(n, pos);
        let fixed = Side::ALL.map(|s| {
            let q = pos.neighbor(s, n)?;
            context.and_then(|c| c.color(inst, q, s.opposite()))
        });
        for t in inst.tile_ids().filter(|t| !used[t.index()]) {
            let tile = inst.tile(t);
            for rot in Rotation::ALL {
                if !frame_feasible(tile, rot, mask) {
                    continue;
                }
                let colors = Side::ALL.map(|s| tile.color_at(rot, s));
                if Side::ALL.iter().any(|s| fixed[s.index()].is_some_and(|c| c != colors[s.index()])) {
                    continue;
                }
                nodes.push((CliqueNode { tile: t, pos, rot }, colors));
            }
        }
    }
    nodes
}

/// True when two placements can coexist on one board.
#[inline]
pub(crate) fn compatible(a: &(CliqueNode, [Color; 4]), b: &(CliqueNode, [Color; 4])) -> bool {
    let ((na, ca), (nb, cb)) = (a, b);
    if na.tile == nb.tile || na.pos == nb.pos {
        return false;
    }
    let (pa, pb) = (na.pos, nb.pos);
    if pa.row == pb.row && pa.col + 1 == pb.col {
        ca[Side::Right.index()] == cb[Side::Left.index()]
    } else if pa.row == pb.row && pb.col + 1 == pa.col {
        ca[Side::Left.index()] == cb[Side::Right.index()]
    } else if pa.col == pb.col && pa.row + 1 == pb.row {
        ca[Side::Bottom.index()] == cb[Side::Top.index()]
    } else if pa.col == pb.col && pb.row + 1 == pa.row {
        ca[Side::Top.index()] == cb[Side::Bottom.index()]
    } else {
        true
    }
}

pub fn build_conflict_graph(inst: &Instance, scope: Option<&Scope<'_>>) -> ConflictGraph {
    let nodes = conflict_nodes(inst, scope);
    let mut graph = Graph::new(nodes.len());
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if compatible(&nodes[i], &nodes[j]) {
                graph.add_edge(i, j);
            }
        }
    }
    ConflictGraph { nodes: nodes.into_iter().map(|(node, _)| node).collect(), graph }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliqueError {
    #[error("conflicting nodes ({0}, {1})")]
    Conflict(usize, usize),
    #[error("node {0} is out of range")]
    UnknownNode(usize),
}

/// Places the nodes of a clique on an empty board.
pub fn clique_to_partial_board(inst: &Instance, graph: &ConflictGraph, clique: &[usize]) -> Result<Board, CliqueError> {
    if let Some(&bad) = clique.iter().find(|&&i| i >= graph.node_count()) {
        return Err(CliqueError::UnknownNode(bad));
    }
    for (a, &i) in clique.iter().enumerate() {
        for &j in &clique[a + 1..] {
            if !graph.graph.has_edge(i, j) {
                return Err(CliqueError::Conflict(i.min(j), i.max(j)));
            }
        }
    }
    let mut board = Board::empty(inst.n);
    for &i in clique {
        let node = graph.nodes[i];
        board.set(node.pos, Placement::new(node.tile, node.rot));
    }
    Ok(board)
}

/// Node indices of the placements of `board` inside the graph, skipping
/// placements that are not nodes.
pub fn board_nodes(graph: &ConflictGraph, board: &Board) -> Vec<usize> {
    board.placements().filter_map(|(pos, p)| graph.index_of(&CliqueNode { tile: p.tile, pos, rot: p.rot })).collect()
}

#[cfg(test)]
mod tests;
