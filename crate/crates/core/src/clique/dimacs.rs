//! DIMACS ascii graph format.
//!
//! ```text
//! c node 1 = t7 r1 c1 a2
//! ...
//! p edge N M
//! e 1 5
//! ```
//!
//! Vertices are 1-based. The `c node` legend lines map each vertex back to
//! its placement (row, column and tile are 1-based).

use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::{compatible, conflict_nodes, CliqueNode, ConflictGraph, Graph, Scope};
use crate::puzzle::{Instance, Pos, Rotation, TileId};

fn write_legend<W: Write>(sink: &mut W, nodes: impl Iterator<Item = CliqueNode>) -> io::Result<()> {
    for (i, node) in nodes.enumerate() {
        writeln!(
            sink,
            "c node {} = t{} r{} c{} a{}",
            i + 1,
            node.tile,
            node.pos.row + 1,
            node.pos.col + 1,
            node.rot.alpha()
        )?;
    }
    Ok(())
}

pub fn export_dimacs<W: Write>(graph: &ConflictGraph, mut sink: W) -> io::Result<()> {
    write_legend(&mut sink, graph.nodes.iter().copied())?;
    let g = &graph.graph;
    writeln!(sink, "p edge {} {}", g.node_count(), g.edge_count())?;
    for i in 0..g.node_count() {
        for j in g.neighbors(i).filter(|&j| j > i) {
            writeln!(sink, "e {} {}", i + 1, j + 1)?;
        }
    }
    sink.flush()
}

/// Writes the conflict graph of `inst` without building its adjacency:
/// one pass counts the edges for the header, a second writes them. The
/// output is identical to [`export_dimacs`] of the built graph.
pub fn export_dimacs_streamed<W: Write>(inst: &Instance, scope: Option<&Scope<'_>>, mut sink: W) -> io::Result<u64> {
    let nodes = conflict_nodes(inst, scope);
    write_legend(&mut sink, nodes.iter().map(|(node, _)| *node))?;
    let mut edges = 0u64;
    for i in 0..nodes.len() {
        edges += nodes[i + 1..].iter().filter(|b| compatible(&nodes[i], b)).count() as u64;
    }
    writeln!(sink, "p edge {} {}", nodes.len(), edges)?;
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if compatible(&nodes[i], &nodes[j]) {
                writeln!(sink, "e {} {}", i + 1, j + 1)?;
            }
        }
    }
    sink.flush()?;
    Ok(edges)
}

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
    #[error("line {0}: malformed problem line")]
    Header(usize),
    #[error("line {0}: edge before the problem line")]
    EdgeBeforeHeader(usize),
    #[error("line {0}: malformed edge line")]
    Edge(usize),
    #[error("line {line}: vertex {vertex} out of range 1..={n}")]
    Vertex { line: usize, vertex: usize, n: usize },
    #[error("line {0}: malformed node legend")]
    Legend(usize),
    #[error("missing problem line")]
    NoHeader,
    #[error("header announces {expected} edges, found {found}")]
    EdgeCount { expected: u64, found: u64 },
}

/// A graph read back from DIMACS, with the node legend when present.
#[derive(Clone, Debug)]
pub struct Imported {
    pub graph: Graph,
    pub legend: Vec<CliqueNode>,
}

fn parse_legend(rest: &str) -> Option<(usize, CliqueNode)> {
    let mut it = rest.split_whitespace();
    let idx: usize = it.next()?.parse().ok()?;
    if it.next()? != "=" {
        return None;
    }
    let mut field = |prefix: char| -> Option<u32> { it.next()?.strip_prefix(prefix)?.parse().ok() };
    let (t, r, c, a) = (field('t')?, field('r')?, field('c')?, field('a')?);
    if r == 0 || c == 0 || a > 3 || t == 0 {
        return None;
    }
    let node =
        CliqueNode { tile: TileId(t), pos: Pos::new(r as usize - 1, c as usize - 1), rot: Rotation::new(a as u8) };
    Some((idx, node))
}

pub fn import_dimacs<R: BufRead>(source: R) -> Result<Imported, DimacsError> {
    let mut graph: Option<Graph> = None;
    let mut expected = 0u64;
    let mut legend = Vec::new();
    for (k, line) in source.lines().enumerate() {
        let line = line?;
        let no = k + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("c node ") {
            let (idx, node) = parse_legend(rest).ok_or(DimacsError::Legend(no))?;
            if idx != legend.len() + 1 {
                return Err(DimacsError::Legend(no));
            }
            legend.push(node);
        } else if line.starts_with('c') {
            continue;
        } else if let Some(rest) = line.strip_prefix("p ") {
            let f: Vec<&str> = rest.split_whitespace().collect();
            let (n, m) = match f.as_slice() {
                [kind, n, m] if *kind == "edge" || *kind == "col" => (n.parse().ok(), m.parse().ok()),
                _ => (None, None),
            };
            let (Some(n), Some(m)) = (n, m) else { return Err(DimacsError::Header(no)) };
            if graph.is_some() {
                return Err(DimacsError::Header(no));
            }
            graph = Some(Graph::new(n));
            expected = m;
        } else if let Some(rest) = line.strip_prefix("e ") {
            let g = graph.as_mut().ok_or(DimacsError::EdgeBeforeHeader(no))?;
            let f: Vec<usize> = rest
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| DimacsError::Edge(no)))
                .collect::<Result<_, _>>()?;
            let [i, j] = f[..] else { return Err(DimacsError::Edge(no)) };
            let n = g.node_count();
            for v in [i, j] {
                if v == 0 || v > n {
                    return Err(DimacsError::Vertex { line: no, vertex: v, n });
                }
            }
            g.add_edge(i - 1, j - 1);
        } else {
            return Err(DimacsError::Edge(no));
        }
    }
    let graph = graph.ok_or(DimacsError::NoHeader)?;
    if graph.edge_count() != expected {
        return Err(DimacsError::EdgeCount { expected, found: graph.edge_count() });
    }
    if !legend.is_empty() && legend.len() != graph.node_count() {
        return Err(DimacsError::Legend(0));
    }
    Ok(Imported { graph, legend })
}
