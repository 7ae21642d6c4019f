//! The region model as a mixed-integer program in LP text format.
//!
//! Variables: binary `x_t_r_c_a` (tile `t` at row `r`, column `c`, rotation
//! `a`, all 1-based but `a`), one per frame-feasible placement, and continuous `h_r_c` / `v_r_c` in `[0, 1]`
//! flagging an unmatched right / bottom edge of `(r, c)`.
//!
//! Row families:
//! * `assign_t*`: each candidate tile used once (`<= 1` when there are more
//!   candidates than cells),
//! * `pos_*`: each region cell filled once,
//! * `h1_*`, `h2_*`, `v1_*`, `v2_*`: edge rows per colour `l = 1..=L`; an edge
//!   between two region cells has `2L` rows, an edge to a fixed context tile
//!   `L` (the rows that are not trivially satisfied),
//! * `frame_*`: grey on every outward side of a region cell on the board edge,
//! * `cut_*`: one exclusion row per forbidden placement-set,
//! * `zero`: all edge variables forced to zero in zero-defect mode.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::puzzle::{frame_feasible, frame_mask, Color, Instance, Placement, Pos, Rotation, Side, GREY};

use super::{RegionProblem, SolveMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(i32, String)>,
    pub sense: Sense,
    pub rhs: i32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LpModel {
    pub comment: String,
    pub objective: Vec<String>,
    pub rows: Vec<Row>,
    pub continuous: Vec<String>,
    pub binaries: Vec<String>,
}

fn x_name(p: Placement, pos: Pos) -> String {
    format!("x_{}_{}_{}_{}", p.tile, pos.row + 1, pos.col + 1, p.rot.alpha())
}

fn edge_name(kind: char, pos: Pos) -> String {
    format!("{kind}_{}_{}", pos.row + 1, pos.col + 1)
}

/// Endpoint of an edge: a region cell, or a context tile showing a colour.
#[derive(Clone, Copy)]
enum End {
    Cell(Pos),
    Fixed(Color),
}

/// Builds the model of `problem`.
pub fn build_lp(problem: &RegionProblem<'_>) -> LpModel {
    let inst = problem.instance;
    let n = inst.n;
    let cells = problem.region.positions();
    let mut cands = problem.candidates.clone();
    cands.sort_unstable();
    cands.dedup();
    let palette = inst.palette() as Color;

    let all: Vec<Placement> = cands.iter().flat_map(|&t| Rotation::ALL.map(|r| Placement::new(t, r))).collect();
    // Only frame-feasible placements get a variable.
    let fits = |pos: Pos, p: Placement| frame_feasible(inst.tile(p.tile), p.rot, frame_mask(n, pos));
    // Terms showing colour `l` on `side` of `pos`, with coefficient `sign`.
    let shows = |pos: Pos, side: Side, l: Color, sign: i32| -> Vec<(i32, String)> {
        all.iter()
            .copied()
            .filter(|&p| fits(pos, p) && inst.color(p, side) == l)
            .map(|p| (sign, x_name(p, pos)))
            .collect()
    };

    let mut m = LpModel { comment: format!("edge-matching region model {}", problem.region), ..Default::default() };

    for &pos in &cells {
        for &p in all.iter().filter(|&&p| fits(pos, p)) {
            m.binaries.push(x_name(p, pos));
        }
    }

    let eq_assign = cands.len() == cells.len();
    for &t in &cands {
        let terms = cells
            .iter()
            .flat_map(|&pos| Rotation::ALL.map(move |r| (pos, Placement::new(t, r))))
            .filter(|&(pos, p)| fits(pos, p))
            .map(|(pos, p)| (1, x_name(p, pos)))
            .collect();
        m.rows.push(Row {
            name: format!("assign_t{t}"),
            terms,
            sense: if eq_assign { Sense::Eq } else { Sense::Le },
            rhs: 1,
        });
    }
    for &pos in &cells {
        let terms = all.iter().filter(|&&p| fits(pos, p)).map(|&p| (1, x_name(p, pos))).collect();
        m.rows.push(Row { name: format!("pos_{}_{}", pos.row + 1, pos.col + 1), terms, sense: Sense::Eq, rhs: 1 });
    }

    let end_of = |pos: Pos, toward: Side| -> Option<End> {
        if problem.region.contains(pos) {
            Some(End::Cell(pos))
        } else {
            problem.context.get(pos).map(|p| End::Fixed(inst.color(p, toward)))
        }
    };
    // Edges in row-major order of their first endpoint: right edge, then bottom edge.
    for r in 0..n {
        for c in 0..n {
            let a = Pos::new(r, c);
            for (kind, side) in [('h', Side::Right), ('v', Side::Bottom)] {
                let Some(b) = a.neighbor(side, n) else { continue };
                let (Some(ea), Some(eb)) = (end_of(a, side), end_of(b, side.opposite())) else { continue };
                if matches!((ea, eb), (End::Fixed(_), End::Fixed(_))) {
                    continue;
                }
                let var = edge_name(kind, a);
                m.objective.push(var.clone());
                m.continuous.push(var.clone());
                let tag = format!("{}_{}_{}", kind, r + 1, c + 1);
                for l in 1..=palette {
                    match (ea, eb) {
                        (End::Cell(pa), End::Cell(pb)) => {
                            let mut t1 = shows(pa, side, l, 1);
                            t1.extend(shows(pb, side.opposite(), l, -1));
                            t1.push((-1, var.clone()));
                            let t2 = t1
                                .iter()
                                .map(|(k, v)| if v == &var { (-1, v.clone()) } else { (-k, v.clone()) })
                                .collect();
                            m.rows.push(Row {
                                name: format!("{kind}1_{tag}_{l}"),
                                terms: t1,
                                sense: Sense::Le,
                                rhs: 0,
                            });
                            m.rows.push(Row {
                                name: format!("{kind}2_{tag}_{l}"),
                                terms: t2,
                                sense: Sense::Le,
                                rhs: 0,
                            });
                        }
                        (End::Cell(pc), End::Fixed(k)) | (End::Fixed(k), End::Cell(pc)) => {
                            let toward = if pc == a { side } else { side.opposite() };
                            let mut t = if l == k { shows(pc, toward, l, -1) } else { shows(pc, toward, l, 1) };
                            t.push((-1, var.clone()));
                            let rhs = if l == k { -1 } else { 0 };
                            m.rows.push(Row { name: format!("{kind}c_{tag}_{l}"), terms: t, sense: Sense::Le, rhs });
                        }
                        (End::Fixed(_), End::Fixed(_)) => unreachable!(),
                    }
                }
            }
        }
    }

    for &pos in &cells {
        let mask = frame_mask(n, pos);
        for side in Side::ALL {
            if mask & side.bit() == 0 {
                continue;
            }
            let terms = shows(pos, side, GREY, 1);
            let name =
                format!("frame_{}_{}_{}", ["top", "right", "bottom", "left"][side.index()], pos.row + 1, pos.col + 1);
            m.rows.push(Row { name, terms, sense: Sense::Eq, rhs: 1 });
        }
    }

    for (i, set) in problem.excluded.iter().enumerate() {
        let terms = set.iter().filter(|&&(pos, p)| fits(pos, p)).map(|&(pos, p)| (1, x_name(p, pos))).collect();
        m.rows.push(Row { name: format!("cut_{}", i + 1), terms, sense: Sense::Le, rhs: set.len() as i32 - 1 });
    }
    if problem.mode == SolveMode::ZeroDefectOnly && !m.objective.is_empty() {
        let terms = m.objective.iter().map(|v| (1, v.clone())).collect();
        m.rows.push(Row { name: "zero".into(), terms, sense: Sense::Le, rhs: 0 });
    }
    m
}

impl LpModel {
    /// Number of rows whose name starts with `prefix`.
    pub fn count(&self, prefix: &str) -> usize {
        self.rows.iter().filter(|r| r.name.starts_with(prefix)).count()
    }

    pub fn write<W: Write>(&self, mut sink: W) -> io::Result<()> {
        writeln!(sink, "\\ {}", self.comment)?;
        writeln!(sink, "Minimize")?;
        let obj: Vec<(i32, String)> = self.objective.iter().map(|v| (1, v.clone())).collect();
        write!(sink, " obj:")?;
        if obj.is_empty() {
            writeln!(sink, " 0")?;
        } else {
            write_terms(&mut sink, &obj)?;
            writeln!(sink)?;
        }
        writeln!(sink, "Subject To")?;
        for row in &self.rows {
            write!(sink, " {}:", row.name)?;
            if row.terms.is_empty() {
                write!(sink, " 0")?;
            } else {
                write_terms(&mut sink, &row.terms)?;
            }
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
            };
            writeln!(sink, " {op} {}", row.rhs)?;
        }
        writeln!(sink, "Bounds")?;
        for v in &self.continuous {
            writeln!(sink, " 0 <= {v} <= 1")?;
        }
        writeln!(sink, "Binaries")?;
        for chunk in self.binaries.chunks(8) {
            writeln!(sink, " {}", chunk.join(" "))?;
        }
        writeln!(sink, "End")
    }

    /// Checks every row and bound for the given values (missing variables
    /// read as 0); returns the objective value or the first violated row.
    pub fn check(&self, values: &HashMap<String, i64>) -> Result<i64, String> {
        let get = |v: &str| values.get(v).copied().unwrap_or(0);
        for row in &self.rows {
            let lhs: i64 = row.terms.iter().map(|(k, v)| *k as i64 * get(v)).sum();
            let ok = match row.sense {
                Sense::Le => lhs <= row.rhs as i64,
                Sense::Eq => lhs == row.rhs as i64,
            };
            if !ok {
                return Err(row.name.clone());
            }
        }
        for v in &self.continuous {
            if !(0..=1).contains(&get(v)) {
                return Err(format!("bound {v}"));
            }
        }
        for v in &self.binaries {
            if !(0..=1).contains(&get(v)) {
                return Err(format!("binary {v}"));
            }
        }
        Ok(self.objective.iter().map(|v| get(v)).sum())
    }
}

fn write_terms<W: Write>(sink: &mut W, terms: &[(i32, String)]) -> io::Result<()> {
    for (i, (k, v)) in terms.iter().enumerate() {
        if i > 0 && i % 8 == 0 {
            write!(sink, "\n   ")?;
        }
        let sign = if *k < 0 { "-" } else { "+" };
        let mag = k.unsigned_abs();
        match (i, mag) {
            (0, 1) if *k > 0 => write!(sink, " {v}")?,
            (_, 1) => write!(sink, " {sign} {v}")?,
            _ => write!(sink, " {sign} {mag} {v}")?,
        }
    }
    Ok(())
}

/// Writes the model of `problem` to `sink`.
pub fn export_lp<W: Write>(problem: &RegionProblem<'_>, sink: W) -> io::Result<()> {
    build_lp(problem).write(sink)
}

/// Variable values of a region placement: `x` from the placements, `h`/`v`
/// set exactly where the resulting edge is unmatched.
pub fn solution_values(problem: &RegionProblem<'_>, placements: &[(Pos, Placement)]) -> HashMap<String, i64> {
    let inst: &Instance = problem.instance;
    let mut board = problem.context.clone();
    let mut values = HashMap::new();
    for &(pos, p) in placements {
        board.set(pos, p);
        values.insert(x_name(p, pos), 1);
    }
    let n = inst.n;
    for (pos, _) in board.placements() {
        for (kind, side) in [('h', Side::Right), ('v', Side::Bottom)] {
            let Some(q) = pos.neighbor(side, n) else { continue };
            if !(problem.region.contains(pos) || problem.region.contains(q)) {
                continue;
            }
            if let (Some(a), Some(b)) = (board.color(inst, pos, side), board.color(inst, q, side.opposite())) {
                values.insert(edge_name(kind, pos), (a != b) as i64);
            }
        }
    }
    values
}
