//! Instance generation and the instance / solution text formats.
//!
//! Instance file:
//!
//! ```text
//! n L_inner L_border
//! top right bottom left      (n² lines, tile ids 1..=n² in order)
//! SOLUTION                   (optional)
//! tileId alpha               (n² lines, row-major)
//! ```
//!
//! Solution file: a line `n` followed by `n²` row-major `tileId alpha`
//! lines, `0 0` marking a hole.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::puzzle::{Board, Color, Instance, Placement, Pos, Rotation, Tile, TileId, GREY};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorParams {
    pub n: usize,
    pub inner_colors: u32,
    pub border_colors: u32,
    pub seed: u64,
}

impl GeneratorParams {
    /// Palette sizes scaled from the 16×16 defaults of 17 inner and 5 border
    /// colours.
    pub fn scaled(n: usize, seed: u64) -> Self {
        let scale = |base: f64| ((base * n as f64 / 16.0).round() as u32).max(2);
        GeneratorParams { n, inner_colors: scale(17.0), border_colors: scale(5.0), seed }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("board side must be at least 2")]
    TooSmall,
    #[error("palettes must be non-empty")]
    EmptyPalette,
    #[error("palette of {0} colours does not fit the colour type")]
    PaletteTooLarge(u32),
}

/// Cuts a randomly coloured board into shuffled, randomly rotated tiles.
///
/// Edges between two border-ring cells draw from `1..=border_colors`, every
/// other inner edge from the inner palette above it, and all outward edges
/// are grey. The planted board is recorded on the returned instance.
pub fn generate(params: &GeneratorParams) -> Result<Instance, GenerateError> {
    let GeneratorParams { n, inner_colors, border_colors, seed } = *params;
    if n < 2 {
        return Err(GenerateError::TooSmall);
    }
    if inner_colors == 0 || border_colors == 0 {
        return Err(GenerateError::EmptyPalette);
    }
    if inner_colors + border_colors > Color::MAX as u32 {
        return Err(GenerateError::PaletteTooLarge(inner_colors + border_colors));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let on_ring = |p: Pos| p.row == 0 || p.col == 0 || p.row + 1 == n || p.col + 1 == n;
    let draw = |a: Pos, b: Pos, rng: &mut ChaCha8Rng| -> Color {
        if on_ring(a) && on_ring(b) {
            rng.gen_range(1..=border_colors) as Color
        } else {
            (border_colors + rng.gen_range(1..=inner_colors)) as Color
        }
    };

    // right[r][c]: colour of the edge between (r,c) and (r,c+1); down likewise.
    let mut right = vec![vec![GREY; n]; n];
    let mut down = vec![vec![GREY; n]; n];
    for r in 0..n {
        for c in 0..n {
            let p = Pos::new(r, c);
            if c + 1 < n {
                right[r][c] = draw(p, Pos::new(r, c + 1), &mut rng);
            }
            if r + 1 < n {
                down[r][c] = draw(p, Pos::new(r + 1, c), &mut rng);
            }
        }
    }

    let mut cut: Vec<(Pos, [Color; 4])> = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let top = if r == 0 { GREY } else { down[r - 1][c] };
            let left = if c == 0 { GREY } else { right[r][c - 1] };
            let colors = [top, right[r][c], down[r][c], left];
            cut.push((Pos::new(r, c), colors));
        }
    }
    cut.shuffle(&mut rng);

    let mut tiles = Vec::with_capacity(n * n);
    let mut planted = Board::empty(n);
    for (i, (pos, colors)) in cut.into_iter().enumerate() {
        // Store the tile turned counter-clockwise by k; placing it with
        // rotation k restores the cut orientation.
        let k: usize = rng.gen_range(0..4);
        let stored = [colors[k & 3], colors[(1 + k) & 3], colors[(2 + k) & 3], colors[(3 + k) & 3]];
        let id = TileId::from_index(i);
        tiles.push(Tile::new(id, stored));
        planted.set(pos, Placement::new(id, Rotation::new(k as u8)));
    }
    let mut inst = Instance::new(n, inner_colors, border_colors, tiles).expect("generated instance is well formed");
    inst.planted = Some(planted);
    Ok(inst)
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: malformed header, expected `n L_inner L_border`")]
    Header { line: usize },
    #[error("line {line}: malformed line `{text}`")]
    Malformed { line: usize, text: String },
    #[error("expected {expected} tiles, found {found}")]
    TileCount { expected: usize, found: usize },
    #[error("line {line}: colour {color} out of range 0..={max}")]
    ColorOutOfRange { line: usize, color: u32, max: u32 },
    #[error("line {line}: unknown tile {tile}")]
    UnknownTile { line: usize, tile: u32 },
    #[error("line {line}: duplicate tile {tile}")]
    DuplicateTile { line: usize, tile: u32 },
    #[error("line {line}: rotation {alpha} out of range 0..=3")]
    Rotation { line: usize, alpha: u32 },
    #[error("wrong dimensions: expected {expected}, found {found}")]
    Dimensions { expected: String, found: String },
}

fn numbers(line: &str, lineno: usize) -> Result<Vec<u32>, ParseError> {
    line.split_whitespace()
        .map(|w| w.parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| ParseError::Malformed { line: lineno, text: line.to_string() })
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines<R: BufRead>(source: R) -> Result<Vec<(usize, String)>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push((i + 1, t.to_string()));
    }
    Ok(out)
}

pub fn write_instance<W: Write>(inst: &Instance, mut sink: W) -> io::Result<()> {
    writeln!(sink, "{} {} {}", inst.n, inst.inner_colors, inst.border_colors)?;
    for t in &inst.tiles {
        let [a, b, c, d] = t.colors;
        writeln!(sink, "{a} {b} {c} {d}")?;
    }
    if let Some(planted) = &inst.planted {
        writeln!(sink, "SOLUTION")?;
        write_placements(planted, &mut sink)?;
    }
    Ok(())
}

pub fn read_instance<R: BufRead>(source: R) -> Result<Instance, ParseError> {
    let lines = content_lines(source)?;
    let Some((hline, header)) = lines.first() else {
        return Err(ParseError::Header { line: 1 });
    };
    let h = numbers(header, *hline).map_err(|_| ParseError::Header { line: *hline })?;
    let [n, inner, border] = h[..] else {
        return Err(ParseError::Header { line: *hline });
    };
    let n = n as usize;
    if n < 2 || inner + border > Color::MAX as u32 {
        return Err(ParseError::Header { line: *hline });
    }
    let max = inner + border;
    let body = &lines[1..];
    let split = body.iter().position(|(_, l)| l == "SOLUTION").unwrap_or(body.len());
    let (tile_lines, solution_lines) = body.split_at(split);
    if tile_lines.len() != n * n {
        return Err(ParseError::TileCount { expected: n * n, found: tile_lines.len() });
    }
    let mut tiles = Vec::with_capacity(n * n);
    for (i, (lineno, text)) in tile_lines.iter().enumerate() {
        let v = numbers(text, *lineno)?;
        let [a, b, c, d] = v[..] else {
            return Err(ParseError::Malformed { line: *lineno, text: text.clone() });
        };
        if let Some(&bad) = v.iter().find(|&&x| x > max) {
            return Err(ParseError::ColorOutOfRange { line: *lineno, color: bad, max });
        }
        tiles.push(Tile::new(TileId::from_index(i), [a as Color, b as Color, c as Color, d as Color]));
    }
    let mut inst = Instance::new(n, inner, border, tiles).expect("validated above");
    if !solution_lines.is_empty() {
        let sol = &solution_lines[1..];
        inst.planted = Some(parse_placements(sol, n, n * n)?);
    }
    Ok(inst)
}

pub fn write_solution<W: Write>(board: &Board, mut sink: W) -> io::Result<()> {
    writeln!(sink, "{}", board.n())?;
    write_placements(board, &mut sink)
}

fn write_placements<W: Write>(board: &Board, sink: &mut W) -> io::Result<()> {
    let n = board.n();
    for r in 0..n {
        for c in 0..n {
            match board.get(Pos::new(r, c)) {
                Some(p) => writeln!(sink, "{} {}", p.tile, p.rot.alpha())?,
                None => writeln!(sink, "0 0")?,
            }
        }
    }
    Ok(())
}

pub fn read_solution<R: BufRead>(source: R, inst: &Instance) -> Result<Board, ParseError> {
    let lines = content_lines(source)?;
    let Some((hline, header)) = lines.first() else {
        return Err(ParseError::Dimensions { expected: inst.n.to_string(), found: "empty file".into() });
    };
    let n = match numbers(header, *hline)?[..] {
        [n] => n as usize,
        _ => return Err(ParseError::Malformed { line: *hline, text: header.clone() }),
    };
    if n != inst.n {
        return Err(ParseError::Dimensions { expected: inst.n.to_string(), found: n.to_string() });
    }
    parse_placements(&lines[1..], n, inst.tiles.len())
}

fn parse_placements(lines: &[(usize, String)], n: usize, tile_count: usize) -> Result<Board, ParseError> {
    if lines.len() != n * n {
        return Err(ParseError::Dimensions {
            expected: format!("{} placements", n * n),
            found: format!("{} placements", lines.len()),
        });
    }
    let mut board = Board::empty(n);
    let mut seen = HashSet::new();
    for (i, (lineno, text)) in lines.iter().enumerate() {
        let v = numbers(text, *lineno)?;
        let [tile, alpha] = v[..] else {
            return Err(ParseError::Malformed { line: *lineno, text: text.clone() });
        };
        if tile == 0 {
            continue;
        }
        if tile as usize > tile_count {
            return Err(ParseError::UnknownTile { line: *lineno, tile });
        }
        if alpha > 3 {
            return Err(ParseError::Rotation { line: *lineno, alpha });
        }
        if !seen.insert(tile) {
            return Err(ParseError::DuplicateTile { line: *lineno, tile });
        }
        board.set(Pos::new(i / n, i % n), Placement::new(TileId(tile), Rotation::new(alpha as u8)));
    }
    Ok(board)
}

/// Tiles with two, one and zero grey edges.
pub fn grey_profile(inst: &Instance) -> [usize; 3] {
    let mut out = [0; 3];
    for t in &inst.tiles {
        match t.grey_count() {
            2 => out[0] += 1,
            1 => out[1] += 1,
            _ => out[2] += 1,
        }
    }
    out
}
