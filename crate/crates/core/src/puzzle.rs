//! Tiles, rotations, boards and scoring.
//!
//! Side order is `[top, right, bottom, left]` and rotations are clockwise
//! quarter-turns. Rotating a tile clockwise moves its left edge to the top, so
//! a tile placed with rotation `a` shows `colors[(side - a) mod 4]` on `side`.
//! Colour `0` is the grey frame colour.

use std::fmt;

use thiserror::Error;

pub type Color = u8;

/// The frame colour every outward-facing border edge must carry.
pub const GREY: Color = 0;

/// 1-based tile identifier, unique within an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileId(pub u32);

impl TileId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        TileId(index as u32 + 1)
    }
}

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Top = 0,
    Right = 1,
    Bottom = 2,
    Left = 3,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Top, Side::Right, Side::Bottom, Side::Left];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Side {
        Side::ALL[i & 3]
    }

    #[inline]
    pub fn opposite(self) -> Side {
        Side::from_index(self.index() + 2)
    }

    #[inline]
    pub fn bit(self) -> u8 {
        1 << self as u8
    }
}

/// Clockwise quarter-turns, always in `0..4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rotation(u8);

impl Rotation {
    pub const ALL: [Rotation; 4] = [Rotation(0), Rotation(1), Rotation(2), Rotation(3)];

    /// Reduces `alpha` modulo 4.
    #[inline]
    pub fn new(alpha: u8) -> Self {
        Rotation(alpha & 3)
    }

    #[inline]
    pub fn alpha(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn next(self) -> Self {
        Rotation::new(self.0 + 1)
    }
}

/// A square tile with four edge colours in `[top, right, bottom, left]` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tile {
    pub id: TileId,
    pub colors: [Color; 4],
}

impl Tile {
    pub fn new(id: TileId, colors: [Color; 4]) -> Self {
        Tile { id, colors }
    }

    /// Colour shown on `side` when the tile is turned clockwise by `rot`.
    #[inline]
    pub fn color_at(&self, rot: Rotation, side: Side) -> Color {
        self.colors[(side.index() + 4 - rot.alpha() as usize) & 3]
    }

    /// Bit mask of the sides showing grey in the stored orientation.
    #[inline]
    pub fn grey_mask(&self) -> u8 {
        self.colors.iter().enumerate().filter(|(_, &c)| c == GREY).fold(0, |m, (i, _)| m | (1 << i))
    }

    /// Bit mask of the sides showing grey once rotated by `rot`.
    #[inline]
    pub fn rotated_grey_mask(&self, rot: Rotation) -> u8 {
        let m = self.grey_mask();
        let a = rot.alpha();
        ((m << a) | (m >> (4 - a))) & 0xF
    }

    pub fn grey_count(&self) -> u32 {
        self.grey_mask().count_ones()
    }

    /// Tiles carrying at least one grey edge belong to the border pool.
    pub fn pool(&self) -> Pool {
        if self.grey_count() > 0 {
            Pool::Border
        } else {
            Pool::Inner
        }
    }
}

/// Tile pools that local search never mixes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pool {
    Inner,
    Border,
}

/// A grid position, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub row: usize,
    pub col: usize,
}

impl Pos {
    #[inline]
    pub const fn new(row: usize, col: usize) -> Self {
        Pos { row, col }
    }

    /// The orthogonal neighbour across `side`, if it lies on an `n`×`n` board.
    #[inline]
    pub fn neighbor(self, side: Side, n: usize) -> Option<Pos> {
        match side {
            Side::Top if self.row > 0 => Some(Pos::new(self.row - 1, self.col)),
            Side::Right if self.col + 1 < n => Some(Pos::new(self.row, self.col + 1)),
            Side::Bottom if self.row + 1 < n => Some(Pos::new(self.row + 1, self.col)),
            Side::Left if self.col > 0 => Some(Pos::new(self.row, self.col - 1)),
            _ => None,
        }
    }

    pub fn is_adjacent(self, other: Pos) -> bool {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col) == 1
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row + 1, self.col + 1)
    }
}

/// Sides of `pos` facing off the board, as a bit mask.
#[inline]
pub fn frame_mask(n: usize, pos: Pos) -> u8 {
    let mut m = 0;
    if pos.row == 0 {
        m |= Side::Top.bit();
    }
    if pos.col + 1 == n {
        m |= Side::Right.bit();
    }
    if pos.row + 1 == n {
        m |= Side::Bottom.bit();
    }
    if pos.col == 0 {
        m |= Side::Left.bit();
    }
    m
}

/// Pool a position belongs to: the outer ring is the border pool.
pub fn cell_pool(n: usize, pos: Pos) -> Pool {
    if frame_mask(n, pos) != 0 {
        Pool::Border
    } else {
        Pool::Inner
    }
}

/// A placement is frame-feasible iff grey shows on exactly the outward sides.
#[inline]
pub fn frame_feasible(tile: &Tile, rot: Rotation, cell_mask: u8) -> bool {
    tile.rotated_grey_mask(rot) == cell_mask
}

/// Tile and rotation occupying a position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub tile: TileId,
    pub rot: Rotation,
}

impl Placement {
    pub fn new(tile: TileId, rot: Rotation) -> Self {
        Placement { tile, rot }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("board side must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("expected {expected} tiles, found {found}")]
    TileCount { expected: usize, found: usize },
    #[error("tile {0} has an out-of-order id")]
    TileOrder(TileId),
    #[error("tile {tile} uses colour {color} outside the palette 0..={max}")]
    ColorOutOfRange { tile: TileId, color: Color, max: Color },
}

/// A puzzle: board side, palette sizes and the `n²` tiles.
///
/// Non-grey colours are `1..=border_colors` for edges between two border
/// cells and `border_colors+1 ..= border_colors+inner_colors` for all other
/// inner edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub n: usize,
    pub inner_colors: u32,
    pub border_colors: u32,
    pub tiles: Vec<Tile>,
    pub planted: Option<Board>,
}

impl Instance {
    pub fn new(n: usize, inner_colors: u32, border_colors: u32, tiles: Vec<Tile>) -> Result<Self, InstanceError> {
        if n < 2 {
            return Err(InstanceError::TooSmall(n));
        }
        if tiles.len() != n * n {
            return Err(InstanceError::TileCount { expected: n * n, found: tiles.len() });
        }
        let max = (inner_colors + border_colors) as Color;
        for (i, t) in tiles.iter().enumerate() {
            if t.id != TileId::from_index(i) {
                return Err(InstanceError::TileOrder(t.id));
            }
            if let Some(&c) = t.colors.iter().find(|&&c| c > max) {
                return Err(InstanceError::ColorOutOfRange { tile: t.id, color: c, max });
            }
        }
        Ok(Instance { n, inner_colors, border_colors, tiles, planted: None })
    }

    /// Total number of non-grey colours.
    pub fn palette(&self) -> u32 {
        self.inner_colors + self.border_colors
    }

    #[inline]
    pub fn tile(&self, id: TileId) -> &Tile {
        &self.tiles[id.index()]
    }

    pub fn tile_ids(&self) -> impl Iterator<Item = TileId> + '_ {
        self.tiles.iter().map(|t| t.id)
    }

    #[inline]
    pub fn color(&self, p: Placement, side: Side) -> Color {
        self.tile(p.tile).color_at(p.rot, side)
    }

    /// Number of edges between two board positions: `2n(n-1)`.
    pub fn inner_edge_count(&self) -> u32 {
        (2 * self.n * (self.n - 1)) as u32
    }

    pub fn positions(&self) -> impl Iterator<Item = Pos> {
        let n = self.n;
        (0..n * n).map(move |i| Pos::new(i / n, i % n))
    }

    /// Frame-feasible rotations of `tile` at `pos`, ascending.
    pub fn feasible_rotations(&self, tile: TileId, pos: Pos) -> impl Iterator<Item = Rotation> {
        let t = *self.tile(tile);
        let mask = frame_mask(self.n, pos);
        Rotation::ALL.into_iter().filter(move |&r| frame_feasible(&t, r, mask))
    }
}

/// Counts reported for a (possibly partial) board.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Score {
    pub matched_inner: u32,
    pub unmatched_inner: u32,
    pub frame_violations: u32,
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "matched {}/{}, frame {}",
            self.matched_inner,
            self.matched_inner + self.unmatched_inner,
            self.frame_violations
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoardError {
    #[error("board has holes")]
    Holes,
    #[error("board is {found}x{found}, instance is {expected}x{expected}")]
    Size { expected: usize, found: usize },
}

/// An `n`×`n` grid of optional placements. A board without holes is complete.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Board {
    n: usize,
    cells: Vec<Option<Placement>>,
}

impl Board {
    pub fn empty(n: usize) -> Self {
        Board { n, cells: vec![None; n * n] }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, pos: Pos) -> Option<Placement> {
        self.cells[pos.row * self.n + pos.col]
    }

    #[inline]
    pub fn set(&mut self, pos: Pos, placement: Placement) {
        self.cells[pos.row * self.n + pos.col] = Some(placement);
    }

    #[inline]
    pub fn clear(&mut self, pos: Pos) -> Option<Placement> {
        self.cells[pos.row * self.n + pos.col].take()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn holes(&self) -> impl Iterator<Item = Pos> + '_ {
        let n = self.n;
        self.cells.iter().enumerate().filter(|(_, c)| c.is_none()).map(move |(i, _)| Pos::new(i / n, i % n))
    }

    /// Placed cells in row-major order.
    pub fn placements(&self) -> impl Iterator<Item = (Pos, Placement)> + '_ {
        let n = self.n;
        self.cells.iter().enumerate().filter_map(move |(i, c)| c.map(|p| (Pos::new(i / n, i % n), p)))
    }

    pub fn placed_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Colour shown at `side` of `pos`, if a tile is placed there.
    #[inline]
    pub fn color(&self, inst: &Instance, pos: Pos, side: Side) -> Option<Color> {
        self.get(pos).map(|p| inst.color(p, side))
    }

    /// Unmatched inner edges touching `pos` (edges to holes ignored).
    pub fn defects_at(&self, inst: &Instance, pos: Pos) -> u32 {
        let Some(p) = self.get(pos) else { return 0 };
        let mut d = 0;
        for side in Side::ALL {
            if let Some(q) = pos.neighbor(side, self.n) {
                if let Some(c) = self.color(inst, q, side.opposite()) {
                    d += (inst.color(p, side) != c) as u32;
                }
            }
        }
        d
    }

    /// Position of every placed tile, indexed by tile index.
    pub fn tile_positions(&self, tile_count: usize) -> Vec<Option<Pos>> {
        let mut out = vec![None; tile_count];
        for (pos, p) in self.placements() {
            out[p.tile.index()] = Some(pos);
        }
        out
    }
}

/// Scores a complete board.
pub fn score_board(inst: &Instance, board: &Board) -> Result<Score, BoardError> {
    if board.n() != inst.n {
        return Err(BoardError::Size { expected: inst.n, found: board.n() });
    }
    if !board.is_complete() {
        return Err(BoardError::Holes);
    }
    Ok(score_partial(inst, board))
}

/// Scores only realised edges: both endpoints placed, and frame edges of
/// placed border tiles.
pub fn score_partial(inst: &Instance, board: &Board) -> Score {
    let n = board.n();
    let mut s = Score::default();
    for (pos, p) in board.placements() {
        for side in [Side::Right, Side::Bottom] {
            if let Some(q) = pos.neighbor(side, n) {
                if let Some(c) = board.color(inst, q, side.opposite()) {
                    if inst.color(p, side) == c {
                        s.matched_inner += 1;
                    } else {
                        s.unmatched_inner += 1;
                    }
                }
            }
        }
        let mask = frame_mask(n, pos);
        for side in Side::ALL {
            if mask & side.bit() != 0 && inst.color(p, side) != GREY {
                s.frame_violations += 1;
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tile(colors: [Color; 4]) -> Tile {
        Tile::new(TileId(1), colors)
    }

    #[test]
    fn color_at_fixture() {
        let t = tile([1, 2, 3, 4]);
        // Hand-rotated: each row is the tile turned clockwise once more.
        let table: [[Color; 4]; 4] = [[1, 2, 3, 4], [4, 1, 2, 3], [3, 4, 1, 2], [2, 3, 4, 1]];
        for (a, row) in table.iter().enumerate() {
            for side in Side::ALL {
                assert_eq!(t.color_at(Rotation::new(a as u8), side), row[side.index()], "alpha {a} side {side:?}");
            }
        }
        assert_eq!(t.color_at(Rotation::new(1), Side::Top), 4);
        assert_eq!(t.color_at(Rotation::new(2), Side::Right), 4);
    }

    #[test]
    fn grey_mask_rotates_with_tile() {
        let t = tile([0, 5, 6, 0]);
        for rot in Rotation::ALL {
            let expect = Side::ALL.iter().filter(|&&s| t.color_at(rot, s) == GREY).fold(0u8, |m, s| m | s.bit());
            assert_eq!(t.rotated_grey_mask(rot), expect);
        }
    }

    #[test]
    fn frame_masks_on_3x3() {
        assert_eq!(frame_mask(3, Pos::new(0, 0)), 0b1001);
        assert_eq!(frame_mask(3, Pos::new(1, 1)), 0);
        assert_eq!(frame_mask(3, Pos::new(2, 1)), 0b0100);
        assert_eq!(frame_mask(2, Pos::new(1, 1)), 0b0110);
    }

    #[test]
    fn empty_and_single_tile_partial_scores() {
        let inst =
            Instance::new(3, 2, 1, (0..9).map(|i| Tile::new(TileId::from_index(i), [1, 2, 3, 1])).collect()).unwrap();
        let mut b = Board::empty(3);
        assert_eq!(score_partial(&inst, &b), Score::default());
        b.set(Pos::new(1, 1), Placement::new(TileId(1), Rotation::new(0)));
        assert_eq!(score_partial(&inst, &b), Score::default());
        assert_eq!(score_board(&inst, &b), Err(BoardError::Holes));
    }

    #[test]
    fn instance_validation() {
        let tiles = (0..8).map(|i| Tile::new(TileId::from_index(i), [0; 4])).collect();
        assert_eq!(Instance::new(3, 1, 1, tiles), Err(InstanceError::TileCount { expected: 9, found: 8 }));
        let tiles = (0..4).map(|i| Tile::new(TileId::from_index(i), [0, 0, 3, 1])).collect();
        assert!(matches!(Instance::new(2, 1, 1, tiles), Err(InstanceError::ColorOutOfRange { color: 3, .. })));
    }
}
