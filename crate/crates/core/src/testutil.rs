//! Shared fixtures for unit tests.

use rand::Rng;

use crate::io::{generate, GeneratorParams};
use crate::puzzle::{Board, Instance, Placement, Pos, Rotation};

pub fn planted(n: usize, seed: u64) -> (Instance, Board) {
    let inst = generate(&GeneratorParams::scaled(n, seed)).unwrap();
    let board = inst.planted.clone().unwrap();
    (inst, board)
}

/// First frame-feasible rotation of the tile at its new position, or the
/// unchanged rotation if none fits.
pub fn fit(inst: &Instance, p: Placement, pos: Pos) -> Placement {
    match inst.feasible_rotations(p.tile, pos).next() {
        Some(rot) => Placement::new(p.tile, rot),
        None => p,
    }
}

/// Exchanges two tiles, turning each to a frame-feasible rotation.
pub fn swap(inst: &Instance, board: &mut Board, a: Pos, b: Pos) {
    let pa = board.get(a).unwrap();
    let pb = board.get(b).unwrap();
    board.set(a, fit(inst, pb, a));
    board.set(b, fit(inst, pa, b));
}

/// A few random frame-preserving swaps, each sometimes followed by a
/// re-rotation; with `mixed`, any two tiles may be exchanged.
pub fn scramble(inst: &Instance, board: &mut Board, swaps: usize, mixed: bool, rng: &mut impl Rng) {
    let n = inst.n;
    let mut done = 0;
    while done < swaps {
        let a = Pos::new(rng.gen_range(0..n), rng.gen_range(0..n));
        let b = Pos::new(rng.gen_range(0..n), rng.gen_range(0..n));
        let fits = |p: Pos, q: Pos| inst.feasible_rotations(board.get(p).unwrap().tile, q).next().is_some();
        if a == b || (!mixed && !(fits(a, b) && fits(b, a))) {
            continue;
        }
        swap(inst, board, a, b);
        if rng.gen_bool(0.3) {
            let p = board.get(a).unwrap();
            let rots: Vec<Rotation> = inst.feasible_rotations(p.tile, a).collect();
            if !rots.is_empty() {
                board.set(a, Placement::new(p.tile, rots[rng.gen_range(0..rots.len())]));
            }
        }
        done += 1;
    }
}
