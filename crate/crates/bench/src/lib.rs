//! Fixtures shared by the benchmarks.

use edgematch::io::{generate, GeneratorParams};
use edgematch::pipeline::random_board;
use edgematch::region::Region;
use edgematch::{Board, Instance};

/// Generated instance with the default palette for its size.
pub fn instance(n: usize, seed: u64) -> Instance {
    generate(&GeneratorParams::scaled(n, seed)).expect("valid generator parameters")
}

/// A random frame-respecting board with the cells of `region` emptied.
pub fn context_around(inst: &Instance, region: Region, seed: u64) -> Board {
    let mut board = random_board(inst, seed);
    for pos in region.positions() {
        board.clear(pos);
    }
    board
}
