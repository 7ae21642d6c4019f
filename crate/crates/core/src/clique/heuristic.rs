//! Budgeted maximum-clique local search.
//!
//! The current clique grows by adding the candidate with the most
//! neighbours among all candidates (random tie-break). When nothing can be
//! added, a vertex missing exactly one clique neighbour is swapped in for
//! it, and the vertex swapped out becomes tabu for a few steps. After too
//! many swaps without a new best clique, a random outside vertex is forced in and its
//! non-neighbours dropped.
//!
//! Every addition, swap and kick counts as one selection against `q`. The
//! run only depends on `q` through the stopping point, so a larger budget
//! with the same seed never ends with a smaller best clique.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BitIter, Graph};
use crate::clock::Deadline;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CliqueParams {
    /// Selection budget.
    pub q: u64,
    pub seed: u64,
    /// Stop as soon as a clique of this size is found.
    pub target: Option<usize>,
}

impl CliqueParams {
    pub fn new(q: u64, seed: u64) -> Self {
        CliqueParams { q: q.max(1), seed, target: None }
    }

    pub fn with_target(self, target: usize) -> Self {
        CliqueParams { target: Some(target), ..self }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueResult {
    /// Best clique found, ascending.
    pub clique: Vec<usize>,
    pub selections: u64,
}

const TABU_TENURE: u64 = 7;
const PLATEAU_LIMIT: u32 = 100;

struct State<'g> {
    g: &'g Graph,
    in_clique: Vec<bool>,
    clique: Vec<usize>,
    /// For vertices outside the clique: clique members they are not joined to.
    miss: Vec<u32>,
    /// Outside vertices joined to every clique member.
    pa: Vec<u64>,
    pa_len: usize,
}

impl<'g> State<'g> {
    fn new(g: &'g Graph) -> Self {
        let n = g.node_count();
        let mut pa = vec![!0u64; n.div_ceil(64)];
        if !n.is_multiple_of(64) {
            if let Some(last) = pa.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        State { g, in_clique: vec![false; n], clique: Vec::new(), miss: vec![0; n], pa, pa_len: n }
    }

    #[inline]
    fn set_pa(&mut self, v: usize, on: bool) {
        let (w, b) = (v / 64, 1u64 << (v % 64));
        if on {
            self.pa[w] |= b;
            self.pa_len += 1;
        } else {
            self.pa[w] &= !b;
            self.pa_len -= 1;
        }
    }

    /// Calls `f` for every vertex other than `v` not joined to `v`.
    #[inline]
    fn for_non_neighbors(g: &Graph, v: usize, mut f: impl FnMut(usize)) {
        let n = g.node_count();
        for (w, &bits) in g.row(v).iter().enumerate() {
            let mut mask = !bits;
            if w == n / 64 {
                mask &= (1u64 << (n % 64)).wrapping_sub(1);
            }
            for b in BitIter(mask) {
                let u = w * 64 + b;
                if u != v {
                    f(u);
                }
            }
        }
    }

    fn add(&mut self, v: usize) {
        debug_assert!(!self.in_clique[v] && self.miss[v] == 0);
        self.set_pa(v, false);
        self.in_clique[v] = true;
        self.clique.push(v);
        let g = self.g;
        Self::for_non_neighbors(g, v, |u| {
            if !self.in_clique[u] {
                self.miss[u] += 1;
                if self.miss[u] == 1 {
                    self.set_pa(u, false);
                }
            }
        });
    }

    fn remove(&mut self, v: usize) {
        let at = self.clique.iter().position(|&x| x == v).expect("vertex in clique");
        self.clique.swap_remove(at);
        self.in_clique[v] = false;
        let g = self.g;
        Self::for_non_neighbors(g, v, |u| {
            if !self.in_clique[u] {
                self.miss[u] -= 1;
                if self.miss[u] == 0 {
                    self.set_pa(u, true);
                }
            }
        });
        // `v` is joined to every remaining member.
        self.set_pa(v, true);
    }

    /// The candidate with most neighbours among the candidates.
    fn pick_addition(&self, rng: &mut ChaCha8Rng) -> usize {
        let mut best = (0usize, usize::MAX);
        let mut ties = 0u32;
        for (w, &bits) in self.pa.iter().enumerate() {
            for b in BitIter(bits) {
                let v = w * 64 + b;
                let d: usize = self.g.row(v).iter().zip(&self.pa).map(|(a, p)| (a & p).count_ones() as usize).sum();
                if best.1 == usize::MAX || d > best.0 {
                    best = (d, v);
                    ties = 1;
                } else if d == best.0 {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        best = (d, v);
                    }
                }
            }
        }
        best.1
    }

    /// The only clique member `v` is not joined to.
    fn blocker(&self, v: usize) -> usize {
        *self.clique.iter().find(|&&u| !self.g.has_edge(u, v)).expect("vertex misses one member")
    }
}

/// Runs the search until `params.q` selections are spent, the target size
/// is reached or `deadline` expires (polled once per selection).
pub fn max_clique_heuristic(g: &Graph, params: &CliqueParams, deadline: Deadline<'_>) -> CliqueResult {
    let n = g.node_count();
    if n == 0 {
        return CliqueResult { clique: Vec::new(), selections: 0 };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut s = State::new(g);
    let mut best: Vec<usize> = Vec::new();
    let mut tabu_until = vec![0u64; n];
    let mut selections = 0u64;
    let mut plateau = 0u32;
    let reached = |len: usize| params.target.is_some_and(|t| len >= t);

    while selections < params.q && !reached(best.len()) {
        if deadline.expired() {
            break;
        }
        selections += 1;
        if s.pa_len > 0 {
            let v = s.pick_addition(&mut rng);
            s.add(v);
        } else {
            let swaps: Vec<usize> =
                (0..n).filter(|&v| !s.in_clique[v] && s.miss[v] == 1 && tabu_until[v] <= selections).collect();
            if plateau < PLATEAU_LIMIT && !swaps.is_empty() {
                let v = swaps[rng.gen_range(0..swaps.len())];
                let u = s.blocker(v);
                s.remove(u);
                s.add(v);
                tabu_until[u] = selections + TABU_TENURE;
                plateau += 1;
            } else {
                // Kick: force a random outside vertex in.
                let outside: Vec<usize> = (0..n).filter(|&v| !s.in_clique[v]).collect();
                if outside.is_empty() {
                    break;
                }
                let v = outside[rng.gen_range(0..outside.len())];
                let drop: Vec<usize> = s.clique.iter().copied().filter(|&u| !g.has_edge(u, v)).collect();
                for u in drop {
                    s.remove(u);
                    tabu_until[u] = selections + TABU_TENURE;
                }
                s.add(v);
                plateau = 0;
            }
        }
        if s.clique.len() > best.len() {
            best = s.clique.clone();
            plateau = 0;
        }
    }
    best.sort_unstable();
    CliqueResult { clique: best, selections }
}

/// Checks that every pair of `nodes` is joined.
pub fn is_clique(g: &Graph, nodes: &[usize]) -> bool {
    nodes.iter().enumerate().all(|(a, &i)| nodes[a + 1..].iter().all(|&j| i != j && g.has_edge(i, j)))
}
