//! Depth-first branch-and-bound over an ordered list of cells.
//!
//! Each cell is filled from the candidate tiles with a frame-feasible
//! rotation. Edges to fixed context tiles and to cells earlier in the order
//! are charged when a cell is placed, so the realised cost of a partial
//! assignment never decreases along a branch. On top of it sits an
//! admissible bound on the context edges of the cells still open:
//!
//! * a cell touching exactly one context tile needs a tile able to show the
//!   demanded colour on that side; demands of one kind that outnumber the
//!   remaining supply must go unmatched;
//! * a cell touching several context tiles is charged the cheapest candidate
//!   it could ever take.

use std::collections::{HashMap, HashSet};

use crate::clock::Deadline;
use crate::puzzle::{frame_feasible, frame_mask, Board, Color, Instance, Placement, Pos, Rotation, Side, TileId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    Minimize,
    ZeroOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    /// Search space exhausted: the incumbent (if any) is optimal.
    Complete,
    TimedOut,
}

#[derive(Clone, Debug)]
pub(crate) struct SearchResult {
    pub best: Option<(Vec<Placement>, u32)>,
    pub outcome: Outcome,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug)]
enum Link {
    Open,
    Context(Color),
    Earlier(usize),
}

#[derive(Clone, Copy, Debug)]
struct Opt {
    cand: u16,
    rot: Rotation,
    colors: [Color; 4],
}

pub(crate) struct CellSearch<'a> {
    cells: Vec<Pos>,
    candidates: Vec<TileId>,
    options: Vec<Vec<Opt>>,
    links: Vec<[Link; 4]>,
    // bound bookkeeping
    demand_of: Vec<Option<usize>>,
    supply_of: Vec<Vec<usize>>,
    supply: Vec<u32>,
    demand: Vec<u32>,
    deficit: u32,
    static_suffix: Vec<u32>,
    excluded: HashSet<Vec<Placement>>,
    deadline: Deadline<'a>,
    mode: Mode,
    // search state
    available: Vec<bool>,
    chosen: Vec<usize>,
    best: Option<(Vec<usize>, u32)>,
    floor: u32,
    nodes: u64,
    timed_out: bool,
    scratch: Vec<Vec<(u8, u16)>>,
}

impl<'a> CellSearch<'a> {
    /// `context` must leave every cell in `cells` empty.
    pub fn new(
        inst: &Instance,
        context: &Board,
        cells: Vec<Pos>,
        candidates: &[TileId],
        excluded: &[Vec<Placement>],
        mode: Mode,
        deadline: Deadline<'a>,
    ) -> Self {
        let n = inst.n;
        let mut candidates = candidates.to_vec();
        candidates.sort_unstable();
        candidates.dedup();
        let index_of: HashMap<Pos, usize> = cells.iter().enumerate().map(|(i, &p)| (p, i)).collect();

        let mut links = Vec::with_capacity(cells.len());
        for (i, &pos) in cells.iter().enumerate() {
            let mut l = [Link::Open; 4];
            for side in Side::ALL {
                let Some(q) = pos.neighbor(side, n) else { continue };
                l[side.index()] = match index_of.get(&q) {
                    Some(&j) if j < i => Link::Earlier(j),
                    Some(_) => Link::Open,
                    None => match context.get(q) {
                        Some(p) => Link::Context(inst.color(p, side.opposite())),
                        None => Link::Open,
                    },
                };
            }
            links.push(l);
        }

        let options: Vec<Vec<Opt>> = cells
            .iter()
            .map(|&pos| {
                let mask = frame_mask(n, pos);
                let mut v = Vec::new();
                for (k, &t) in candidates.iter().enumerate() {
                    let tile = inst.tile(t);
                    for rot in Rotation::ALL {
                        if frame_feasible(tile, rot, mask) {
                            let colors = Side::ALL.map(|s| tile.color_at(rot, s));
                            v.push(Opt { cand: k as u16, rot, colors });
                        }
                    }
                }
                v
            })
            .collect();

        // Demand signatures: (frame mask, context side) of single-context cells.
        let colors_per_sig = inst.palette() as usize + 1;
        let mut sigs: Vec<(u8, Side)> = Vec::new();
        let mut demand_of = vec![None; cells.len()];
        let mut static_lb = vec![0u32; cells.len()];
        for (i, l) in links.iter().enumerate() {
            let ctx: Vec<(Side, Color)> = Side::ALL
                .iter()
                .filter_map(|&s| match l[s.index()] {
                    Link::Context(c) => Some((s, c)),
                    _ => None,
                })
                .collect();
            match ctx.len() {
                0 => {}
                1 => {
                    let key = (frame_mask(n, cells[i]), ctx[0].0);
                    let sig = sigs.iter().position(|&k| k == key).unwrap_or_else(|| {
                        sigs.push(key);
                        sigs.len() - 1
                    });
                    demand_of[i] = Some(sig * colors_per_sig + ctx[0].1 as usize);
                }
                _ => {
                    static_lb[i] = options[i]
                        .iter()
                        .map(|o| ctx.iter().filter(|&&(s, c)| o.colors[s.index()] != c).count() as u32)
                        .min()
                        .unwrap_or(0);
                }
            }
        }
        let mut supply_of = vec![Vec::new(); candidates.len()];
        for (k, &t) in candidates.iter().enumerate() {
            let tile = inst.tile(t);
            for (sig, &(mask, side)) in sigs.iter().enumerate() {
                let mut shown: Vec<usize> = Rotation::ALL
                    .iter()
                    .filter(|&&r| frame_feasible(tile, r, mask))
                    .map(|&r| sig * colors_per_sig + tile.color_at(r, side) as usize)
                    .collect();
                shown.sort_unstable();
                shown.dedup();
                supply_of[k].extend(shown);
            }
        }
        let mut supply = vec![0u32; sigs.len() * colors_per_sig];
        let mut demand = vec![0u32; sigs.len() * colors_per_sig];
        for list in &supply_of {
            for &key in list {
                supply[key] += 1;
            }
        }
        for key in demand_of.iter().flatten() {
            demand[*key] += 1;
        }
        let deficit = demand.iter().zip(&supply).map(|(&d, &s)| d.saturating_sub(s)).sum();
        let mut static_suffix = vec![0u32; cells.len() + 1];
        for i in (0..cells.len()).rev() {
            static_suffix[i] = static_suffix[i + 1] + static_lb[i];
        }

        let ncells = cells.len();
        CellSearch {
            cells,
            available: vec![true; candidates.len()],
            candidates,
            options,
            links,
            demand_of,
            supply_of,
            supply,
            demand,
            deficit,
            static_suffix,
            excluded: excluded.iter().cloned().collect(),
            deadline,
            mode,
            chosen: vec![usize::MAX; ncells],
            best: None,
            floor: 0,
            nodes: 0,
            timed_out: false,
            scratch: vec![Vec::new(); ncells],
        }
    }

    /// Root lower bound on the objective.
    pub fn root_bound(&self) -> u32 {
        self.static_suffix[0] + self.deficit
    }

    #[inline]
    fn cost(&self, i: usize, o: &Opt) -> u32 {
        let mut c = 0;
        for s in 0..4 {
            match self.links[i][s] {
                Link::Open => {}
                Link::Context(col) => c += (o.colors[s] != col) as u32,
                Link::Earlier(j) => {
                    let other = &self.options[j][self.chosen[j]];
                    c += (o.colors[s] != other.colors[(s + 2) & 3]) as u32;
                }
            }
        }
        c
    }

    fn placements_of(&self, chosen: &[usize]) -> Vec<Placement> {
        chosen
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let o = &self.options[i][k];
                Placement::new(self.candidates[o.cand as usize], o.rot)
            })
            .collect()
    }

    /// Objective of a full assignment, or `None` if it is not expressible
    /// (tile outside the candidates, infeasible rotation, reused tile).
    pub fn evaluate(&mut self, placements: &[Placement]) -> Option<u32> {
        if placements.len() != self.cells.len() {
            return None;
        }
        let mut used = HashSet::new();
        let mut total = 0;
        for (i, p) in placements.iter().enumerate() {
            let k = self.candidates.binary_search(&p.tile).ok()?;
            if !used.insert(k) {
                return None;
            }
            let idx = self.options[i].iter().position(|o| o.cand as usize == k && o.rot == p.rot)?;
            self.chosen[i] = idx;
            total += self.cost(i, &self.options[i][idx]);
        }
        Some(total)
    }

    /// Cheapest-first sequential fill; `None` when some cell has no option.
    pub fn greedy(&mut self) -> Option<(Vec<Placement>, u32)> {
        let mut used = vec![false; self.candidates.len()];
        let mut total = 0;
        for i in 0..self.cells.len() {
            let mut pick: Option<(u32, usize)> = None;
            for (idx, o) in self.options[i].iter().enumerate() {
                if used[o.cand as usize] {
                    continue;
                }
                let c = self.cost(i, o);
                if pick.is_none_or(|(b, _)| c < b) {
                    pick = Some((c, idx));
                    if c == 0 {
                        break;
                    }
                }
            }
            let (c, idx) = pick?;
            used[self.options[i][idx].cand as usize] = true;
            self.chosen[i] = idx;
            total += c;
        }
        let sol = self.placements_of(&self.chosen.clone());
        if self.excluded.contains(&sol) {
            return None;
        }
        Some((sol, total))
    }

    /// Runs the search. `incumbent` seeds the upper bound in minimise mode.
    pub fn run(mut self, incumbent: Option<(Vec<Placement>, u32)>) -> SearchResult {
        if let Some((sol, obj)) = incumbent {
            if let Some(chosen) = self.indices_of(&sol) {
                self.best = Some((chosen, obj));
            }
        }
        self.floor = self.root_bound();
        let done = |best: &Option<(Vec<usize>, u32)>, floor: u32| best.as_ref().is_some_and(|b| b.1 <= floor);
        if self.cells.is_empty() {
            self.best = Some((Vec::new(), 0));
        } else if !(self.mode == Mode::ZeroOnly && self.floor > 0) && !done(&self.best, self.floor) {
            self.dfs(0, 0);
        }
        let best = self.best.take().map(|(c, obj)| (self.placements_of(&c), obj));
        SearchResult {
            best,
            outcome: if self.timed_out { Outcome::TimedOut } else { Outcome::Complete },
            nodes: self.nodes,
        }
    }

    fn indices_of(&self, sol: &[Placement]) -> Option<Vec<usize>> {
        sol.iter()
            .enumerate()
            .map(|(i, p)| {
                let k = self.candidates.binary_search(&p.tile).ok()?;
                self.options[i].iter().position(|o| o.cand as usize == k && o.rot == p.rot)
            })
            .collect()
    }

    #[inline]
    fn limit(&self) -> u32 {
        match self.mode {
            Mode::ZeroOnly => 1,
            Mode::Minimize => self.best.as_ref().map_or(u32::MAX, |b| b.1),
        }
    }

    /// Returns `true` when the search should stop altogether.
    fn dfs(&mut self, i: usize, realized: u32) -> bool {
        self.nodes += 1;
        if self.deadline.expired() {
            self.timed_out = true;
            return true;
        }
        if i == self.cells.len() {
            let sol = self.placements_of(&self.chosen);
            if !self.excluded.is_empty() && self.excluded.contains(&sol) {
                return false;
            }
            if realized < self.limit() {
                self.best = Some((self.chosen.clone(), realized));
            }
            return match self.mode {
                Mode::ZeroOnly => self.best.is_some(),
                Mode::Minimize => realized <= self.floor,
            };
        }

        // Close this cell's demand before scoring children.
        let demand_key = self.demand_of[i];
        if let Some(key) = demand_key {
            if self.demand[key] > self.supply[key] {
                self.deficit -= 1;
            }
            self.demand[key] -= 1;
        }
        let rest_static = self.static_suffix[i + 1];

        let mut kids = std::mem::take(&mut self.scratch[i]);
        kids.clear();
        let limit = self.limit();
        let base = realized + rest_static + self.deficit;
        if base < limit {
            for (idx, o) in self.options[i].iter().enumerate() {
                let k = o.cand as usize;
                if !self.available[k] {
                    continue;
                }
                let c = self.cost(i, o);
                if base + c >= limit {
                    continue;
                }
                let lost = self.supply_of[k].iter().filter(|&&key| self.supply[key] <= self.demand[key]).count() as u32;
                if base + c + lost >= limit {
                    continue;
                }
                kids.push((c as u8, idx as u16));
            }
        }
        // Cheapest children first; ties keep (tile id, rotation) order.
        kids.sort_by_key(|&(c, _)| c);

        let mut stop = false;
        for &(c, idx) in &kids {
            let c = c as u32;
            if realized + c + rest_static + self.deficit >= self.limit() {
                continue;
            }
            let k = self.options[i][idx as usize].cand as usize;
            self.take(k);
            if realized + c + rest_static + self.deficit < self.limit() {
                self.chosen[i] = idx as usize;
                stop = self.dfs(i + 1, realized + c);
            }
            self.give_back(k);
            if stop {
                break;
            }
        }
        self.scratch[i] = kids;

        if let Some(key) = demand_key {
            self.demand[key] += 1;
            if self.demand[key] > self.supply[key] {
                self.deficit += 1;
            }
        }
        stop
    }

    #[inline]
    fn take(&mut self, k: usize) {
        self.available[k] = false;
        for &key in &self.supply_of[k] {
            if self.supply[key] <= self.demand[key] {
                self.deficit += 1;
            }
            self.supply[key] -= 1;
        }
    }

    #[inline]
    fn give_back(&mut self, k: usize) {
        self.available[k] = true;
        for &key in &self.supply_of[k] {
            self.supply[key] += 1;
            if self.supply[key] <= self.demand[key] {
                self.deficit -= 1;
            }
        }
    }
}
