//! Time budgets.
//!
//! Every solver polls a [`Deadline`] once per unit of work (a search node, a
//! clique selection, a move). The underlying [`Clock`] either reads the wall
//! clock or counts those polls, in which case every budget, and therefore
//! every run, is reproducible bit for bit.

use std::cell::Cell;
use std::time::{Duration, Instant};

/// Wall-clock reads are amortised over this many polls.
const WALL_REFRESH: u64 = 64;

#[derive(Debug)]
enum Mode {
    Wall(Instant),
    Logical { ticks_per_ms: u64 },
}

#[derive(Debug)]
pub struct Clock {
    mode: Mode,
    ticks: Cell<u64>,
    cached: Cell<Duration>,
}

impl Clock {
    pub fn wall() -> Self {
        Clock { mode: Mode::Wall(Instant::now()), ticks: Cell::new(0), cached: Cell::new(Duration::ZERO) }
    }

    /// A clock that advances one tick per poll.
    pub fn logical(ticks_per_ms: u64) -> Self {
        Clock {
            mode: Mode::Logical { ticks_per_ms: ticks_per_ms.max(1) },
            ticks: Cell::new(0),
            cached: Cell::new(Duration::ZERO),
        }
    }

    pub fn is_logical(&self) -> bool {
        matches!(self.mode, Mode::Logical { .. })
    }

    pub fn ticks(&self) -> u64 {
        self.ticks.get()
    }

    /// Exact elapsed time (wall mode reads the clock).
    pub fn elapsed(&self) -> Duration {
        match self.mode {
            Mode::Wall(start) => {
                let e = start.elapsed();
                self.cached.set(e);
                e
            }
            Mode::Logical { ticks_per_ms } => logical_elapsed(self.ticks.get(), ticks_per_ms),
        }
    }

    #[inline]
    fn poll(&self) -> Duration {
        let t = self.ticks.get() + 1;
        self.ticks.set(t);
        match self.mode {
            Mode::Wall(start) => {
                if t.is_multiple_of(WALL_REFRESH) {
                    self.cached.set(start.elapsed());
                }
                self.cached.get()
            }
            Mode::Logical { ticks_per_ms } => logical_elapsed(t, ticks_per_ms),
        }
    }

    /// A deadline `budget` from now.
    pub fn deadline(&self, budget: Duration) -> Deadline<'_> {
        Deadline { clock: self, at: self.elapsed().saturating_add(budget) }
    }

    pub fn unlimited(&self) -> Deadline<'_> {
        Deadline { clock: self, at: Duration::MAX }
    }
}

fn logical_elapsed(ticks: u64, ticks_per_ms: u64) -> Duration {
    Duration::from_micros(ticks.saturating_mul(1000) / ticks_per_ms)
}

#[derive(Clone, Copy, Debug)]
pub struct Deadline<'c> {
    clock: &'c Clock,
    at: Duration,
}

impl<'c> Deadline<'c> {
    /// Polls the clock; counts as one unit of work.
    #[inline]
    pub fn expired(&self) -> bool {
        self.clock.poll() >= self.at
    }

    /// Checks without consuming a tick.
    pub fn passed(&self) -> bool {
        self.elapsed_now() >= self.at
    }

    fn elapsed_now(&self) -> Duration {
        match self.clock.mode {
            Mode::Wall(_) => self.clock.elapsed(),
            Mode::Logical { ticks_per_ms } => logical_elapsed(self.clock.ticks.get(), ticks_per_ms),
        }
    }

    /// The earlier of this deadline and `budget` from now.
    pub fn within(&self, budget: Duration) -> Deadline<'c> {
        let other = self.clock.deadline(budget);
        Deadline { clock: self.clock, at: self.at.min(other.at) }
    }

    pub fn remaining(&self) -> Duration {
        self.at.saturating_sub(self.elapsed_now())
    }

    pub fn clock(&self) -> &'c Clock {
        self.clock
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_budget_expires_immediately() {
        let c = Clock::wall();
        assert!(c.deadline(Duration::ZERO).expired());
        let c = Clock::logical(1000);
        assert!(c.deadline(Duration::ZERO).expired());
    }

    #[test]
    fn logical_clock_counts_polls() {
        let c = Clock::logical(10);
        let d = c.deadline(Duration::from_millis(2));
        let polls = (0..).take_while(|_| !d.expired()).count();
        assert_eq!(polls, 19);
        assert_eq!(c.elapsed(), Duration::from_millis(2));
    }

    #[test]
    fn within_takes_the_earlier_deadline() {
        let c = Clock::logical(1);
        let d = c.deadline(Duration::from_millis(100)).within(Duration::from_millis(5));
        assert_eq!(d.remaining(), Duration::from_millis(5));
    }
}
