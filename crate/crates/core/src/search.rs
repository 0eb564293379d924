//! Outcome and budget types shared by the exact search procedures.

use std::time::{Duration, Instant};

/// Result of a budgeted exact search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision<T> {
    Feasible(T),
    Infeasible,
    /// The budget ran out before the search space was exhausted.
    Timeout,
}

impl<T> Decision<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Decision::Feasible(_))
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Decision::Infeasible)
    }

    pub fn is_timeout(&self) -> bool {
        matches!(self, Decision::Timeout)
    }

    pub fn witness(&self) -> Option<&T> {
        match self {
            Decision::Feasible(w) => Some(w),
            _ => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Decision<U> {
        match self {
            Decision::Feasible(w) => Decision::Feasible(f(w)),
            Decision::Infeasible => Decision::Infeasible,
            Decision::Timeout => Decision::Timeout,
        }
    }

    /// `Some(true)` / `Some(false)` for decided searches, `None` on timeout.
    pub fn answer(&self) -> Option<bool> {
        match self {
            Decision::Feasible(_) => Some(true),
            Decision::Infeasible => Some(false),
            Decision::Timeout => None,
        }
    }
}

/// Search budget. The primary unit is node expansions; a wall-clock cap
/// can be layered on top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_expansions: u64,
    pub time_limit: Option<Duration>,
}

impl Budget {
    pub const DEFAULT_EXPANSIONS: u64 = 50_000_000;

    pub fn expansions(max_expansions: u64) -> Self {
        Budget {
            max_expansions,
            time_limit: None,
        }
    }

    pub fn unlimited() -> Self {
        Budget::expansions(u64::MAX)
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::expansions(Self::DEFAULT_EXPANSIONS)
    }
}

/// Running counter checked at every expansion.
#[derive(Debug)]
pub(crate) struct Meter {
    budget: Budget,
    used: u64,
    started: Instant,
}

impl Meter {
    pub(crate) fn new(budget: Budget) -> Self {
        Meter {
            budget,
            used: 0,
            started: Instant::now(),
        }
    }

    /// Records one expansion; returns `false` once the budget is exhausted.
    pub(crate) fn tick(&mut self) -> bool {
        self.used += 1;
        if self.used > self.budget.max_expansions {
            return false;
        }
        if let Some(limit) = self.budget.time_limit {
            // Clock reads are comparatively slow; sample them.
            if self.used.is_multiple_of(1024) && self.started.elapsed() > limit {
                return false;
            }
        }
        true
    }

    #[cfg(test)]
    pub(crate) fn used(&self) -> u64 {
        self.used
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meter_stops_after_budget() {
        let mut m = Meter::new(Budget::expansions(3));
        assert!(m.tick());
        assert!(m.tick());
        assert!(m.tick());
        assert!(!m.tick());
        assert_eq!(m.used(), 4);
    }

    #[test]
    fn decision_answer() {
        assert_eq!(Decision::Feasible(1).answer(), Some(true));
        assert_eq!(Decision::<()>::Infeasible.answer(), Some(false));
        assert_eq!(Decision::<()>::Timeout.answer(), None);
        assert_eq!(Decision::Feasible(2).map(|x| x * 2).witness(), Some(&4));
    }
}
