use super::{SchedInstance, Schedule};
use crate::search::{Budget, Decision, Meter};

/// Exact feasibility by chronological backtracking over start times.
///
/// Every node tightens each job's start window `[est, lst]` to a fixpoint
/// along all arcs in both directions (fixed jobs have a one-point window),
/// then checks that every interval `[a, b)` has enough free capacity for the
/// jobs whose windows lie inside it. The job with the smallest `est` (ties by
/// `lst`, then id) is fixed next, trying each start in its window in order.
pub fn feasible(inst: &SchedInstance, budget: Budget) -> Decision<Schedule> {
    let n = inst.jobs().len();
    if inst.jobs().iter().any(|j| j.size > inst.machines() || j.p > inst.deadline()) {
        return Decision::Infeasible;
    }
    let mut search = Search {
        inst,
        n,
        start: vec![None; n],
        load: vec![0; inst.deadline()],
        meter: Meter::new(budget),
        timed_out: false,
    };
    if search.dfs() {
        Decision::Feasible(Schedule {
            start: search.start.iter().map(|s| s.expect("complete")).collect(),
        })
    } else if search.timed_out {
        Decision::Timeout
    } else {
        Decision::Infeasible
    }
}

struct Search<'a> {
    inst: &'a SchedInstance,
    n: usize,
    start: Vec<Option<usize>>,
    /// Capacity in use per time unit.
    load: Vec<usize>,
    meter: Meter,
    timed_out: bool,
}

impl Search<'_> {
    fn windows(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let jobs = self.inst.jobs();
        let mut est = vec![0i64; self.n];
        let mut lst: Vec<i64> = (0..self.n).map(|j| self.inst.latest_start(j)).collect();
        for (j, s) in self.start.iter().enumerate() {
            if let Some(s) = *s {
                est[j] = s as i64;
                lst[j] = s as i64;
            }
        }
        // Windows only shrink, so the loop ends within D * n rounds.
        loop {
            let mut changed = false;
            for a in self.inst.prec() {
                let (i, j) = (a.from, a.to);
                let lo = a.min_gap(jobs[i].p);
                if est[i] + lo > est[j] {
                    est[j] = est[i] + lo;
                    changed = true;
                }
                if lst[j] - lo < lst[i] {
                    lst[i] = lst[j] - lo;
                    changed = true;
                }
                if let Some(hi) = a.max_gap(jobs[i].p) {
                    if lst[i] + hi < lst[j] {
                        lst[j] = lst[i] + hi;
                        changed = true;
                    }
                    if est[j] - hi > est[i] {
                        est[i] = est[j] - hi;
                        changed = true;
                    }
                }
                if est[i] > lst[i] || est[j] > lst[j] {
                    return None;
                }
            }
            if !changed {
                return Some((est, lst));
            }
        }
    }

    /// Energy check over every pair of window bounds of unfixed jobs.
    fn energy_fits(&self, est: &[i64], lst: &[i64]) -> bool {
        let jobs = self.inst.jobs();
        let open: Vec<usize> = (0..self.n).filter(|&j| self.start[j].is_none()).collect();
        let m = self.inst.machines();
        let mut free = vec![0usize; self.load.len() + 1];
        for t in 0..self.load.len() {
            free[t + 1] = free[t] + (m - self.load[t]);
        }
        let mut lefts: Vec<i64> = open.iter().map(|&j| est[j]).collect();
        let mut rights: Vec<i64> = open.iter().map(|&j| lst[j] + jobs[j].p as i64).collect();
        lefts.sort_unstable();
        lefts.dedup();
        rights.sort_unstable();
        rights.dedup();
        for &a in &lefts {
            for &b in rights.iter().filter(|&&b| b > a) {
                let need: usize = open
                    .iter()
                    .filter(|&&j| est[j] >= a && lst[j] + jobs[j].p as i64 <= b)
                    .map(|&j| jobs[j].p * jobs[j].size)
                    .sum();
                if need > free[b as usize] - free[a as usize] {
                    return false;
                }
            }
        }
        true
    }

    fn fits(&self, job: usize, s: usize) -> bool {
        let j = self.inst.jobs()[job];
        self.load[s..s + j.p].iter().all(|&l| l + j.size <= self.inst.machines())
    }

    fn occupy(&mut self, job: usize, s: usize, add: bool) {
        let j = self.inst.jobs()[job];
        for l in &mut self.load[s..s + j.p] {
            if add {
                *l += j.size;
            } else {
                *l -= j.size;
            }
        }
    }

    fn dfs(&mut self) -> bool {
        if !self.meter.tick() {
            self.timed_out = true;
            return false;
        }
        let Some((est, lst)) = self.windows() else {
            return false;
        };
        let Some(job) = (0..self.n)
            .filter(|&j| self.start[j].is_none())
            .min_by_key(|&j| (est[j], lst[j], j))
        else {
            return true;
        };
        if !self.energy_fits(&est, &lst) {
            return false;
        }
        for s in est[job] as usize..=lst[job] as usize {
            if !self.fits(job, s) {
                continue;
            }
            self.start[job] = Some(s);
            self.occupy(job, s, true);
            if self.dfs() {
                return true;
            }
            self.occupy(job, s, false);
            self.start[job] = None;
            if self.timed_out {
                return false;
            }
        }
        false
    }
}
