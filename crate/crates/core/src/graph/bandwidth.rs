use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use super::{Digraph, GraphError, TopOrdering};
use crate::search::{Budget, Decision, Meter};

/// Largest vertex count accepted by [`brute_bandwidth`].
pub const BRUTE_BANDWIDTH_CAP: usize = 9;

/// Memoised dead states kept at most; later failures are simply not recorded.
const MEMO_LIMIT: usize = 4_000_000;

/// Largest `f(w) - f(v)` over arcs `vw`; 0 without arcs.
pub fn bandwidth_of(g: &Digraph, f: &TopOrdering) -> Result<usize, GraphError> {
    f.check(g)?;
    Ok(g.arcs()
        .iter()
        .map(|&(u, v)| f.position[v] - f.position[u])
        .max()
        .unwrap_or(0))
}

/// Minimum bandwidth over every topological ordering, by plain enumeration.
pub fn brute_bandwidth(g: &Digraph) -> Result<usize, GraphError> {
    let n = g.vertex_count();
    if n > BRUTE_BANDWIDTH_CAP {
        return Err(GraphError::TooLarge {
            n,
            cap: BRUTE_BANDWIDTH_CAP,
        });
    }
    g.topological_order()?;

    fn go(g: &Digraph, missing: &mut [usize], pos: &mut [usize], placed: usize, stretch: usize, best: &mut usize) {
        let n = missing.len();
        if placed == n {
            *best = (*best).min(stretch);
            return;
        }
        for v in 0..n {
            if missing[v] != 0 || pos[v] != usize::MAX {
                continue;
            }
            let here = g.pred(v).iter().map(|&u| placed - pos[u]).max().unwrap_or(0);
            pos[v] = placed;
            for &w in g.succ(v) {
                missing[w] -= 1;
            }
            go(g, missing, pos, placed + 1, stretch.max(here), best);
            for &w in g.succ(v) {
                missing[w] += 1;
            }
            pos[v] = usize::MAX;
        }
    }

    let mut missing: Vec<usize> = (0..n).map(|v| g.pred(v).len()).collect();
    let mut pos = vec![usize::MAX; n];
    let mut best = usize::MAX;
    go(g, &mut missing, &mut pos, 0, 0, &mut best);
    Ok(if n == 0 { 0 } else { best })
}

/// Decides whether `g` has a topological ordering of bandwidth at most
/// `limit`.
///
/// Positions are filled left to right. Before branching, every unplaced
/// vertex gets a window `[release, deadline]` from its placed predecessors
/// and by propagation along arcs in both directions; empty windows and
/// windows that cannot all be met one vertex per slot prune the branch, and a
/// vertex whose deadline is the current slot is placed without branching.
/// States that failed are remembered by the placed set and the deadlines
/// their placed predecessors impose.
pub fn exact_bandwidth(g: &Digraph, limit: usize, budget: Budget) -> Result<Decision<TopOrdering>, GraphError> {
    let topo = g.topological_order()?;
    let n = g.vertex_count();
    if limit == 0 {
        return Ok(if g.arcs().is_empty() {
            Decision::Feasible(TopOrdering::from_sequence(&topo)?)
        } else {
            Decision::Infeasible
        });
    }
    let mut search = Search {
        g,
        limit,
        n,
        topo,
        pos: vec![usize::MAX; n],
        seq: Vec::with_capacity(n),
        waiting: (0..n).map(|v| g.pred(v).len()).collect(),
        release: vec![0; n],
        deadline: vec![0; n],
        meter: Meter::new(budget),
        failed: HashSet::new(),
        timed_out: false,
    };
    Ok(if search.dfs() {
        Decision::Feasible(TopOrdering::from_sequence(&search.seq)?)
    } else if search.timed_out {
        Decision::Timeout
    } else {
        Decision::Infeasible
    })
}

struct Search<'a> {
    g: &'a Digraph,
    limit: usize,
    n: usize,
    topo: Vec<usize>,
    pos: Vec<usize>,
    seq: Vec<usize>,
    /// Unplaced predecessors per vertex.
    waiting: Vec<usize>,
    release: Vec<i64>,
    deadline: Vec<i64>,
    meter: Meter,
    failed: HashSet<Box<[u64]>>,
    timed_out: bool,
}

impl Search<'_> {
    fn placed(&self, v: usize) -> bool {
        self.pos[v] != usize::MAX
    }

    fn key(&self) -> Box<[u64]> {
        let cur = self.seq.len();
        let words = self.n.div_ceil(64);
        let mut key = vec![0u64; words];
        for &v in &self.seq {
            key[v / 64] |= 1 << (v % 64);
        }
        for x in 0..self.n {
            if self.placed(x) {
                continue;
            }
            if let Some(first) = self.g.pred(x).iter().filter(|&&u| self.placed(u)).map(|&u| self.pos[u]).min() {
                // 0 marks an already violated arc.
                let slack = (first + self.limit + 1).saturating_sub(cur) as u64;
                key.push(((x as u64) << 32) | slack);
            }
        }
        key.into_boxed_slice()
    }

    /// Tightens all windows; `false` when some window is empty.
    fn propagate(&mut self) -> bool {
        let cur = self.seq.len() as i64;
        let b = self.limit as i64;
        let last = self.n as i64 - 1;
        for x in 0..self.n {
            if self.placed(x) {
                continue;
            }
            self.release[x] = cur;
            self.deadline[x] = self
                .g
                .pred(x)
                .iter()
                .filter(|&&u| self.placed(u))
                .map(|&u| self.pos[u] as i64 + b)
                .fold(last, i64::min);
        }
        for _ in 0..self.n.max(1) {
            let mut changed = false;
            for idx in 0..self.n {
                let x = self.topo[idx];
                if self.placed(x) {
                    continue;
                }
                for &p in self.g.pred(x) {
                    if self.placed(p) {
                        continue;
                    }
                    if self.release[p] + 1 > self.release[x] {
                        self.release[x] = self.release[p] + 1;
                        changed = true;
                    }
                    if self.deadline[p] + b < self.deadline[x] {
                        self.deadline[x] = self.deadline[p] + b;
                        changed = true;
                    }
                }
            }
            for idx in (0..self.n).rev() {
                let x = self.topo[idx];
                if self.placed(x) {
                    continue;
                }
                for &w in self.g.succ(x) {
                    if self.deadline[w] - 1 < self.deadline[x] {
                        self.deadline[x] = self.deadline[w] - 1;
                        changed = true;
                    }
                    if self.release[w] - b > self.release[x] {
                        self.release[x] = self.release[w] - b;
                        changed = true;
                    }
                }
                if self.release[x] > self.deadline[x] {
                    return false;
                }
            }
            if !changed {
                break;
            }
        }
        true
    }

    /// Whether the windows admit one vertex per remaining slot, ignoring
    /// arcs (earliest deadline first is exact for that relaxation).
    fn slots_fit(&self) -> bool {
        let mut jobs: Vec<(i64, i64)> = (0..self.n)
            .filter(|&x| !self.placed(x))
            .map(|x| (self.release[x], self.deadline[x]))
            .collect();
        jobs.sort_unstable();
        let mut heap = BinaryHeap::new();
        let mut next = 0;
        for t in self.seq.len() as i64..self.n as i64 {
            while next < jobs.len() && jobs[next].0 <= t {
                heap.push(Reverse(jobs[next].1));
                next += 1;
            }
            match heap.pop() {
                Some(Reverse(d)) if d >= t => {}
                _ => return false,
            }
        }
        true
    }

    fn dfs(&mut self) -> bool {
        let cur = self.seq.len();
        if cur == self.n {
            return true;
        }
        if !self.meter.tick() {
            self.timed_out = true;
            return false;
        }
        let key = self.key();
        if self.failed.contains(&key) {
            return false;
        }
        let found = self.propagate() && self.slots_fit() && self.branch(cur);
        if !found && !self.timed_out && self.failed.len() < MEMO_LIMIT {
            self.failed.insert(key);
        }
        found
    }

    fn branch(&mut self, cur: usize) -> bool {
        let ready = |s: &Self, x: usize| !s.placed(x) && s.waiting[x] == 0 && s.release[x] == cur as i64;
        let forced = (0..self.n).find(|&x| !self.placed(x) && self.deadline[x] == cur as i64);
        let candidates: Vec<usize> = match forced {
            Some(x) if ready(self, x) => vec![x],
            Some(_) => return false,
            None => (0..self.n).filter(|&x| ready(self, x)).collect(),
        };
        for x in candidates {
            self.pos[x] = cur;
            self.seq.push(x);
            for &w in self.g.succ(x) {
                self.waiting[w] -= 1;
            }
            if self.dfs() {
                return true;
            }
            for &w in self.g.succ(x) {
                self.waiting[w] += 1;
            }
            self.seq.pop();
            self.pos[x] = usize::MAX;
            if self.timed_out {
                return false;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::super::{complete_bipartite, path, path_with_detour, random_dag, star};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn decide(g: &Digraph, b: usize) -> Decision<TopOrdering> {
        exact_bandwidth(g, b, Budget::default()).unwrap()
    }

    #[test]
    fn bandwidth_of_small_graphs() {
        let natural = |n: usize| TopOrdering::from_sequence(&(0..n).collect::<Vec<_>>()).unwrap();
        assert_eq!(bandwidth_of(&path(5), &natural(5)), Ok(1));
        assert_eq!(bandwidth_of(&star(3), &natural(4)), Ok(3));
        assert_eq!(bandwidth_of(&Digraph::empty(4), &natural(4)), Ok(0));
        let backwards = TopOrdering::from_sequence(&[1, 0]).unwrap();
        assert!(bandwidth_of(&path(2), &backwards).is_err());
    }

    #[test]
    fn exact_small_cases() {
        assert!(decide(&path(5), 1).is_feasible());
        assert!(decide(&star(3), 2).is_infeasible());
        let w = decide(&path_with_detour(), 2);
        let f = w.witness().expect("feasible");
        assert!(bandwidth_of(&path_with_detour(), f).unwrap() <= 2);
        assert!(decide(&path_with_detour(), 1).is_infeasible());
        assert!(decide(&Digraph::empty(0), 1).is_feasible());
        assert!(decide(&Digraph::empty(3), 0).is_feasible());
        assert!(decide(&path(2), 0).is_infeasible());
    }

    #[test]
    fn brute_small_cases() {
        assert_eq!(brute_bandwidth(&path(4)), Ok(1));
        assert_eq!(brute_bandwidth(&path_with_detour()), Ok(2));
        // The first vertex is a source and the last a sink, joined by an arc.
        assert_eq!(brute_bandwidth(&complete_bipartite(2, 2)), Ok(3));
        assert_eq!(brute_bandwidth(&star(3)), Ok(3));
        assert!(matches!(brute_bandwidth(&path(10)), Err(GraphError::TooLarge { .. })));
    }

    #[test]
    fn cyclic_input_is_an_error() {
        let g = Digraph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        assert_eq!(exact_bandwidth(&g, 3, Budget::default()), Err(GraphError::Cyclic));
    }

    #[test]
    fn tiny_budget_times_out() {
        let g = Digraph::empty(30);
        assert!(exact_bandwidth(&g, 3, Budget::expansions(2)).unwrap().is_timeout());
    }

    #[test]
    fn agrees_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..150 {
            let n = rand::Rng::gen_range(&mut rng, 1..=8);
            let g = random_dag(&mut rng, n, 0.35);
            let best = brute_bandwidth(&g).unwrap();
            for b in best.saturating_sub(1).max(1)..=best + 1 {
                let d = decide(&g, b);
                assert_eq!(d.answer(), Some(best <= b), "{g:?} b={b}");
                if let Some(f) = d.witness() {
                    assert!(bandwidth_of(&g, f).unwrap() <= b);
                }
            }
        }
    }
}
