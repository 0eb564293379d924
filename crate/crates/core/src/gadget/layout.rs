use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{build_dag, build_tree, Gadget, GadgetError, GadgetParams};
use crate::graph::{bandwidth_of, GadgetLabel, TopOrdering};
use crate::nnccm::{validate_run, NnccmInstance, Run};

/// Counter values after each of the `L` unit steps; `values[t - 1]` is the
/// state after step `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedRun {
    pub values: Vec<Vec<usize>>,
}

/// Spreads an accepting run over `L` steps in which at most one counter goes
/// up by one. Every block of `S` steps waits `n` steps, performs its unit
/// increases (lowest counter first) in the next `k n` steps, and checks at
/// its last step. The final block raises every counter to `n`.
pub fn alternative_run(m: &NnccmInstance, run: &Run) -> Result<ExpandedRun, GadgetError> {
    let p = GadgetParams::new(m)?;
    if !validate_run(m, run)? {
        return Err(GadgetError::InvalidRun);
    }
    let mut cur = vec![0; p.k];
    let mut values = Vec::with_capacity(p.l);
    for alpha in 1..=p.r + 1 {
        let target = run.values.get(alpha - 1).cloned().unwrap_or_else(|| vec![p.n; p.k]);
        let mut pending: VecDeque<usize> = (0..p.k).flat_map(|i| std::iter::repeat_n(i, target[i] - cur[i])).collect();
        for t in 1..=p.s {
            if t > p.n && t <= p.n + p.k * p.n {
                if let Some(i) = pending.pop_front() {
                    cur[i] += 1;
                }
            }
            values.push(cur.clone());
        }
        debug_assert_eq!(cur, target);
    }
    Ok(ExpandedRun { values })
}

/// Whether `e` is a legal expansion for `m`: `L` steps from all zeros, at
/// most one unit increase per step and only in the increase window of its
/// block, no check firing, and every counter at `n` after the last step.
pub fn validate_expanded_run(m: &NnccmInstance, e: &ExpandedRun) -> bool {
    let Ok(p) = GadgetParams::new(m) else {
        return false;
    };
    if e.values.len() != p.l || e.values.iter().any(|row| row.len() != p.k || row.iter().any(|&v| v > p.n)) {
        return false;
    }
    let zero = vec![0; p.k];
    for t in 1..=p.l {
        let prev = if t == 1 { &zero } else { &e.values[t - 2] };
        let row = &e.values[t - 1];
        let mut ups = 0;
        for (a, b) in prev.iter().zip(row) {
            match b.checked_sub(*a) {
                Some(0) => {}
                Some(1) => ups += 1,
                _ => return false,
            }
        }
        let offset = (t - 1) % p.s + 1;
        if ups > 1 || (ups == 1 && !(p.n < offset && offset <= p.n + p.k * p.n)) {
            return false;
        }
        if offset == p.s && t / p.s <= p.r && m.checks()[t / p.s - 1].fires(row) {
            return false;
        }
    }
    e.values[p.l - 1].iter().all(|&v| v == p.n)
}

const EMPTY: usize = usize::MAX;

/// Positions of the DAG vertices (the first `N` ids of either gadget).
///
/// Batch `j` starts at `base = B (j - 1)`. Counter `i` (0-based) keeps its
/// current path vertex at `base + 4 + i`; the extra vertex of an increase
/// goes to the first late star `base + k + 4`. Between vertices then take
/// the free star positions earliest deadline first, and the filler path
/// takes whatever is left in increasing order.
fn dag_sequence(gadget: &Gadget, run: &Run) -> Result<Vec<usize>, GadgetError> {
    let m = &gadget.instance;
    let p = gadget.params;
    let idx = &gadget.index;
    let e = alternative_run(m, run)?;
    let b = p.b;
    let mut seq = vec![EMPTY; p.vertex_count];
    let mut pos = vec![EMPTY; p.vertex_count];
    let mut put = |v: usize, at: usize, seq: &mut Vec<usize>| {
        seq[at] = v;
        pos[v] = at;
    };

    for (i, &v) in idx.floor.iter().enumerate() {
        put(v, b * i, &mut seq);
    }
    let zero = vec![0; p.k];
    for j in 1..=p.l {
        let base = b * (j - 1);
        let prev = if j == 1 { &zero } else { &e.values[j - 2] };
        for i in 0..p.k {
            let path = &idx.counter[i];
            put(path[j + prev[i] - 1], base + 4 + i, &mut seq);
            if e.values[j - 1][i] > prev[i] {
                put(path[j + prev[i]], base + p.k + 4, &mut seq);
            }
        }
    }

    // Windows (first, last) of admissible positions.
    let mut jobs: Vec<(usize, usize, usize)> = Vec::new();
    for (j, batch) in idx.floor_between.iter().enumerate() {
        for &w in batch {
            jobs.push((b * j + 1, b * (j + 1) - 1, w));
        }
    }
    for a in &idx.counter_between {
        let path = &idx.counter[a.counter - 1];
        let (x, y) = (pos[path[a.at - 1]], pos[path[a.at]]);
        if y <= x + 1 {
            return Err(GadgetError::BatchOverflow { batch: x / b + 1 });
        }
        jobs.push((x + 1, y - 1, a.vertex));
    }
    jobs.sort_unstable();

    let mut next = 0;
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
    #[allow(clippy::needless_range_loop)]
    for at in 0..p.vertex_count {
        let offset = at % b;
        let is_star = matches!(offset, 1 | 2) || offset == p.k + 4 || offset == p.k + 5;
        if !is_star || seq[at] != EMPTY {
            continue;
        }
        while next < jobs.len() && jobs[next].0 <= at {
            heap.push(Reverse((jobs[next].1, jobs[next].2)));
            next += 1;
        }
        if let Some(Reverse((deadline, w))) = heap.pop() {
            if deadline < at {
                return Err(GadgetError::BatchOverflow { batch: deadline / b + 1 });
            }
            seq[at] = w;
        }
    }
    if let Some(Reverse((deadline, _))) = heap.pop() {
        return Err(GadgetError::BatchOverflow { batch: deadline / b + 1 });
    }
    if let Some(&(_, deadline, _)) = jobs.get(next) {
        return Err(GadgetError::BatchOverflow { batch: deadline / b + 1 });
    }

    let mut filler = idx.filler.iter();
    for slot in seq.iter_mut().filter(|s| **s == EMPTY) {
        *slot = *filler.next().ok_or(GadgetError::CountMismatch {
            got: idx.filler.len(),
            expected: idx.filler.len() + 1,
        })?;
    }
    Ok(seq)
}

fn finish(gadget: &Gadget, seq: &[usize]) -> Result<TopOrdering, GadgetError> {
    let f = TopOrdering::from_sequence(seq)?;
    let found = bandwidth_of(&gadget.graph, &f)?;
    if found > gadget.params.b {
        return Err(GadgetError::BandwidthExceeded {
            found,
            limit: gadget.params.b,
        });
    }
    Ok(f)
}

/// Appends the tail batches to a DAG sequence.
fn tail_sequence(gadget: &Gadget, seq: &mut Vec<usize>) {
    let p = gadget.params;
    let g = &gadget.graph;
    let tails = gadget.index.tails.as_ref().expect("tree gadget");
    let leaves_of = |v: usize| g.succ(v).iter().copied().filter(|&w| g.label(w) == Some(GadgetLabel::TailLeaf));
    for i in 1..=tails.floor.len() {
        let mut last = tails.filler[i - 1];
        seq.push(last);
        for tail in tails.counter.iter().filter(|t| t.len() >= i) {
            last = tail[i - 1];
            seq.push(last);
        }
        if i == 1 {
            seq.extend(&tails.floor_end_leaves);
        }
        seq.extend(leaves_of(last));
        debug_assert_eq!(seq.len(), p.vertex_count + p.b * i - 1);
        seq.push(tails.floor[i - 1]);
    }
    seq.extend(leaves_of(tails.floor[tails.floor.len() - 1]));
}

impl Gadget {
    /// Ordering of bandwidth at most `B` built from an accepting run.
    pub fn layout_from_run(&self, run: &Run) -> Result<TopOrdering, GadgetError> {
        let mut seq = dag_sequence(self, run)?;
        if self.is_tree() {
            tail_sequence(self, &mut seq);
        }
        finish(self, &seq)
    }

    /// Counter values per batch read off an ordering of bandwidth at most
    /// `B`: counter `i` holds `β` at time `j` for the largest `β` with
    /// `v_{c,i,j+β}` inside batch `j`.
    pub fn trace_from_layout(&self, f: &TopOrdering) -> Result<ExpandedRun, GadgetError> {
        let p = self.params;
        let found = bandwidth_of(&self.graph, f)?;
        if found > p.b {
            return Err(GadgetError::BandwidthExceeded { found, limit: p.b });
        }
        for (i, &v) in self.index.floor.iter().enumerate() {
            if f.position[v] != p.b * i {
                return Err(GadgetError::FloorMisplaced { index: i });
            }
        }
        let in_batch = |v: usize, j: usize| (p.b * (j - 1) + 1..p.b * j).contains(&f.position[v]);
        let mut values = Vec::with_capacity(p.l);
        for j in 1..=p.l {
            let row = (0..p.k)
                .map(|i| {
                    let path = &self.index.counter[i];
                    (0..=p.n)
                        .rev()
                        .find(|&beta| j + beta <= path.len() && in_batch(path[j + beta - 1], j))
                        .ok_or(GadgetError::CounterSkipsBatch { counter: i + 1, batch: j })
                })
                .collect::<Result<Vec<_>, _>>()?;
            values.push(row);
        }
        Ok(ExpandedRun { values })
    }

    /// The values at check times of [`Gadget::trace_from_layout`], which
    /// must form an accepting run.
    pub fn run_from_layout(&self, f: &TopOrdering) -> Result<Run, GadgetError> {
        let trace = self.trace_from_layout(f)?;
        let p = self.params;
        let run = Run::new((1..=p.r).map(|alpha| trace.values[alpha * p.s - 1].clone()).collect());
        if !validate_run(&self.instance, &run)? {
            return Err(GadgetError::ExtractedRunInvalid);
        }
        Ok(run)
    }
}

/// Builds the DAG of `m` and lays it out along `run`.
pub fn layout_from_run(m: &NnccmInstance, run: &Run) -> Result<TopOrdering, GadgetError> {
    build_dag(m)?.layout_from_run(run)
}

/// Builds the tree of `m` and lays it out along `run`.
pub fn tree_layout_from_run(m: &NnccmInstance, run: &Run) -> Result<TopOrdering, GadgetError> {
    build_tree(m)?.layout_from_run(run)
}

pub fn trace_from_layout(m: &NnccmInstance, gadget: &Gadget, f: &TopOrdering) -> Result<ExpandedRun, GadgetError> {
    if &gadget.instance != m {
        return Err(GadgetError::ForeignInstance);
    }
    gadget.trace_from_layout(f)
}

pub fn run_from_layout(m: &NnccmInstance, gadget: &Gadget, f: &TopOrdering) -> Result<Run, GadgetError> {
    if &gadget.instance != m {
        return Err(GadgetError::ForeignInstance);
    }
    gadget.run_from_layout(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnccm::{accepts, enumerate_up_to, find_run, Check};

    fn inst(k: usize, n: usize, checks: &[(usize, usize, usize, usize)]) -> NnccmInstance {
        NnccmInstance::new(k, n, checks.iter().map(|&(a, b, c, d)| Check::new(a, b, c, d)).collect()).unwrap()
    }

    /// Every accepting run, by brute force over nondecreasing matrices.
    fn all_runs(m: &NnccmInstance) -> Vec<Run> {
        let mut out = Vec::new();
        let mut rows: Vec<Vec<usize>> = Vec::new();
        fn go(m: &NnccmInstance, rows: &mut Vec<Vec<usize>>, out: &mut Vec<Run>) {
            if rows.len() == m.r() {
                out.push(Run::new(rows.clone()));
                return;
            }
            let total = (m.n() + 1).pow(m.k() as u32);
            for code in 0..total {
                let row: Vec<usize> = (0..m.k()).map(|i| code / (m.n() + 1).pow(i as u32) % (m.n() + 1)).collect();
                let floor_ok = rows.last().is_none_or(|last| last.iter().zip(&row).all(|(a, b)| a <= b));
                if floor_ok && !m.checks()[rows.len()].fires(&row) {
                    rows.push(row);
                    go(m, rows, out);
                    rows.pop();
                }
            }
        }
        go(m, &mut rows, &mut out);
        out
    }

    #[test]
    fn expansion_examples() {
        let m = inst(1, 1, &[(1, 1, 1, 1)]);
        let e = alternative_run(&m, &Run::new(vec![vec![0]])).unwrap();
        assert_eq!(e.values, vec![vec![0], vec![0], vec![0], vec![0], vec![1], vec![1]]);
        assert!(validate_expanded_run(&m, &e));

        let m = inst(3, 2, &[(1, 0, 2, 0), (1, 1, 3, 1)]);
        let run = Run::new(vec![vec![2, 2, 2], vec![2, 2, 2]]);
        let e = alternative_run(&m, &run).unwrap();
        assert!(validate_expanded_run(&m, &e));
        assert_eq!(e.values[m.n() * 4 - 1], vec![2, 2, 2]);
        let mut broken = e.clone();
        broken.values[0] = vec![1, 0, 0];
        assert!(!validate_expanded_run(&m, &broken));
    }

    #[test]
    fn smallest_layout() {
        let m = inst(1, 1, &[(1, 0, 1, 0)]);
        let g = build_dag(&m).unwrap();
        let run = Run::new(vec![vec![1]]);
        let f = g.layout_from_run(&run).unwrap();
        assert!(bandwidth_of(&g.graph, &f).unwrap() <= 7);
        for (i, &v) in g.index.floor.iter().enumerate() {
            assert_eq!(f.position[v], 7 * i);
        }
        assert_eq!(g.run_from_layout(&f), Ok(run));
        let trace = g.trace_from_layout(&f).unwrap();
        assert!(validate_expanded_run(&m, &trace));
    }

    #[test]
    fn rejected_check_overflows_a_batch() {
        let m = inst(1, 1, &[(1, 0, 1, 0)]);
        let g = build_dag(&m).unwrap();
        // Bypass run validation to feed the firing value 0 to the layout.
        let lenient = inst(1, 1, &[(1, 1, 1, 1)]);
        let mut bad = g.clone();
        bad.instance = lenient;
        assert_eq!(
            bad.layout_from_run(&Run::new(vec![vec![0]])),
            Err(GadgetError::BatchOverflow { batch: 4 })
        );
        assert_eq!(g.layout_from_run(&Run::new(vec![vec![0]])), Err(GadgetError::InvalidRun));
    }

    #[test]
    fn round_trip_small_sweep() {
        let mut stuck = Vec::new();
        for m in enumerate_up_to(1, 1, 2).filter(|m| m.r() >= 1 && m.n() == 1 && accepts(m)) {
            let dag = build_dag(&m).unwrap();
            let tree = build_tree(&m).unwrap();
            let mut laid_out = false;
            for run in all_runs(&m) {
                let f = match dag.layout_from_run(&run) {
                    Ok(f) => f,
                    Err(GadgetError::BatchOverflow { .. }) => continue,
                    Err(e) => panic!("{m} {run:?}: {e}"),
                };
                laid_out = true;
                assert_eq!(dag.run_from_layout(&f).as_ref(), Ok(&run), "{m}");
                assert!(validate_expanded_run(&m, &dag.trace_from_layout(&f).unwrap()));
                let t = tree.layout_from_run(&run).unwrap_or_else(|e| panic!("tree {m} {run:?}: {e}"));
                assert_eq!(tree.run_from_layout(&t).as_ref(), Ok(&run), "{m}");
            }
            if !laid_out {
                stuck.push(m.to_string());
            }
        }
        // The only accepting run raises the counter between the two checks.
        // The one batch there with spare room has two free positions, and the
        // extra counter vertex and both between vertices all need one.
        assert_eq!(stuck, vec!["k=1 n=1 checks=[(1,1,1,1),(1,0,1,0)]"]);
    }

    #[test]
    fn round_trip_larger_values() {
        let m = inst(2, 2, &[(1, 1, 2, 1), (2, 2, 1, 2), (1, 0, 2, 2)]);
        let run = find_run(&m).unwrap();
        let tree = build_tree(&m).unwrap();
        let f = tree.layout_from_run(&run).unwrap();
        assert_eq!(tree.run_from_layout(&f), Ok(run));
    }

    #[test]
    fn tree_layout_ends_with_the_barrier() {
        let m = inst(1, 1, &[(1, 1, 1, 1)]);
        let t = build_tree(&m).unwrap();
        let f = t.layout_from_run(&Run::new(vec![vec![0]])).unwrap();
        let seq = f.sequence();
        let tails = t.index.tails.as_ref().unwrap();
        let barrier = tails.floor[tails.floor.len() - 1];
        assert_eq!(seq[seq.len() - 8], barrier);
        assert!(seq[seq.len() - 7..].iter().all(|&v| t.graph.pred(v) == [barrier]));
        assert!(tails.floor_end_leaves.iter().all(|&v| (43..49).contains(&f.position[v])));
    }
}
