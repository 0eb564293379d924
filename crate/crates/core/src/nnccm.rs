//! Nondecreasing checking counter machines.
//!
//! A machine has `k` counters ranging over `[0, n]`, all starting at zero.
//! Each of `r` rounds first lets any subset of counters jump to any larger
//! value (at most `n`), then performs a check `(c1, n1, c2, n2)` which rejects
//! when counter `c1` holds `n1` and counter `c2` holds `n2`. Acceptance only
//! depends on whether some nondecreasing `r × k` value matrix avoids every
//! check, so runs are stored as that matrix.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NnccmError {
    #[error("instance needs at least one counter")]
    NoCounters,
    #[error("declared r = {declared} but {actual} checks were given")]
    RoundCountMismatch { declared: usize, actual: usize },
    #[error("check {index}: counter {counter} outside [1, {k}]")]
    CounterOutOfRange { index: usize, counter: usize, k: usize },
    #[error("check {index}: value {value} outside [0, {n}]")]
    ValueOutOfRange { index: usize, value: usize, n: usize },
    #[error("run has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    RunShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
}

/// One check, with 1-based counter indices as in the textual format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Check {
    pub c1: usize,
    pub n1: usize,
    pub c2: usize,
    pub n2: usize,
}

impl Check {
    pub fn new(c1: usize, n1: usize, c2: usize, n2: usize) -> Self {
        Check { c1, n1, c2, n2 }
    }

    /// Whether the check fires on `values` (0-based counter storage).
    pub fn fires(&self, values: &[usize]) -> bool {
        values[self.c1 - 1] == self.n1 && values[self.c2 - 1] == self.n2
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.c1, self.n1, self.c2, self.n2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct NnccmInstance {
    k: usize,
    n: usize,
    checks: Vec<Check>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    k: usize,
    n: usize,
    r: usize,
    checks: Vec<[usize; 4]>,
}

impl TryFrom<RawInstance> for NnccmInstance {
    type Error = NnccmError;

    fn try_from(raw: RawInstance) -> Result<Self, Self::Error> {
        if raw.r != raw.checks.len() {
            return Err(NnccmError::RoundCountMismatch {
                declared: raw.r,
                actual: raw.checks.len(),
            });
        }
        let checks = raw
            .checks
            .into_iter()
            .map(|[c1, n1, c2, n2]| Check { c1, n1, c2, n2 })
            .collect();
        NnccmInstance::new(raw.k, raw.n, checks)
    }
}

impl From<NnccmInstance> for RawInstance {
    fn from(inst: NnccmInstance) -> Self {
        RawInstance {
            k: inst.k,
            n: inst.n,
            r: inst.checks.len(),
            checks: inst
                .checks
                .iter()
                .map(|c| [c.c1, c.n1, c.c2, c.n2])
                .collect(),
        }
    }
}

impl NnccmInstance {
    pub fn new(k: usize, n: usize, checks: Vec<Check>) -> Result<Self, NnccmError> {
        if k == 0 {
            return Err(NnccmError::NoCounters);
        }
        for (index, c) in checks.iter().enumerate() {
            for counter in [c.c1, c.c2] {
                if counter == 0 || counter > k {
                    return Err(NnccmError::CounterOutOfRange { index, counter, k });
                }
            }
            for value in [c.n1, c.n2] {
                if value > n {
                    return Err(NnccmError::ValueOutOfRange { index, value, n });
                }
            }
        }
        Ok(NnccmInstance { k, n, checks })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.checks.len()
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    /// Copy of the instance with check `index` (0-based) dropped.
    pub fn without_check(&self, index: usize) -> NnccmInstance {
        let mut checks = self.checks.clone();
        checks.remove(index);
        NnccmInstance {
            k: self.k,
            n: self.n,
            checks,
        }
    }
}

impl fmt::Display for NnccmInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} n={} checks=[", self.k, self.n)?;
        for (i, c) in self.checks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Counter values at check time: `values[j][i]` is counter `i` (0-based)
/// when check `j` (0-based) is performed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Run {
    pub values: Vec<Vec<usize>>,
}

impl Run {
    pub fn new(values: Vec<Vec<usize>>) -> Self {
        Run { values }
    }

    pub fn rounds(&self) -> usize {
        self.values.len()
    }
}

/// Structural part of run validation: shape, range and monotonicity.
/// Returns `Ok(false)` on range or monotonicity violations.
pub fn run_is_well_formed(inst: &NnccmInstance, run: &Run) -> Result<bool, NnccmError> {
    let bad_shape = run.values.len() != inst.r() || run.values.iter().any(|row| row.len() != inst.k);
    if bad_shape {
        return Err(NnccmError::RunShape {
            rows: run.values.len(),
            cols: run.values.first().map_or(inst.k, Vec::len),
            expected_rows: inst.r(),
            expected_cols: inst.k,
        });
    }
    let in_range = run.values.iter().flatten().all(|&v| v <= inst.n);
    let monotone = run
        .values
        .windows(2)
        .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| a <= b));
    Ok(in_range && monotone)
}

/// True iff `run` is nondecreasing, in range and passes every check.
pub fn validate_run(inst: &NnccmInstance, run: &Run) -> Result<bool, NnccmError> {
    if !run_is_well_formed(inst, run)? {
        return Ok(false);
    }
    Ok(inst
        .checks
        .iter()
        .zip(&run.values)
        .all(|(check, row)| !check.fires(row)))
}

/// Minimal surviving vectors after each round. Entry 0 is the initial
/// all-zero state; entry `j` holds the minimal elements of the set of value
/// vectors that can be present when check `j` passes.
fn frontiers(inst: &NnccmInstance) -> Vec<Vec<Vec<usize>>> {
    let mut layers = Vec::with_capacity(inst.r() + 1);
    layers.push(vec![vec![0; inst.k]]);
    for check in &inst.checks {
        let prev = layers.last().expect("initial layer present");
        let mut next: Vec<Vec<usize>> = Vec::new();
        for v in prev {
            if !check.fires(v) {
                next.push(v.clone());
                continue;
            }
            // Everything above `v` that escapes the check raises c1 or c2.
            for (c, val) in [(check.c1, check.n1), (check.c2, check.n2)] {
                if val < inst.n {
                    let mut up = v.clone();
                    up[c - 1] = val + 1;
                    next.push(up);
                }
            }
        }
        layers.push(minimal_elements(next));
        if layers.last().is_some_and(Vec::is_empty) {
            break;
        }
    }
    layers
}

fn dominates(a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn minimal_elements(mut vs: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    vs.sort();
    vs.dedup();
    let mut out: Vec<Vec<usize>> = Vec::new();
    // Lexicographic order puts any dominating vector before those it dominates.
    for v in vs {
        if !out.iter().any(|m| dominates(m, &v)) {
            out.push(v);
        }
    }
    out
}

pub fn accepts(inst: &NnccmInstance) -> bool {
    let layers = frontiers(inst);
    layers.len() == inst.r() + 1 && !layers[inst.r()].is_empty()
}

/// Accepting run, if any. Picks lexicographically smallest minimal vectors
/// walking backwards from the last round.
pub fn find_run(inst: &NnccmInstance) -> Option<Run> {
    let layers = frontiers(inst);
    if layers.len() != inst.r() + 1 || layers[inst.r()].is_empty() {
        return None;
    }
    let mut values = vec![Vec::new(); inst.r()];
    let mut upper: Option<Vec<usize>> = None;
    for j in (1..=inst.r()).rev() {
        let pick = layers[j]
            .iter()
            .filter(|v| upper.as_ref().is_none_or(|u| dominates(v, u)))
            .min()
            .expect("every frontier vector has a predecessor below it")
            .clone();
        values[j - 1] = pick.clone();
        upper = Some(pick);
    }
    Some(Run { values })
}

/// Every accepting run, in lexicographic order. Exponential in `k * r`;
/// meant for small instances.
pub fn accepting_runs(inst: &NnccmInstance) -> Vec<Run> {
    fn go(inst: &NnccmInstance, rows: &mut Vec<Vec<usize>>, out: &mut Vec<Run>) {
        if rows.len() == inst.r() {
            out.push(Run { values: rows.clone() });
            return;
        }
        let base = inst.n + 1;
        let mut row = vec![0; inst.k];
        for code in 0..base.pow(inst.k as u32) {
            let mut c = code;
            for slot in row.iter_mut().rev() {
                *slot = c % base;
                c /= base;
            }
            let monotone = rows.last().is_none_or(|prev| dominates(prev, &row));
            if monotone && !inst.checks[rows.len()].fires(&row) {
                rows.push(row.clone());
                go(inst, rows, out);
                rows.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(inst, &mut Vec::new(), &mut out);
    out
}

/// Every instance with exactly `k` counters, maximum value `n` and `r`
/// checks, in lexicographic order of the check sequence.
pub fn enumerate_instances(k: usize, n: usize, r: usize) -> impl Iterator<Item = NnccmInstance> {
    let per_check = (k * (n + 1)).pow(2);
    let total = if k == 0 { 0 } else { per_check.pow(r as u32) };
    let decode = move |mut code: usize| -> Check {
        let n2 = code % (n + 1);
        code /= n + 1;
        let c2 = code % k + 1;
        code /= k;
        let n1 = code % (n + 1);
        code /= n + 1;
        Check::new(code + 1, n1, c2, n2)
    };
    (0..total).map(move |mut idx| {
        let mut checks = vec![Check::new(1, 0, 1, 0); r];
        for slot in (0..r).rev() {
            checks[slot] = decode(idx % per_check);
            idx /= per_check;
        }
        NnccmInstance { k, n, checks }
    })
}

/// All instances with `1 <= k <= k_max`, `n <= n_max`, `r <= r_max`.
pub fn enumerate_up_to(
    k_max: usize,
    n_max: usize,
    r_max: usize,
) -> impl Iterator<Item = NnccmInstance> {
    (1..=k_max).flat_map(move |k| {
        (0..=n_max).flat_map(move |n| (0..=r_max).flat_map(move |r| enumerate_instances(k, n, r)))
    })
}

pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize, r: usize) -> NnccmInstance {
    assert!(k >= 1, "need at least one counter");
    let checks = (0..r)
        .map(|_| {
            Check::new(
                rng.gen_range(1..=k),
                rng.gen_range(0..=n),
                rng.gen_range(1..=k),
                rng.gen_range(0..=n),
            )
        })
        .collect();
    NnccmInstance { k, n, checks }
}
