use super::{DelayKind, Job, Prec, SchedError, SchedInstance, Schedule, Structure};
use crate::graph::Digraph;

/// Delay on every arc produced by [`parallel_to_min_delay`], one per machine
/// of the source instance.
pub const MIN_DELAY: usize = 3;

/// Length of one time unit of the parallel instance on the single machine:
/// an anchor of length [`MIN_DELAY`] followed by a gap of the same length.
const BLOCK: usize = 2 * MIN_DELAY;

/// Unit jobs on one machine with deadline `n`; arc `uv` becomes a maximum
/// delay of `b - 1`, so `v` starts at most `b` slots after `u`.
pub fn bandwidth_to_sched(g: &Digraph, b: usize) -> Result<SchedInstance, SchedError> {
    if b == 0 {
        return Err(SchedError::ZeroLimit);
    }
    if !g.is_acyclic() {
        return Err(SchedError::Cyclic);
    }
    let n = g.vertex_count();
    let prec = g.arcs().iter().map(|&(u, v)| Prec::new(u, v, DelayKind::Max, b - 1)).collect();
    SchedInstance::new(1, vec![Job::UNIT; n], prec, n.max(1), Structure::General)
}

/// Inverse of [`bandwidth_to_sched`] on its image. Without arcs every limit
/// is equivalent and 1 is returned.
pub fn sched_to_bandwidth(inst: &SchedInstance) -> Result<(Digraph, usize), SchedError> {
    let n = inst.jobs().len();
    if inst.machines() != 1 {
        return Err(SchedError::Fragment("needs a single machine"));
    }
    if inst.jobs().iter().any(|j| *j != Job::UNIT) {
        return Err(SchedError::Fragment("needs unit jobs of size 1"));
    }
    if inst.deadline() != n.max(1) {
        return Err(SchedError::Fragment("deadline must equal the job count"));
    }
    if inst.prec().iter().any(|a| a.kind != DelayKind::Max) {
        return Err(SchedError::Fragment("every arc must be a maximum delay"));
    }
    let l = inst.prec().first().map_or(0, |a| a.l);
    if inst.prec().iter().any(|a| a.l != l) {
        return Err(SchedError::Fragment("maximum delays differ"));
    }
    Ok((inst.graph(), l + 1))
}

fn check_parallel(inst: &SchedInstance) -> Result<(), SchedError> {
    if inst.machines() != 3 {
        return Err(SchedError::Fragment("needs exactly three machines"));
    }
    if inst.jobs().iter().any(|j| j.p != 1 || j.size > 2) {
        return Err(SchedError::Fragment("needs unit durations and sizes 1 or 2"));
    }
    if inst.prec().iter().any(|a| a.kind != DelayKind::None) {
        return Err(SchedError::Fragment("needs plain precedence arcs"));
    }
    Ok(())
}

/// Single-machine instance with minimum delays equivalent to a
/// three-machine instance with unit jobs of size 1 or 2.
///
/// Time unit `t` becomes the gap `[6t + 3, 6t + 6)` and job `j` a job of
/// length `size_j`. Anchor jobs of length 3 chained by the same minimum delay
/// end in a unit terminal job; with deadline `6D + 1` the chain is rigid and
/// holds the anchors at `[6t, 6t + 3)`, so every other job sits inside one
/// gap. The original jobs come first, then the anchors, then the terminal.
/// Without jobs there is nothing to align and no anchors are added.
pub fn parallel_to_min_delay(inst: &SchedInstance) -> Result<SchedInstance, SchedError> {
    check_parallel(inst)?;
    let n = inst.jobs().len();
    let d = inst.deadline();
    let mut jobs: Vec<Job> = inst.jobs().iter().map(|j| Job { p: j.size, size: 1 }).collect();
    let mut prec: Vec<Prec> = inst
        .prec()
        .iter()
        .map(|a| Prec::new(a.from, a.to, DelayKind::Min, MIN_DELAY))
        .collect();
    if n > 0 {
        jobs.extend(std::iter::repeat_n(Job { p: MIN_DELAY, size: 1 }, d));
        jobs.push(Job::UNIT);
        prec.extend((n..n + d).map(|a| Prec::new(a, a + 1, DelayKind::Min, MIN_DELAY)));
    }
    SchedInstance::new(1, jobs, prec, BLOCK * d + 1, Structure::General)
}

/// Carries a schedule of the three-machine instance over to
/// [`parallel_to_min_delay`]'s output, packing each time unit's jobs into
/// its gap by id.
pub fn parallel_schedule_to_min_delay(inst: &SchedInstance, s: &Schedule) -> Result<Schedule, SchedError> {
    check_parallel(inst)?;
    let n = inst.jobs().len();
    let d = inst.deadline();
    let mut fill = vec![MIN_DELAY; d];
    let mut start = Vec::with_capacity(n + d + 1);
    for (j, &t) in s.start.iter().enumerate() {
        if t >= d {
            return Err(SchedError::StartOutOfRange {
                job: j,
                start: t,
                latest: d as i64 - 1,
            });
        }
        start.push(BLOCK * t + fill[t]);
        fill[t] += inst.jobs()[j].size;
    }
    if n > 0 {
        start.extend((0..=d).map(|t| BLOCK * t));
    }
    Ok(Schedule { start })
}

/// Reads a three-machine schedule off a schedule of
/// [`parallel_to_min_delay`]'s output: each job runs in the time unit whose
/// block contains its start.
pub fn min_delay_schedule_to_parallel(inst: &SchedInstance, s: &Schedule) -> Schedule {
    Schedule {
        start: s.start[..inst.jobs().len()].iter().map(|&x| x / BLOCK).collect(),
    }
}
