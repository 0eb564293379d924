//! Scheduling with precedence delays: instances, schedules, an exact
//! feasibility search, and conversions to and from directed bandwidth and
//! parallel machines.

mod convert;
mod solve;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Digraph;

pub use convert::{
    bandwidth_to_sched, min_delay_schedule_to_parallel, parallel_schedule_to_min_delay, parallel_to_min_delay,
    sched_to_bandwidth, MIN_DELAY,
};
pub use solve::feasible;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchedError {
    #[error("instance needs at least one machine")]
    NoMachines,
    #[error("deadline must be positive")]
    ZeroDeadline,
    #[error("job {job}: duration and size must be at least 1")]
    ZeroJob { job: usize },
    #[error("arc ({from}, {to}) leaves the job range 0..{n}")]
    ArcOutOfRange { from: usize, to: usize, n: usize },
    #[error("precedence arcs form a cycle")]
    Cyclic,
    #[error("job {job} has more than one predecessor or successor in a chains instance")]
    NotChains { job: usize },
    #[error("schedule covers {got} jobs, instance has {expected}")]
    ScheduleLength { got: usize, expected: usize },
    #[error("job {job} starts at {start}, outside [0, {latest}]")]
    StartOutOfRange { job: usize, start: usize, latest: i64 },
    #[error("outside the supported fragment: {0}")]
    Fragment(&'static str),
    #[error("bandwidth limit must be at least 1")]
    ZeroLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DelayKind {
    /// Plain precedence: start after the predecessor completes.
    None,
    /// At least `l` idle time units after completion.
    Min,
    /// At most `l` time units after completion.
    Max,
    /// Exactly `l` time units after completion.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    pub p: usize,
    pub size: usize,
}

impl Job {
    pub const UNIT: Job = Job { p: 1, size: 1 };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Prec {
    pub from: usize,
    pub to: usize,
    pub kind: DelayKind,
    #[serde(default)]
    pub l: usize,
}

impl Prec {
    pub fn new(from: usize, to: usize, kind: DelayKind, l: usize) -> Self {
        Prec { from, to, kind, l }
    }

    /// Smallest allowed `start(to) - start(from)`.
    pub(crate) fn min_gap(&self, p_from: usize) -> i64 {
        match self.kind {
            DelayKind::Min | DelayKind::Exact => (p_from + self.l) as i64,
            DelayKind::None | DelayKind::Max => p_from as i64,
        }
    }

    /// Largest allowed `start(to) - start(from)`, if bounded.
    pub(crate) fn max_gap(&self, p_from: usize) -> Option<i64> {
        match self.kind {
            DelayKind::Max | DelayKind::Exact => Some((p_from + self.l) as i64),
            DelayKind::None | DelayKind::Min => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    #[default]
    General,
    /// Every job has at most one predecessor and one successor.
    Chains,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RawSched {
    m: usize,
    #[serde(rename = "D")]
    deadline: usize,
    jobs: Vec<Job>,
    #[serde(default)]
    prec: Vec<Prec>,
    #[serde(default)]
    structure: Structure,
}

/// Jobs on `m` identical machines with delay-typed precedence arcs and a
/// common deadline: every job runs in `[start, start + p)` inside `[0, D)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSched", into = "RawSched")]
pub struct SchedInstance {
    machines: usize,
    jobs: Vec<Job>,
    prec: Vec<Prec>,
    deadline: usize,
    structure: Structure,
}

impl TryFrom<RawSched> for SchedInstance {
    type Error = SchedError;

    fn try_from(raw: RawSched) -> Result<Self, SchedError> {
        SchedInstance::new(raw.m, raw.jobs, raw.prec, raw.deadline, raw.structure)
    }
}

impl From<SchedInstance> for RawSched {
    fn from(inst: SchedInstance) -> Self {
        RawSched {
            m: inst.machines,
            deadline: inst.deadline,
            jobs: inst.jobs,
            prec: inst.prec,
            structure: inst.structure,
        }
    }
}

impl SchedInstance {
    pub fn new(
        machines: usize,
        jobs: Vec<Job>,
        prec: Vec<Prec>,
        deadline: usize,
        structure: Structure,
    ) -> Result<Self, SchedError> {
        if machines == 0 {
            return Err(SchedError::NoMachines);
        }
        if deadline == 0 {
            return Err(SchedError::ZeroDeadline);
        }
        if let Some(job) = jobs.iter().position(|j| j.p == 0 || j.size == 0) {
            return Err(SchedError::ZeroJob { job });
        }
        let n = jobs.len();
        let mut g = Digraph::empty(n);
        for a in &prec {
            if a.from >= n || a.to >= n || a.from == a.to {
                return Err(SchedError::ArcOutOfRange {
                    from: a.from,
                    to: a.to,
                    n,
                });
            }
            g.add_arc(a.from, a.to).expect("checked range");
        }
        if !g.is_acyclic() {
            return Err(SchedError::Cyclic);
        }
        if structure == Structure::Chains {
            let mut indeg = vec![0; n];
            let mut outdeg = vec![0; n];
            for a in &prec {
                indeg[a.to] += 1;
                outdeg[a.from] += 1;
            }
            if let Some(job) = (0..n).find(|&j| indeg[j] > 1 || outdeg[j] > 1) {
                return Err(SchedError::NotChains { job });
            }
        }
        Ok(SchedInstance {
            machines,
            jobs,
            prec,
            deadline,
            structure,
        })
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn prec(&self) -> &[Prec] {
        &self.prec
    }

    pub fn deadline(&self) -> usize {
        self.deadline
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    /// Precedence graph on the jobs.
    pub fn graph(&self) -> Digraph {
        Digraph::new(self.jobs.len(), self.prec.iter().map(|a| (a.from, a.to)).collect()).expect("validated arcs")
    }

    /// Latest admissible start of `job`; negative when the job cannot fit.
    pub fn latest_start(&self, job: usize) -> i64 {
        self.deadline as i64 - self.jobs[job].p as i64
    }
}

/// Start time per job.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub start: Vec<usize>,
}

/// Whether `s` respects the deadline, the machine capacity in every time
/// unit, and every arc's delay. Starts outside `[0, D - p]` are an error
/// rather than a `false`.
pub fn verify_schedule(inst: &SchedInstance, s: &Schedule) -> Result<bool, SchedError> {
    let n = inst.jobs.len();
    if s.start.len() != n {
        return Err(SchedError::ScheduleLength {
            got: s.start.len(),
            expected: n,
        });
    }
    for (job, &start) in s.start.iter().enumerate() {
        let latest = inst.latest_start(job);
        if start as i64 > latest {
            return Err(SchedError::StartOutOfRange { job, start, latest });
        }
    }
    let mut load = vec![0usize; inst.deadline];
    for (job, &start) in s.start.iter().enumerate() {
        for slot in &mut load[start..start + inst.jobs[job].p] {
            *slot += inst.jobs[job].size;
        }
    }
    if load.iter().any(|&l| l > inst.machines) {
        return Ok(false);
    }
    Ok(inst.prec.iter().all(|a| {
        let gap = s.start[a.to] as i64 - s.start[a.from] as i64;
        let p = inst.jobs[a.from].p;
        gap >= a.min_gap(p) && a.max_gap(p).is_none_or(|hi| gap <= hi)
    }))
}
