//! Unary bin packing and its equivalence with single-machine scheduling of
//! unit-job chains under one common exact delay.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sched::{DelayKind, Job, Prec, SchedError, SchedInstance, Schedule, Structure};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BinPackError {
    #[error("capacity and bin count must be positive")]
    ZeroParameter,
    #[error("item {index} has size 0")]
    ZeroItem { index: usize },
    #[error("outside the supported fragment: {0}")]
    Fragment(&'static str),
    #[error(transparent)]
    Sched(#[from] SchedError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RawBinPacking {
    #[serde(rename = "B")]
    capacity: usize,
    k: usize,
    items: Vec<usize>,
}

/// `k` bins of capacity `B` and positive item sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBinPacking", into = "RawBinPacking")]
pub struct BinPackingInstance {
    capacity: usize,
    bins: usize,
    items: Vec<usize>,
}

impl TryFrom<RawBinPacking> for BinPackingInstance {
    type Error = BinPackError;

    fn try_from(raw: RawBinPacking) -> Result<Self, BinPackError> {
        BinPackingInstance::new(raw.capacity, raw.k, raw.items)
    }
}

impl From<BinPackingInstance> for RawBinPacking {
    fn from(bp: BinPackingInstance) -> Self {
        RawBinPacking {
            capacity: bp.capacity,
            k: bp.bins,
            items: bp.items,
        }
    }
}

impl BinPackingInstance {
    pub fn new(capacity: usize, bins: usize, items: Vec<usize>) -> Result<Self, BinPackError> {
        if capacity == 0 || bins == 0 {
            return Err(BinPackError::ZeroParameter);
        }
        if let Some(index) = items.iter().position(|&a| a == 0) {
            return Err(BinPackError::ZeroItem { index });
        }
        Ok(BinPackingInstance { capacity, bins, items })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }
}

/// Bin per item, numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub assign: Vec<usize>,
}

impl Packing {
    /// Total size per bin; `None` if some item has no valid bin.
    pub fn loads(&self, bp: &BinPackingInstance) -> Option<Vec<usize>> {
        if self.assign.len() != bp.items.len() {
            return None;
        }
        let mut load = vec![0; bp.bins];
        for (&a, &bin) in bp.items.iter().zip(&self.assign) {
            *load.get_mut(bin.checked_sub(1)?)? += a;
        }
        Some(load)
    }
}

pub fn verify_packing(bp: &BinPackingInstance, packing: &Packing) -> bool {
    packing
        .loads(bp)
        .is_some_and(|load| load.iter().all(|&l| l <= bp.capacity))
}

/// Exact search placing items largest first. Bins with equal load are
/// interchangeable, so only the first of them is tried; in particular a
/// fresh bin is opened only once per item.
pub fn binpack_feasible(bp: &BinPackingInstance) -> Option<Packing> {
    let mut order: Vec<usize> = (0..bp.items.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(bp.items[i]), i));
    if bp.items.iter().sum::<usize>() > bp.capacity * bp.bins {
        return None;
    }

    fn go(bp: &BinPackingInstance, order: &[usize], load: &mut [usize], assign: &mut [usize]) -> bool {
        let Some((&item, rest)) = order.split_first() else {
            return true;
        };
        let a = bp.items[item];
        for bin in 0..load.len() {
            if load[bin] + a > bp.capacity || load[..bin].contains(&load[bin]) {
                continue;
            }
            load[bin] += a;
            assign[item] = bin + 1;
            if go(bp, rest, load, assign) {
                return true;
            }
            load[bin] -= a;
        }
        false
    }

    let mut load = vec![0; bp.bins];
    let mut assign = vec![0; bp.items.len()];
    go(bp, &order, &mut load, &mut assign).then_some(Packing { assign })
}

/// Chains of unit jobs on one machine, one chain of `a_j` jobs per item,
/// consecutive jobs of a chain separated by exactly `k - 1` idle slots, and
/// deadline `kB`. Slots congruent modulo `k` play the role of one bin.
///
/// Jobs of item `j` are numbered consecutively in item order. An item larger
/// than `B` makes the instance a no; the output is then two unrelated unit
/// jobs with deadline 1.
pub fn binpack_to_chains(bp: &BinPackingInstance) -> Result<SchedInstance, BinPackError> {
    if bp.items.iter().any(|&a| a > bp.capacity) {
        return Ok(SchedInstance::new(1, vec![Job::UNIT; 2], vec![], 1, Structure::Chains)?);
    }
    let delay = bp.bins - 1;
    let mut prec = vec![];
    let mut next = 0;
    for &a in &bp.items {
        prec.extend((next..next + a - 1).map(|j| Prec::new(j, j + 1, DelayKind::Exact, delay)));
        next += a;
    }
    Ok(SchedInstance::new(
        1,
        vec![Job::UNIT; next],
        prec,
        bp.bins * bp.capacity,
        Structure::Chains,
    )?)
}

/// Schedule of [`binpack_to_chains`]'s output from a packing: bin `i` owns
/// the slots congruent to `i - 1` modulo `k`, and its chains are laid down
/// one after another from the earliest of them.
pub fn schedule_from_packing(bp: &BinPackingInstance, packing: &Packing) -> Option<Schedule> {
    if !verify_packing(bp, packing) {
        return None;
    }
    let mut used = vec![0; bp.bins];
    let mut start = vec![];
    for (&a, &bin) in bp.items.iter().zip(&packing.assign) {
        let class = bin - 1;
        start.extend((used[class]..used[class] + a).map(|x| x * bp.bins + class));
        used[class] += a;
    }
    Some(Schedule { start })
}

/// Common exact delay of a single-machine unit-job chains instance; 0 when
/// there are no arcs.
fn chain_delay(inst: &SchedInstance) -> Result<usize, BinPackError> {
    if inst.machines() != 1 {
        return Err(BinPackError::Fragment("needs a single machine"));
    }
    if inst.structure() != Structure::Chains {
        return Err(BinPackError::Fragment("needs the chains structure"));
    }
    if inst.jobs().iter().any(|j| *j != Job::UNIT) {
        return Err(BinPackError::Fragment("needs unit jobs of size 1"));
    }
    if inst.prec().iter().any(|a| a.kind != DelayKind::Exact) {
        return Err(BinPackError::Fragment("every arc must be an exact delay"));
    }
    let l = inst.prec().first().map_or(0, |a| a.l);
    if inst.prec().iter().any(|a| a.l != l) {
        return Err(BinPackError::Fragment("exact delays differ"));
    }
    Ok(l)
}

/// Chain lengths, in order of each chain's first job.
pub fn chain_lengths(inst: &SchedInstance) -> Vec<usize> {
    let n = inst.jobs().len();
    let mut next = vec![None; n];
    let mut has_pred = vec![false; n];
    for a in inst.prec() {
        next[a.from] = Some(a.to);
        has_pred[a.to] = true;
    }
    (0..n)
        .filter(|&j| !has_pred[j])
        .map(|head| std::iter::successors(Some(head), |&j| next[j]).count())
        .collect()
}

/// Bin packing instance equivalent to a chains instance with common exact
/// delay `l` and deadline `D`.
///
/// With `B' = ceil(D / (l+1))` and `r' = B'(l+1) - D`, the `l + 1` residue
/// classes of `[0, D)` hold `B'` slots each except `r'` of them, which hold
/// `B' - 1`. There are `l + 1` bins of capacity `2B' + 1`, one item per chain
/// and one fill item per bin, `r'` of size `B' + 2` and the rest of size
/// `B' + 1`, so each bin keeps exactly its class's slot count free. Fill
/// items come after the chain items.
pub fn chains_to_binpack(inst: &SchedInstance) -> Result<BinPackingInstance, BinPackError> {
    let l = chain_delay(inst)?;
    let d = inst.deadline();
    let classes = l + 1;
    let wide = d.div_ceil(classes);
    let short = wide * classes - d;
    debug_assert_eq!(
        (0..classes).filter(|&rho| (rho..d).step_by(classes).count() + 1 == wide).count(),
        short
    );
    let mut items = chain_lengths(inst);
    items.extend(std::iter::repeat_n(wide + 2, short));
    items.extend(std::iter::repeat_n(wide + 1, classes - short));
    BinPackingInstance::new(2 * wide + 1, classes, items)
}

/// Number of fill items [`chains_to_binpack`] appended for `inst`.
pub fn fill_item_count(inst: &SchedInstance) -> Result<usize, BinPackError> {
    Ok(chain_delay(inst)? + 1)
}
