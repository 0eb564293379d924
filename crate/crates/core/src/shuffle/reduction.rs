//! Counter machine to binary shuffle membership, plus both directions of the
//! correspondence between accepting runs and interleavings.

use serde::Serialize;
use thiserror::Error;

use super::{verify_witness, Block, InterleavingWitness, ShuffleInstance, WitnessError, Word};
use crate::nnccm::{validate_run, NnccmError, NnccmInstance, Run};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("the construction needs n >= 1")]
    ZeroMaxValue,
    #[error("run does not validate against the instance")]
    InvalidRun,
    #[error(transparent)]
    Nnccm(#[from] NnccmError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error("witness does not verify against the instance")]
    WitnessRejected,
    #[error("instance and metadata disagree: {0}")]
    MetaMismatch(&'static str),
    #[error("target block {block} receives {demand} letters from sources 1..=k, capacity {capacity}")]
    BlockOverflow {
        block: usize,
        demand: usize,
        capacity: usize,
    },
    #[error("source {word} block {block}: offset {offset} is not an even value in [0, 2n]")]
    BadOffset { word: usize, block: usize, offset: i64 },
    #[error("check {check}: no short b-block without a block skip")]
    NoSkipFreeBlock { check: usize },
    #[error("extracted run fails validation")]
    ExtractedRunInvalid,
}

/// Parameters of a constructed shuffle instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionMeta {
    /// Repetitions of each check range, `2kn + 1`.
    #[serde(rename = "N")]
    pub repetitions: usize,
    pub k: usize,
    pub n: usize,
    pub r: usize,
    /// `beta[j][i][p]` with 0-based check `j` and counter `i`.
    pub beta: Vec<Vec<Vec<usize>>>,
}

impl ReductionMeta {
    /// b-block length for counter `i` (1-based), check `j` (1-based), slot `p`.
    pub fn beta(&self, i: usize, j: usize, p: usize) -> usize {
        self.beta[j - 1][i - 1][p]
    }

    /// Blocks each check occupies in every counter word.
    pub fn range_blocks(&self) -> usize {
        2 * (self.n + 1) * self.repetitions
    }

    pub fn target_block_count(&self) -> usize {
        self.range_blocks() * self.r + 2 * self.n
    }

    /// 0-based target block of the `g`-th short b-block (`g` from 1).
    fn short_block(&self, g: usize) -> usize {
        2 * (self.n + 1) * g - 1
    }
}

/// b-block lengths per check, counter and slot: 2 where `(i, n - p)` names a
/// half of the check, 1 elsewhere. A check whose halves coincide only puts
/// one long block on the short target block, so it gets an unconditional
/// partner instead: with one counter the block grows to 3 letters, otherwise
/// the next counter is long in every slot of that check.
fn beta_table(m: &NnccmInstance) -> Vec<Vec<Vec<usize>>> {
    let (k, n) = (m.k(), m.n());
    m.checks()
        .iter()
        .map(|c| {
            let coincide = (c.c1, c.n1) == (c.c2, c.n2);
            let partner = c.c1 % k + 1;
            (1..=k)
                .map(|i| {
                    (0..=n)
                        .map(|p| {
                            let named = (i, n - p) == (c.c1, c.n1) || (i, n - p) == (c.c2, c.n2);
                            match (coincide, k) {
                                (true, 1) => 1 + 2 * usize::from(named),
                                (true, _) if i == partner => 2,
                                _ => 1 + usize::from(named),
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Builds `s_1..s_k`, the target and the two filler words.
pub fn reduce_nnccm_to_shuffle(m: &NnccmInstance) -> Result<(ShuffleInstance, ReductionMeta), ReductionError> {
    let (k, n, r) = (m.k(), m.n(), m.r());
    if n == 0 {
        return Err(ReductionError::ZeroMaxValue);
    }
    let big_n = 2 * k * n + 1;
    let beta = beta_table(m);

    let mut sources: Vec<Word> = (0..k)
        .map(|i| {
            let mut runs = Vec::with_capacity(2 * (n + 1) * big_n * r);
            for row in &beta {
                for _ in 0..big_n {
                    for &b in &row[i] {
                        runs.push(('a', 1));
                        runs.push(('b', b));
                    }
                }
            }
            Word::from_runs(runs)
        })
        .collect();

    let mut runs = Vec::with_capacity(2 * (n + 1) * big_n * r + 2 * n);
    for _ in 0..big_n * r {
        for _ in 0..n {
            runs.push(('a', k));
            runs.push(('b', k + 2));
        }
        runs.push(('a', k));
        runs.push(('b', k + 1));
    }
    for _ in 0..n {
        runs.push(('a', k));
        runs.push(('b', k + 2));
    }
    let target = Word::from_runs(runs);

    let fill = |letter: char| -> usize {
        let used: usize = sources.iter().map(|s| s.count(letter)).sum();
        target
            .count(letter)
            .checked_sub(used)
            .expect("filler exponent is nonnegative for n >= 1")
    };
    let (fill_a, fill_b) = (fill('a'), fill('b'));
    sources.push(Word::from_runs([('a', fill_a)]));
    sources.push(Word::from_runs([('b', fill_b)]));
    let inst = ShuffleInstance::new(sources, target);
    assert_eq!(inst.source_len(), inst.target.len());

    let meta = ReductionMeta {
        repetitions: big_n,
        k,
        n,
        r,
        beta,
    };
    Ok((inst, meta))
}

fn check_shape(inst: &ShuffleInstance, meta: &ReductionMeta) -> Result<(), ReductionError> {
    if inst.sources.len() != meta.k + 2 {
        return Err(ReductionError::MetaMismatch("source count is not k + 2"));
    }
    if inst.target.blocks().len() != meta.target_block_count() {
        return Err(ReductionError::MetaMismatch("target block count"));
    }
    if inst.sources[..meta.k]
        .iter()
        .any(|s| s.blocks().len() != meta.range_blocks() * meta.r)
    {
        return Err(ReductionError::MetaMismatch("source block count"));
    }
    Ok(())
}

/// Interleaving built from an accepting run: every block of check range `j`
/// in `s_i` goes to the target block `2 * run[j][i]` positions later. Inside a
/// target block, letters are taken from `s_1, ..., s_k` in order and the
/// fillers close the gaps.
///
/// With three or more counters a raise between two checks can push several
/// long b-blocks onto the same long target block; that case is reported as
/// [`ReductionError::BlockOverflow`] rather than producing an invalid map.
pub fn witness_from_run(m: &NnccmInstance, run: &Run) -> Result<InterleavingWitness, ReductionError> {
    if !validate_run(m, run)? {
        return Err(ReductionError::InvalidRun);
    }
    let (inst, meta) = reduce_nnccm_to_shuffle(m)?;
    let k = meta.k;
    let target_blocks = inst.target.blocks();
    let mut filled = vec![0usize; target_blocks.len()];
    let mut assignment: Vec<Vec<usize>> = Vec::with_capacity(k + 2);

    for i in 0..k {
        let mut positions = Vec::with_capacity(inst.sources[i].len());
        for (pi, block) in inst.sources[i].blocks().iter().enumerate() {
            let j = pi / meta.range_blocks();
            let tau = pi + 2 * run.values[j][i];
            let dest = target_blocks[tau];
            debug_assert_eq!(dest.letter, block.letter);
            if filled[tau] + block.len > dest.len {
                return Err(ReductionError::BlockOverflow {
                    block: tau + 1,
                    demand: filled[tau] + block.len,
                    capacity: dest.len,
                });
            }
            positions.extend(dest.start + filled[tau]..dest.start + filled[tau] + block.len);
            filled[tau] += block.len;
        }
        assignment.push(positions);
    }
    for letter in ['a', 'b'] {
        let mut positions = Vec::new();
        for (tau, dest) in target_blocks.iter().enumerate() {
            if dest.letter == letter {
                positions.extend(dest.start + filled[tau]..dest.end());
            }
        }
        assignment.push(positions);
    }

    let w = InterleavingWitness { assignment };
    if !verify_witness(&inst, &w)? {
        return Err(ReductionError::WitnessRejected);
    }
    Ok(w)
}

/// Target block of every target position.
fn block_of_position(blocks: &[Block], len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    for (idx, b) in blocks.iter().enumerate() {
        out.extend(std::iter::repeat_n(idx, b.len));
    }
    out
}

/// `δ(i, π)`: target block of the first letter of block `π` of source `i`,
/// minus `π`, for every source. Blocks are 0-based.
pub fn block_offsets(inst: &ShuffleInstance, w: &InterleavingWitness) -> Vec<Vec<i64>> {
    let owner = block_of_position(&inst.target.blocks(), inst.target.len());
    inst.sources
        .iter()
        .zip(&w.assignment)
        .map(|(s, positions)| {
            s.blocks()
                .iter()
                .enumerate()
                .map(|(pi, b)| owner[positions[b.start]] as i64 - pi as i64)
                .collect()
        })
        .collect()
}

/// Reads an accepting run off an interleaving of a constructed instance. For
/// each check the first short target b-block of its range that every counter
/// word reaches without a block skip fixes the counter values.
pub fn run_from_witness(
    m: &NnccmInstance,
    inst: &ShuffleInstance,
    meta: &ReductionMeta,
    w: &InterleavingWitness,
) -> Result<Run, ReductionError> {
    check_shape(inst, meta)?;
    if !verify_witness(inst, w)? {
        return Err(ReductionError::WitnessRejected);
    }
    let (k, n) = (meta.k, meta.n);
    let owner = block_of_position(&inst.target.blocks(), inst.target.len());
    let offsets = block_offsets(inst, w);
    for (i, row) in offsets.iter().take(k).enumerate() {
        if let Some((pi, &d)) = row
            .iter()
            .enumerate()
            .find(|(_, &d)| d < 0 || d % 2 != 0 || d > 2 * n as i64)
        {
            return Err(ReductionError::BadOffset {
                word: i + 1,
                block: pi + 1,
                offset: d,
            });
        }
    }
    let source_blocks: Vec<Vec<Block>> = inst.sources[..k].iter().map(Word::blocks).collect();

    // Source block of counter word `i` whose letters all sit in target block
    // `tau` and which is not followed by a skip.
    let settled = |i: usize, tau: usize| -> Option<usize> {
        let row = &offsets[i];
        (0..=2 * n).step_by(2).find_map(|d| {
            let pi = tau.checked_sub(d)?;
            if pi >= row.len() || row[pi] != d as i64 {
                return None;
            }
            let b = source_blocks[i][pi];
            let whole = w.assignment[i][b.start..b.end()].iter().all(|&pos| owner[pos] == tau);
            let no_skip = pi + 1 == row.len() || row[pi + 1] == row[pi];
            (whole && no_skip).then_some(pi)
        })
    };

    let big_n = meta.repetitions;
    let mut values = Vec::with_capacity(meta.r);
    for j in 0..meta.r {
        let found = (big_n * j + 1..=big_n * (j + 1)).find_map(|g| {
            let tau = meta.short_block(g);
            (0..k)
                .map(|i| settled(i, tau).map(|pi| (tau - pi) / 2))
                .collect::<Option<Vec<usize>>>()
        });
        match found {
            Some(row) => values.push(row),
            None => return Err(ReductionError::NoSkipFreeBlock { check: j + 1 }),
        }
    }
    let run = Run::new(values);
    if !validate_run(m, &run)? {
        return Err(ReductionError::ExtractedRunInvalid);
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnccm::{find_run, Check};

    fn inst(k: usize, n: usize, checks: &[(usize, usize, usize, usize)]) -> NnccmInstance {
        NnccmInstance::new(k, n, checks.iter().map(|&(a, b, c, d)| Check::new(a, b, c, d)).collect()).unwrap()
    }

    #[test]
    fn small_worked_instance() {
        let m = inst(2, 1, &[(1, 1, 2, 0)]);
        let (s, meta) = reduce_nnccm_to_shuffle(&m).unwrap();
        assert_eq!(meta.repetitions, 5);
        assert_eq!(s.sources[0].to_string(), "abbab".repeat(5));
        assert_eq!(s.sources[1].to_string(), "ababb".repeat(5));
        assert_eq!(s.target.len(), 61);
        assert_eq!(s.sources[2].to_string(), "aa");
        assert_eq!(s.sources[3].to_string(), "b".repeat(9));
        assert_eq!(meta.beta(1, 1, 0), 2);
        assert_eq!(meta.beta(2, 1, 1), 2);
        assert_eq!(meta.beta(2, 1, 0), 1);
    }

    #[test]
    fn figure_three_shape() {
        let m = inst(3, 2, &[(1, 0, 2, 0), (1, 1, 3, 0)]);
        let (s, meta) = reduce_nnccm_to_shuffle(&m).unwrap();
        assert_eq!(meta.repetitions, 13);
        let blocks = s.target.blocks();
        assert_eq!(blocks.len(), 2 * 3 * 13 * 2 + 4);
        assert_eq!(blocks[5].len, 4);
        assert_eq!(blocks[1].len, 5);
        for src in &s.sources[..3] {
            assert_eq!(src.blocks().len(), 2 * 3 * 13 * 2);
        }
    }

    #[test]
    fn figure_three_round_trip() {
        let m = inst(3, 2, &[(1, 0, 2, 0), (1, 1, 3, 0)]);
        let run = Run::new(vec![vec![1, 0, 0], vec![1, 0, 1]]);
        let (s, meta) = reduce_nnccm_to_shuffle(&m).unwrap();
        let w = witness_from_run(&m, &run).unwrap();
        assert_eq!(verify_witness(&s, &w), Ok(true));
        assert_eq!(run_from_witness(&m, &s, &meta, &w).unwrap(), run);
    }

    #[test]
    fn single_counter_offsets() {
        let m = inst(1, 1, &[(1, 0, 1, 0)]);
        let run = find_run(&m).unwrap();
        assert_eq!(run.values, vec![vec![1]]);
        let (s, meta) = reduce_nnccm_to_shuffle(&m).unwrap();
        let w = witness_from_run(&m, &run).unwrap();
        assert!(block_offsets(&s, &w)[0].iter().all(|&d| d == 2));
        assert_eq!(run_from_witness(&m, &s, &meta, &w).unwrap(), run);
    }

    #[test]
    fn coinciding_halves_get_a_partner() {
        let m = inst(1, 1, &[(1, 0, 1, 0)]);
        let (_, meta) = reduce_nnccm_to_shuffle(&m).unwrap();
        assert_eq!(meta.beta(1, 1, 1), 3);
        assert_eq!(meta.beta(1, 1, 0), 1);

        let m = inst(2, 1, &[(2, 1, 2, 1), (1, 0, 2, 1)]);
        let (s, meta) = reduce_nnccm_to_shuffle(&m).unwrap();
        assert_eq!(meta.beta[0], vec![vec![2, 2], vec![2, 1]]);
        assert_eq!(meta.beta[1], vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(s.source_len(), s.target.len());
    }

    #[test]
    fn three_counters_can_overflow_the_block_map() {
        // Membership holds here, but the constant-offset block map puts the
        // tail of check 1 and the head of check 2 on one long b-block.
        let m = inst(3, 1, &[(1, 0, 2, 0), (1, 1, 3, 1)]);
        let run = Run::new(vec![vec![0, 1, 0], vec![0, 1, 0]]);
        assert_eq!(
            witness_from_run(&m, &run),
            Err(ReductionError::BlockOverflow {
                block: 30,
                demand: 6,
                capacity: 5
            })
        );
        let (s, meta) = reduce_nnccm_to_shuffle(&m).unwrap();
        let w = super::super::shuffle_dp(&s).expect("member");
        assert!(validate_run(&m, &run_from_witness(&m, &s, &meta, &w).unwrap()).unwrap());
    }

    #[test]
    fn invalid_runs_are_rejected() {
        let m = inst(1, 1, &[(1, 1, 1, 1), (1, 0, 1, 0)]);
        let decreasing = Run::new(vec![vec![1], vec![0]]);
        assert_eq!(witness_from_run(&m, &decreasing), Err(ReductionError::InvalidRun));
        let zero = inst(1, 0, &[]);
        assert_eq!(reduce_nnccm_to_shuffle(&zero).unwrap_err(), ReductionError::ZeroMaxValue);
    }
}
