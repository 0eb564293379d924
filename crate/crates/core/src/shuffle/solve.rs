use std::collections::{HashMap, HashSet};

use super::{InterleavingWitness, ShuffleInstance};

/// Plain recursion over source-position tuples with a memo table. Serves as
/// the reference oracle; exponential in the number of sources.
pub fn brute_shuffle(inst: &ShuffleInstance) -> bool {
    if inst.source_len() != inst.target.len() {
        return false;
    }
    fn go(inst: &ShuffleInstance, pos: &mut Vec<usize>, memo: &mut HashMap<Vec<usize>, bool>) -> bool {
        let done: usize = pos.iter().sum();
        let t = inst.target.letters();
        if done == t.len() {
            return true;
        }
        if let Some(&known) = memo.get(pos.as_slice()) {
            return known;
        }
        let mut found = false;
        for i in 0..inst.sources.len() {
            if inst.sources[i].letters().get(pos[i]) == Some(&t[done]) {
                pos[i] += 1;
                found = go(inst, pos, memo);
                pos[i] -= 1;
                if found {
                    break;
                }
            }
        }
        memo.insert(pos.clone(), found);
        found
    }
    go(inst, &mut vec![0; inst.sources.len()], &mut HashMap::new())
}

/// Search layout: which sources are tracked position by position and which
/// are uniform words pooled per letter.
struct Layout {
    letters: Vec<char>,
    target: Vec<u8>,
    /// `target_prefix[c][p]`: occurrences of letter `c` in `t[..p]`.
    target_prefix: Vec<Vec<u32>>,
    tracked: Vec<usize>,
    tracked_words: Vec<Vec<u8>>,
    /// `tracked_prefix[i][c][p]` for tracked source `i`.
    tracked_prefix: Vec<Vec<Vec<u32>>>,
    /// Uniform sources of each letter, ascending source index, with lengths.
    pools: Vec<Vec<(usize, usize)>>,
    pool_capacity: Vec<u32>,
}

impl Layout {
    fn new(inst: &ShuffleInstance) -> Self {
        let letters = inst.alphabet();
        let index = |c: char| letters.binary_search(&c).expect("letter in alphabet") as u8;
        let sigma = letters.len();
        let prefix = |word: &[u8]| -> Vec<Vec<u32>> {
            let mut table = vec![vec![0u32; word.len() + 1]; sigma];
            for (p, &c) in word.iter().enumerate() {
                for (d, row) in table.iter_mut().enumerate() {
                    row[p + 1] = row[p] + u32::from(d == c as usize);
                }
            }
            table
        };
        let target: Vec<u8> = inst.target.letters().iter().map(|&c| index(c)).collect();
        let target_prefix = prefix(&target);
        let mut tracked = Vec::new();
        let mut tracked_words = Vec::new();
        let mut pools = vec![Vec::new(); sigma];
        for (i, w) in inst.sources.iter().enumerate() {
            if w.is_empty() {
                continue;
            }
            match w.uniform_letter() {
                Some(c) => pools[index(c) as usize].push((i, w.len())),
                None => {
                    tracked.push(i);
                    tracked_words.push(w.letters().iter().map(|&c| index(c)).collect::<Vec<u8>>());
                }
            }
        }
        let tracked_prefix = tracked_words.iter().map(|w| prefix(w)).collect();
        let pool_capacity = pools
            .iter()
            .map(|p| p.iter().map(|&(_, len)| len as u32).sum())
            .collect();
        Layout {
            letters,
            target,
            target_prefix,
            tracked,
            tracked_words,
            tracked_prefix,
            pools,
            pool_capacity,
        }
    }

    /// Letters of kind `c` drawn from the pool when `done` target letters are
    /// consumed and tracked sources sit at `pos`.
    fn pool_used(&self, done: usize, pos: &[u32], c: usize) -> u32 {
        let tracked: u32 = pos
            .iter()
            .enumerate()
            .map(|(i, &p)| self.tracked_prefix[i][c][p as usize])
            .sum();
        self.target_prefix[c][done] - tracked
    }

    /// Moves available at a state, ordered by the source index they consume
    /// from. `Move::Tracked(i)` advances tracked slot `i`; `Move::Pool(c)`
    /// takes the next letter `c` from its pool.
    fn moves(&self, done: usize, pos: &[u32]) -> Vec<(usize, Move)> {
        let c = self.target[done];
        let mut out = Vec::new();
        for (slot, word) in self.tracked_words.iter().enumerate() {
            if word.get(pos[slot] as usize) == Some(&c) {
                out.push((self.tracked[slot], Move::Tracked(slot)));
            }
        }
        let used = self.pool_used(done, pos, c as usize);
        if used < self.pool_capacity[c as usize] {
            let owner = self.pool_owner(c as usize, used);
            out.push((owner.0, Move::Pool(c)));
        }
        out.sort_by_key(|&(src, _)| src);
        out
    }

    /// Uniform source receiving pooled letter number `used` of kind `c`, and
    /// the letter index inside it. Pools fill their sources in index order.
    fn pool_owner(&self, c: usize, mut used: u32) -> (usize, usize) {
        for &(src, len) in &self.pools[c] {
            if (used as usize) < len {
                return (src, used as usize);
            }
            used -= len as u32;
        }
        unreachable!("pool index within capacity")
    }
}

#[derive(Debug, Clone, Copy)]
enum Move {
    Tracked(usize),
    Pool(u8),
}

/// Frontier search over tuples of source positions, one target letter at a
/// time. Nonempty single-letter sources are not part of the state: how many
/// of their letters are used follows from the letter counts. Returns a
/// witness iff the target is in the shuffle; ties prefer the lowest-indexed
/// source.
pub fn shuffle_dp(inst: &ShuffleInstance) -> Option<InterleavingWitness> {
    let t_len = inst.target.len();
    if inst.source_len() != t_len {
        return None;
    }
    let layout = Layout::new(inst);
    for (c, &letter) in layout.letters.iter().enumerate() {
        let in_sources: usize = inst.sources.iter().map(|w| w.count(letter)).sum();
        if in_sources != layout.target_prefix[c][t_len] as usize {
            return None;
        }
    }

    let width = layout.tracked.len();
    // Key: target progress followed by tracked positions.
    let key = |done: usize, pos: &[u32]| -> Box<[u32]> {
        std::iter::once(done as u32).chain(pos.iter().copied()).collect()
    };
    let mut seen: HashSet<Box<[u32]>> = HashSet::new();
    let mut pos = vec![0u32; width];
    // Each frame holds the moves of one depth and the next one to try.
    let mut stack: Vec<(Vec<(usize, Move)>, usize)> = Vec::new();
    let mut chosen: Vec<Move> = Vec::new();
    seen.insert(key(0, &pos));
    if t_len > 0 {
        stack.push((layout.moves(0, &pos), 0));
    }
    while chosen.len() < t_len {
        let (moves, next) = stack.last_mut()?;
        if *next == moves.len() {
            stack.pop();
            match chosen.pop() {
                Some(Move::Tracked(slot)) => pos[slot] -= 1,
                Some(Move::Pool(_)) | None => {}
            }
            continue;
        }
        let mv = moves[*next].1;
        *next += 1;
        if let Move::Tracked(slot) = mv {
            pos[slot] += 1;
        }
        let done = chosen.len() + 1;
        if seen.insert(key(done, &pos)) {
            chosen.push(mv);
            if done < t_len {
                stack.push((layout.moves(done, &pos), 0));
            }
        } else if let Move::Tracked(slot) = mv {
            pos[slot] -= 1;
        }
    }

    // Replay the move sequence into an explicit assignment.
    let mut assignment: Vec<Vec<usize>> = inst.sources.iter().map(|w| Vec::with_capacity(w.len())).collect();
    let mut replay = vec![0u32; width];
    for (done, mv) in chosen.into_iter().enumerate() {
        match mv {
            Move::Tracked(slot) => {
                assignment[layout.tracked[slot]].push(done);
                replay[slot] += 1;
            }
            Move::Pool(c) => {
                let used = layout.pool_used(done, &replay, c as usize);
                let (src, _) = layout.pool_owner(c as usize, used);
                assignment[src].push(done);
            }
        }
    }
    Some(InterleavingWitness { assignment })
}

#[cfg(test)]
mod tests {
    use super::super::{random_instance, verify_witness};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn figure_two() {
        let inst = ShuffleInstance::from_strs(&["cbaa", "abc", "ca"], "acbbcaaac");
        assert!(brute_shuffle(&inst));
        let w = shuffle_dp(&inst).expect("member");
        assert_eq!(verify_witness(&inst, &w), Ok(true));
        // Swapping the first two target letters keeps membership:
        // c<-s1, a<-s2, b<-s2, b<-s1, c<-s3, a<-s1, a<-s1, a<-s3, c<-s2.
        let swapped = ShuffleInstance::from_strs(&["cbaa", "abc", "ca"], "cabbcaaac");
        assert!(brute_shuffle(&swapped));
        assert_eq!(verify_witness(&swapped, &shuffle_dp(&swapped).unwrap()), Ok(true));
        let sorted = ShuffleInstance::from_strs(&["cbaa", "abc", "ca"], "aaaabbccc");
        assert!(!brute_shuffle(&sorted));
        assert!(shuffle_dp(&sorted).is_none());
    }

    #[test]
    fn trivial_cases() {
        assert!(brute_shuffle(&ShuffleInstance::from_strs(&["", ""], "")));
        let empty = shuffle_dp(&ShuffleInstance::from_strs(&["", ""], "")).unwrap();
        assert_eq!(empty.assignment, vec![Vec::<usize>::new(), vec![]]);
        assert!(!brute_shuffle(&ShuffleInstance::from_strs(&["ba"], "ab")));
        assert!(shuffle_dp(&ShuffleInstance::from_strs(&["ba"], "ab")).is_none());
        assert!(shuffle_dp(&ShuffleInstance::from_strs(&["ab"], "abb")).is_none());
    }

    #[test]
    fn symmetric_pool_prefers_lowest_source() {
        let inst = ShuffleInstance::from_strs(&["a", "a"], "aa");
        let w = shuffle_dp(&inst).unwrap();
        assert_eq!(w.assignment, vec![vec![0], vec![1]]);
    }

    #[test]
    fn pooled_and_tracked_sources_mix() {
        let inst = ShuffleInstance::from_strs(&["aab", "bb", "ab", "a"], "aabbabab");
        let w = shuffle_dp(&inst).expect("member");
        assert_eq!(verify_witness(&inst, &w), Ok(true));
        assert!(brute_shuffle(&inst));
    }

    #[test]
    fn agrees_with_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let sources = 1 + rand::Rng::gen_range(&mut rng, 0..4);
            let inst = random_instance(&mut rng, &['a', 'b', 'c'], sources, 10);
            let expected = brute_shuffle(&inst);
            match shuffle_dp(&inst) {
                Some(w) => {
                    assert!(expected, "{inst:?}");
                    assert_eq!(verify_witness(&inst, &w), Ok(true), "{inst:?}");
                }
                None => assert!(!expected, "{inst:?}"),
            }
        }
    }
}
