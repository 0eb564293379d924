//! Equivalence sweeps behind `xnlplab verify`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use xnlplab_core::binpack::{
    binpack_feasible, binpack_to_chains, chains_to_binpack, fill_item_count, schedule_from_packing, BinPackingInstance,
};
use xnlplab_core::gadget::{build_dag, build_tree, Gadget};
use xnlplab_core::graph::{bandwidth_of, brute_bandwidth, brute_width, exact_bandwidth, random_dag, width, GadgetLabel};
use xnlplab_core::nnccm::{accepting_runs, accepts, enumerate_up_to, find_run, validate_run, NnccmInstance};
use xnlplab_core::sched::{
    bandwidth_to_sched, feasible, parallel_to_min_delay, sched_to_bandwidth, verify_schedule, DelayKind, Job, Prec,
    SchedInstance, Structure,
};
use xnlplab_core::shuffle::{
    brute_shuffle, random_instance as random_shuffle, reduce_nnccm_to_shuffle, run_from_witness, shuffle_dp,
    verify_witness, witness_from_run,
};
use xnlplab_core::{Budget, Digraph};

use crate::report::{Answer, CaseRecord, VerificationReport};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Suite {
    ShuffleReduction,
    DagReduction,
    TreeConstruction,
    SchedEquivalence,
    BinpackEquivalence,
    OracleAgreement,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::ShuffleReduction => "shuffle-reduction",
            Suite::DagReduction => "dag-reduction",
            Suite::TreeConstruction => "tree-construction",
            Suite::SchedEquivalence => "sched-equivalence",
            Suite::BinpackEquivalence => "binpack-equivalence",
            Suite::OracleAgreement => "oracle-agreement",
        }
    }
}

/// Sweep sizes; unset fields take the suite's default.
///
/// `k`, `n` and `r` bound the counter machine sweeps (`n` is exact, the
/// others are upper bounds), `cases` is the number of random instances and
/// `jobs` the largest three-machine instance enumerated. The bin packing
/// sweep has fixed bounds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bounds {
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub cases: Option<usize>,
    pub jobs: Option<usize>,
}

pub fn run_suite(
    suite: Suite,
    bounds: &Bounds,
    seed: u64,
    budget: Budget,
    timings: bool,
) -> Result<VerificationReport, CliError> {
    let records = match suite {
        Suite::ShuffleReduction => {
            let cases = machines(bounds, 2)?;
            sweep(&cases, timings, shuffle_reduction_case)
        }
        Suite::DagReduction => {
            let cases = machines(bounds, 1)?;
            sweep(&cases, timings, |m| dag_reduction_case(m, budget))
        }
        Suite::TreeConstruction => {
            let cases = machines(bounds, 1)?;
            sweep(&cases, timings, tree_construction_case)
        }
        Suite::SchedEquivalence => {
            let dags = random_dags(seed, bounds.cases.unwrap_or(300), 8);
            let mut records = sweep(&dags, timings, |(i, g)| bandwidth_sched_case(*i, g, budget));
            let p3 = parallel_instances(bounds.jobs.unwrap_or(5));
            records.extend(sweep(&p3, timings, |(id, inst)| parallel_case(id, inst, budget)));
            records
        }
        Suite::BinpackEquivalence => {
            let mut records = sweep(&binpack_instances(3, 4, 5), timings, |bp| binpack_case(bp, budget));
            records.extend(sweep(&chain_instances(8, 2, 4), timings, |(id, inst)| chains_case(id, inst, budget)));
            records
        }
        Suite::OracleAgreement => {
            let cases = bounds.cases.unwrap_or(500);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shuffles: Vec<_> = (0..cases)
                .map(|i| {
                    let sources = rng.gen_range(1..=3);
                    (i, random_shuffle(&mut rng, &['a', 'b', 'c'], sources, 14))
                })
                .collect();
            let mut records = sweep(&shuffles, timings, |(i, inst)| {
                let right = shuffle_dp(inst).is_some_and(|w| verify_witness(inst, &w) == Ok(true));
                vec![CaseRecord::new(
                    format!("shuffle-{i:05}"),
                    Answer::from_bool(brute_shuffle(inst)),
                    Answer::from_bool(right),
                )]
            });
            let dags = random_dags(seed ^ 1, cases.min(300).max(cases / 2), 8);
            records.extend(sweep(&dags, timings, |(i, g)| bandwidth_case(*i, g, budget)));
            let dags = random_dags(seed ^ 2, cases.min(300).max(cases / 2), 12);
            records.extend(sweep(&dags, timings, |(i, g)| {
                let w = brute_width(g).expect("small acyclic graph");
                vec![CaseRecord::new(
                    format!("width-{i:05}"),
                    Answer::Yes,
                    Answer::from_bool(width(g) == Ok(w)),
                )]
            }));
            records
        }
    };
    Ok(VerificationReport::new(suite.name(), seed, records))
}

/// Runs `check` on every case in parallel, stamping each record with the
/// wall time of its case when `timings` is set.
fn sweep<T: Sync>(cases: &[T], timings: bool, check: impl Fn(&T) -> Vec<CaseRecord> + Sync) -> Vec<CaseRecord> {
    cases
        .par_iter()
        .flat_map_iter(|case| {
            let start = Instant::now();
            let mut records = check(case);
            if timings {
                let us = start.elapsed().as_micros() as u64;
                for r in &mut records {
                    r.wall_us = Some(us);
                }
            }
            records
        })
        .collect()
}

fn machines(bounds: &Bounds, default_k: usize) -> Result<Vec<NnccmInstance>, CliError> {
    let n = bounds.n.unwrap_or(1);
    if n == 0 {
        return Err(CliError::Precondition("the counter machine sweeps need n >= 1".into()));
    }
    let k = bounds.k.unwrap_or(default_k);
    let r = bounds.r.unwrap_or(2);
    Ok(enumerate_up_to(k, n, r).filter(|m| m.n() == n).collect())
}

fn random_dags(seed: u64, count: usize, max_n: usize) -> Vec<(usize, Digraph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=max_n);
            let density = rng.gen_range(0.1..0.6);
            (i, random_dag(&mut rng, n, density))
        })
        .collect()
}

fn shuffle_reduction_case(m: &NnccmInstance) -> Vec<CaseRecord> {
    let (inst, meta) = reduce_nnccm_to_shuffle(m).expect("n >= 1");
    let dp = shuffle_dp(&inst);
    let accepted = accepts(m);
    let mut out = vec![CaseRecord::new(
        format!("{m}/membership"),
        Answer::from_bool(accepted),
        Answer::from_bool(dp.is_some()),
    )];
    if let Some(run) = find_run(m) {
        let built = witness_from_run(m, &run).is_ok_and(|w| verify_witness(&inst, &w) == Ok(true));
        out.push(CaseRecord::new(format!("{m}/witness"), Answer::Yes, Answer::from_bool(built)));
    }
    if let Some(w) = dp {
        let back = run_from_witness(m, &inst, &meta, &w).is_ok_and(|run| validate_run(m, &run) == Ok(true));
        out.push(CaseRecord::new(format!("{m}/extract"), Answer::Yes, Answer::from_bool(back)));
    }
    out
}

/// Whether some accepting run lays the gadget out within its limit and
/// reads back unchanged.
pub fn some_run_lays_out(m: &NnccmInstance, gadget: &Gadget) -> bool {
    accepting_runs(m).iter().any(|run| {
        gadget.layout_from_run(run).is_ok_and(|f| {
            bandwidth_of(&gadget.graph, &f).is_ok_and(|bw| bw <= gadget.params.b)
                && gadget.run_from_layout(&f).as_ref() == Ok(run)
        })
    })
}

fn dag_reduction_case(m: &NnccmInstance, budget: Budget) -> Vec<CaseRecord> {
    if m.r() == 0 {
        return vec![];
    }
    let gadget = build_dag(m).expect("n >= 1");
    let accepted = accepts(m);
    let decided = exact_bandwidth(&gadget.graph, gadget.params.b, budget).expect("gadget is acyclic");
    let mut out = vec![CaseRecord::new(
        format!("{m}/bandwidth"),
        Answer::from_bool(accepted),
        Answer::from_option(decided.answer()),
    )];
    if accepted {
        out.push(CaseRecord::new(
            format!("{m}/layout"),
            Answer::Yes,
            Answer::from_bool(some_run_lays_out(m, &gadget)),
        ));
    }
    out
}

/// Vertices on tails, counted from the labels.
pub fn tail_vertices(g: &Digraph) -> usize {
    g.labels()
        .values()
        .filter(|l| matches!(l, GadgetLabel::TailPath(..) | GadgetLabel::TailLeaf))
        .count()
}

fn tree_construction_case(m: &NnccmInstance) -> Vec<CaseRecord> {
    if m.r() == 0 {
        return vec![];
    }
    let tree = build_tree(m).expect("n >= 1");
    let expected_tails = (3 * m.k() + 4) * (m.k() + 6);
    let shaped = tree.is_tree() && tail_vertices(&tree.graph) == expected_tails;
    let mut out = vec![CaseRecord::new(format!("{m}/shape"), Answer::Yes, Answer::from_bool(shaped))];
    if accepts(m) {
        let laid = accepting_runs(m).iter().any(|run| {
            tree.layout_from_run(run)
                .is_ok_and(|f| bandwidth_of(&tree.graph, &f).is_ok_and(|bw| bw <= tree.params.b))
        });
        out.push(CaseRecord::new(format!("{m}/layout"), Answer::Yes, Answer::from_bool(laid)));
    }
    out
}

fn bandwidth_case(i: usize, g: &Digraph, budget: Budget) -> Vec<CaseRecord> {
    let best = brute_bandwidth(g).expect("small acyclic graph");
    (best.saturating_sub(1).max(1)..=best + 1)
        .map(|b| {
            let decided = exact_bandwidth(g, b, budget).expect("acyclic");
            let sound = decided.witness().is_none_or(|f| bandwidth_of(g, f).is_ok_and(|bw| bw <= b));
            let right = if sound { Answer::from_option(decided.answer()) } else { Answer::No };
            CaseRecord::new(format!("bandwidth-{i:05}-b{b}"), Answer::from_bool(best <= b), right)
        })
        .collect()
}

fn bandwidth_sched_case(i: usize, g: &Digraph, budget: Budget) -> Vec<CaseRecord> {
    let best = brute_bandwidth(g).expect("small acyclic graph");
    let mut out = vec![];
    for b in best.saturating_sub(1).max(1)..=best + 1 {
        let inst = bandwidth_to_sched(g, b).expect("b >= 1");
        let decided = feasible(&inst, budget);
        let sound = decided.witness().is_none_or(|s| verify_schedule(&inst, s) == Ok(true));
        let right = if sound { Answer::from_option(decided.answer()) } else { Answer::No };
        let id = format!("dag-{i:05}-b{b}");
        out.push(CaseRecord::new(format!("{id}/feasible"), Answer::from_bool(best <= b), right));
        let inverse = sched_to_bandwidth(&inst).is_ok_and(|(h, c)| h == *g && c == b);
        out.push(CaseRecord::new(format!("{id}/inverse"), Answer::Yes, Answer::from_bool(inverse)));
    }
    out
}

/// Every three-machine instance with up to `max_jobs` unit jobs of size 1
/// or 2, arcs only from lower to higher ids, and deadline at most the job
/// count.
pub fn parallel_instances(max_jobs: usize) -> Vec<(String, SchedInstance)> {
    let mut out = vec![];
    for n in 0..=max_jobs {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for mask in 0u64..1 << pairs.len() {
            for sizes in 0u32..1 << n {
                for d in 1..=n.max(1) {
                    let jobs = (0..n).map(|j| Job { p: 1, size: 1 + (sizes >> j & 1) as usize }).collect();
                    let prec = pairs
                        .iter()
                        .enumerate()
                        .filter(|(bit, _)| mask >> bit & 1 == 1)
                        .map(|(_, &(a, b))| Prec::new(a, b, DelayKind::None, 0))
                        .collect();
                    let inst = SchedInstance::new(3, jobs, prec, d, Structure::General).expect("forward arcs");
                    out.push((format!("p3-{n}-{mask:03x}-{sizes:02x}-d{d}"), inst));
                }
            }
        }
    }
    out
}

fn parallel_case(id: &str, inst: &SchedInstance, budget: Budget) -> Vec<CaseRecord> {
    let single = parallel_to_min_delay(inst).expect("three-machine fragment");
    let left = feasible(inst, budget);
    let right = feasible(&single, budget);
    vec![CaseRecord::new(
        id,
        Answer::from_option(left.answer()),
        Answer::from_option(right.answer()),
    )]
}

/// Every instance with `k <= max_bins` bins, capacity `B <= max_capacity`
/// and up to `max_items` items of sizes `1..=B`.
pub fn binpack_instances(max_bins: usize, max_capacity: usize, max_items: u32) -> Vec<BinPackingInstance> {
    let mut out = vec![];
    for k in 1..=max_bins {
        for b in 1..=max_capacity {
            for len in 0..=max_items {
                for code in 0..b.pow(len) {
                    let items = (0..len).map(|i| code / b.pow(i) % b + 1).collect();
                    out.push(BinPackingInstance::new(b, k, items).expect("positive sizes"));
                }
            }
        }
    }
    out
}

fn binpack_case(bp: &BinPackingInstance, budget: Budget) -> Vec<CaseRecord> {
    let id = format!("binpack-k{}-B{}-{:?}", bp.bins(), bp.capacity(), bp.items());
    let chains = binpack_to_chains(bp).expect("valid instance");
    let packing = binpack_feasible(bp);
    let mut out = vec![CaseRecord::new(
        format!("{id}/feasible"),
        Answer::from_bool(packing.is_some()),
        Answer::from_option(feasible(&chains, budget).answer()),
    )];
    if let Some(p) = packing {
        let carried = schedule_from_packing(bp, &p).is_some_and(|s| verify_schedule(&chains, &s) == Ok(true));
        out.push(CaseRecord::new(format!("{id}/schedule"), Answer::Yes, Answer::from_bool(carried)));
    }
    out
}

/// Chains instance with one chain per entry of `lengths`, consecutive jobs
/// joined by an exact delay `l`.
pub fn chains_instance(lengths: &[usize], l: usize, deadline: usize) -> SchedInstance {
    let mut prec = vec![];
    let mut next = 0;
    for &a in lengths {
        prec.extend((next..next + a - 1).map(|j| Prec::new(j, j + 1, DelayKind::Exact, l)));
        next += a;
    }
    SchedInstance::new(1, vec![Job::UNIT; next], prec, deadline, Structure::Chains).expect("chains")
}

/// Every chains instance with deadline `D <= max_deadline`, delay
/// `l <= max_delay` and up to `max_chains` chains of lengths `1..=D`.
pub fn chain_instances(max_deadline: usize, max_delay: usize, max_chains: u32) -> Vec<(String, SchedInstance)> {
    let mut out = vec![];
    for d in 1..=max_deadline {
        for l in 0..=max_delay {
            for count in 0..=max_chains {
                for code in 0..d.pow(count) {
                    let lengths: Vec<usize> = (0..count).map(|i| code / d.pow(i) % d + 1).collect();
                    out.push((format!("chains-D{d}-l{l}-{lengths:?}"), chains_instance(&lengths, l, d)));
                }
            }
        }
    }
    out
}

/// Whether every bin of a packing of [`chains_to_binpack`]'s output holds
/// exactly one of the trailing fill items.
pub fn one_fill_item_per_bin(inst: &SchedInstance, bp: &BinPackingInstance, assign: &[usize]) -> bool {
    let fills = fill_item_count(inst).expect("chains fragment");
    let mut per_bin = vec![0; bp.bins()];
    for &bin in &assign[assign.len() - fills..] {
        per_bin[bin - 1] += 1;
    }
    per_bin.iter().all(|&c| c == 1)
}

fn chains_case(id: &str, inst: &SchedInstance, budget: Budget) -> Vec<CaseRecord> {
    let bp = chains_to_binpack(inst).expect("chains fragment");
    let packing = binpack_feasible(&bp);
    let mut out = vec![CaseRecord::new(
        format!("{id}/feasible"),
        Answer::from_option(feasible(inst, budget).answer()),
        Answer::from_bool(packing.is_some()),
    )];
    if let Some(p) = packing {
        out.push(CaseRecord::new(
            format!("{id}/fill"),
            Answer::Yes,
            Answer::from_bool(one_fill_item_per_bin(inst, &bp, &p.assign)),
        ));
    }
    out
}
