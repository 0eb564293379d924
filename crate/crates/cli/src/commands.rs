//! Bodies of the `reduce`, `solve`, `gen` and `export-dot` subcommands.
//! Each returns the text to write; witnesses are re-verified first.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xnlplab_core::binpack::{binpack_feasible, binpack_to_chains, chains_to_binpack, verify_packing, BinPackingInstance};
use xnlplab_core::gadget::{build_dag, build_tree};
use xnlplab_core::graph::{bandwidth_of, exact_bandwidth, gen_caterpillar, random_dag, random_tree};
use xnlplab_core::nnccm::{self, accepts, find_run, validate_run, NnccmInstance};
use xnlplab_core::sched::{
    bandwidth_to_sched, feasible, parallel_to_min_delay, sched_to_bandwidth, verify_schedule, SchedInstance,
};
use xnlplab_core::shuffle::{self, reduce_nnccm_to_shuffle, shuffle_dp, verify_witness, ShuffleInstance};
use xnlplab_core::{Budget, Decision, Digraph};

use crate::formats::{parse_graph_input, parse_json, to_json, BandwidthInstance};
use crate::report::Answer;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReduceKind {
    NnccmToShuffle,
    NnccmToDag,
    NnccmToTree,
    BandwidthToSched,
    SchedToBandwidth,
    #[value(name = "parallel-to-mindelay")]
    ParallelToMinDelay,
    BinpackToChains,
    ChainsToBinpack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Problem {
    Nnccm,
    Shuffle,
    Bandwidth,
    Sched,
    Binpack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Nnccm,
    Shuffle,
    Dag,
    Tree,
    Caterpillar,
    Binpack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GadgetKind {
    Dag,
    Tree,
}

/// Reduces the instance in `input`. Gadget graphs are written as JSON with
/// their limit, or as DOT when `dot` is set; shuffle instances carry the
/// reduction metadata under `meta`.
pub fn reduce(kind: ReduceKind, input: &str, limit: Option<usize>, dot: bool) -> Result<String, CliError> {
    Ok(match kind {
        ReduceKind::NnccmToShuffle => {
            let m: NnccmInstance = parse_json(input, "counter machine")?;
            let (inst, meta) = reduce_nnccm_to_shuffle(&m).map_err(CliError::precondition)?;
            // Readers of shuffle instances ignore the extra field.
            let mut value = serde_json::to_value(&inst).expect("plain data");
            value["meta"] = serde_json::to_value(&meta).expect("plain data");
            to_json(&value)
        }
        ReduceKind::NnccmToDag | ReduceKind::NnccmToTree => {
            let m: NnccmInstance = parse_json(input, "counter machine")?;
            let gadget = if kind == ReduceKind::NnccmToDag {
                build_dag(&m)
            } else {
                build_tree(&m)
            }
            .map_err(CliError::precondition)?;
            if dot {
                gadget.graph.to_dot("gadget")
            } else {
                to_json(&BandwidthInstance {
                    graph: gadget.graph,
                    b: Some(gadget.params.b),
                })
            }
        }
        ReduceKind::BandwidthToSched => {
            let bw = parse_graph_input(input)?;
            let b = limit
                .or(bw.b)
                .ok_or_else(|| CliError::Precondition("needs a limit: --limit or a \"b\" field".into()))?;
            to_json(&bandwidth_to_sched(&bw.graph, b).map_err(CliError::precondition)?)
        }
        ReduceKind::SchedToBandwidth => {
            let inst: SchedInstance = parse_json(input, "scheduling instance")?;
            let (graph, b) = sched_to_bandwidth(&inst).map_err(CliError::precondition)?;
            to_json(&BandwidthInstance { graph, b: Some(b) })
        }
        ReduceKind::ParallelToMinDelay => {
            let inst: SchedInstance = parse_json(input, "scheduling instance")?;
            to_json(&parallel_to_min_delay(&inst).map_err(CliError::precondition)?)
        }
        ReduceKind::BinpackToChains => {
            let bp: BinPackingInstance = parse_json(input, "bin packing instance")?;
            to_json(&binpack_to_chains(&bp).map_err(CliError::precondition)?)
        }
        ReduceKind::ChainsToBinpack => {
            let inst: SchedInstance = parse_json(input, "scheduling instance")?;
            to_json(&chains_to_binpack(&inst).map_err(CliError::precondition)?)
        }
    })
}

/// Answer of a solve, with the witness as JSON when there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solved {
    pub answer: Answer,
    pub witness: Option<String>,
}

impl Solved {
    fn from_decision<T: serde::Serialize>(d: Decision<T>) -> Self {
        match d {
            Decision::Feasible(w) => Solved {
                answer: Answer::Yes,
                witness: Some(to_json(&w)),
            },
            Decision::Infeasible => Solved {
                answer: Answer::No,
                witness: None,
            },
            Decision::Timeout => Solved {
                answer: Answer::Timeout,
                witness: None,
            },
        }
    }
}

fn rejected(what: &str) -> CliError {
    CliError::Verification(format!("{what} failed re-verification"))
}

pub fn solve(
    problem: Problem,
    input: &str,
    limit: Option<usize>,
    deadline: Option<usize>,
    budget: Budget,
) -> Result<Solved, CliError> {
    let decision = match problem {
        Problem::Nnccm => {
            let m: NnccmInstance = parse_json(input, "counter machine")?;
            let run = find_run(&m);
            if run.is_some() != accepts(&m) {
                return Err(rejected("run search"));
            }
            if let Some(run) = &run {
                if validate_run(&m, run) != Ok(true) {
                    return Err(rejected("run"));
                }
            }
            Solved::from_decision(run.map_or(Decision::Infeasible, Decision::Feasible))
        }
        Problem::Shuffle => {
            let inst: ShuffleInstance = parse_json(input, "shuffle instance")?;
            let w = shuffle_dp(&inst);
            if let Some(w) = &w {
                if verify_witness(&inst, w) != Ok(true) {
                    return Err(rejected("interleaving"));
                }
            }
            Solved::from_decision(w.map_or(Decision::Infeasible, Decision::Feasible))
        }
        Problem::Bandwidth => {
            let bw = parse_graph_input(input)?;
            let b = limit
                .or(bw.b)
                .ok_or_else(|| CliError::Precondition("needs a limit: --limit or a \"b\" field".into()))?;
            let d = exact_bandwidth(&bw.graph, b, budget).map_err(CliError::precondition)?;
            if let Some(f) = d.witness() {
                if !bandwidth_of(&bw.graph, f).is_ok_and(|got| got <= b) {
                    return Err(rejected("ordering"));
                }
            }
            Solved::from_decision(d)
        }
        Problem::Sched => {
            let mut inst: SchedInstance = parse_json(input, "scheduling instance")?;
            if let Some(d) = deadline {
                inst = SchedInstance::new(
                    inst.machines(),
                    inst.jobs().to_vec(),
                    inst.prec().to_vec(),
                    d,
                    inst.structure(),
                )
                .map_err(CliError::precondition)?;
            }
            let d = feasible(&inst, budget);
            if let Some(s) = d.witness() {
                if verify_schedule(&inst, s) != Ok(true) {
                    return Err(rejected("schedule"));
                }
            }
            Solved::from_decision(d)
        }
        Problem::Binpack => {
            let bp: BinPackingInstance = parse_json(input, "bin packing instance")?;
            let p = binpack_feasible(&bp);
            if let Some(p) = &p {
                if !verify_packing(&bp, p) {
                    return Err(rejected("packing"));
                }
            }
            Solved::from_decision(p.map_or(Decision::Infeasible, Decision::Feasible))
        }
    };
    Ok(decision)
}

/// Size knobs for `gen`; each family reads the ones it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub k: usize,
    pub n: usize,
    pub r: usize,
    pub size: usize,
    pub density: f64,
    pub hair: usize,
    pub capacity: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            k: 2,
            n: 1,
            r: 2,
            size: 8,
            density: 0.3,
            hair: 1,
            capacity: 4,
        }
    }
}

pub fn generate(family: Family, p: &GenParams, seed: u64) -> Result<String, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match family {
        Family::Nnccm => {
            if p.k == 0 {
                return Err(CliError::Precondition("need at least one counter".into()));
            }
            to_json(&nnccm::random_instance(&mut rng, p.k, p.n, p.r))
        }
        Family::Shuffle => {
            let sources = p.k.max(1);
            to_json(&shuffle::random_instance(&mut rng, &['a', 'b', 'c'], sources, p.size))
        }
        Family::Dag => to_json(&random_dag(&mut rng, p.size, p.density)),
        Family::Tree => to_json(&random_tree(&mut rng, p.size.max(1))),
        Family::Caterpillar => to_json(&gen_caterpillar(p.size, p.hair)),
        Family::Binpack => {
            let items = (0..p.size)
                .map(|_| rand::Rng::gen_range(&mut rng, 1..=p.capacity.max(1)))
                .collect();
            to_json(&BinPackingInstance::new(p.capacity, p.k.max(1), items).map_err(CliError::precondition)?)
        }
    })
}

/// DOT text for a graph file, or for the gadget of a counter machine file
/// when `gadget` is given.
pub fn export_dot(input: &str, gadget: Option<GadgetKind>, name: &str) -> Result<String, CliError> {
    let graph: Digraph = match gadget {
        Some(kind) => {
            let m: NnccmInstance = parse_json(input, "counter machine")?;
            let g = match kind {
                GadgetKind::Dag => build_dag(&m),
                GadgetKind::Tree => build_tree(&m),
            };
            g.map_err(CliError::precondition)?.graph
        }
        None => parse_graph_input(input)?.graph,
    };
    Ok(graph.to_dot(name))
}
