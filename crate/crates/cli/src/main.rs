use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xnlplab_cli::commands::{self, Family, GadgetKind, GenParams, Problem, ReduceKind};
use xnlplab_cli::formats::{read_text, to_json, write_output};
use xnlplab_cli::{run_suite, Answer, Bounds, CliError, Suite, BUDGET_ENV};
use xnlplab_core::Budget;

/// Reductions, exact solvers and equivalence sweeps.
///
/// Exit status: 0 when an answer was produced (including "timeout"),
/// 2 on unreadable or malformed input, 3 on a violated precondition,
/// 4 when a witness or a sweep fails verification.
#[derive(Parser)]
#[command(name = "xnlplab", version)]
struct Cli {
    /// Search budget in node expansions.
    #[arg(long, global = true, env = BUDGET_ENV, default_value_t = Budget::DEFAULT_EXPANSIONS)]
    budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce an instance file and write the result.
    Reduce {
        #[arg(value_enum)]
        kind: ReduceKind,
        input: PathBuf,
        /// Output path, `-` for standard output. A `.dot` extension writes
        /// gadget graphs as DOT.
        #[arg(default_value = "-")]
        output: PathBuf,
        /// Bandwidth limit for `bandwidth-to-sched` when the input has none.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Decide an instance and print yes, no or timeout.
    Solve {
        #[arg(value_enum)]
        problem: Problem,
        input: PathBuf,
        /// Bandwidth limit, overriding a "b" field in the input.
        #[arg(long, short = 'b')]
        limit: Option<usize>,
        /// Deadline overriding the scheduling instance's own.
        #[arg(long)]
        deadline: Option<usize>,
        /// Write the verified witness here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run an equivalence sweep and report disagreements.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Record per-case wall time (the report is then no longer
        /// byte-stable).
        #[arg(long)]
        timings: bool,
    },
    /// Generate a random or structured instance.
    Gen {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Counters, sources or bins.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Largest counter value.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Number of checks.
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Vertices, total source length, spine length or item count.
        #[arg(long, default_value_t = 8)]
        size: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// Caterpillar hair length.
        #[arg(long, default_value_t = 1)]
        hair: usize,
        /// Bin capacity.
        #[arg(long, default_value_t = 4)]
        capacity: usize,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Write a graph, or the gadget of a counter machine, as DOT.
    ExportDot {
        input: PathBuf,
        #[arg(default_value = "-")]
        output: PathBuf,
        /// Treat the input as a counter machine and export this gadget.
        #[arg(long, value_enum)]
        gadget: Option<GadgetKind>,
        #[arg(long, default_value = "g")]
        name: String,
    },
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Random instances per family.
    #[arg(long)]
    cases: Option<usize>,
    /// Largest three-machine instance enumerated.
    #[arg(long)]
    jobs: Option<usize>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let budget = Budget::expansions(cli.budget);
    match cli.command {
        Command::Reduce {
            kind,
            input,
            output,
            limit,
        } => {
            let dot = output.extension().is_some_and(|e| e == "dot");
            let text = commands::reduce(kind, &read_text(&input)?, limit, dot)?;
            write_output(&output, &text)
        }
        Command::Solve {
            problem,
            input,
            limit,
            deadline,
            witness,
        } => {
            let solved = commands::solve(problem, &read_text(&input)?, limit, deadline, budget)?;
            if let (Some(path), Some(w)) = (witness, &solved.witness) {
                write_output(&path, w)?;
            }
            let word = match solved.answer {
                Answer::Yes => "yes",
                Answer::No => "no",
                Answer::Timeout => "timeout",
            };
            println!("{word}");
            Ok(())
        }
        Command::Verify {
            suite,
            bounds,
            seed,
            report,
            timings,
        } => {
            let bounds = Bounds {
                k: bounds.k,
                n: bounds.n,
                r: bounds.r,
                cases: bounds.cases,
                jobs: bounds.jobs,
            };
            let rep = run_suite(suite, &bounds, seed, budget, timings)?;
            if let Some(path) = report {
                write_output(&path, &to_json(&rep))?;
            }
            let s = &rep.summary;
            println!(
                "{}: {} cases, {} agree, {} disagree, {} timeouts",
                rep.suite, s.total, s.agree, s.disagree, s.timeouts
            );
            for r in rep.disagreements() {
                println!("  disagree {}: {:?} vs {:?}", r.id, r.left, r.right);
            }
            if rep.passed() {
                Ok(())
            } else {
                Err(CliError::Verification(format!("{} disagreements", s.disagree)))
            }
        }
        Command::Gen {
            family,
            seed,
            k,
            n,
            r,
            size,
            density,
            hair,
            capacity,
            out,
        } => {
            let params = GenParams {
                k,
                n,
                r,
                size,
                density,
                hair,
                capacity,
            };
            write_output(&out, &commands::generate(family, &params, seed)?)
        }
        Command::ExportDot {
            input,
            output,
            gadget,
            name,
        } => write_output(&output, &commands::export_dot(&read_text(&input)?, gadget, &name)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xnlplab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
