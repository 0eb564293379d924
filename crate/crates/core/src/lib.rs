//! Exact solvers, reductions and gadget constructions around bounded
//! non-negative counter machines, shuffle, directed bandwidth, precedence
//! delay scheduling and unary bin packing.

pub mod binpack;
pub mod gadget;
pub mod graph;
pub mod nnccm;
pub mod sched;
pub mod search;
pub mod shuffle;

pub use binpack::{BinPackingInstance, Packing};
pub use gadget::{Gadget, GadgetParams};
pub use graph::{Digraph, GraphError, TopOrdering};
pub use nnccm::{Check, NnccmInstance, Run};
pub use sched::{DelayKind, SchedInstance, Schedule};
pub use search::{Budget, Decision};
pub use shuffle::{InterleavingWitness, ShuffleInstance, Word};
