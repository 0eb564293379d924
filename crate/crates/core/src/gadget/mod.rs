//! Gadget graphs encoding a counter machine as a directed bandwidth
//! question, as a DAG of width `k + 5` and as a downward directed tree.
//!
//! The floor path fixes batches of `B - 1` positions. Each counter is a path
//! that advances one vertex per batch plus one vertex per unit of increase,
//! and between vertices eat up the spare positions of a batch. A firing check
//! puts one between vertex too many into two consecutive batches.

mod layout;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Digraph, GadgetLabel, GraphError, TailKind};
use crate::nnccm::{Check, NnccmError, NnccmInstance};

pub use layout::{
    alternative_run, layout_from_run, run_from_layout, trace_from_layout, tree_layout_from_run, validate_expanded_run,
    ExpandedRun,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GadgetError {
    #[error("gadgets need k, n and r all at least 1 (got k={k}, n={n}, r={r})")]
    ZeroParameter { k: usize, n: usize, r: usize },
    #[error("construction produced {got} vertices, expected {expected}")]
    CountMismatch { got: usize, expected: usize },
    #[error("tree construction: {0}")]
    NotATree(&'static str),
    #[error("run is not an accepting run of the instance")]
    InvalidRun,
    #[error(transparent)]
    Nnccm(#[from] NnccmError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("batch {batch} cannot hold its between vertices")]
    BatchOverflow { batch: usize },
    #[error("ordering has bandwidth {found}, above the limit {limit}")]
    BandwidthExceeded { found: usize, limit: usize },
    #[error("floor vertex {index} is not at position B*{index}")]
    FloorMisplaced { index: usize },
    #[error("counter {counter} has no vertex in batch {batch}")]
    CounterSkipsBatch { counter: usize, batch: usize },
    #[error("values read off the ordering do not form an accepting run")]
    ExtractedRunInvalid,
    #[error("gadget was built for a different instance")]
    ForeignInstance,
}

/// Sizes derived from `(k, n, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetParams {
    pub k: usize,
    pub n: usize,
    pub r: usize,
    /// Bandwidth limit `k + 6`.
    pub b: usize,
    /// Steps per check block, `(k + 2) n`.
    pub s: usize,
    /// Number of batches, `(r + 1) S`.
    pub l: usize,
    /// Vertices of the DAG, `L B + 1`.
    pub vertex_count: usize,
    /// Filler path length.
    pub filler: usize,
}

impl GadgetParams {
    pub fn new(m: &NnccmInstance) -> Result<Self, GadgetError> {
        let (k, n, r) = (m.k(), m.n(), m.r());
        if k == 0 || n == 0 || r == 0 {
            return Err(GadgetError::ZeroParameter { k, n, r });
        }
        let b = k + 6;
        let s = (k + 2) * n;
        let l = (r + 1) * s;
        let vertex_count = l * b + 1;
        let filler = 3 * l - k * n - 5 * r;
        Ok(GadgetParams {
            k,
            n,
            r,
            b,
            s,
            l,
            vertex_count,
            filler,
        })
    }

    /// Floor-between vertices in batch `j` (1-based): 3 at check times, 4
    /// right after them, 2 elsewhere.
    pub fn floor_between_count(&self, j: usize) -> usize {
        let at_check = |t: usize| t.is_multiple_of(self.s) && (1..=self.r).contains(&(t / self.s));
        if at_check(j) {
            3
        } else if j > 0 && at_check(j - 1) {
            4
        } else {
            2
        }
    }

    /// Vertices added by the tree tails, including the four extra leaves of
    /// the last floor vertex.
    pub fn tail_vertex_count(&self) -> usize {
        (3 * self.k + 4) * self.b
    }

    /// Length of the counter tail path of counter `i` (1-based).
    pub fn counter_tail_len(&self, i: usize) -> usize {
        3 * self.k + 4 - 3 * i
    }
}

/// A counter-between vertex wedged between `v_{c,counter,at}` and the next
/// vertex on that counter path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    /// 1-based check index.
    pub check: usize,
    /// 1-based counter.
    pub counter: usize,
    /// 1-based index on the counter path.
    pub at: usize,
    pub vertex: usize,
}

/// Vertex ids of the tree tails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailIndex {
    /// The four extra children of the last floor vertex.
    pub floor_end_leaves: Vec<usize>,
    pub floor: Vec<usize>,
    pub filler: Vec<usize>,
    /// `counter[i]` is the tail of counter `i + 1`.
    pub counter: Vec<Vec<usize>>,
}

/// Vertex ids by role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetIndex {
    /// `floor[i]` is `v_{f,i}`.
    pub floor: Vec<usize>,
    /// `floor_between[j - 1]` lists the floor-between vertices of batch `j`.
    pub floor_between: Vec<Vec<usize>>,
    /// `counter[i][j - 1]` is `v_{c,i+1,j}`.
    pub counter: Vec<Vec<usize>>,
    pub counter_between: Vec<Attachment>,
    /// Filler path in path order.
    pub filler: Vec<usize>,
    pub tails: Option<TailIndex>,
}

/// A built gadget: the graph, its parameters, and where every role lives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    pub instance: NnccmInstance,
    pub graph: Digraph,
    pub params: GadgetParams,
    pub index: GadgetIndex,
}

impl Gadget {
    pub fn is_tree(&self) -> bool {
        self.index.tails.is_some()
    }
}

fn link(g: &mut Digraph, u: usize, v: usize) {
    g.add_arc(u, v).expect("gadget arcs join distinct existing vertices");
}

/// Vertices of a new path hanging below `from`, labelled by `label(j)` for
/// `j = 1..=len`.
fn hang_path(g: &mut Digraph, from: usize, len: usize, label: impl Fn(usize) -> GadgetLabel) -> Vec<usize> {
    let mut prev = from;
    (1..=len)
        .map(|j| {
            let v = g.add_vertex(Some(label(j)));
            link(g, prev, v);
            prev = v;
            v
        })
        .collect()
}

/// The gadget DAG of `m`. Check `α = (c1, n1, c2, n2)` attaches a
/// counter-between vertex after `v_{c1, αS + n1}` and one after
/// `v_{c2, αS + n2}`; a counter sitting at the checked value at time `αS`
/// has exactly that vertex in batch `αS`. When both halves name the same
/// counter and value, one counter-between vertex is attached and batch `αS`
/// gets four floor-between vertices, so the vertex count and width do not
/// change and the check batch still overflows exactly when the check fires.
pub fn build_dag(m: &NnccmInstance) -> Result<Gadget, GadgetError> {
    let p = GadgetParams::new(m)?;
    let mut g = Digraph::empty(0);

    let floor: Vec<usize> = (0..=p.l).map(|i| g.add_vertex(Some(GadgetLabel::FloorPath(i)))).collect();
    for w in floor.windows(2) {
        link(&mut g, w[0], w[1]);
    }
    // A check whose halves coincide gets a single counter-between vertex;
    // its check batch takes a fourth floor-between vertex instead.
    let coinciding = |c: &Check| (c.c1, c.n1) == (c.c2, c.n2);
    let extra = |j: usize| j.is_multiple_of(p.s) && (1..=p.r).contains(&(j / p.s)) && coinciding(&m.checks()[j / p.s - 1]);
    let floor_between: Vec<Vec<usize>> = (1..=p.l)
        .map(|j| {
            (0..p.floor_between_count(j) + usize::from(extra(j)))
                .map(|_| {
                    let w = g.add_vertex(Some(GadgetLabel::FloorBetween));
                    link(&mut g, floor[j - 1], w);
                    link(&mut g, w, floor[j]);
                    w
                })
                .collect()
        })
        .collect();

    let counter: Vec<Vec<usize>> = (1..=p.k)
        .map(|i| {
            let path = hang_path(&mut g, floor[0], p.l + p.n, |j| GadgetLabel::CounterPath(i, j));
            link(&mut g, path[path.len() - 1], floor[p.l]);
            path
        })
        .collect();

    let mut counter_between = Vec::with_capacity(2 * p.r);
    for (a, check) in m.checks().iter().enumerate() {
        let alpha = a + 1;
        let halves = if coinciding(check) { 1 } else { 2 };
        for (c, q) in [(check.c1, check.n1), (check.c2, check.n2)].into_iter().take(halves) {
            let at = alpha * p.s + q;
            let path = &counter[c - 1];
            let w = g.add_vertex(Some(GadgetLabel::CounterBetween));
            link(&mut g, path[at - 1], w);
            link(&mut g, w, path[at]);
            counter_between.push(Attachment {
                check: alpha,
                counter: c,
                at,
                vertex: w,
            });
        }
    }

    let filler = hang_path(&mut g, floor[0], p.filler, GadgetLabel::FillerPath);
    link(&mut g, filler[filler.len() - 1], floor[p.l]);

    if g.vertex_count() != p.vertex_count {
        return Err(GadgetError::CountMismatch {
            got: g.vertex_count(),
            expected: p.vertex_count,
        });
    }
    Ok(Gadget {
        instance: m.clone(),
        graph: g,
        params: p,
        index: GadgetIndex {
            floor,
            floor_between,
            counter,
            counter_between,
            filler,
            tails: None,
        },
    })
}

fn add_leaves(g: &mut Digraph, parent: usize, count: usize) {
    for _ in 0..count {
        let leaf = g.add_vertex(Some(GadgetLabel::TailLeaf));
        link(g, parent, leaf);
    }
}

/// The tree variant: the DAG without between-vertex out-arcs and without the
/// arcs from path ends into `v_{f,L}`, plus tails whose leaf counts force
/// the paths to finish in a fixed order.
pub fn build_tree(m: &NnccmInstance) -> Result<Gadget, GadgetError> {
    let mut gadget = build_dag(m)?;
    let p = gadget.params;
    let idx = &gadget.index;
    let g = &mut gadget.graph;
    let last_floor = idx.floor[p.l];

    for (j, batch) in idx.floor_between.iter().enumerate() {
        for &w in batch {
            g.remove_arc(w, idx.floor[j + 1]);
        }
    }
    for a in &idx.counter_between {
        g.remove_arc(a.vertex, idx.counter[a.counter - 1][a.at]);
    }
    let path_ends: Vec<usize> = idx
        .counter
        .iter()
        .map(|path| path[path.len() - 1])
        .chain(std::iter::once(idx.filler[idx.filler.len() - 1]))
        .collect();
    for &end in &path_ends {
        g.remove_arc(end, last_floor);
    }

    let floor_end_leaves: Vec<usize> = (0..4)
        .map(|_| {
            let leaf = g.add_vertex(Some(GadgetLabel::TailLeaf));
            link(g, last_floor, leaf);
            leaf
        })
        .collect();
    let long = 3 * p.k + 3;
    let floor = hang_path(g, last_floor, long, |j| GadgetLabel::TailPath(TailKind::Floor, j));
    add_leaves(g, floor[long - 1], p.b);
    let filler = hang_path(g, path_ends[p.k], long, |j| GadgetLabel::TailPath(TailKind::Filler, j));
    for &v in &filler[long - 2..] {
        add_leaves(g, v, p.b - 2);
    }
    let counter: Vec<Vec<usize>> = (1..=p.k)
        .map(|i| {
            let len = p.counter_tail_len(i);
            let tail = hang_path(g, path_ends[i - 1], len, |j| GadgetLabel::TailPath(TailKind::Counter(i), j));
            for &v in &tail[len - 3..] {
                add_leaves(g, v, p.b - 2 - i);
            }
            tail
        })
        .collect();

    let n = g.vertex_count();
    if n - p.vertex_count != p.tail_vertex_count() {
        return Err(GadgetError::CountMismatch {
            got: n,
            expected: p.vertex_count + p.tail_vertex_count(),
        });
    }
    if g.sources() != [idx.floor[0]] {
        return Err(GadgetError::NotATree("the first floor vertex must be the only root"));
    }
    if (0..n).any(|v| v != idx.floor[0] && g.pred(v).len() != 1) {
        return Err(GadgetError::NotATree("a non-root vertex has in-degree other than 1"));
    }
    gadget.index.tails = Some(TailIndex {
        floor_end_leaves,
        floor,
        filler,
        counter,
    });
    Ok(gadget)
}
