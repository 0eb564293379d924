//! Directed acyclic graphs, topological orderings, directed bandwidth and
//! width.

mod bandwidth;
mod width;

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

pub use bandwidth::{bandwidth_of, brute_bandwidth, exact_bandwidth, BRUTE_BANDWIDTH_CAP};
pub use width::{brute_width, depth_layout, width, BRUTE_WIDTH_CAP};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("arc ({from}, {to}) leaves the vertex range 0..{n}")]
    VertexOutOfRange { from: usize, to: usize, n: usize },
    #[error("graph has a directed cycle")]
    Cyclic,
    #[error("ordering is not a bijection onto 0..{n}")]
    NotBijective { n: usize },
    #[error("arc ({from}, {to}) points backwards in the ordering")]
    NotTopological { from: usize, to: usize },
    #[error("ordering covers {got} vertices, graph has {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error("not a downward directed tree: {0}")]
    NotATree(&'static str),
    #[error("{n} vertices exceed the brute-force cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("bandwidth limit must be at least 1")]
    ZeroLimit,
}

/// Which sub-gadget of a hardness construction a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GadgetLabel {
    FloorPath(usize),
    FloorBetween,
    /// Counter (1-based) and position (1-based) along its path.
    CounterPath(usize, usize),
    CounterBetween,
    FillerPath(usize),
    TailPath(TailKind, usize),
    TailLeaf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TailKind {
    Floor,
    Filler,
    Counter(usize),
}

impl GadgetLabel {
    /// Fill colour used by the DOT export.
    pub fn color(&self) -> &'static str {
        match self {
            GadgetLabel::FloorPath(_) => "gray60",
            GadgetLabel::FloorBetween => "gray85",
            GadgetLabel::CounterPath(..) => "steelblue",
            GadgetLabel::CounterBetween => "lightblue",
            GadgetLabel::FillerPath(_) => "khaki",
            GadgetLabel::TailPath(..) => "darkseagreen",
            GadgetLabel::TailLeaf => "honeydew",
        }
    }
}

/// Directed graph on vertices `0..n` with optional role labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    labels: BTreeMap<usize, GadgetLabel>,
    #[serde(skip)]
    succ: Vec<Vec<usize>>,
    #[serde(skip)]
    pred: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawDigraph {
    n: usize,
    #[serde(default)]
    arcs: Vec<(usize, usize)>,
    #[serde(default)]
    labels: BTreeMap<usize, GadgetLabel>,
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawDigraph::deserialize(deserializer)?;
        let mut g = Digraph::new(raw.n, raw.arcs).map_err(serde::de::Error::custom)?;
        for (v, label) in raw.labels {
            if v >= g.n {
                return Err(serde::de::Error::custom(format!("label for missing vertex {v}")));
            }
            g.labels.insert(v, label);
        }
        Ok(g)
    }
}

impl Digraph {
    pub fn new(n: usize, arcs: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut g = Digraph::empty(n);
        for (u, v) in arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    pub fn empty(n: usize) -> Self {
        Digraph {
            n,
            arcs: Vec::new(),
            labels: BTreeMap::new(),
            succ: vec![Vec::new(); n],
            pred: vec![Vec::new(); n],
        }
    }

    /// Adds a vertex and returns its id.
    pub fn add_vertex(&mut self, label: Option<GadgetLabel>) -> usize {
        let v = self.n;
        self.n += 1;
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        if let Some(l) = label {
            self.labels.insert(v, l);
        }
        v
    }

    /// Adds an arc; parallel arcs are ignored.
    pub fn add_arc(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u >= self.n || v >= self.n {
            return Err(GraphError::VertexOutOfRange { from: u, to: v, n: self.n });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u, v));
        }
        if !self.succ[u].contains(&v) {
            self.arcs.push((u, v));
            self.succ[u].push(v);
            self.pred[v].push(u);
        }
        Ok(())
    }

    pub fn remove_arc(&mut self, u: usize, v: usize) -> bool {
        let Some(idx) = self.arcs.iter().position(|&a| a == (u, v)) else {
            return false;
        };
        self.arcs.remove(idx);
        self.succ[u].retain(|&w| w != v);
        self.pred[v].retain(|&w| w != u);
        true
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn succ(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn pred(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn label(&self, v: usize) -> Option<GadgetLabel> {
        self.labels.get(&v).copied()
    }

    pub fn labels(&self) -> &BTreeMap<usize, GadgetLabel> {
        &self.labels
    }

    pub fn set_label(&mut self, v: usize, label: GadgetLabel) {
        self.labels.insert(v, label);
    }

    pub fn sources(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.pred[v].is_empty()).collect()
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.succ[v].is_empty()).collect()
    }

    /// Kahn's algorithm, smallest available id first.
    pub fn topological_order(&self) -> Result<Vec<usize>, GraphError> {
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
            (0..self.n).filter(|&v| indeg[v] == 0).map(std::cmp::Reverse).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(std::cmp::Reverse(v)) = ready.pop() {
            order.push(v);
            for &w in &self.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(std::cmp::Reverse(w));
                }
            }
        }
        if order.len() == self.n {
            Ok(order)
        } else {
            Err(GraphError::Cyclic)
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    pub fn reversed(&self) -> Digraph {
        let mut g = Digraph::empty(self.n);
        for &(u, v) in &self.arcs {
            g.add_arc(v, u).expect("valid arc");
        }
        g.labels = self.labels.clone();
        g
    }

    /// `reach[u][v]` iff there is a nonempty path from `u` to `v`.
    pub fn reachability(&self) -> Result<Vec<Vec<bool>>, GraphError> {
        let order = self.topological_order()?;
        let mut reach = vec![vec![false; self.n]; self.n];
        for &u in order.iter().rev() {
            for &w in &self.succ[u] {
                let via = reach[w].clone();
                reach[u][w] = true;
                for (r, v) in reach[u].iter_mut().zip(via) {
                    *r |= v;
                }
            }
        }
        Ok(reach)
    }

    /// Vertices grouped by BFS depth from the unique root of a tree.
    pub(crate) fn depths_from(&self, root: usize) -> Vec<Option<usize>> {
        let mut depth = vec![None; self.n];
        depth[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.succ[v] {
                if depth[w].is_none() {
                    depth[w] = Some(depth[v].unwrap() + 1);
                    queue.push_back(w);
                }
            }
        }
        depth
    }

    /// Graphviz text; labelled vertices are filled by role.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {name} {{").unwrap();
        writeln!(out, "  node [style=filled, fillcolor=white];").unwrap();
        for v in 0..self.n {
            match self.labels.get(&v) {
                Some(l) => writeln!(out, "  {v} [label=\"{v}\\n{}\", fillcolor={}];", short_role(l), l.color()).unwrap(),
                None => writeln!(out, "  {v};").unwrap(),
            }
        }
        for &(u, v) in &self.arcs {
            writeln!(out, "  {u} -> {v};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn short_role(l: &GadgetLabel) -> String {
    match l {
        GadgetLabel::FloorPath(i) => format!("Fl {i}"),
        GadgetLabel::FloorBetween => "Fl btw".into(),
        GadgetLabel::CounterPath(i, j) => format!("C{i} {j}"),
        GadgetLabel::CounterBetween => "C btw".into(),
        GadgetLabel::FillerPath(j) => format!("Fil {j}"),
        GadgetLabel::TailPath(TailKind::Floor, j) => format!("T fl {j}"),
        GadgetLabel::TailPath(TailKind::Filler, j) => format!("T fil {j}"),
        GadgetLabel::TailPath(TailKind::Counter(i), j) => format!("T c{i} {j}"),
        GadgetLabel::TailLeaf => "leaf".into(),
    }
}

/// Bijection from vertices to positions `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopOrdering {
    pub position: Vec<usize>,
}

impl TopOrdering {
    /// From a vertex sequence (first vertex gets position 0).
    pub fn from_sequence(order: &[usize]) -> Result<Self, GraphError> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (p, &v) in order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(GraphError::NotBijective { n });
            }
            position[v] = p;
        }
        Ok(TopOrdering { position })
    }

    pub fn sequence(&self) -> Vec<usize> {
        let mut order = vec![0; self.position.len()];
        for (v, &p) in self.position.iter().enumerate() {
            order[p] = v;
        }
        order
    }

    /// Checks bijectivity and that every arc points forward.
    pub fn check(&self, g: &Digraph) -> Result<(), GraphError> {
        let n = g.vertex_count();
        if self.position.len() != n {
            return Err(GraphError::SizeMismatch {
                got: self.position.len(),
                expected: n,
            });
        }
        let mut seen = vec![false; n];
        for &p in &self.position {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(GraphError::NotBijective { n });
            }
        }
        for &(u, v) in g.arcs() {
            if self.position[u] >= self.position[v] {
                return Err(GraphError::NotTopological { from: u, to: v });
            }
        }
        Ok(())
    }
}

pub fn path(n: usize) -> Digraph {
    Digraph::new(n, (1..n).map(|v| (v - 1, v)).collect()).expect("path arcs")
}

/// Root 0 with arcs to `1..=leaves`.
pub fn star(leaves: usize) -> Digraph {
    Digraph::new(leaves + 1, (1..=leaves).map(|v| (0, v)).collect()).expect("star arcs")
}

/// Path `0 -> 1 -> 2 -> 3` with a detour `0 -> 4 -> 3`.
pub fn path_with_detour() -> Digraph {
    Digraph::new(5, vec![(0, 1), (1, 2), (2, 3), (0, 4), (4, 3)]).expect("arcs")
}

/// Every vertex of `0..left` points to every vertex of `left..left+right`.
pub fn complete_bipartite(left: usize, right: usize) -> Digraph {
    let arcs = (0..left).flat_map(|u| (left..left + right).map(move |v| (u, v))).collect();
    Digraph::new(left + right, arcs).expect("arcs")
}

/// Complete binary out-tree with `levels` levels (heap numbering).
pub fn complete_binary_tree(levels: u32) -> Digraph {
    let n = (1usize << levels) - 1;
    Digraph::new(n, (1..n).map(|v| ((v - 1) / 2, v)).collect()).expect("arcs")
}

/// Spine path `0..spine_len`; each spine vertex carries a downward hair path
/// of `hair_len` vertices.
pub fn gen_caterpillar(spine_len: usize, hair_len: usize) -> Digraph {
    let mut g = Digraph::empty(spine_len);
    for s in 1..spine_len {
        g.add_arc(s - 1, s).expect("spine arc");
    }
    for s in 0..spine_len {
        let mut prev = s;
        for _ in 0..hair_len {
            let h = g.add_vertex(None);
            g.add_arc(prev, h).expect("hair arc");
            prev = h;
        }
    }
    g
}

/// Random DAG: each pair of a hidden topological order is joined with
/// probability `density`; vertex ids are shuffled.
pub fn random_dag<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Digraph {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut g = Digraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                g.add_arc(ids[i], ids[j]).expect("forward arc");
            }
        }
    }
    g
}

/// Random downward directed tree on `n >= 1` vertices with shuffled ids.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Digraph {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut g = Digraph::empty(n);
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        g.add_arc(ids[parent], ids[i]).expect("tree arc");
    }
    g
}
