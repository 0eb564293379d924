use super::{Digraph, GraphError, TopOrdering};

/// Largest vertex count accepted by [`brute_width`].
pub const BRUTE_WIDTH_CAP: usize = 20;

/// Maximum antichain size, as `n` minus a maximum matching between two
/// copies of the vertex set joined along the reachability relation.
pub fn width(g: &Digraph) -> Result<usize, GraphError> {
    let reach = g.reachability()?;
    let n = g.vertex_count();
    let mut matched_right: Vec<Option<usize>> = vec![None; n];

    fn augment(u: usize, reach: &[Vec<bool>], seen: &mut [bool], matched_right: &mut [Option<usize>]) -> bool {
        for v in 0..reach.len() {
            if !reach[u][v] || seen[v] {
                continue;
            }
            seen[v] = true;
            if matched_right[v].is_none_or(|w| augment(w, reach, seen, matched_right)) {
                matched_right[v] = Some(u);
                return true;
            }
        }
        false
    }

    let mut matching = 0;
    for u in 0..n {
        let mut seen = vec![false; n];
        if augment(u, &reach, &mut seen, &mut matched_right) {
            matching += 1;
        }
    }
    Ok(n - matching)
}

/// Maximum antichain by exhaustive subset search. Reachability is computed
/// here by independent depth-first searches.
pub fn brute_width(g: &Digraph) -> Result<usize, GraphError> {
    let n = g.vertex_count();
    if n > BRUTE_WIDTH_CAP {
        return Err(GraphError::TooLarge { n, cap: BRUTE_WIDTH_CAP });
    }
    g.topological_order()?;
    let mut comparable = vec![0u32; n];
    for s in 0..n {
        let mut stack = vec![s];
        let mut seen = vec![false; n];
        while let Some(v) = stack.pop() {
            for &w in g.succ(v) {
                if !seen[w] {
                    seen[w] = true;
                    comparable[s] |= 1 << w;
                    comparable[w] |= 1 << s;
                    stack.push(w);
                }
            }
        }
    }
    let mut best = 0;
    for set in 0u32..(1u32 << n) {
        let size = set.count_ones() as usize;
        if size > best && (0..n).all(|v| set & (1 << v) == 0 || comparable[v] & set == 0) {
            best = size;
        }
    }
    Ok(best)
}

/// Orders a downward directed tree by depth, ties by vertex id.
pub fn depth_layout(tree: &Digraph) -> Result<TopOrdering, GraphError> {
    let n = tree.vertex_count();
    let roots = tree.sources();
    if roots.len() != 1 {
        return Err(GraphError::NotATree("needs exactly one vertex without in-arcs"));
    }
    if (0..n).any(|v| tree.pred(v).len() > 1) {
        return Err(GraphError::NotATree("some vertex has two in-arcs"));
    }
    let depth = tree.depths_from(roots[0]);
    if depth.iter().any(Option::is_none) {
        return Err(GraphError::NotATree("not every vertex hangs below the root"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (depth[v], v));
    TopOrdering::from_sequence(&order)
}
