use std::collections::BTreeSet;

use super::{all_connection_paths, cycle_rank, paths_span_cycle_space, ConnectionPath, PathError};
use crate::graph::{EdgeIdx, GkmGraph};

/// A spanning tree together with the ordered off-tree edges; attaching
/// `off_tree[i]` to the tree plus `off_tree[..i]` closes `witnesses[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub tree: Vec<EdgeIdx>,
    pub off_tree: Vec<EdgeIdx>,
    pub witnesses: Vec<ConnectionPath>,
}

impl TreeDecomposition {
    /// Edges the `i`-th witness may use: the tree and `off_tree[..=i]`.
    pub fn permitted_edges(&self, i: usize) -> BTreeSet<EdgeIdx> {
        self.tree.iter().chain(&self.off_tree[..=i]).copied().collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    /// Returns false if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Cycle rank of the edge set `edges` (on all vertices of `g`).
fn betti(g: &GkmGraph, edges: &BTreeSet<EdgeIdx>) -> usize {
    let mut uf = UnionFind::new(g.vertex_count());
    edges
        .iter()
        .filter(|&&e| {
            let [a, b] = g.edge(e).ends;
            !uf.union(a, b)
        })
        .count()
}

/// Builds the tree decomposition by repeatedly contracting connection paths.
///
/// `S` holds the edges of the paths chosen so far, so the contracted graph is
/// `Gamma / S`. Each round picks the shortest path whose descent to
/// `Gamma / S` is non-trivial (ties: least canonical form) among those that
/// raise the cycle rank of `S` by exactly one, and records its least new
/// edge. Contraction stops once `S` carries the full cycle rank.
pub fn lemma_tree_decomposition(g: &GkmGraph) -> Result<TreeDecomposition, PathError> {
    let paths = all_connection_paths(g)?;
    if let Some(p) = paths.iter().find(|p| !p.is_two_valent(g)) {
        return Err(PathError::HypothesisFailed(format!(
            "connection path {} is not a two-valent subgraph",
            p.display(g)
        )));
    }
    if !paths_span_cycle_space(g, &paths) {
        return Err(PathError::HypothesisFailed(
            "the first homology is not generated by connection paths".into(),
        ));
    }
    let target = cycle_rank(g);
    let mut covered: BTreeSet<EdgeIdx> = BTreeSet::new();
    let mut off_tree = Vec::new();
    let mut witnesses = Vec::new();
    let mut current = 0;
    while current < target {
        let mut best: Option<(usize, &ConnectionPath, EdgeIdx)> = None;
        for p in &paths {
            let fresh: Vec<EdgeIdx> = p.edge_set().difference(&covered).copied().collect();
            if fresh.is_empty() {
                continue;
            }
            if best.as_ref().is_some_and(|(len, _, _)| fresh.len() >= *len) {
                continue;
            }
            let mut grown = covered.clone();
            grown.extend(&fresh);
            if betti(g, &grown) == current + 1 {
                best = Some((fresh.len(), p, fresh[0]));
            }
        }
        let Some((_, p, e)) = best else {
            return Err(PathError::NonContractibleResidue {
                remaining: target - current,
            });
        };
        covered.extend(p.edge_set());
        off_tree.push(e);
        witnesses.push(p.clone());
        current += 1;
    }
    let removed: BTreeSet<EdgeIdx> = off_tree.iter().copied().collect();
    let tree: Vec<EdgeIdx> = (0..g.edge_count()).filter(|e| !removed.contains(e)).collect();
    let tree_set: BTreeSet<EdgeIdx> = tree.iter().copied().collect();
    if tree.len() + 1 != g.vertex_count() || betti(g, &tree_set) != 0 {
        return Err(PathError::NonContractibleResidue { remaining: betti(g, &tree_set) });
    }
    Ok(TreeDecomposition {
        tree,
        off_tree,
        witnesses,
    })
}
