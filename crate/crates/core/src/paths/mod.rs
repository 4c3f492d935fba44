//! Connection paths, monodromy, the rational cycle-space test, the spanning
//! tree decomposition used by the extension algorithm, and GKM subgraphs
//! spanned by edge sets.
//!
//! A connection path `e_1, ..., e_m` is a closed edge path with pairwise
//! distinct edges such that transport along `e_i` carries the edge back to
//! the previous vertex onto the next edge: `nabla_{e_i}(bar e_{i-1}) =
//! e_{i+1}` (indices mod `m`). Equivalently the path is closed under the
//! connection as a two-valent subgraph.

mod subgraph;
mod tree;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{GkmGraph, GraphError, OrientedEdge, VertexId};
use crate::lattice::{echelon_rank, Int};

pub use subgraph::{
    covalence_one_report, orientable_sufficient, span_subgraph, three_edges_ineffective,
    CovalenceOneEntry, GkmSubgraph, Orientability,
};
pub use tree::{lemma_tree_decomposition, TreeDecomposition};


#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("the graph carries no connection")]
    NoConnection,
    #[error("the connection has no entry for {edge} along {along}")]
    IncompleteConnection { along: String, edge: String },
    #[error("{second} does not start at the terminal vertex of {first}")]
    NotConsecutive { first: String, second: String },
    #[error("vertex {vertex} is not on the path")]
    VertexNotOnPath { vertex: String },
    #[error("vertex {vertex} is visited more than once by the path")]
    VertexRevisited { vertex: String },
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("contraction stalled with first Betti number {remaining} left")]
    NonContractibleResidue { remaining: usize },
    #[error("closure is inconsistent at vertex {vertex}: reached with {{{first}}} and {{{second}}}")]
    InconsistentClosure {
        vertex: String,
        first: String,
        second: String,
    },
    #[error("spanning {requested} edges needs independence above {requested}, graph is {level}-independent")]
    IndependenceTooLow { requested: usize, level: usize },
    #[error("expected valence {expected}, found {found}")]
    WrongValence { expected: usize, found: usize },
    #[error("edge {edge} does not start at vertex {vertex}")]
    EdgeNotAtVertex { edge: String, vertex: String },
}

impl From<GraphError> for PathError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::NoConnection => PathError::NoConnection,
            other => PathError::HypothesisFailed(other.to_string()),
        }
    }
}

/// `nabla_along(f)`, with missing table entries reported as errors.
pub(crate) fn step(g: &GkmGraph, along: OrientedEdge, f: OrientedEdge) -> Result<OrientedEdge, PathError> {
    let conn = g.connection().ok_or(PathError::NoConnection)?;
    conn.transport(along, f).ok_or_else(|| PathError::IncompleteConnection {
        along: g.oriented_name(along),
        edge: g.oriented_name(f),
    })
}

/// A connection path in canonical form: among all rotations of both
/// traversal directions, the one whose edge-index sequence is
/// lexicographically least (ties broken by directions). In particular the
/// least edge index comes first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConnectionPath {
    edges: Vec<OrientedEdge>,
}

impl ConnectionPath {
    fn canonical(cycle: Vec<OrientedEdge>) -> Self {
        let m = cycle.len();
        let reversed: Vec<OrientedEdge> = cycle.iter().rev().map(|e| e.bar()).collect();
        let key = |seq: &[OrientedEdge]| -> (Vec<usize>, Vec<u8>) {
            (
                seq.iter().map(|e| e.edge).collect(),
                seq.iter().map(|e| e.dir as u8).collect(),
            )
        };
        let best = [&cycle, &reversed]
            .into_iter()
            .flat_map(|base| (0..m).map(move |r| base[r..].iter().chain(&base[..r]).copied().collect::<Vec<_>>()))
            .min_by_key(|seq| key(seq));
        ConnectionPath {
            edges: best.unwrap_or_default(),
        }
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Unoriented edge indices, sorted.
    pub fn edge_set(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|e| e.edge).collect()
    }

    /// Vertices in traversal order (`i(e_1), ..., i(e_m)`).
    pub fn vertices(&self, g: &GkmGraph) -> Vec<VertexId> {
        self.edges.iter().map(|&e| g.tail(e)).collect()
    }

    /// Whether the path is a two-valent subgraph: no vertex is visited twice.
    pub fn is_two_valent(&self, g: &GkmGraph) -> bool {
        let vs = self.vertices(g);
        vs.iter().collect::<BTreeSet<_>>().len() == vs.len()
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> Vec<OrientedEdge> {
        self.edges.iter().rev().map(|e| e.bar()).collect()
    }

    /// Signed edge-indicator vector in `Z^{|E|}`.
    pub fn cycle_vector(&self, edge_count: usize) -> Vec<Int> {
        let mut v = vec![Int::from(0); edge_count];
        for e in &self.edges {
            v[e.edge] += match e.dir {
                crate::graph::Direction::Forward => 1,
                crate::graph::Direction::Backward => -1,
            };
        }
        v
    }

    pub fn display<'a>(&'a self, g: &'a GkmGraph) -> impl fmt::Display + 'a {
        PathDisplay { path: self, g }
    }

    fn sort_key(&self) -> (usize, Vec<usize>, Vec<u8>) {
        (
            self.edges.len(),
            self.edges.iter().map(|e| e.edge).collect(),
            self.edges.iter().map(|e| e.dir as u8).collect(),
        )
    }
}

impl PartialOrd for ConnectionPath {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Edge count first, then the canonical sequence.
impl Ord for ConnectionPath {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

struct PathDisplay<'a> {
    path: &'a ConnectionPath,
    g: &'a GkmGraph,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &e) in self.path.edges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.g.oriented_name(e))?;
        }
        Ok(())
    }
}

/// Follows the recurrence from the consecutive pair `(e1, e2)`. Returns the
/// path if it closes back onto `(e1, e2)` with all edges distinct.
pub fn trace_connection_path(
    g: &GkmGraph,
    e1: OrientedEdge,
    e2: OrientedEdge,
) -> Result<Option<ConnectionPath>, PathError> {
    g.require_connection()?;
    if g.head(e1) != g.tail(e2) {
        return Err(PathError::NotConsecutive {
            first: g.oriented_name(e1),
            second: g.oriented_name(e2),
        });
    }
    if e1.edge == e2.edge {
        return Ok(None);
    }
    let mut seq = vec![e1, e2];
    let mut used: BTreeSet<usize> = [e1.edge, e2.edge].into_iter().collect();
    loop {
        let last = seq[seq.len() - 1];
        let prev = seq[seq.len() - 2];
        let next = step(g, last, prev.bar())?;
        if next == e1 {
            let closes = step(g, e1, last.bar())? == e2;
            return Ok(closes.then(|| ConnectionPath::canonical(seq)));
        }
        if !used.insert(next.edge) || seq.len() >= g.edge_count() {
            return Ok(None);
        }
        seq.push(next);
    }
}

/// Every connection path, sorted by edge count and then canonical form.
pub fn all_connection_paths(g: &GkmGraph) -> Result<Vec<ConnectionPath>, PathError> {
    g.require_connection()?;
    let mut found = BTreeSet::new();
    for v in 0..g.vertex_count() {
        for &e1 in g.star(v) {
            for &e2 in g.star(g.head(e1)) {
                if let Some(p) = trace_connection_path(g, e1, e2)? {
                    found.insert(p);
                }
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// The permutation of the transverse edges `F(v)` obtained by transport once
/// around a path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyMap {
    pub base: VertexId,
    pub path: ConnectionPath,
    pub map: BTreeMap<OrientedEdge, OrientedEdge>,
}

impl MonodromyMap {
    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(a, b)| a == b)
    }
}

/// Pushes every edge of `F(v)` around `path`, starting at `v`.
pub fn monodromy(g: &GkmGraph, path: &ConnectionPath, v: VertexId) -> Result<MonodromyMap, PathError> {
    let map = monodromy_along(g, path.edges(), v)?;
    Ok(MonodromyMap {
        base: v,
        path: path.clone(),
        map,
    })
}

/// Monodromy for an explicit traversal (either direction) of a closed path.
pub fn monodromy_along(
    g: &GkmGraph,
    cycle: &[OrientedEdge],
    v: VertexId,
) -> Result<BTreeMap<OrientedEdge, OrientedEdge>, PathError> {
    g.require_connection()?;
    let visits: Vec<usize> = (0..cycle.len()).filter(|&i| g.tail(cycle[i]) == v).collect();
    let name = || g.vertex_name(v).to_string();
    let start = match visits.as_slice() {
        [] => return Err(PathError::VertexNotOnPath { vertex: name() }),
        [i] => *i,
        _ => return Err(PathError::VertexRevisited { vertex: name() }),
    };
    let m = cycle.len();
    let rotated: Vec<OrientedEdge> = (0..m).map(|i| cycle[(start + i) % m]).collect();
    let on_path = [rotated[0], rotated[m - 1].bar()];
    let mut map = BTreeMap::new();
    for &f in g.star(v).iter().filter(|f| !on_path.contains(f)) {
        let mut cur = f;
        for &e in &rotated {
            cur = step(g, e, cur)?;
        }
        map.insert(f, cur);
    }
    Ok(map)
}

/// First Betti number of the graph.
pub fn cycle_rank(g: &GkmGraph) -> usize {
    g.edge_count() + 1 - g.vertex_count()
}

/// Whether the signed indicator vectors of the connection paths span the
/// rational cycle space.
pub fn h1_generated_by_connection_paths(g: &GkmGraph) -> Result<bool, PathError> {
    let paths = all_connection_paths(g)?;
    Ok(paths_span_cycle_space(g, &paths))
}

pub(crate) fn paths_span_cycle_space(g: &GkmGraph, paths: &[ConnectionPath]) -> bool {
    let rows: Vec<Vec<Int>> = paths.iter().map(|p| p.cycle_vector(g.edge_count())).collect();
    echelon_rank(rows, g.edge_count()) == cycle_rank(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cpn_graph, s2_power_graph};

    #[test]
    fn cp2_any_pair_traces_the_triangle() {
        let g = cpn_graph(2);
        for v in 0..3 {
            for &e1 in g.star(v) {
                for &e2 in g.star(g.head(e1)).iter().filter(|e| e.edge != e1.edge) {
                    let p = trace_connection_path(&g, e1, e2).unwrap().unwrap();
                    assert_eq!(p.len(), 3);
                    assert_eq!(p.edge_set(), [0, 1, 2].into_iter().collect());
                    assert!(p.is_two_valent(&g));
                }
            }
        }
    }

    #[test]
    fn cp1_has_no_paths() {
        let g = cpn_graph(1);
        let e = OrientedEdge::forward(0);
        assert_eq!(trace_connection_path(&g, e, e.bar()).unwrap(), None);
        assert!(all_connection_paths(&g).unwrap().is_empty());
        assert!(h1_generated_by_connection_paths(&g).unwrap());
    }

    #[test]
    fn square_traces_itself() {
        let g = s2_power_graph(2);
        let e1 = g.star(0)[0];
        let e2 = *g.star(g.head(e1)).iter().find(|e| e.edge != e1.edge).unwrap();
        let p = trace_connection_path(&g, e1, e2).unwrap().unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(all_connection_paths(&g).unwrap(), vec![p]);
    }

    #[test]
    fn canonical_form_puts_least_edge_first() {
        let g = cpn_graph(3);
        for p in all_connection_paths(&g).unwrap() {
            let least = p.edges().iter().map(|e| e.edge).min().unwrap();
            assert_eq!(p.edges()[0].edge, least);
            assert!(p.edges()[1].edge <= p.edges()[p.len() - 1].edge);
        }
    }

    /// Brute-force census: trace from every seed, dedupe by edge set.
    #[test]
    fn census_matches_seed_enumeration() {
        for g in [cpn_graph(2), cpn_graph(3), s2_power_graph(2), s2_power_graph(3)] {
            let mut sets = BTreeSet::new();
            for oe in (0..g.edge_count()).flat_map(|i| [OrientedEdge::forward(i), OrientedEdge::forward(i).bar()]) {
                for &next in g.star(g.head(oe)) {
                    if let Ok(Some(p)) = trace_connection_path(&g, oe, next) {
                        sets.insert(p.edge_set());
                    }
                }
            }
            assert_eq!(all_connection_paths(&g).unwrap().len(), sets.len());
        }
        assert_eq!(all_connection_paths(&cpn_graph(3)).unwrap().len(), 4);
        assert_eq!(all_connection_paths(&s2_power_graph(3)).unwrap().len(), 6);
    }

    #[test]
    fn monodromy_trivial_on_cp2() {
        let g = cpn_graph(2);
        let p = &all_connection_paths(&g).unwrap()[0];
        for v in 0..3 {
            let m = monodromy(&g, p, v).unwrap();
            assert!(m.map.is_empty());
        }
        let g3 = cpn_graph(3);
        for p in all_connection_paths(&g3).unwrap() {
            for v in p.vertices(&g3) {
                let m = monodromy(&g3, &p, v).unwrap();
                assert_eq!(m.map.len(), 1);
                assert!(m.is_identity());
            }
        }
    }

    #[test]
    fn monodromy_rejects_vertices_off_path() {
        let g = cpn_graph(3);
        let p = &all_connection_paths(&g).unwrap()[0];
        let off = (0..4).find(|v| !p.vertices(&g).contains(v)).unwrap();
        assert!(matches!(monodromy(&g, p, off), Err(PathError::VertexNotOnPath { .. })));
    }

    #[test]
    fn h1_examples() {
        assert!(h1_generated_by_connection_paths(&cpn_graph(2)).unwrap());
        assert!(h1_generated_by_connection_paths(&s2_power_graph(3)).unwrap());
        assert_eq!(
            h1_generated_by_connection_paths(&cpn_graph(2).with_connection(None)),
            Err(PathError::NoConnection)
        );
    }
}
