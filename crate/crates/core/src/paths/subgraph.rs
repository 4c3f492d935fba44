use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{h1_generated_by_connection_paths, step, PathError};
use crate::graph::{subsets, EdgeIdx, GkmGraph, OrientedEdge, VertexId};
use crate::lattice::has_unit_invariant_factors;

/// A connected subgraph closed under the ambient connection, `j`-valent at
/// each of its vertices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GkmSubgraph {
    edges_at: BTreeMap<VertexId, BTreeSet<OrientedEdge>>,
}

impl GkmSubgraph {
    pub fn valence(&self) -> usize {
        self.edges_at.values().next().map_or(0, BTreeSet::len)
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.edges_at.keys().copied().collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.edges_at.len()
    }

    pub fn edges_at(&self, v: VertexId) -> Option<&BTreeSet<OrientedEdge>> {
        self.edges_at.get(&v)
    }

    /// Unoriented edge indices, sorted.
    pub fn edge_set(&self) -> BTreeSet<EdgeIdx> {
        self.edges_at.values().flatten().map(|e| e.edge).collect()
    }

    /// Whether the labels at each vertex span a saturated sublattice of
    /// rank equal to the valence.
    pub fn is_effective(&self, g: &GkmGraph) -> bool {
        self.edges_at.values().all(|es| {
            let es: Vec<OrientedEdge> = es.iter().copied().collect();
            has_unit_invariant_factors(&g.weight_matrix_of(&es))
        })
    }

    pub fn describe(&self, g: &GkmGraph) -> String {
        let vs: Vec<&str> = self.edges_at.keys().map(|&v| g.vertex_name(v)).collect();
        let es: Vec<&str> = self.edge_set().iter().map(|&e| g.edge(e).id.as_str()).collect();
        format!("vertices [{}] edges [{}]", vs.join(" "), es.join(" "))
    }
}

/// Closure of the edge set `seed` at `v` under transport along its own
/// edges, without the independence precondition.
fn closure(g: &GkmGraph, v: VertexId, seed: &[OrientedEdge]) -> Result<GkmSubgraph, PathError> {
    g.require_connection()?;
    for &e in seed {
        if g.tail(e) != v {
            return Err(PathError::EdgeNotAtVertex {
                edge: g.oriented_name(e),
                vertex: g.vertex_name(v).to_string(),
            });
        }
    }
    let names = |s: &BTreeSet<OrientedEdge>| -> String {
        s.iter().map(|&e| g.oriented_name(e)).collect::<Vec<_>>().join(" ")
    };
    let mut edges_at: BTreeMap<VertexId, BTreeSet<OrientedEdge>> = BTreeMap::new();
    edges_at.insert(v, seed.iter().copied().collect());
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        let here = edges_at[&u].clone();
        for &e in &here {
            let w = g.head(e);
            let there = here
                .iter()
                .map(|&f| step(g, e, f))
                .collect::<Result<BTreeSet<_>, _>>()?;
            match edges_at.get(&w) {
                None => {
                    edges_at.insert(w, there);
                    queue.push_back(w);
                }
                Some(existing) if *existing != there => {
                    return Err(PathError::InconsistentClosure {
                        vertex: g.vertex_name(w).to_string(),
                        first: names(existing),
                        second: names(&there),
                    });
                }
                Some(_) => {}
            }
        }
    }
    Ok(GkmSubgraph { edges_at })
}

/// The subgraph spanned by the edges `seed` at `v`.
///
/// Fails with `IndependenceTooLow` when `seed` is a proper subset of the star
/// with more edges than the independence level; otherwise the closure runs
/// with its consistency check.
pub fn span_subgraph(g: &GkmGraph, v: VertexId, seed: &[OrientedEdge]) -> Result<GkmSubgraph, PathError> {
    let j = seed.len();
    let level = g.independence().level;
    if j < g.valence() && j > level {
        return Err(PathError::IndependenceTooLow { requested: j, level });
    }
    closure(g, v, seed)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovalenceOneEntry {
    pub subgraph: GkmSubgraph,
    pub effective: bool,
}

/// All distinct `(n-1)`-valent spanned subgraphs, in order of discovery
/// (vertex order, then subsets of the star in lexicographic order).
pub fn covalence_one_report(g: &GkmGraph) -> Result<Vec<CovalenceOneEntry>, PathError> {
    let n = g.valence();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        let star = g.star(v);
        for s in subsets(n, n - 1) {
            let seed: Vec<OrientedEdge> = s.iter().map(|&i| star[i]).collect();
            let sub = closure(g, v, &seed)?;
            if seen.insert(sub.clone()) {
                let effective = sub.is_effective(g);
                out.push(CovalenceOneEntry { subgraph: sub, effective });
            }
        }
    }
    Ok(out)
}

/// For 4-valent graphs: whether every three edges at every vertex span an
/// ineffective subgraph.
pub fn three_edges_ineffective(g: &GkmGraph) -> Result<bool, PathError> {
    if g.valence() != 4 {
        return Err(PathError::WrongValence {
            expected: 4,
            found: g.valence(),
        });
    }
    for v in 0..g.vertex_count() {
        let star = g.star(v);
        for s in subsets(4, 3) {
            let seed: Vec<OrientedEdge> = s.iter().map(|&i| star[i]).collect();
            if closure(g, v, &seed)?.is_effective(g) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Orientability {
    Orientable,
    Unknown,
}

impl Orientability {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientability::Orientable => "orientable",
            Orientability::Unknown => "unknown",
        }
    }
}

/// Orientable when the graph is 3-independent and its first homology is
/// generated by connection paths; `Unknown` otherwise.
pub fn orientable_sufficient(g: &GkmGraph) -> Orientability {
    if g.independence().level < 3 {
        return Orientability::Unknown;
    }
    match h1_generated_by_connection_paths(g) {
        Ok(true) => Orientability::Orientable,
        _ => Orientability::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cpn_graph, s2_power_graph};

    #[test]
    fn cp3_two_edges_span_a_triangle() {
        let g = cpn_graph(3);
        let star = g.star(0).to_vec();
        let sub = span_subgraph(&g, 0, &star[..2]).unwrap();
        assert_eq!(sub.vertex_count(), 3);
        assert_eq!(sub.valence(), 2);
        assert_eq!(sub.edge_set().len(), 3);
        // seeded from another of its vertices gives the same subgraph
        for u in sub.vertices() {
            let seed: Vec<OrientedEdge> = sub.edges_at(u).unwrap().iter().copied().collect();
            assert_eq!(span_subgraph(&g, u, &seed).unwrap(), sub);
        }
    }

    #[test]
    fn full_star_spans_everything_and_single_edge_spans_itself() {
        let g = s2_power_graph(3);
        let all = span_subgraph(&g, 0, g.star(0)).unwrap();
        assert_eq!(all.vertex_count(), 8);
        let one = span_subgraph(&g, 0, &g.star(0)[..1]).unwrap();
        assert_eq!(one.vertex_count(), 2);
        assert_eq!(one.edge_set().len(), 1);
    }

    #[test]
    fn independence_precondition() {
        let g = cpn_graph(2);
        let p = crate::lattice::IntMatrix::from_i64_rows(&[[1, 0, 1, 1], [0, 1, 1, -1], [0, 0, 1, 2]]);
        let r = crate::catalog::restrict(&cpn_graph(4), &p).unwrap();
        assert_eq!(r.independence().level, 3);
        assert!(span_subgraph(&r, 0, &r.star(0)[..3]).is_ok());
        assert!(span_subgraph(&g, 0, &g.star(0)[..1]).is_ok());
    }

    #[test]
    fn covalence_one_cp3_faces() {
        let report = covalence_one_report(&cpn_graph(3)).unwrap();
        assert_eq!(report.len(), 4);
        assert!(report.iter().all(|e| e.effective && e.subgraph.vertex_count() == 3));
    }

    #[test]
    fn covalence_one_ineffective_edges() {
        let p = crate::lattice::IntMatrix::from_i64_rows(&[[2, 0], [0, 1]]);
        let g = s2_power_graph(2).relabel(&p).unwrap();
        let report = covalence_one_report(&g).unwrap();
        assert_eq!(report.len(), 4);
        for entry in &report {
            let e = *entry.subgraph.edge_set().iter().next().unwrap();
            assert_eq!(entry.effective, !g.edge(e).id.starts_with("c0"));
        }
        let cp2 = covalence_one_report(&cpn_graph(2)).unwrap();
        assert_eq!(cp2.len(), 3);
        assert!(cp2.iter().all(|e| e.effective));
    }

    #[test]
    fn three_edges_needs_valence_four() {
        assert_eq!(
            three_edges_ineffective(&cpn_graph(3)),
            Err(PathError::WrongValence { expected: 4, found: 3 })
        );
        assert_eq!(three_edges_ineffective(&cpn_graph(4)), Ok(false));
    }

    #[test]
    fn orientability_examples() {
        assert_eq!(orientable_sufficient(&cpn_graph(3)), Orientability::Orientable);
        assert_eq!(orientable_sufficient(&s2_power_graph(3)), Orientability::Orientable);
        assert_eq!(orientable_sufficient(&cpn_graph(2)), Orientability::Unknown);
    }
}
