//! Extension of a `Z^k`-labeling to an effective `Z^n`-labeling.
//!
//! The labels at one vertex are completed to a unimodular `n x n` matrix,
//! pushed over a spanning tree with the connection, and the congruences on
//! the remaining edges are verified in the order in which attaching them
//! closes a connection path.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::graph::{
    is_effective, subsets, validate, Edge, GkmGraph, LabelMode, LabelVector, OrientedEdge,
    PositionClass, VertexId,
};
use crate::lattice::unimodular_completion;
use crate::paths::{all_connection_paths, lemma_tree_decomposition, span_subgraph, PathError, TreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("the graph carries no connection")]
    NoConnection,
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("vertex {vertex}: weight matrix is not faithful, so the labeling is ineffective and cannot be completed")]
    NotCompletable { vertex: String },
    #[error("no integer solves the congruence for {edge} along {along}")]
    NoIntegerSolution { along: String, edge: String },
    #[error("closure violation at off-tree edge {edge}: {detail}")]
    ClosureViolation { edge: String, detail: String },
    #[error("extended graph is invalid: {0}")]
    InvalidResult(String),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisCheck {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of the three hypothesis checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &HypothesisCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.failures().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}: {}", c.id, c.detail)?;
        }
        Ok(())
    }
}

/// Checks (a) 3-independence (for valence three: general position), (b) that
/// every three edges at a vertex span a subgraph consistently, and (c) that
/// connection paths are two-valent and generate the rational first homology.
pub fn check_ext_hypotheses(g: &GkmGraph) -> HypothesisReport {
    let ind = g.independence();
    let n = g.valence();
    let a_ok = ind.level >= 3 || (n == 3 && ind.class == PositionClass::GeneralPosition);
    let a = HypothesisCheck {
        id: "three-independent",
        passed: a_ok,
        detail: if a_ok {
            format!("{}-independent", ind.level)
        } else {
            format!(
                "graph is only {}-independent; extension needs 3-independence (or general position when n = 3)",
                ind.level
            )
        },
    };
    if g.connection().is_none() {
        let missing = |id| HypothesisCheck {
            id,
            passed: false,
            detail: "the graph carries no connection".into(),
        };
        return HypothesisReport {
            checks: vec![a, missing("unique-three-subgraphs"), missing("h1-connection-paths")],
        };
    }

    let mut b = HypothesisCheck {
        id: "unique-three-subgraphs",
        passed: true,
        detail: "every three edges span a consistent 3-valent subgraph".into(),
    };
    'outer: for v in 0..g.vertex_count() {
        let star = g.star(v);
        for s in subsets(star.len(), 3.min(star.len())) {
            let seed: Vec<OrientedEdge> = s.iter().map(|&i| star[i]).collect();
            if let Err(e) = span_subgraph(g, v, &seed) {
                b.passed = false;
                b.detail = e.to_string();
                break 'outer;
            }
        }
    }

    let c = match all_connection_paths(g) {
        Err(e) => HypothesisCheck {
            id: "h1-connection-paths",
            passed: false,
            detail: e.to_string(),
        },
        Ok(paths) => {
            if let Some(p) = paths.iter().find(|p| !p.is_two_valent(g)) {
                HypothesisCheck {
                    id: "h1-connection-paths",
                    passed: false,
                    detail: format!("connection path {} is not a two-valent subgraph", p.display(g)),
                }
            } else if !crate::paths::h1_generated_by_connection_paths(g).unwrap_or(false) {
                HypothesisCheck {
                    id: "h1-connection-paths",
                    passed: false,
                    detail: "the first homology is not generated by connection paths".into(),
                }
            } else {
                HypothesisCheck {
                    id: "h1-connection-paths",
                    passed: true,
                    detail: format!("{} two-valent connection paths generate the first homology", paths.len()),
                }
            }
        }
    };
    HypothesisReport { checks: vec![a, b, c] }
}

/// Extended labels of the edges leaving the root vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSeed {
    pub root: VertexId,
    pub labels: Vec<(OrientedEdge, LabelVector)>,
}

/// Appends `n - k` coordinates to the labels at `v0` so that the `n x n`
/// matrix becomes unimodular.
pub fn seed_extension(g: &GkmGraph, v0: VertexId) -> Result<ExtensionSeed, ExtensionError> {
    let w = g.weight_matrix(v0);
    let b = unimodular_completion(&w).map_err(|_| ExtensionError::NotCompletable {
        vertex: g.vertex_name(v0).to_string(),
    })?;
    let labels = g
        .star(v0)
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let mut coords = w.row(i).to_vec();
            coords.extend_from_slice(b.row(i));
            (e, LabelVector::new(coords))
        })
        .collect();
    Ok(ExtensionSeed { root: v0, labels })
}

/// Extended label of every oriented edge, as seen from its initial vertex.
pub type ExtendedLabels = BTreeMap<OrientedEdge, LabelVector>;

/// Pushes the seed over the tree: crossing a tree edge `e` sends the label
/// of `f` to `x(nabla_e f) = x(f) + c x(e)` with `c` taken from the base
/// labeling, and `x(bar e) = -x(e)`.
///
/// For unsigned graphs the labels are a signed lift of the canonical
/// representatives; the sign of `alpha(nabla_e f)` is chosen so that the
/// base congruence has an integer solution.
pub fn propagate_over_tree(
    g: &GkmGraph,
    seed: &ExtensionSeed,
    decomp: &TreeDecomposition,
) -> Result<ExtendedLabels, ExtensionError> {
    let conn = g.connection().ok_or(ExtensionError::NoConnection)?;
    let k = g.rank();
    let base = |x: &LabelVector| LabelVector::new(x.coords()[..k].to_vec());
    let mut tree_at: Vec<Vec<OrientedEdge>> = vec![Vec::new(); g.vertex_count()];
    for &idx in &decomp.tree {
        let e = OrientedEdge::forward(idx);
        tree_at[g.tail(e)].push(e);
        tree_at[g.head(e)].push(e.bar());
    }
    let mut labels: ExtendedLabels = seed.labels.iter().cloned().collect();
    let mut reached = vec![false; g.vertex_count()];
    reached[seed.root] = true;
    let mut queue = VecDeque::from([seed.root]);
    while let Some(u) = queue.pop_front() {
        for &e in &tree_at[u] {
            let w = g.head(e);
            if reached[w] {
                continue;
            }
            let xe = labels[&e].clone();
            let be = base(&xe);
            for &f in g.star(u) {
                let target = conn.transport(e, f).ok_or_else(|| ExtensionError::NoIntegerSolution {
                    along: g.oriented_name(e),
                    edge: g.oriented_name(f),
                })?;
                let xf = &labels[&f];
                let value = if f == e {
                    xf.neg()
                } else {
                    let bf = base(xf);
                    let alpha = g.label(target);
                    let candidates: Vec<LabelVector> = match g.mode() {
                        LabelMode::Signed => vec![alpha],
                        LabelMode::Unsigned => vec![alpha.clone(), alpha.neg()],
                    };
                    let c = candidates
                        .iter()
                        .find_map(|t| t.sub(&bf).ratio(&be))
                        .ok_or_else(|| ExtensionError::NoIntegerSolution {
                            along: g.oriented_name(e),
                            edge: g.oriented_name(f),
                        })?;
                    xf.add_scaled(&c, &xe)
                };
                labels.insert(target, value);
            }
            reached[w] = true;
            queue.push_back(w);
        }
    }
    if let Some(v) = reached.iter().position(|r| !r) {
        return Err(ExtensionError::HypothesisFailed(format!(
            "tree does not reach vertex {}",
            g.vertex_name(v)
        )));
    }
    Ok(labels)
}

#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub graph: GkmGraph,
    pub decomposition: TreeDecomposition,
    pub seed: ExtensionSeed,
}

/// Runs the full extension: hypotheses, tree decomposition, seed at the
/// least vertex, propagation, and verification of every off-tree edge.
pub fn extend_to_torus_labeling(g: &GkmGraph) -> Result<ExtensionResult, ExtensionError> {
    g.connection().ok_or(ExtensionError::NoConnection)?;
    let report = check_ext_hypotheses(g);
    if !report.passed() {
        return Err(ExtensionError::HypothesisFailed(report.to_string()));
    }
    let decomp = lemma_tree_decomposition(g)?;
    let root = 0;
    let seed = seed_extension(g, root)?;
    let labels = propagate_over_tree(g, &seed, &decomp)?;
    let graph = assemble(g, &labels, &decomp)?;

    for &idx in &decomp.off_tree {
        for e in [OrientedEdge::forward(idx), OrientedEdge::forward(idx).bar()] {
            for &f in graph.star(graph.tail(e)) {
                if let Err(err) = crate::graph::congruence_constant(&graph, e, f) {
                    return Err(ExtensionError::ClosureViolation {
                        edge: g.edge(idx).id.clone(),
                        detail: format!("pair ({}, {}): {err}", g.oriented_name(e), g.oriented_name(f)),
                    });
                }
            }
        }
    }
    let findings = validate(&graph);
    if !findings.is_empty() {
        let first = &findings.findings[0];
        return Err(ExtensionError::InvalidResult(format!(
            "{} at {}: {}",
            first.rule, first.location, first.message
        )));
    }
    if !is_effective(&graph) {
        return Err(ExtensionError::InvalidResult("extended labeling is not effective".into()));
    }
    Ok(ExtensionResult {
        graph,
        decomposition: decomp,
        seed,
    })
}

/// Builds the `Z^n`-labeled graph, checking that both ends of every edge
/// agree on its label.
fn assemble(g: &GkmGraph, labels: &ExtendedLabels, decomp: &TreeDecomposition) -> Result<GkmGraph, ExtensionError> {
    let n = g.valence();
    let off: std::collections::BTreeSet<usize> = decomp.off_tree.iter().copied().collect();
    let mut edges = Vec::with_capacity(g.edge_count());
    for (idx, e) in g.edges().iter().enumerate() {
        let fwd = &labels[&OrientedEdge::forward(idx)];
        let bwd = &labels[&OrientedEdge::forward(idx).bar()];
        let agree = match g.mode() {
            LabelMode::Signed => *bwd == fwd.neg(),
            LabelMode::Unsigned => fwd.canonical() == bwd.canonical(),
        };
        if !agree {
            let detail = format!("labels {fwd} at {} and {bwd} at {} disagree", g.vertex_name(e.ends[0]), g.vertex_name(e.ends[1]));
            return Err(if off.contains(&idx) {
                ExtensionError::ClosureViolation { edge: e.id.clone(), detail }
            } else {
                ExtensionError::InvalidResult(detail)
            });
        }
        edges.push(Edge {
            id: e.id.clone(),
            ends: e.ends,
            label: fwd.clone(),
        });
    }
    GkmGraph::new(
        g.mode(),
        n,
        g.vertex_names().to_vec(),
        edges,
        g.connection().cloned(),
    )
    .map_err(|e| ExtensionError::InvalidResult(e.to_string()))
}

/// The first `k` coordinates of every label.
pub fn project_labels(g: &GkmGraph, k: usize) -> Vec<LabelVector> {
    g.edges()
        .iter()
        .map(|e| {
            let v = LabelVector::new(e.label.coords()[..k].to_vec());
            match g.mode() {
                LabelMode::Signed => v,
                LabelMode::Unsigned => v.canonical(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cpn_graph, restrict, s2_power_graph};
    use crate::graph::are_isomorphic;
    use crate::lattice::{Int, IntMatrix};
    use num_traits::{One, Signed};

    fn round_trip(g: &GkmGraph, p: &[[i64; 3]; 2]) -> ExtensionResult {
        let r = restrict(g, &IntMatrix::from_i64_rows(p)).unwrap();
        assert!(check_ext_hypotheses(&r).passed(), "{}", check_ext_hypotheses(&r));
        let res = extend_to_torus_labeling(&r).unwrap();
        assert!(validate(&res.graph).is_empty());
        assert!(is_effective(&res.graph));
        let originals: Vec<LabelVector> = r.edges().iter().map(|e| e.label.clone()).collect();
        assert_eq!(project_labels(&res.graph, 2), originals);
        res
    }

    #[test]
    fn cp3_round_trip_is_isomorphic() {
        let g = cpn_graph(3);
        for p in [[[1, 0, 1], [0, 1, 2]], [[1, 0, 2], [0, 1, 1]], [[1, 0, 1], [0, 1, 3]]] {
            let res = round_trip(&g, &p);
            assert!(are_isomorphic(&res.graph, &g).unwrap());
        }
    }

    #[test]
    fn cube_round_trip() {
        let g = s2_power_graph(3);
        for p in [[[1, 0, 1], [0, 1, 1]], [[1, 0, 1], [0, 1, -1]], [[1, 0, 2], [0, 1, 1]]] {
            let res = round_trip(&g, &p);
            assert!(are_isomorphic(&res.graph, &g).unwrap());
        }
    }

    #[test]
    fn unsigned_round_trip() {
        let g = cpn_graph(3).to_unsigned();
        let r = restrict(&g, &IntMatrix::from_i64_rows(&[[1, 0, 1], [0, 1, 2]])).unwrap();
        let res = extend_to_torus_labeling(&r).unwrap();
        assert!(validate(&res.graph).is_empty());
        assert!(is_effective(&res.graph));
        let originals: Vec<LabelVector> = r.edges().iter().map(|e| e.label.clone()).collect();
        assert_eq!(project_labels(&res.graph, 2), originals);
        assert!(are_isomorphic(&res.graph, &g).unwrap());
    }

    #[test]
    fn torus_graph_extends_trivially() {
        let g = cpn_graph(3);
        let res = extend_to_torus_labeling(&g).unwrap();
        assert_eq!(res.graph.rank(), 3);
        let originals: Vec<LabelVector> = g.edges().iter().map(|e| e.label.clone()).collect();
        assert_eq!(project_labels(&res.graph, 3), originals);
    }

    #[test]
    fn seed_is_unimodular() {
        let r = restrict(&cpn_graph(3), &IntMatrix::from_i64_rows(&[[1, 0, 1], [0, 1, 2]])).unwrap();
        let seed = seed_extension(&r, 0).unwrap();
        let rows: Vec<Vec<Int>> = seed.labels.iter().map(|(_, l)| l.coords().to_vec()).collect();
        assert!(IntMatrix::from_rows(rows, 3).determinant().abs().is_one());
    }

    #[test]
    fn seed_rejects_ineffective() {
        let g = s2_power_graph(2).relabel(&IntMatrix::from_i64_rows(&[[2, 0], [0, 1]])).unwrap();
        assert!(matches!(seed_extension(&g, 0), Err(ExtensionError::NotCompletable { .. })));
    }

    #[test]
    fn cp2_fails_independence() {
        let report = check_ext_hypotheses(&cpn_graph(2));
        assert!(!report.checks[0].passed);
        assert!(matches!(
            extend_to_torus_labeling(&cpn_graph(2)),
            Err(ExtensionError::HypothesisFailed(_))
        ));
    }
}
