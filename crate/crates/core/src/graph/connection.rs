use super::{Connection, GkmGraph, GraphError, LabelMode, OrientedEdge};
use crate::lattice::Int;

/// The relation `alpha(target) + sigma * alpha(source) = c * alpha(along)`.
///
/// Signed graphs have `sigma = -1`, except for the self-transport
/// `nabla_e e = bar e`, which is recorded as `alpha(bar e) + alpha(e) = 0`.
/// For unsigned graphs `sigma = -1` is preferred when both signs work, which
/// only happens for `source = along`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    pub c: Int,
    pub sigma: i8,
}

/// Solves the compatibility relation between `source` at `i(along)` and
/// `target` at `t(along)`, if any integer solution exists.
pub(crate) fn solve_congruence(
    g: &GkmGraph,
    along: OrientedEdge,
    source: OrientedEdge,
    target: OrientedEdge,
) -> Option<Congruence> {
    if g.mode() == LabelMode::Signed && source == along && target == along.bar() {
        return Some(Congruence { c: Int::from(0), sigma: 1 });
    }
    let a = g.label(along);
    let f = g.label(source);
    let t = g.label(target);
    let signs: &[i8] = match g.mode() {
        LabelMode::Signed => &[-1],
        LabelMode::Unsigned => &[-1, 1],
    };
    signs.iter().find_map(|&sigma| {
        let lhs = if sigma < 0 { t.sub(&f) } else { t.add(&f) };
        lhs.ratio(&a).map(|c| Congruence { c, sigma })
    })
}

/// The constant of the congruence axiom for `f` transported along `e`.
pub fn congruence_constant(
    g: &GkmGraph,
    e: OrientedEdge,
    f: OrientedEdge,
) -> Result<Congruence, GraphError> {
    if g.tail(f) != g.tail(e) {
        return Err(GraphError::NotAtVertex {
            along: g.oriented_name(e),
            edge: g.oriented_name(f),
        });
    }
    let conn = g.require_connection()?;
    let no_solution = || GraphError::NoIntegerSolution {
        along: g.oriented_name(e),
        edge: g.oriented_name(f),
    };
    let target = conn.transport(e, f).ok_or_else(no_solution)?;
    solve_congruence(g, e, f, target).ok_or_else(no_solution)
}

/// Searches for a compatible connection.
///
/// The axioms only couple `nabla_e` with `nabla_{bar e}`, so each unoriented
/// edge is solved on its own: `nabla_e` for the forward orientation is the
/// lexicographically first bijection (sources in star order, targets tried in
/// star order) satisfying the congruence, and `nabla_{bar e}` is its inverse.
pub fn find_connection(g: &GkmGraph) -> Option<Connection> {
    let mut conn = Connection::new();
    for idx in 0..g.edge_count() {
        let e = OrientedEdge::forward(idx);
        let sources: Vec<OrientedEdge> = g.star(g.tail(e)).to_vec();
        let targets: Vec<OrientedEdge> = g.star(g.head(e)).to_vec();
        let allowed: Vec<Vec<bool>> = sources
            .iter()
            .map(|&f| {
                targets
                    .iter()
                    .map(|&t| {
                        if f == e || t == e.bar() {
                            f == e && t == e.bar()
                        } else {
                            solve_congruence(g, e, f, t).is_some()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut assignment = vec![usize::MAX; sources.len()];
        let mut used = vec![false; targets.len()];
        if !assign(0, &allowed, &mut assignment, &mut used) {
            return None;
        }
        for (si, &ti) in assignment.iter().enumerate() {
            conn.set(e, sources[si], targets[ti]);
            conn.set(e.bar(), targets[ti], sources[si]);
        }
    }
    Some(conn)
}

fn assign(i: usize, allowed: &[Vec<bool>], assignment: &mut [usize], used: &mut [bool]) -> bool {
    if i == allowed.len() {
        return true;
    }
    for j in 0..used.len() {
        if allowed[i][j] && !used[j] {
            used[j] = true;
            assignment[i] = j;
            if assign(i + 1, allowed, assignment, used) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::cpn_graph;
    use crate::graph::{validate, Edge, LabelVector};
    use num_traits::Zero;

    #[test]
    fn recovers_cp2_connection() {
        let g = cpn_graph(2);
        let stripped = g.with_connection(None);
        let found = find_connection(&stripped).expect("CP^2 admits a connection");
        let g2 = stripped.with_connection(Some(found));
        assert!(validate(&g2).is_empty());
    }

    #[test]
    fn cp1_connection_is_forced() {
        let g = cpn_graph(1).with_connection(None);
        let conn = find_connection(&g).unwrap();
        let e = OrientedEdge::forward(0);
        assert_eq!(conn.transport(e, e), Some(e.bar()));
        assert_eq!(conn.transport(e.bar(), e.bar()), Some(e));
        assert_eq!(conn.entries().count(), 2);
    }

    #[test]
    fn infeasible_instance_has_no_connection() {
        // Triangle with labels (1,0), (0,1), (1,2): the third edge breaks
        // every congruence along the first.
        let vs: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let edges = vec![
            Edge { id: "ab".into(), ends: [0, 1], label: LabelVector::from_i64(&[1, 0]) },
            Edge { id: "ac".into(), ends: [0, 2], label: LabelVector::from_i64(&[0, 1]) },
            Edge { id: "bc".into(), ends: [1, 2], label: LabelVector::from_i64(&[1, 2]) },
        ];
        let g = GkmGraph::new(LabelMode::Signed, 2, vs, edges, None).unwrap();
        assert!(find_connection(&g).is_none());
    }

    #[test]
    fn self_transport_constant() {
        let g = cpn_graph(2);
        let e = g.star(0)[0];
        let c = congruence_constant(&g, e, e).unwrap();
        // alpha(bar e) + alpha(e) = 0 alpha(e)
        assert_eq!(c, Congruence { c: Int::zero(), sigma: 1 });
        let u = g.to_unsigned();
        let c = congruence_constant(&u, e, e).unwrap();
        assert_eq!(c, Congruence { c: Int::zero(), sigma: -1 });
    }

    #[test]
    fn transverse_constants_match_exact_ratio() {
        let g = cpn_graph(2);
        for v in 0..3 {
            for &e in g.star(v) {
                for &f in g.star(v).iter().filter(|&&f| f != e) {
                    let c = congruence_constant(&g, e, f).unwrap();
                    let t = g.transport(e, f).unwrap();
                    let direct = g.label(t).sub(&g.label(f)).ratio(&g.label(e)).unwrap();
                    assert_eq!(c.c, direct);
                }
            }
        }
    }

    #[test]
    fn unsigned_square_constants_are_zero() {
        let vs: Vec<String> = (0..4).map(|i| format!("v{i}")).collect();
        let edges = (0..4)
            .map(|i| Edge {
                id: format!("e{i}"),
                ends: [i, (i + 1) % 4],
                label: LabelVector::from_i64(if i % 2 == 0 { &[1, 0] } else { &[0, 1] }),
            })
            .collect();
        let g = GkmGraph::new(LabelMode::Unsigned, 2, vs, edges, None).unwrap();
        let g = g.with_connection(find_connection(&g));
        assert!(validate(&g).is_empty());
        for v in 0..4 {
            let star = g.star(v);
            let (e, f) = (star[0], star[1]);
            let c = congruence_constant(&g, e, f).unwrap();
            assert!(c.c.is_zero());
            // the opposite sign choice fails for transverse pairs
            let t = g.transport(e, f).unwrap();
            assert!(g.label(t).add(&g.label(f)).ratio(&g.label(e)).is_none());
        }
    }

    #[test]
    fn missing_connection_is_reported() {
        let g = cpn_graph(2).with_connection(None);
        let e = g.star(0)[0];
        assert_eq!(congruence_constant(&g, e, e), Err(GraphError::NoConnection));
    }
}
