use num_traits::{One, Signed, Zero};

use super::{Direction, GkmGraph, GraphError, LabelMode, OrientedEdge, VertexId};
use crate::lattice::{kernel_lattice, solve_in_lattice, Int, IntMatrix};

/// Default cap on the vertex count accepted by [`are_isomorphic`].
pub const DEFAULT_MAX_VERTICES: usize = 12;

/// Whether there is a graph isomorphism `Psi` and `phi` in `GL(k, Z)` with
/// `phi(alpha(e)) = alpha'(Psi(e))` (up to sign for unsigned graphs).
///
/// Exhaustive backtracking over vertex bijections and parallel-edge
/// matchings, so only meant for small graphs.
pub fn are_isomorphic(g1: &GkmGraph, g2: &GkmGraph) -> Result<bool, GraphError> {
    are_isomorphic_bounded(g1, g2, DEFAULT_MAX_VERTICES)
}

pub fn are_isomorphic_bounded(
    g1: &GkmGraph,
    g2: &GkmGraph,
    max_vertices: usize,
) -> Result<bool, GraphError> {
    for g in [g1, g2] {
        if g.vertex_count() > max_vertices {
            return Err(GraphError::BoundExceeded {
                limit: max_vertices,
                found: g.vertex_count(),
            });
        }
    }
    if g1.mode() != g2.mode()
        || g1.rank() != g2.rank()
        || g1.valence() != g2.valence()
        || g1.vertex_count() != g2.vertex_count()
        || g1.edge_count() != g2.edge_count()
    {
        return Ok(false);
    }
    let search = Search {
        g1,
        g2,
        mult1: multiplicities(g1),
        mult2: multiplicities(g2),
    };
    let n = g1.vertex_count();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(search.vertices(0, &mut map, &mut used))
}

fn multiplicities(g: &GkmGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut m = vec![vec![0; n]; n];
    for e in g.edges() {
        m[e.ends[0]][e.ends[1]] += 1;
        m[e.ends[1]][e.ends[0]] += 1;
    }
    m
}

struct Search<'a> {
    g1: &'a GkmGraph,
    g2: &'a GkmGraph,
    mult1: Vec<Vec<usize>>,
    mult2: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn vertices(&self, v: VertexId, map: &mut [usize], used: &mut [bool]) -> bool {
        let n = map.len();
        if v == n {
            return self.edges(map);
        }
        for w in 0..n {
            if used[w] {
                continue;
            }
            let consistent = (0..v).all(|u| self.mult1[v][u] == self.mult2[w][map[u]]);
            if !consistent {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if self.vertices(v + 1, map, used) {
                return true;
            }
            used[w] = false;
        }
        map[v] = usize::MAX;
        false
    }

    /// Tries every matching of parallel edges under the vertex bijection.
    fn edges(&self, map: &[usize]) -> bool {
        // Group edges of g1 by unordered endpoint pair, with the candidate
        // images in g2 oriented to match.
        let mut groups: Vec<(Vec<OrientedEdge>, Vec<OrientedEdge>)> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (idx, e) in self.g1.edges().iter().enumerate() {
            let key = (e.ends[0].min(e.ends[1]), e.ends[0].max(e.ends[1]));
            if !seen.insert(key) {
                continue;
            }
            let src: Vec<OrientedEdge> = (idx..self.g1.edge_count())
                .filter(|&j| {
                    let f = &self.g1.edge(j).ends;
                    (f[0].min(f[1]), f[0].max(f[1])) == key
                })
                .map(|j| self.orient(self.g1, j, key.0))
                .collect();
            let (a, b) = (map[key.0], map[key.1]);
            let dst: Vec<OrientedEdge> = (0..self.g2.edge_count())
                .filter(|&j| {
                    let f = &self.g2.edge(j).ends;
                    (f[0] == a && f[1] == b) || (f[0] == b && f[1] == a)
                })
                .map(|j| self.orient(self.g2, j, a))
                .collect();
            groups.push((src, dst));
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        self.match_groups(&groups, 0, &mut xs, &mut ys)
    }

    /// The orientation of edge `j` that starts at `from`.
    fn orient(&self, g: &GkmGraph, j: usize, from: VertexId) -> OrientedEdge {
        if g.edge(j).ends[0] == from {
            OrientedEdge::new(j, Direction::Forward)
        } else {
            OrientedEdge::new(j, Direction::Backward)
        }
    }

    fn match_groups(
        &self,
        groups: &[(Vec<OrientedEdge>, Vec<OrientedEdge>)],
        gi: usize,
        xs: &mut Vec<Vec<Int>>,
        ys: &mut Vec<Vec<Int>>,
    ) -> bool {
        if gi == groups.len() {
            return labels_related(xs, ys, self.g1.rank(), self.g1.mode());
        }
        let (src, dst) = &groups[gi];
        let mut perm: Vec<usize> = (0..dst.len()).collect();
        loop {
            let base = xs.len();
            for (i, &s) in src.iter().enumerate() {
                xs.push(self.g1.label(s).into_coords());
                ys.push(self.g2.label(dst[perm[i]]).into_coords());
            }
            if self.match_groups(groups, gi + 1, xs, ys) {
                return true;
            }
            xs.truncate(base);
            ys.truncate(base);
            if !next_permutation(&mut perm) {
                return false;
            }
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Whether some `phi` in `GL(k, Z)` maps each `xs[i]` to `ys[i]` (or to
/// `+-ys[i]` in unsigned mode).
fn labels_related(xs: &[Vec<Int>], ys: &[Vec<Int>], k: usize, mode: LabelMode) -> bool {
    let x = IntMatrix::from_columns(xs, k);
    let y = IntMatrix::from_columns(ys, k);
    let basis = independent_columns(&x);
    let r = basis.len();
    let y_basis = IntMatrix::from_columns(&basis.iter().map(|&i| ys[i].clone()).collect::<Vec<_>>(), k);
    if y.rank() != r || y_basis.rank() != r {
        return false;
    }
    let sat_x = saturation(&x);
    let sat_y = saturation(&y);
    let x_basis = IntMatrix::from_columns(&basis.iter().map(|&i| xs[i].clone()).collect::<Vec<_>>(), k);
    // x_basis = sat_x * c, so phi(sat_x) = y_basis * c^{-1}.
    let c = solve_in_lattice(&sat_x, &x_basis).expect("columns lie in their saturation");
    let det = c.determinant();
    let adj = adjugate(&c);
    let x_coords = solve_in_lattice(&sat_x, &x).expect("columns lie in their saturation");
    let sign_choices: Vec<i64> = match mode {
        LabelMode::Signed => vec![0],
        LabelMode::Unsigned => (0..1i64 << r).collect(),
    };
    for mask in sign_choices {
        let mut yb = y_basis.clone();
        for j in 0..r {
            if mask >> j & 1 == 1 {
                yb.negate_col(j);
            }
        }
        let num = &yb * &adj;
        let Some(image) = divide_exact(&num, &det) else { continue };
        // phi(sat_x) must be a basis of sat_y
        let Ok(m) = solve_in_lattice(&sat_y, &image) else { continue };
        if !m.determinant().abs().is_one() {
            continue;
        }
        let mapped = &image * &x_coords;
        let ok = (0..xs.len()).all(|i| {
            let col = mapped.column(i);
            match mode {
                LabelMode::Signed => col == ys[i],
                LabelMode::Unsigned => {
                    col == ys[i] || col.iter().zip(&ys[i]).all(|(a, b)| *a == -b)
                }
            }
        });
        if ok {
            return true;
        }
    }
    false
}

/// Indices of a greedy maximal independent set of columns.
fn independent_columns(a: &IntMatrix) -> Vec<usize> {
    let mut chosen: Vec<Vec<Int>> = Vec::new();
    let mut idx = Vec::new();
    for j in 0..a.cols() {
        let mut trial = chosen.clone();
        trial.push(a.column(j));
        if IntMatrix::from_columns(&trial, a.rows()).rank() == trial.len() {
            chosen = trial;
            idx.push(j);
        }
    }
    idx
}

/// Basis of `(span of columns) ⊗ Q ∩ Z^rows`.
fn saturation(a: &IntMatrix) -> IntMatrix {
    let left = kernel_lattice(&a.transpose());
    if left.cols() == 0 {
        return IntMatrix::identity(a.rows());
    }
    kernel_lattice(&left.transpose())
}

fn adjugate(c: &IntMatrix) -> IntMatrix {
    let n = c.rows();
    let mut adj = IntMatrix::zeros(n, n);
    if n == 1 {
        adj[(0, 0)] = Int::one();
        return adj;
    }
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<Int>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&s| s != j).map(|s| c[(r, s)].clone()).collect())
                .collect();
            let d = IntMatrix::from_rows(minor, n - 1).determinant();
            adj[(j, i)] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    adj
}

fn divide_exact(m: &IntMatrix, d: &Int) -> Option<IntMatrix> {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let x = &m[(i, j)];
            if !(x % d).is_zero() {
                return None;
            }
            out[(i, j)] = x / d;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cpn_graph, s2_power_graph};
    use crate::graph::{Edge, LabelVector};

    #[test]
    fn self_isomorphic() {
        let g = cpn_graph(2);
        assert!(are_isomorphic(&g, &g).unwrap());
        let cube = s2_power_graph(3);
        assert!(are_isomorphic(&cube, &cube).unwrap());
    }

    #[test]
    fn unimodular_relabeling_is_recovered() {
        let g = cpn_graph(2);
        let phi = IntMatrix::from_i64_rows(&[[2, 1], [1, 1]]);
        let h = g.relabel(&phi).unwrap();
        assert!(are_isomorphic(&g, &h).unwrap());
        assert!(are_isomorphic(&g.to_unsigned(), &h.to_unsigned()).unwrap());
    }

    #[test]
    fn non_unimodular_relabeling_is_rejected() {
        let g = cpn_graph(2);
        let h = g.relabel(&IntMatrix::from_i64_rows(&[[2, 0], [0, 1]])).unwrap();
        assert!(!are_isomorphic(&g, &h).unwrap());
    }

    #[test]
    fn different_pattern_is_rejected() {
        let vs: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let edges = vec![
            Edge { id: "ab".into(), ends: [0, 1], label: LabelVector::from_i64(&[1, 0]) },
            Edge { id: "bc".into(), ends: [1, 2], label: LabelVector::from_i64(&[0, 1]) },
            Edge { id: "ca".into(), ends: [2, 0], label: LabelVector::from_i64(&[1, 1]) },
        ];
        let h = GkmGraph::new(LabelMode::Signed, 2, vs, edges, None).unwrap();
        assert!(!are_isomorphic(&cpn_graph(2), &h).unwrap());
    }

    #[test]
    fn bound_is_enforced() {
        let g = s2_power_graph(4);
        assert_eq!(
            are_isomorphic_bounded(&g, &g, 12),
            Err(GraphError::BoundExceeded { limit: 12, found: 16 })
        );
    }

    #[test]
    fn permutations_enumerate() {
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
