//! Standard GKM graphs, restriction of labels to a subtorus, and the text
//! file format.

mod format;

use thiserror::Error;

use crate::graph::{
    Connection, Direction, Edge, GkmGraph, GraphError, LabelMode, LabelVector, OrientedEdge,
};
use crate::lattice::{echelon_rank, Int, IntMatrix};

pub use format::{parse_graph, parse_graph_components, serialize_graph, FormatError, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("restricted labels of {first} and {second} at vertex {vertex} are linearly dependent")]
    IndependenceLost {
        vertex: String,
        first: String,
        second: String,
    },
    #[error("projection has {found} columns but the graph has rank {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The standard GKM graph of `CP^n`: the complete graph on `0..=n` with
/// `alpha(i -> j) = eps_j - eps_i` (`eps_0 = 0`).
pub fn cpn_graph(n: usize) -> GkmGraph {
    assert!(n >= 1, "CP^n needs n >= 1");
    let eps = |i: usize| -> Vec<Int> {
        let mut v = vec![Int::from(0); n];
        if i > 0 {
            v[i - 1] = Int::from(1);
        }
        v
    };
    let vertices: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    let mut index = std::collections::HashMap::new();
    for i in 0..=n {
        for j in i + 1..=n {
            index.insert((i, j), edges.len());
            let label = LabelVector::new(eps(j)).sub(&LabelVector::new(eps(i)));
            edges.push(Edge {
                id: format!("e{i}_{j}"),
                ends: [i, j],
                label,
            });
        }
    }
    let oriented = |a: usize, b: usize| {
        let dir = if a < b { Direction::Forward } else { Direction::Backward };
        OrientedEdge::new(index[&(a.min(b), a.max(b))], dir)
    };
    let mut conn = Connection::new();
    for i in 0..=n {
        for j in (0..=n).filter(|&j| j != i) {
            let along = oriented(i, j);
            conn.set(along, along, along.bar());
            for l in (0..=n).filter(|&l| l != i && l != j) {
                conn.set(along, oriented(i, l), oriented(j, l));
            }
        }
    }
    GkmGraph::new(LabelMode::Signed, n, vertices, edges, Some(conn))
        .expect("catalog graph satisfies load invariants")
}

/// The GKM graph of `(S^2)^n`: the `n`-cube on `{+1, -1}^n`. Vertex `m` has
/// coordinate `i` negative iff bit `i` of `m` is set; the edge flipping
/// coordinate `i` runs from the vertex with the bit clear and carries `eps_i`.
pub fn s2_power_graph(n: usize) -> GkmGraph {
    assert!(n >= 1, "(S^2)^n needs n >= 1");
    let count = 1usize << n;
    let name = |m: usize| -> String {
        (0..n).map(|i| if m >> i & 1 == 1 { '-' } else { '+' }).collect()
    };
    let vertices: Vec<String> = (0..count).map(name).collect();
    let mut edges = Vec::new();
    let mut index = vec![vec![usize::MAX; n]; count];
    for m in 0..count {
        for i in 0..n {
            if m >> i & 1 == 1 {
                continue;
            }
            let mut label = vec![Int::from(0); n];
            label[i] = Int::from(1);
            index[m][i] = edges.len();
            index[m | 1 << i][i] = edges.len();
            edges.push(Edge {
                id: format!("c{i}_{}", name(m)),
                ends: [m, m | 1 << i],
                label: LabelVector::new(label),
            });
        }
    }
    let oriented = |m: usize, i: usize| {
        let dir = if m >> i & 1 == 0 { Direction::Forward } else { Direction::Backward };
        OrientedEdge::new(index[m][i], dir)
    };
    let mut conn = Connection::new();
    for m in 0..count {
        for i in 0..n {
            let along = oriented(m, i);
            let w = m ^ 1 << i;
            for j in 0..n {
                conn.set(along, oriented(m, j), oriented(w, j));
            }
        }
    }
    GkmGraph::new(LabelMode::Signed, n, vertices, edges, Some(conn))
        .expect("catalog graph satisfies load invariants")
}

/// Applies the projection `p` (k x n) to every label, keeping the connection.
pub fn restrict(g: &GkmGraph, p: &IntMatrix) -> Result<GkmGraph, CatalogError> {
    if p.cols() != g.rank() {
        return Err(CatalogError::RankMismatch {
            expected: g.rank(),
            found: p.cols(),
        });
    }
    let k = p.rows();
    for v in 0..g.vertex_count() {
        let star = g.star(v);
        for (a, &e) in star.iter().enumerate() {
            let le = g.label(e).transform(p);
            if le.is_zero() {
                return Err(lost(g, v, e, e));
            }
            for &f in &star[a + 1..] {
                let lf = g.label(f).transform(p);
                if echelon_rank(vec![le.coords().to_vec(), lf.into_coords()], k) < 2 {
                    return Err(lost(g, v, e, f));
                }
            }
        }
    }
    Ok(g.relabel(p)?)
}

fn lost(g: &GkmGraph, v: usize, e: OrientedEdge, f: OrientedEdge) -> CatalogError {
    CatalogError::IndependenceLost {
        vertex: g.vertex_name(v).to_string(),
        first: g.oriented_name(e),
        second: g.oriented_name(f),
    }
}

/// Two-sheeted cover of `g`: edges listed in `twisted` swap sheets. Labels
/// and the connection are lifted.
pub fn double_cover(g: &GkmGraph, twisted: &[&str]) -> Result<GkmGraph, GraphError> {
    let nv = g.vertex_count();
    let ne = g.edge_count();
    let twist: Vec<usize> = (0..ne)
        .map(|i| usize::from(twisted.contains(&g.edge(i).id.as_str())))
        .collect();
    let vertices: Vec<String> = (0..2)
        .flat_map(|s| g.vertex_names().iter().map(move |v| format!("{v}.{s}")))
        .collect();
    let mut edges = Vec::new();
    for s in 0..2 {
        for (i, e) in g.edges().iter().enumerate() {
            edges.push(Edge {
                id: format!("{}.{s}", e.id),
                ends: [e.ends[0] + s * nv, e.ends[1] + (s ^ twist[i]) * nv],
                label: e.label.clone(),
            });
        }
    }
    // the lift of oriented edge `oe` starting on sheet `s`
    let lift = |oe: OrientedEdge, s: usize| -> OrientedEdge {
        let forward_sheet = match oe.dir {
            Direction::Forward => s,
            Direction::Backward => s ^ twist[oe.edge],
        };
        OrientedEdge::new(oe.edge + forward_sheet * ne, oe.dir)
    };
    let connection = g.connection().map(|conn| {
        let mut lifted = Connection::new();
        for (along, from, to) in conn.entries() {
            for s in 0..2 {
                let t = s ^ twist[along.edge];
                lifted.set(lift(along, s), lift(from, s), lift(to, t));
            }
        }
        lifted
    });
    GkmGraph::new(g.mode(), g.rank(), vertices, edges, connection)
}
