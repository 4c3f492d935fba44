//! The GKM graph data model: oriented edges with the bar involution, signed
//! or unsigned labelings, optional compatible connection, and the axiom
//! checks that go with them.

mod connection;
mod iso;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::lattice::{echelon_rank, exact_ratio, is_faithful_weight_matrix, Int, IntMatrix};

pub use connection::{congruence_constant, find_connection, Congruence};
pub use iso::{are_isomorphic, are_isomorphic_bounded, DEFAULT_MAX_VERTICES};
pub use validate::{validate, Finding, Location, Rule, Severity, ValidationReport};

pub type VertexId = usize;
pub type EdgeIdx = usize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Direction::Forward => '+',
            Direction::Backward => '-',
        }
    }
}

/// An edge together with a choice of orientation. `Forward` runs from the
/// first listed endpoint to the second.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedEdge {
    pub edge: EdgeIdx,
    pub dir: Direction,
}

impl OrientedEdge {
    pub fn new(edge: EdgeIdx, dir: Direction) -> Self {
        OrientedEdge { edge, dir }
    }

    pub fn forward(edge: EdgeIdx) -> Self {
        OrientedEdge::new(edge, Direction::Forward)
    }

    pub fn bar(self) -> Self {
        OrientedEdge::new(self.edge, self.dir.flip())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum LabelMode {
    /// Labels in `Z^k` with `alpha(bar e) = -alpha(e)`.
    Signed,
    /// Labels in `Z^k / +-1`, stored with first nonzero coordinate positive.
    Unsigned,
}

impl LabelMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelMode::Signed => "signed",
            LabelMode::Unsigned => "unsigned",
        }
    }
}

/// A weight vector in `Z^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelVector(Vec<Int>);

impl LabelVector {
    pub fn new(coords: Vec<Int>) -> Self {
        LabelVector(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LabelVector(coords.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn coords(&self) -> &[Int] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Int> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn neg(&self) -> Self {
        LabelVector(self.0.iter().map(|x| -x).collect())
    }

    /// Representative with first nonzero coordinate positive.
    pub fn canonical(&self) -> Self {
        match self.0.iter().find(|x| !x.is_zero()) {
            Some(x) if x.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.0.iter().find(|x| !x.is_zero()).is_none_or(|x| x.is_positive())
    }

    pub fn sub(&self, other: &LabelVector) -> LabelVector {
        LabelVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &LabelVector) -> LabelVector {
        LabelVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: &Int) -> LabelVector {
        LabelVector(self.0.iter().map(|a| a * c).collect())
    }

    /// `self + c * other`
    pub fn add_scaled(&self, c: &Int, other: &LabelVector) -> LabelVector {
        LabelVector(self.0.iter().zip(&other.0).map(|(a, b)| a + c * b).collect())
    }

    /// `c` with `self = c * other`.
    pub fn ratio(&self, other: &LabelVector) -> Option<Int> {
        exact_ratio(&self.0, &other.0).ok().flatten()
    }

    /// Applies the integer matrix `m` (rows x len) to this vector.
    pub fn transform(&self, m: &IntMatrix) -> LabelVector {
        LabelVector(m.mul_vec(&self.0))
    }
}

impl fmt::Display for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: [VertexId; 2],
    /// Label of the forward orientation (canonical in unsigned mode).
    pub label: LabelVector,
}

/// Per oriented edge `e`, the bijection `nabla_e` from the edges leaving
/// `i(e)` to the edges leaving `t(e)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Connection {
    table: BTreeMap<OrientedEdge, BTreeMap<OrientedEdge, OrientedEdge>>,
}

impl Connection {
    pub fn new() -> Self {
        Connection::default()
    }

    pub fn set(&mut self, along: OrientedEdge, from: OrientedEdge, to: OrientedEdge) {
        self.table.entry(along).or_default().insert(from, to);
    }

    /// `nabla_along(f)`, if defined.
    pub fn transport(&self, along: OrientedEdge, f: OrientedEdge) -> Option<OrientedEdge> {
        self.table.get(&along)?.get(&f).copied()
    }

    pub fn map_along(&self, along: OrientedEdge) -> Option<&BTreeMap<OrientedEdge, OrientedEdge>> {
        self.table.get(&along)
    }

    /// All `(along, from, to)` entries in a fixed order.
    pub fn entries(&self) -> impl Iterator<Item = (OrientedEdge, OrientedEdge, OrientedEdge)> + '_ {
        self.table
            .iter()
            .flat_map(|(&e, m)| m.iter().map(move |(&f, &g)| (e, f, g)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invariant `{rule}` violated at {location}")]
    InvariantViolation { rule: &'static str, location: String },
    #[error("the graph carries no connection")]
    NoConnection,
    #[error("no integer c solves the congruence along {along} for {edge}")]
    NoIntegerSolution { along: String, edge: String },
    #[error("edge {edge} does not start at the initial vertex of {along}")]
    NotAtVertex { along: String, edge: String },
    #[error("isomorphism search limited to {limit} vertices, graph has {found}")]
    BoundExceeded { limit: usize, found: usize },
}

/// An abstract GKM graph `(Gamma, alpha)` with optional connection.
///
/// Construction enforces the load-time invariants: uniform valence, no loops,
/// nonzero labels of the declared rank, and connectivity. Axioms that involve
/// the connection are checked by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkmGraph {
    mode: LabelMode,
    rank: usize,
    valence: usize,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    stars: Vec<Vec<OrientedEdge>>,
    connection: Option<Connection>,
}

impl GkmGraph {
    pub fn new(
        mode: LabelMode,
        rank: usize,
        vertices: Vec<String>,
        edges: Vec<Edge>,
        connection: Option<Connection>,
    ) -> Result<Self, GraphError> {
        let violation = |rule, location: String| GraphError::InvariantViolation { rule, location };
        let mut edges = edges;
        let mut stars: Vec<Vec<OrientedEdge>> = vec![Vec::new(); vertices.len()];
        for (idx, e) in edges.iter_mut().enumerate() {
            if e.ends.iter().any(|&v| v >= vertices.len()) {
                return Err(violation("known-vertex", format!("edge {}", e.id)));
            }
            if e.ends[0] == e.ends[1] {
                return Err(violation("no-loops", format!("edge {}", e.id)));
            }
            if e.label.len() != rank {
                return Err(violation("label-rank", format!("edge {}", e.id)));
            }
            if e.label.is_zero() {
                return Err(violation("label-nonzero", format!("edge {}", e.id)));
            }
            if mode == LabelMode::Unsigned {
                e.label = e.label.canonical();
            }
            stars[e.ends[0]].push(OrientedEdge::new(idx, Direction::Forward));
            stars[e.ends[1]].push(OrientedEdge::new(idx, Direction::Backward));
        }
        let mut ids: Vec<&str> = edges.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(violation("unique-edge-ids", format!("edge {}", w[0])));
        }
        let mut names: Vec<&str> = vertices.iter().map(String::as_str).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(violation("unique-vertex-ids", format!("vertex {}", w[0])));
        }
        if vertices.is_empty() {
            return Err(violation("connected", "empty vertex set".into()));
        }
        let valence = stars[0].len();
        if let Some(v) = stars.iter().position(|s| s.len() != valence) {
            return Err(violation(
                "n-valent",
                format!("vertex {} has {} edges, expected {}", vertices[v], stars[v].len(), valence),
            ));
        }
        for s in &mut stars {
            s.sort();
        }
        let g = GkmGraph {
            mode,
            rank,
            valence,
            vertices,
            edges,
            stars,
            connection,
        };
        if let Some(v) = g.unreachable_vertex() {
            return Err(violation("connected", format!("vertex {} is unreachable", g.vertices[v])));
        }
        Ok(g)
    }

    fn unreachable_vertex(&self) -> Option<VertexId> {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &oe in &self.stars[v] {
                let w = self.head(oe);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().position(|s| !s)
    }

    pub fn mode(&self) -> LabelMode {
        self.mode
    }

    /// Torus rank `k`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Valence `n`.
    pub fn valence(&self) -> usize {
        self.valence
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: EdgeIdx) -> &Edge {
        &self.edges[idx]
    }

    pub fn edge_by_id(&self, id: &str) -> Option<EdgeIdx> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Outgoing oriented edges at `v`, ordered by (edge index, direction).
    pub fn star(&self, v: VertexId) -> &[OrientedEdge] {
        &self.stars[v]
    }

    /// Initial vertex `i(e)`.
    pub fn tail(&self, e: OrientedEdge) -> VertexId {
        let ends = self.edges[e.edge].ends;
        match e.dir {
            Direction::Forward => ends[0],
            Direction::Backward => ends[1],
        }
    }

    /// Terminal vertex `t(e)`.
    pub fn head(&self, e: OrientedEdge) -> VertexId {
        self.tail(e.bar())
    }

    /// `alpha(e)`; negated for backward orientations in signed mode.
    pub fn label(&self, e: OrientedEdge) -> LabelVector {
        let l = &self.edges[e.edge].label;
        match (self.mode, e.dir) {
            (LabelMode::Signed, Direction::Backward) => l.neg(),
            _ => l.clone(),
        }
    }

    pub fn connection(&self) -> Option<&Connection> {
        self.connection.as_ref()
    }

    pub fn require_connection(&self) -> Result<&Connection, GraphError> {
        self.connection.as_ref().ok_or(GraphError::NoConnection)
    }

    /// `nabla_along(f)`; `None` without a connection or outside its table.
    pub fn transport(&self, along: OrientedEdge, f: OrientedEdge) -> Option<OrientedEdge> {
        self.connection.as_ref()?.transport(along, f)
    }

    pub fn with_connection(&self, connection: Option<Connection>) -> GkmGraph {
        GkmGraph {
            connection,
            ..self.clone()
        }
    }

    /// Same graph and connection with every forward label replaced.
    pub fn with_labels(
        &self,
        rank: usize,
        mut label: impl FnMut(EdgeIdx, &LabelVector) -> LabelVector,
    ) -> Result<GkmGraph, GraphError> {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| Edge {
                id: e.id.clone(),
                ends: e.ends,
                label: label(i, &e.label),
            })
            .collect();
        GkmGraph::new(self.mode, rank, self.vertices.clone(), edges, self.connection.clone())
    }

    /// Applies the integer matrix `m` (new_rank x rank) to every label.
    pub fn relabel(&self, m: &IntMatrix) -> Result<GkmGraph, GraphError> {
        assert_eq!(m.cols(), self.rank, "relabeling matrix has wrong width");
        self.with_labels(m.rows(), |_, l| l.transform(m))
    }

    /// Forgets the signs of a signed graph.
    pub fn to_unsigned(&self) -> GkmGraph {
        let mut g = self.clone();
        g.mode = LabelMode::Unsigned;
        for e in &mut g.edges {
            e.label = e.label.canonical();
        }
        g
    }

    /// The n x k matrix whose rows are the labels of the edges leaving `v`.
    pub fn weight_matrix(&self, v: VertexId) -> IntMatrix {
        let rows = self.stars[v].iter().map(|&e| self.label(e).into_coords()).collect();
        IntMatrix::from_rows(rows, self.rank)
    }

    /// Vertex-by-vertex matrix of labels on a subset of the star of `v`.
    pub fn weight_matrix_of(&self, edges: &[OrientedEdge]) -> IntMatrix {
        let rows = edges.iter().map(|&e| self.label(e).into_coords()).collect();
        IntMatrix::from_rows(rows, self.rank)
    }

    pub fn oriented_name(&self, e: OrientedEdge) -> String {
        format!("{}{}", self.edges[e.edge].id, e.dir.symbol())
    }

    /// Independence level and position class.
    pub fn independence(&self) -> Independence {
        independence_level(self)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PositionClass {
    /// `j = n = k`
    TorusGraph,
    /// `j = n - 1 = k`
    GeneralPosition,
    Other,
}

impl PositionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PositionClass::TorusGraph => "torus-graph",
            PositionClass::GeneralPosition => "general-position",
            PositionClass::Other => "none",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Independence {
    pub level: usize,
    pub class: PositionClass,
}

/// Largest `j <= n` such that any `j` labels at any vertex are linearly
/// independent over the rationals.
pub fn independence_level(g: &GkmGraph) -> Independence {
    let n = g.valence();
    let k = g.rank();
    let mut level = 0;
    for j in 1..=n.min(k) {
        let ok = (0..g.vertex_count()).all(|v| {
            let labels: Vec<Vec<Int>> = g.star(v).iter().map(|&e| g.label(e).into_coords()).collect();
            subsets(labels.len(), j)
                .iter()
                .all(|s| echelon_rank(s.iter().map(|&i| labels[i].clone()).collect(), k) == j)
        });
        if !ok {
            break;
        }
        level = j;
    }
    let class = if level == n && n == k {
        PositionClass::TorusGraph
    } else if level + 1 == n && level == k {
        PositionClass::GeneralPosition
    } else {
        PositionClass::Other
    };
    Independence { level, class }
}

/// All `j`-element subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, j: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, j: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == j {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < j - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, j, &mut Vec::new(), &mut out);
    out
}

/// Whether the representation `C^n(v)` is faithful.
pub fn per_vertex_faithful(g: &GkmGraph, v: VertexId) -> bool {
    is_faithful_weight_matrix(&g.weight_matrix(v))
}

/// Effective iff the vertex representation is faithful at every vertex.
pub fn is_effective(g: &GkmGraph) -> bool {
    (0..g.vertex_count()).all(|v| per_vertex_faithful(g, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cpn_graph, s2_power_graph};

    fn square(labels: [[i64; 2]; 2]) -> GkmGraph {
        // 4-cycle v0-v1-v2-v3 with alternating labels.
        let vs: Vec<String> = (0..4).map(|i| format!("v{i}")).collect();
        let edges = (0..4)
            .map(|i| Edge {
                id: format!("e{i}"),
                ends: [i, (i + 1) % 4],
                label: LabelVector::from_i64(&labels[i % 2]),
            })
            .collect();
        GkmGraph::new(LabelMode::Signed, 2, vs, edges, None).unwrap()
    }

    #[test]
    fn load_rejects_loops_and_valence() {
        let vs = vec!["a".to_string(), "b".to_string()];
        let loop_edge = vec![Edge { id: "x".into(), ends: [0, 0], label: LabelVector::from_i64(&[1]) }];
        assert!(matches!(
            GkmGraph::new(LabelMode::Signed, 1, vs.clone(), loop_edge, None),
            Err(GraphError::InvariantViolation { rule: "no-loops", .. })
        ));
        let vs3 = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let path = vec![
            Edge { id: "x".into(), ends: [0, 1], label: LabelVector::from_i64(&[1]) },
            Edge { id: "y".into(), ends: [1, 2], label: LabelVector::from_i64(&[1]) },
        ];
        assert!(matches!(
            GkmGraph::new(LabelMode::Signed, 1, vs3, path, None),
            Err(GraphError::InvariantViolation { rule: "n-valent", .. })
        ));
        let zero = vec![Edge { id: "x".into(), ends: [0, 1], label: LabelVector::from_i64(&[0]) }];
        assert!(matches!(
            GkmGraph::new(LabelMode::Signed, 1, vs, zero, None),
            Err(GraphError::InvariantViolation { rule: "label-nonzero", .. })
        ));
    }

    #[test]
    fn load_rejects_disconnected() {
        let vs: Vec<String> = (0..4).map(|i| format!("v{i}")).collect();
        let edges = vec![
            Edge { id: "a".into(), ends: [0, 1], label: LabelVector::from_i64(&[1]) },
            Edge { id: "b".into(), ends: [2, 3], label: LabelVector::from_i64(&[1]) },
        ];
        assert!(matches!(
            GkmGraph::new(LabelMode::Signed, 1, vs, edges, None),
            Err(GraphError::InvariantViolation { rule: "connected", .. })
        ));
    }

    #[test]
    fn bar_involution() {
        let g = cpn_graph(2);
        for v in 0..g.vertex_count() {
            for &e in g.star(v) {
                assert_eq!(e.bar().bar(), e);
                assert_eq!(g.tail(e.bar()), g.head(e));
                assert_eq!(g.head(e.bar()), g.tail(e));
                assert_ne!(g.tail(e), g.head(e));
                assert_eq!(g.label(e.bar()), g.label(e).neg());
            }
        }
    }

    #[test]
    fn independence_examples() {
        let cp3 = cpn_graph(3);
        assert_eq!(cp3.independence(), Independence { level: 3, class: PositionClass::TorusGraph });
        let sq = square([[1, 0], [0, 1]]);
        assert_eq!(sq.independence(), Independence { level: 2, class: PositionClass::TorusGraph });
        let p = IntMatrix::from_i64_rows(&[[1, 0, 1], [0, 1, 2]]);
        let r = cp3.relabel(&p).unwrap();
        assert_eq!(r.independence(), Independence { level: 2, class: PositionClass::GeneralPosition });
    }

    #[test]
    fn effectiveness_examples() {
        assert!(is_effective(&cpn_graph(2)));
        let bad = square([[2, 0], [0, 1]]);
        assert!(!is_effective(&bad));
        assert!((0..4).all(|v| !per_vertex_faithful(&bad, v)));
        let cube = s2_power_graph(3);
        assert!(is_effective(&cube));
        for v in 0..cube.vertex_count() {
            assert_eq!(num_traits::Signed::abs(&cube.weight_matrix(v).determinant()), Int::from(1));
        }
    }

    #[test]
    fn unsigned_labels_are_canonical() {
        let g = cpn_graph(2).to_unsigned();
        for e in g.edges() {
            assert!(e.label.is_canonical());
        }
        let e = OrientedEdge::forward(0);
        assert_eq!(g.label(e), g.label(e.bar()));
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }
}
