use std::collections::BTreeSet;
use std::fmt;

use super::connection::solve_congruence;
use super::{find_connection, subsets, GkmGraph, OrientedEdge};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::lattice::{echelon_rank, Int};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

/// Which rule a finding refers to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Any two labels at a vertex are linearly independent.
    PairwiseIndependence,
    /// `nabla_e` is a bijection between the two stars.
    ConnectionBijection,
    /// `nabla_e e = bar e`
    Axiom1,
    /// `nabla_{bar e} = (nabla_e)^{-1}`
    Axiom2,
    /// `alpha(nabla_e f) -+ alpha(f) = c alpha(e)`
    Axiom3,
    /// No connection given and none exists.
    NoCompatibleConnection,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::PairwiseIndependence => "pairwise-independence",
            Rule::ConnectionBijection => "connection-bijection",
            Rule::Axiom1 => "axiom-1",
            Rule::Axiom2 => "axiom-2",
            Rule::Axiom3 => "axiom-3",
            Rule::NoCompatibleConnection => "no-compatible-connection",
        }
    }

    /// The condition itself, in the usual notation.
    pub fn statement(self) -> &'static str {
        match self {
            Rule::PairwiseIndependence => "labels at each vertex pairwise independent",
            Rule::ConnectionBijection => "∇_e: E_i(e) → E_t(e) bijective",
            Rule::Axiom1 => "∇_e e=ē",
            Rule::Axiom2 => "∇_ē=(∇_e)⁻¹",
            Rule::Axiom3 => "α(∇_e f) ∓ α(f) ∈ Z·α(e)",
            Rule::NoCompatibleConnection => "a compatible connection exists",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    Graph,
    Vertex(String),
    Edge(String),
    /// An oriented edge `e` and an edge `f` at its initial vertex.
    Pair(String, String),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Graph => write!(f, "graph"),
            Location::Vertex(v) => write!(f, "vertex {v}"),
            Location::Edge(e) => write!(f, "edge {e}"),
            Location::Pair(e, g) => write!(f, "pair {e} {g}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub location: Location,
    pub rule: Rule,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn rules(&self) -> BTreeSet<Rule> {
        self.findings.iter().map(|f| f.rule).collect()
    }

    fn push(&mut self, rule: Rule, location: Location, message: String) {
        self.findings.push(Finding {
            severity: Severity::Error,
            location,
            rule,
            message,
        });
    }
}

/// Checks pairwise independence of labels and, when a connection is present,
/// the three connection axioms. A graph without a connection is valid iff a
/// compatible connection exists.
pub fn validate(g: &GkmGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    for v in 0..g.vertex_count() {
        let star = g.star(v);
        for pair in subsets(star.len(), 2) {
            let (e, f) = (star[pair[0]], star[pair[1]]);
            let rows: Vec<Vec<Int>> = vec![g.label(e).into_coords(), g.label(f).into_coords()];
            if echelon_rank(rows, g.rank()) < 2 {
                report.push(
                    Rule::PairwiseIndependence,
                    Location::Vertex(g.vertex_name(v).to_string()),
                    format!(
                        "labels of {} and {} are linearly dependent",
                        g.oriented_name(e),
                        g.oriented_name(f)
                    ),
                );
            }
        }
    }

    let Some(conn) = g.connection() else {
        if find_connection(g).is_none() {
            report.push(
                Rule::NoCompatibleConnection,
                Location::Graph,
                "no compatible connection exists for this labeling".into(),
            );
        }
        return report;
    };

    let mut bijective = vec![true; 2 * g.edge_count()];
    let slot = |e: OrientedEdge| 2 * e.edge + usize::from(e.dir != super::Direction::Forward);
    for idx in 0..g.edge_count() {
        for e in [OrientedEdge::forward(idx), OrientedEdge::forward(idx).bar()] {
            let source: BTreeSet<OrientedEdge> = g.star(g.tail(e)).iter().copied().collect();
            let target: BTreeSet<OrientedEdge> = g.star(g.head(e)).iter().copied().collect();
            let ok = conn.map_along(e).is_some_and(|m| {
                m.keys().copied().collect::<BTreeSet<_>>() == source
                    && m.values().copied().collect::<BTreeSet<_>>() == target
            });
            if !ok {
                bijective[slot(e)] = false;
                report.push(
                    Rule::ConnectionBijection,
                    Location::Edge(g.oriented_name(e)),
                    format!(
                        "transport along {} is not a bijection from the star of {} to the star of {}",
                        g.oriented_name(e),
                        g.vertex_name(g.tail(e)),
                        g.vertex_name(g.head(e))
                    ),
                );
            }
        }
    }

    // Each oriented edge is judged by the first structural rule it breaks;
    // later rules are not evaluated for it, so a finding names the root cause.
    let mut sound = bijective.clone();
    for idx in 0..g.edge_count() {
        for e in [OrientedEdge::forward(idx), OrientedEdge::forward(idx).bar()] {
            if !sound[slot(e)] {
                continue;
            }
            let image = conn.transport(e, e).expect("bijection checked");
            if image != e.bar() {
                sound[slot(e)] = false;
                report.push(
                    Rule::Axiom1,
                    Location::Edge(g.oriented_name(e)),
                    format!(
                        "axiom 1 (∇_e e=ē) fails: transport of {} along itself gives {}",
                        g.oriented_name(e),
                        g.oriented_name(image)
                    ),
                );
            }
        }
    }

    for idx in 0..g.edge_count() {
        let e = OrientedEdge::forward(idx);
        if !sound[slot(e)] || !sound[slot(e.bar())] {
            continue;
        }
        let broken = g.star(g.tail(e)).iter().find(|&&f| {
            let there = conn.transport(e, f).expect("bijection checked");
            conn.transport(e.bar(), there) != Some(f)
        });
        if let Some(&f) = broken {
            sound[slot(e)] = false;
            sound[slot(e.bar())] = false;
            report.push(
                Rule::Axiom2,
                Location::Edge(g.edge(idx).id.clone()),
                format!(
                    "axiom 2 (∇_ē=(∇_e)⁻¹) fails for {} along {}",
                    g.oriented_name(f),
                    g.oriented_name(e)
                ),
            );
        }
    }

    for idx in 0..g.edge_count() {
        for e in [OrientedEdge::forward(idx), OrientedEdge::forward(idx).bar()] {
            if !sound[slot(e)] {
                continue;
            }
            for &f in g.star(g.tail(e)) {
                let target = conn.transport(e, f).expect("bijection checked");
                if solve_congruence(g, e, f, target).is_none() {
                    let op = match g.mode() {
                        super::LabelMode::Signed => "-",
                        super::LabelMode::Unsigned => "+-",
                    };
                    let detail = match rational_multiple(g, e, f, target) {
                        Some((p, q)) => format!("is {p}/{q} times alpha({}), not an integer multiple", g.oriented_name(e)),
                        None => format!("is not an integer multiple of alpha({})", g.oriented_name(e)),
                    };
                    report.push(
                        Rule::Axiom3,
                        Location::Pair(g.oriented_name(e), g.oriented_name(f)),
                        format!(
                            "axiom 3 fails: alpha({}) {op} alpha({}) {detail}",
                            g.oriented_name(target),
                            g.oriented_name(f),
                        ),
                    );
                }
            }
        }
    }
    report
}

/// For a failed congruence, a non-integral `p/q` with
/// `alpha(target) -+ alpha(f) = (p/q) alpha(e)`, if one exists.
fn rational_multiple(g: &GkmGraph, e: OrientedEdge, f: OrientedEdge, target: OrientedEdge) -> Option<(Int, Int)> {
    let a = g.label(e);
    let i = a.coords().iter().position(|x| !x.is_zero())?;
    let signs: &[i64] = match g.mode() {
        super::LabelMode::Signed => &[-1],
        super::LabelMode::Unsigned => &[-1, 1],
    };
    signs.iter().find_map(|&s| {
        let diff = g.label(target).add_scaled(&Int::from(s), &g.label(f));
        let (p, q) = (diff.coords()[i].clone(), a.coords()[i].clone());
        let parallel = diff.coords().iter().zip(a.coords()).all(|(d, x)| d * &q == x * &p);
        if !parallel || p.is_zero() {
            return None;
        }
        let gcd = p.gcd(&q);
        let (mut p, mut q) = (p / &gcd, q / &gcd);
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        Some((p, q))
    })
}
