//! Line-oriented graph file format, version 1.
//!
//! ```text
//! # comment
//! VERSION 1
//! MODE signed|unsigned
//! RANK <k>
//! VALENCE <n>
//! VERTEX <name>
//! EDGE <id> <tail> <head> <c_1> ... <c_k>
//! CONN <along-id> <+|-> <from-id> <+|-> <to-id> <+|->
//! ```
//!
//! Header lines come first, in this order. `EDGE` labels belong to the
//! orientation from `<tail>` to `<head>`. `CONN` lines are optional; when
//! present they list the connection table entry by entry.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Connection, Direction, Edge, GkmGraph, GraphError, LabelMode, LabelVector, OrientedEdge};
use crate::lattice::Int;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invariant `{rule}` violated at {location}")]
    InvariantViolation { rule: &'static str, location: String },
}

impl From<GraphError> for FormatError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::InvariantViolation { rule, location } => {
                FormatError::InvariantViolation { rule, location }
            }
            other => FormatError::InvariantViolation {
                rule: "graph",
                location: other.to_string(),
            },
        }
    }
}

/// Parsed file contents before the connectivity requirement is applied.
struct RawGraph {
    mode: LabelMode,
    rank: usize,
    valence: usize,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    conn: Option<Vec<(OrientedEdge, OrientedEdge, OrientedEdge)>>,
}

pub fn parse_graph(text: &str) -> Result<GkmGraph, FormatError> {
    let raw = parse_raw(text)?;
    build(&raw, &(0..raw.vertices.len()).collect::<Vec<_>>())
}

/// Parses a file that may describe several connected components and returns
/// one graph per component, ordered by least vertex position in the file.
pub fn parse_graph_components(text: &str) -> Result<Vec<GkmGraph>, FormatError> {
    let raw = parse_raw(text)?;
    let n = raw.vertices.len();
    if n == 0 {
        return Err(FormatError::InvariantViolation {
            rule: "connected",
            location: "empty vertex set".into(),
        });
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in &raw.edges {
        let (a, b) = (find(&mut parent, e.ends[0]), find(&mut parent, e.ends[1]));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.values().map(|vs| build(&raw, vs)).collect()
}

fn parse_raw(text: &str) -> Result<RawGraph, FormatError> {
    let mut version = None;
    let mut mode = None;
    let mut rank = None;
    let mut valence = None;
    let mut vertices: Vec<String> = Vec::new();
    let mut vertex_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut conn: Vec<(OrientedEdge, OrientedEdge, OrientedEdge)> = Vec::new();
    let mut conn_keys = BTreeSet::new();

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| FormatError::Parse { line: line_no, message };
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let keyword = tokens[0];
        let args = &tokens[1..];
        let expect_headers = |needed: &[(&str, bool)]| -> Result<(), FormatError> {
            for (name, present) in needed {
                if !present {
                    return Err(err(format!("{keyword} before {name}")));
                }
            }
            Ok(())
        };
        let single = |what: &str| -> Result<&str, FormatError> {
            match args {
                [x] => Ok(*x),
                _ => Err(err(format!("{what} takes exactly one argument"))),
            }
        };
        match keyword {
            "VERSION" => {
                if version.is_some() || mode.is_some() || !vertices.is_empty() {
                    return Err(err("VERSION must appear once, first".into()));
                }
                let v: u32 = single("VERSION")?.parse().map_err(|_| err("bad version number".into()))?;
                if v != FORMAT_VERSION {
                    return Err(err(format!("unsupported version {v}")));
                }
                version = Some(v);
            }
            "MODE" => {
                expect_headers(&[("VERSION", version.is_some())])?;
                if mode.is_some() {
                    return Err(err("duplicate MODE".into()));
                }
                mode = Some(match single("MODE")? {
                    "signed" => LabelMode::Signed,
                    "unsigned" => LabelMode::Unsigned,
                    other => return Err(err(format!("unknown mode `{other}`"))),
                });
            }
            "RANK" => {
                expect_headers(&[("MODE", mode.is_some())])?;
                if rank.is_some() {
                    return Err(err("duplicate RANK".into()));
                }
                rank = Some(single("RANK")?.parse::<usize>().map_err(|_| err("bad rank".into()))?);
            }
            "VALENCE" => {
                expect_headers(&[("RANK", rank.is_some())])?;
                if valence.is_some() {
                    return Err(err("duplicate VALENCE".into()));
                }
                valence = Some(single("VALENCE")?.parse::<usize>().map_err(|_| err("bad valence".into()))?);
            }
            "VERTEX" => {
                expect_headers(&[("VALENCE", valence.is_some())])?;
                if !edges.is_empty() {
                    return Err(err("VERTEX after EDGE".into()));
                }
                let name = single("VERTEX")?;
                if vertex_index.insert(name.to_string(), vertices.len()).is_some() {
                    return Err(FormatError::InvariantViolation {
                        rule: "unique-vertex-ids",
                        location: format!("vertex {name}"),
                    });
                }
                vertices.push(name.to_string());
            }
            "EDGE" => {
                expect_headers(&[("VALENCE", valence.is_some())])?;
                if !conn.is_empty() {
                    return Err(err("EDGE after CONN".into()));
                }
                let k = rank.expect("header order checked");
                if args.len() != 3 + k {
                    return Err(err(format!("EDGE needs id, two endpoints and {k} coordinates")));
                }
                let id = args[0];
                let end = |name: &str| {
                    vertex_index
                        .get(name)
                        .copied()
                        .ok_or_else(|| FormatError::InvariantViolation {
                            rule: "known-vertex",
                            location: format!("edge {id} endpoint {name}"),
                        })
                };
                let ends = [end(args[1])?, end(args[2])?];
                let coords = args[3..]
                    .iter()
                    .map(|c| c.parse::<Int>().map_err(|_| err(format!("bad coordinate `{c}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if edge_index.insert(id.to_string(), edges.len()).is_some() {
                    return Err(FormatError::InvariantViolation {
                        rule: "unique-edge-ids",
                        location: format!("edge {id}"),
                    });
                }
                edges.push(Edge {
                    id: id.to_string(),
                    ends,
                    label: LabelVector::new(coords),
                });
            }
            "CONN" => {
                expect_headers(&[("VALENCE", valence.is_some())])?;
                if args.len() != 6 {
                    return Err(err("CONN needs three (edge, direction) pairs".into()));
                }
                let oriented = |id: &str, dir: &str| -> Result<OrientedEdge, FormatError> {
                    let edge = *edge_index.get(id).ok_or_else(|| err(format!("unknown edge `{id}`")))?;
                    let dir = match dir {
                        "+" => Direction::Forward,
                        "-" => Direction::Backward,
                        other => return Err(err(format!("bad direction `{other}`"))),
                    };
                    Ok(OrientedEdge::new(edge, dir))
                };
                let along = oriented(args[0], args[1])?;
                let from = oriented(args[2], args[3])?;
                let to = oriented(args[4], args[5])?;
                if !conn_keys.insert((along, from)) {
                    return Err(err("duplicate CONN entry".into()));
                }
                conn.push((along, from, to));
            }
            other => return Err(err(format!("unknown keyword `{other}`"))),
        }
    }
    let missing = |what: &str| FormatError::Parse {
        line: 0,
        message: format!("missing {what} header"),
    };
    version.ok_or_else(|| missing("VERSION"))?;
    Ok(RawGraph {
        mode: mode.ok_or_else(|| missing("MODE"))?,
        rank: rank.ok_or_else(|| missing("RANK"))?,
        valence: valence.ok_or_else(|| missing("VALENCE"))?,
        vertices,
        edges,
        conn: (!conn_keys.is_empty()).then_some(conn),
    })
}

/// Builds the graph induced on `keep` (a union of components).
fn build(raw: &RawGraph, keep: &[usize]) -> Result<GkmGraph, FormatError> {
    let mut new_vertex = vec![usize::MAX; raw.vertices.len()];
    for (i, &v) in keep.iter().enumerate() {
        new_vertex[v] = i;
    }
    let mut new_edge = vec![usize::MAX; raw.edges.len()];
    let mut edges = Vec::new();
    for (i, e) in raw.edges.iter().enumerate() {
        if new_vertex[e.ends[0]] == usize::MAX {
            continue;
        }
        new_edge[i] = edges.len();
        edges.push(Edge {
            id: e.id.clone(),
            ends: [new_vertex[e.ends[0]], new_vertex[e.ends[1]]],
            label: e.label.clone(),
        });
    }
    let vertices = keep.iter().map(|&v| raw.vertices[v].clone()).collect();
    let connection = raw.conn.as_ref().map(|entries| {
        let mut c = Connection::new();
        let map = |oe: OrientedEdge| OrientedEdge::new(new_edge[oe.edge], oe.dir);
        for &(along, from, to) in entries {
            if new_edge[along.edge] != usize::MAX
                && new_edge[from.edge] != usize::MAX
                && new_edge[to.edge] != usize::MAX
            {
                c.set(map(along), map(from), map(to));
            }
        }
        c
    });
    let g = GkmGraph::new(raw.mode, raw.rank, vertices, edges, connection)?;
    if g.valence() != raw.valence {
        return Err(FormatError::InvariantViolation {
            rule: "n-valent",
            location: format!("declared valence {}, found {}", raw.valence, g.valence()),
        });
    }
    Ok(g)
}

pub fn serialize_graph(g: &GkmGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "VERSION {FORMAT_VERSION}");
    let _ = writeln!(out, "MODE {}", g.mode().as_str());
    let _ = writeln!(out, "RANK {}", g.rank());
    let _ = writeln!(out, "VALENCE {}", g.valence());
    for v in g.vertex_names() {
        let _ = writeln!(out, "VERTEX {v}");
    }
    for e in g.edges() {
        let _ = write!(out, "EDGE {} {} {}", e.id, g.vertex_name(e.ends[0]), g.vertex_name(e.ends[1]));
        for c in e.label.coords() {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    if let Some(conn) = g.connection() {
        let name = |oe: OrientedEdge| format!("{} {}", g.edge(oe.edge).id, oe.dir.symbol());
        for (along, from, to) in conn.entries() {
            let _ = writeln!(out, "CONN {} {} {}", name(along), name(from), name(to));
        }
    }
    out
}
