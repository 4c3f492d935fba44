use std::io::Write;
use std::path::Path;

use gkmkit::catalog::serialize_graph;
use gkmkit::cohomology::{default_max_degree, formality_from_table, hilbert_table, Ring};
use gkmkit::extension::{check_ext_hypotheses, extend_to_torus_labeling, project_labels};
use gkmkit::graph::{are_isomorphic_bounded, is_effective, validate as validate_graph, GkmGraph, GraphError, Severity};
use gkmkit::lattice::IntMatrix;
use gkmkit::paths::{
    all_connection_paths, covalence_one_report, cycle_rank, lemma_tree_decomposition, monodromy_along,
    orientable_sufficient, three_edges_ineffective, ConnectionPath, PathError,
};

use crate::{Coeff, Component, ConnectionSource, Doc, EXIT_HYPOTHESIS, EXIT_INVALID, EXIT_IO, EXIT_OK, MAX_VERTICES_VAR};

fn summary(comp: &Component, doc: &mut Doc) {
    let g = &comp.graph;
    doc.put("graph.mode", g.mode().as_str());
    doc.put("graph.rank", g.rank());
    doc.put("graph.valence", g.valence());
    doc.put("graph.vertices", g.vertex_count());
    doc.put("graph.edges", g.edge_count());
    doc.put("connection", comp.source.as_str());
    if comp.source == ConnectionSource::Found {
        let conn = g.connection().expect("found connection is attached");
        for (i, (along, from, to)) in conn.entries().enumerate() {
            doc.put(
                format!("connection.found.{i}"),
                format!("{} {} {}", g.oriented_name(along), g.oriented_name(from), g.oriented_name(to)),
            );
        }
    }
}

/// Puts the validation findings; returns whether the graph is valid.
fn validation(g: &GkmGraph, doc: &mut Doc) -> bool {
    let report = validate_graph(g);
    doc.put("valid", report.is_empty());
    doc.put("findings", report.findings.len());
    for (i, f) in report.findings.iter().enumerate() {
        let severity = match f.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        doc.put(format!("finding.{i}.severity"), severity);
        doc.put(format!("finding.{i}.rule"), f.rule.id());
        doc.put(format!("finding.{i}.axiom"), f.rule.statement());
        doc.put(format!("finding.{i}.location"), &f.location);
        doc.put(format!("finding.{i}.message"), &f.message);
    }
    report.is_empty()
}

/// Validation for commands that need a valid graph: findings are only
/// listed when there are some.
fn require_valid(g: &GkmGraph, doc: &mut Doc) -> bool {
    let mut section = Doc::new();
    let ok = validation(g, &mut section);
    if !ok {
        doc.extend(section);
    }
    ok
}

pub(crate) fn validate(comp: &Component, doc: &mut Doc) -> i32 {
    summary(comp, doc);
    if validation(&comp.graph, doc) {
        EXIT_OK
    } else {
        EXIT_INVALID
    }
}

fn info_body(g: &GkmGraph, doc: &mut Doc) {
    let ind = g.independence();
    doc.put("independence.level", ind.level);
    doc.put("independence.class", ind.class.as_str());
    doc.put("effective", is_effective(g));
    match covalence_one_report(g) {
        Ok(entries) => {
            doc.put("covalence-one.count", entries.len());
            doc.put("covalence-one.ineffective", entries.iter().filter(|e| !e.effective).count());
            for (i, e) in entries.iter().enumerate() {
                let tag = if e.effective { "effective" } else { "ineffective" };
                doc.put(format!("covalence-one.{i}"), format!("{} {tag}", e.subgraph.describe(g)));
            }
        }
        Err(e) => doc.put("covalence-one.error", e),
    }
    if g.valence() == 4 {
        match three_edges_ineffective(g) {
            Ok(b) => doc.put("three-edges-ineffective", b),
            Err(e) => doc.put("three-edges-ineffective.error", e),
        }
    }
}

pub(crate) fn info(comp: &Component, doc: &mut Doc) -> i32 {
    summary(comp, doc);
    if !require_valid(&comp.graph, doc) {
        return EXIT_INVALID;
    }
    info_body(&comp.graph, doc);
    EXIT_OK
}

/// `identity`, or the moved edges at the first base vertex with a
/// nontrivial map.
fn monodromy_summary(g: &GkmGraph, p: &ConnectionPath) -> String {
    for v in p.vertices(g) {
        match monodromy_along(g, p.edges(), v) {
            Ok(map) => {
                let moved: Vec<String> = map
                    .iter()
                    .filter(|(a, b)| a != b)
                    .map(|(a, b)| format!("{} -> {}", g.oriented_name(*a), g.oriented_name(*b)))
                    .collect();
                if !moved.is_empty() {
                    return format!("nontrivial at {}: {}", g.vertex_name(v), moved.join(", "));
                }
            }
            Err(PathError::VertexRevisited { vertex }) => return format!("undefined: path revisits {vertex}"),
            Err(e) => return format!("error: {e}"),
        }
    }
    "identity".into()
}

fn names(g: &GkmGraph, edges: &[usize]) -> String {
    edges.iter().map(|&e| g.edge(e).id.as_str()).collect::<Vec<_>>().join(" ")
}

fn paths_body(g: &GkmGraph, doc: &mut Doc) {
    let paths = match all_connection_paths(g) {
        Ok(p) => p,
        Err(e) => {
            doc.put("error", e);
            return;
        }
    };
    doc.put("count", paths.len());
    for (i, p) in paths.iter().enumerate() {
        doc.put(format!("path.{i}"), p.display(g));
        doc.put(format!("path.{i}.length"), p.len());
        doc.put(format!("path.{i}.two-valent"), p.is_two_valent(g));
        doc.put(format!("path.{i}.monodromy"), monodromy_summary(g, p));
    }
    doc.put("cycle-rank", cycle_rank(g));
    match gkmkit::paths::h1_generated_by_connection_paths(g) {
        Ok(b) => doc.put("h1-generated", b),
        Err(e) => doc.put("h1-generated.error", e),
    }
    match lemma_tree_decomposition(g) {
        Ok(d) => {
            doc.put("tree.edges", names(g, &d.tree));
            doc.put("tree.off-tree", names(g, &d.off_tree));
            for (i, w) in d.witnesses.iter().enumerate() {
                doc.put(format!("tree.witness.{i}"), w.display(g));
            }
        }
        Err(e) => doc.put("tree.error", e),
    }
}

pub(crate) fn paths(comp: &Component, doc: &mut Doc) -> i32 {
    summary(comp, doc);
    if !require_valid(&comp.graph, doc) {
        return EXIT_INVALID;
    }
    let mut section = Doc::new();
    paths_body(&comp.graph, &mut section);
    doc.nest("paths", section);
    EXIT_OK
}

fn ring(c: Coeff) -> Ring {
    match c {
        Coeff::Z => Ring::Z,
        Coeff::Q => Ring::Q,
    }
}

fn cohomology_body(g: &GkmGraph, max_degree: Option<usize>, coeff: Coeff, doc: &mut Doc) {
    let d = max_degree.unwrap_or_else(|| default_max_degree(g));
    let table = hilbert_table(g, d, ring(coeff));
    doc.put("coeff", ring(coeff));
    doc.put("max-degree", d);
    for (i, r) in table.equivariant.iter().enumerate() {
        doc.put(format!("equivariant.{i}"), r);
    }
    for p in &table.ordinary {
        doc.put(format!("ordinary.{}", p.degree), p.rank);
        if !p.torsion.is_empty() {
            let t: Vec<String> = p.torsion.iter().map(ToString::to_string).collect();
            doc.put(format!("torsion.{}", p.degree), t.join(" "));
        }
    }
    let betti: Vec<String> = table.betti().iter().map(ToString::to_string).collect();
    doc.put("ordinary", betti.join(","));
    doc.put("torsion-free", table.is_torsion_free());
    doc.put("formality", formality_from_table(g, table));
}

pub(crate) fn cohomology(comp: &Component, max_degree: Option<usize>, coeff: Coeff, doc: &mut Doc) -> i32 {
    summary(comp, doc);
    let mut section = Doc::new();
    cohomology_body(&comp.graph, max_degree, coeff, &mut section);
    doc.nest("cohomology", section);
    EXIT_OK
}

fn orientable_body(g: &GkmGraph, doc: &mut Doc) {
    doc.put("verdict", orientable_sufficient(g).as_str());
    doc.put("independence.level", g.independence().level);
    match gkmkit::paths::h1_generated_by_connection_paths(g) {
        Ok(b) => doc.put("h1-generated", b),
        Err(e) => doc.put("h1-generated.error", e),
    }
}

pub(crate) fn orientable(comp: &Component, doc: &mut Doc) -> i32 {
    summary(comp, doc);
    if !require_valid(&comp.graph, doc) {
        return EXIT_INVALID;
    }
    let mut section = Doc::new();
    orientable_body(&comp.graph, &mut section);
    doc.nest("orientable", section);
    EXIT_OK
}

fn hypotheses(g: &GkmGraph, doc: &mut Doc) -> bool {
    let report = check_ext_hypotheses(g);
    for c in &report.checks {
        doc.put(format!("hypothesis.{}", c.id), if c.passed { "passed" } else { "failed" });
        doc.put(format!("hypothesis.{}.detail", c.id), &c.detail);
    }
    report.passed()
}

/// The input labels recovered from the first `k` coordinates, and whether
/// the projected graph is isomorphic to the input.
fn round_trip(g: &GkmGraph, extended: &GkmGraph, max_vertices: usize, doc: &mut Doc) {
    let k = g.rank();
    let labels_match = project_labels(extended, k)
        .iter()
        .zip(g.edges())
        .all(|(p, e)| *p == e.label);
    doc.put("roundtrip.labels", if labels_match { "match" } else { "differ" });
    let mut p = IntMatrix::zeros(k, extended.rank());
    for i in 0..k {
        p[(i, i)] = 1.into();
    }
    let iso = extended
        .relabel(&p)
        .map_err(|e| e.to_string())
        .and_then(|proj| match are_isomorphic_bounded(&proj, g, max_vertices) {
            Ok(b) => Ok(b.to_string()),
            Err(GraphError::BoundExceeded { limit, found }) => {
                Ok(format!("skipped: {found} vertices exceed {MAX_VERTICES_VAR}={limit}"))
            }
            Err(e) => Err(e.to_string()),
        });
    match iso {
        Ok(s) => doc.put("roundtrip.isomorphic", s),
        Err(e) => doc.put("roundtrip.error", e),
    }
}

fn extension_labels(g: &GkmGraph, doc: &mut Doc) {
    doc.put("rank", g.rank());
    doc.put("valid", validate_graph(g).is_empty());
    doc.put("effective", is_effective(g));
    for e in g.edges() {
        doc.put(format!("label.{}", e.id), &e.label);
    }
}

pub(crate) fn extend(comp: &Component, output: &Path, max_vertices: usize, doc: &mut Doc, err: &mut dyn Write) -> i32 {
    let g = &comp.graph;
    summary(comp, doc);
    if !require_valid(g, doc) {
        let _ = writeln!(err, "invalid graph: see findings");
        return EXIT_INVALID;
    }
    let mut section = Doc::new();
    let passed = hypotheses(g, &mut section);
    if !passed {
        let report = check_ext_hypotheses(g);
        let msg = format!("hypothesis failed: {report}");
        let _ = writeln!(err, "{msg}");
        section.put("error", msg);
        doc.nest("extension", section);
        return EXIT_HYPOTHESIS;
    }
    let result = match extend_to_torus_labeling(g) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "extension failed: {e}");
            section.put("error", e);
            doc.nest("extension", section);
            return EXIT_HYPOTHESIS;
        }
    };
    let x = &result.graph;
    section.put("result", "succeeded");
    section.put("tree.edges", names(g, &result.decomposition.tree));
    section.put("tree.off-tree", names(g, &result.decomposition.off_tree));
    section.put("seed.root", g.vertex_name(result.seed.root));
    extension_labels(x, &mut section);
    round_trip(g, x, max_vertices, &mut section);
    doc.nest("extension", section);
    if let Err(e) = std::fs::write(output, serialize_graph(x)) {
        let msg = format!("{}: {e}", output.display());
        let _ = writeln!(err, "error: {msg}");
        doc.put("error", msg);
        return EXIT_IO;
    }
    doc.put("written", true);
    EXIT_OK
}

pub(crate) fn report(comp: &Component, max_degree: Option<usize>, coeff: Coeff, doc: &mut Doc) -> i32 {
    let g = &comp.graph;
    summary(comp, doc);
    let mut v = Doc::new();
    let ok = validation(g, &mut v);
    doc.nest("validate", v);
    if !ok {
        return EXIT_INVALID;
    }
    let mut s = Doc::new();
    info_body(g, &mut s);
    doc.nest("info", s);
    let mut s = Doc::new();
    paths_body(g, &mut s);
    doc.nest("paths", s);
    let mut s = Doc::new();
    cohomology_body(g, max_degree, coeff, &mut s);
    doc.nest("cohomology", s);
    let mut s = Doc::new();
    orientable_body(g, &mut s);
    doc.nest("orientable", s);
    let mut s = Doc::new();
    if hypotheses(g, &mut s) {
        match extend_to_torus_labeling(g) {
            Ok(r) => {
                s.put("result", "succeeded");
                extension_labels(&r.graph, &mut s);
            }
            Err(e) => s.put("result", format!("failed: {e}")),
        }
    } else {
        s.put("result", "not applicable");
    }
    doc.nest("extension", s);
    EXIT_OK
}
