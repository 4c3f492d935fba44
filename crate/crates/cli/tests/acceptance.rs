//! Acceptance gate: one PASS/FAIL line per criterion, with its runtime.
//! Runs without the libtest harness so the lines are always printed.

mod common;

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use gkmkit::catalog::{cpn_graph, parse_graph, restrict, s2_power_graph, FormatError};
use gkmkit::cohomology::{formality_report, hilbert_table, Ring};
use gkmkit::extension::{extend_to_torus_labeling, project_labels};
use gkmkit::graph::{are_isomorphic, is_effective, validate, GkmGraph, PositionClass, Rule};
use gkmkit::lattice::IntMatrix;
use gkmkit::paths::{
    all_connection_paths, covalence_one_report, cycle_rank, lemma_tree_decomposition, monodromy,
    orientable_sufficient, trace_connection_path, Orientability,
};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn catalog() -> Vec<(String, GkmGraph)> {
    let mut v = Vec::new();
    for n in 1..=4 {
        v.push((format!("cpn({n})"), cpn_graph(n)));
        v.push((format!("s2({n})"), s2_power_graph(n)));
    }
    v
}

fn load_fixture(name: &str) -> Result<GkmGraph, FormatError> {
    parse_graph(&std::fs::read_to_string(common::fixture(name)).expect("fixture readable"))
}

fn axiom_suite() -> Check {
    for (name, g) in catalog() {
        ensure(validate(&g).is_empty(), || format!("{name} has findings"))?;
    }
    for (file, rule) in [
        ("broken_connection.gkm", Rule::Axiom1),
        ("broken_involution.gkm", Rule::Axiom2),
        ("bad_congruence.gkm", Rule::Axiom3),
    ] {
        let g = load_fixture(file).map_err(|e| format!("{file}: {e}"))?;
        let report = validate(&g);
        ensure(report.rules() == BTreeSet::from([rule]), || {
            format!("{file}: expected only {rule}, got {:?}", report.rules())
        })?;
        if rule == Rule::Axiom3 {
            ensure(report.findings[0].message.contains("1/2"), || {
                format!("{file}: congruence constant not reported as non-integral")
            })?;
        }
    }
    for (file, rule) in [("loop.gkm", "no-loops"), ("valence_mismatch.gkm", "n-valent")] {
        match load_fixture(file) {
            Err(FormatError::InvariantViolation { rule: r, .. }) if r == rule => {}
            other => return Err(format!("{file}: expected {rule}, got {other:?}")),
        }
    }
    Ok(())
}

fn monodromy_triviality() -> Check {
    for (name, g) in [("cpn(4)", cpn_graph(4)), ("s2(4)", s2_power_graph(4))] {
        ensure(g.independence().level == 4, || format!("{name} is not 4-independent"))?;
        let paths = all_connection_paths(&g).map_err(|e| e.to_string())?;
        ensure(!paths.is_empty(), || format!("{name} has no connection paths"))?;
        for p in &paths {
            for v in p.vertices(&g) {
                let m = monodromy(&g, p, v).map_err(|e| e.to_string())?;
                ensure(m.is_identity(), || format!("{name}: nontrivial monodromy on {}", p.display(&g)))?;
            }
        }
    }
    Ok(())
}

fn lemma_tree_contract() -> Check {
    for (name, g) in catalog() {
        let d = lemma_tree_decomposition(&g).map_err(|e| format!("{name}: {e}"))?;
        ensure(d.off_tree.len() == cycle_rank(&g), || format!("{name}: wrong number of removed edges"))?;
        ensure(d.tree.len() + 1 == g.vertex_count(), || format!("{name}: tree has wrong size"))?;
        // connected on |V| - 1 edges means spanning tree
        let mut seen = vec![false; g.vertex_count()];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for &e in &d.tree {
                let [a, b] = g.edge(e).ends;
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        ensure(seen.iter().all(|&s| s), || format!("{name}: tree does not span"))?;
        for (i, w) in d.witnesses.iter().enumerate() {
            let edges = w.edges();
            let again = trace_connection_path(&g, edges[0], edges[1]).map_err(|e| e.to_string())?;
            ensure(again.as_ref() == Some(w), || format!("{name}: witness {i} does not re-trace"))?;
            ensure(w.edge_set().contains(&d.off_tree[i]), || format!("{name}: witness {i} misses its edge"))?;
            ensure(w.edge_set().is_subset(&d.permitted_edges(i)), || {
                format!("{name}: witness {i} uses a forbidden edge")
            })?;
        }
    }
    Ok(())
}

/// General-position, effective projections among a fixed candidate list.
fn projections(g: &GkmGraph, candidates: &[[[i64; 3]; 2]]) -> Vec<GkmGraph> {
    candidates
        .iter()
        .filter_map(|p| restrict(g, &IntMatrix::from_i64_rows(p)).ok())
        .filter(|r| r.independence().class == PositionClass::GeneralPosition && is_effective(r))
        .collect()
}

fn extension_round_trip() -> Check {
    let candidates = [
        [[1, 0, 1], [0, 1, 2]],
        [[1, 0, 2], [0, 1, 3]],
        [[1, 0, 3], [0, 1, 1]],
        [[1, 0, 1], [0, 1, 1]],
        [[1, 0, 1], [0, 1, -1]],
        [[1, 0, 2], [0, 1, 1]],
        [[1, 0, -1], [0, 1, 2]],
    ];
    for (name, g) in [("cpn(3)", cpn_graph(3)), ("s2(3)", s2_power_graph(3))] {
        let restricted = projections(&g, &candidates);
        ensure(restricted.len() >= 3, || format!("{name}: only {} usable projections", restricted.len()))?;
        for r in restricted {
            let x = extend_to_torus_labeling(&r).map_err(|e| format!("{name}: {e}"))?.graph;
            ensure(validate(&x).is_empty() && is_effective(&x), || format!("{name}: extension invalid"))?;
            let labels: Vec<_> = r.edges().iter().map(|e| e.label.clone()).collect();
            ensure(project_labels(&x, r.rank()) == labels, || format!("{name}: projection differs"))?;
            if name == "cpn(3)" {
                ensure(are_isomorphic(&x, &g).map_err(|e| e.to_string())?, || {
                    "cpn(3): extension not isomorphic to the torus graph".into()
                })?;
            }
        }
    }
    Ok(())
}

fn cohomology_oracle() -> Check {
    let mut cases: Vec<(String, GkmGraph, Vec<usize>)> = (1..=3)
        .map(|n| {
            let mut b = vec![1; n + 1];
            b.push(0);
            (format!("cpn({n})"), cpn_graph(n), b)
        })
        .collect();
    cases.push(("s2(2)".into(), s2_power_graph(2), vec![1, 2, 1, 0]));
    for (name, g, expected) in &cases {
        let top = g.valence() + 1;
        let q = hilbert_table(g, top, Ring::Q);
        ensure(q.betti() == *expected, || format!("{name}: Q ranks {:?}", q.betti()))?;
        let z = hilbert_table(g, top, Ring::Z);
        ensure(z.betti() == *expected && z.is_torsion_free(), || format!("{name}: Z table {:?}", z.ordinary))?;
        let f = formality_report(g, top, Ring::Q);
        ensure(f.is_consistent(), || format!("{name}: {f}"))?;
        // second computation on the small instances
        if g.vertex_count() <= 4 && g.rank() <= 3 {
            for d in 0..=3 {
                let (rank, torsion) = oracle::ordinary(g, d);
                ensure(z.ordinary.get(d).is_none_or(|p| p.rank == rank && p.torsion == torsion), || {
                    format!("{name}: degree {d} disagrees with the oracle")
                })?;
                let eq = gkmkit::cohomology::equivariant_cohomology_degree(g, d, Ring::Z);
                ensure(eq.rank() == oracle::equivariant(g, d).cols(), || {
                    format!("{name}: equivariant degree {d} disagrees with the oracle")
                })?;
            }
        }
    }
    Ok(())
}

fn gl_invariance() -> Check {
    let g = cpn_graph(2);
    let m = IntMatrix::from_i64_rows(&[[5, 3], [3, 2]]);
    let h = g.relabel(&m).map_err(|e| e.to_string())?;
    ensure(g.independence() == h.independence(), || "independence changed".into())?;
    ensure(is_effective(&g) == is_effective(&h), || "effectiveness changed".into())?;
    let census = |x: &GkmGraph| -> Result<Vec<usize>, String> {
        Ok(all_connection_paths(x).map_err(|e| e.to_string())?.iter().map(|p| p.len()).collect())
    };
    ensure(census(&g)? == census(&h)?, || "path census changed".into())?;
    for ring in [Ring::Z, Ring::Q] {
        let (a, b) = (hilbert_table(&g, 3, ring), hilbert_table(&h, 3, ring));
        ensure(a.equivariant == b.equivariant && a.ordinary == b.ordinary, || format!("cohomology over {ring} changed"))?;
    }
    Ok(())
}

fn ineffectiveness() -> Check {
    let square = s2_power_graph(2)
        .relabel(&IntMatrix::from_i64_rows(&[[2, 0], [0, 1]]))
        .map_err(|e| e.to_string())?;
    ensure(validate(&square).is_empty(), || "square is not a valid graph".into())?;
    ensure(!is_effective(&square), || "square (2,0),(0,1) reported effective".into())?;
    let report = covalence_one_report(&cpn_graph(3)).map_err(|e| e.to_string())?;
    ensure(report.len() == 4, || format!("cpn(3): {} faces", report.len()))?;
    ensure(
        report.iter().all(|e| e.effective && e.subgraph.vertex_count() == 3 && e.subgraph.valence() == 2),
        || "cpn(3): a face is not an effective triangle".into(),
    )
}

fn orientability() -> Check {
    for n in 3..=4 {
        for (name, g) in [(format!("cpn({n})"), cpn_graph(n)), (format!("s2({n})"), s2_power_graph(n))] {
            ensure(orientable_sufficient(&g) == Orientability::Orientable, || format!("{name} not orientable"))?;
        }
    }
    ensure(orientable_sufficient(&cpn_graph(2)) == Orientability::Unknown, || "cpn(2) not unknown".into())
}

fn cli_golden() -> Check {
    let mut codes = BTreeSet::new();
    for name in common::all_fixtures() {
        for cmd in common::GOLDEN_COMMANDS {
            let (a, b) = (common::structured(&name, cmd), common::structured(&name, cmd));
            ensure(a.stdout == b.stdout, || format!("{cmd} {name}: unstable output"))?;
            let golden = std::fs::read_to_string(common::golden_path(&name, cmd)).unwrap_or_default();
            ensure(golden == a.stdout, || format!("{cmd} {name}: differs from golden file"))?;
            codes.insert(a.code);
        }
    }
    let tmp = std::env::temp_dir().join(format!("gkmkit-acceptance-{}.gkm", std::process::id()));
    let out = common::run(&["extend", &common::fixture("cp2.gkm"), "-o", tmp.to_str().unwrap()]);
    codes.insert(out.code);
    let out = common::run(&["extend", &common::fixture("cp3_restricted.gkm"), "-o", tmp.to_str().unwrap()]);
    codes.insert(out.code);
    let _ = std::fs::remove_file(&tmp);
    ensure(codes == BTreeSet::from([0, 1, 2, 3]), || format!("exit codes exercised: {codes:?}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("axiom suite", axiom_suite, Some(Duration::from_secs(1))),
        ("monodromy triviality", monodromy_triviality, Some(Duration::from_secs(5))),
        ("lemma-tree contract", lemma_tree_contract, None),
        ("extension round trip", extension_round_trip, Some(Duration::from_secs(10))),
        ("cohomology oracle", cohomology_oracle, Some(Duration::from_secs(60))),
        ("GL(k,Z) invariance", gl_invariance, None),
        ("ineffectiveness detection", ineffectiveness, None),
        ("orientability sufficient condition", orientability, None),
        ("CLI golden outputs and exit codes", cli_golden, None),
    ];
    let mut failed = 0;
    for (i, (title, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if let (Ok(()), Some(limit)) = (&result, limit) {
            if elapsed > *limit {
                result = Err(format!("took longer than {limit:?}"));
            }
        }
        let ms = elapsed.as_secs_f64() * 1000.0;
        match result {
            Ok(()) => println!("criterion {}: PASS {title} ({ms:.1} ms)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL {title} ({ms:.1} ms): {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
