//! Graph cohomology computed without quotient unknowns: a difference
//! `omega(u) - omega(w)` is divisible by a primitive label `alpha` exactly
//! when it vanishes after substituting a basis of the hyperplane
//! `alpha = 0`. Ordinary cohomology uses only linear multiples of the
//! previous degree.

use std::collections::HashMap;

use gkmkit::cohomology::{mul_monomial, Monomials};
use gkmkit::graph::GkmGraph;
use gkmkit::lattice::{has_unit_invariant_factors, kernel_lattice, quotient_structure, Int, IntMatrix};

type Poly = HashMap<Vec<u32>, Int>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let zero = Int::from(0);
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(|| zero.clone()) += ca * cb;
        }
    }
    out.retain(|_, c| *c != zero);
    out
}

/// Matrix of `p(x) -> p(B t)` from degree-`d` polynomials in `B.rows()`
/// variables to polynomials in `B.cols()` variables.
fn substitution_matrix(b: &IntMatrix, d: usize) -> IntMatrix {
    let zero = Int::from(0);
    let (k, m) = (b.rows(), b.cols());
    let src = Monomials::new(k, d);
    let dst = Monomials::new(m, d);
    let linear: Vec<Poly> = (0..k)
        .map(|i| {
            (0..m)
                .filter(|&j| b[(i, j)] != zero)
                .map(|j| {
                    let mut e = vec![0; m];
                    e[j] = 1;
                    (e, b[(i, j)].clone())
                })
                .collect()
        })
        .collect();
    let mut r = IntMatrix::zeros(dst.len(), src.len());
    for (c, exps) in src.exponents().iter().enumerate() {
        let mut p: Poly = [(vec![0; m], Int::from(1))].into_iter().collect();
        for (i, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                p = poly_mul(&p, &linear[i]);
            }
        }
        for (e, coef) in p {
            r[(dst.position(&e).unwrap(), c)] += coef;
        }
    }
    r
}

/// Basis (columns) of the lattice `H_T^d`; labels must be primitive.
pub fn equivariant(g: &GkmGraph, d: usize) -> IntMatrix {
    let k = g.rank();
    let nv = g.vertex_count();
    let mt = Monomials::new(k, d).len();
    let zero = Int::from(0);
    let mut rows: Vec<Vec<Int>> = Vec::new();
    for e in g.edges() {
        let alpha = IntMatrix::from_rows(vec![e.label.coords().to_vec()], k);
        assert!(has_unit_invariant_factors(&alpha), "oracle needs primitive labels");
        let r = substitution_matrix(&kernel_lattice(&alpha), d);
        let [u, w] = e.ends;
        for i in 0..r.rows() {
            let mut row = vec![zero.clone(); nv * mt];
            for j in 0..mt {
                row[u * mt + j] += &r[(i, j)];
                row[w * mt + j] -= &r[(i, j)];
            }
            rows.push(row);
        }
    }
    kernel_lattice(&IntMatrix::from_rows(rows, nv * mt))
}

/// Rank and torsion of `H^d`.
pub fn ordinary(g: &GkmGraph, d: usize) -> (usize, Vec<Int>) {
    let k = g.rank();
    let nv = g.vertex_count();
    let top = equivariant(g, d);
    if d == 0 {
        return (top.cols(), Vec::new());
    }
    let prev = equivariant(g, d - 1);
    let from = Monomials::new(k, d - 1);
    let to = Monomials::new(k, d);
    let mut gens = Vec::new();
    for i in 0..k {
        let mut x = vec![0; k];
        x[i] = 1;
        for col in prev.columns() {
            let mut v = Vec::new();
            for u in 0..nv {
                v.extend(mul_monomial(&col[u * from.len()..(u + 1) * from.len()], &from, &x, &to));
            }
            gens.push(v);
        }
    }
    let q = quotient_structure(&top, &IntMatrix::from_columns(&gens, nv * to.len())).unwrap();
    (q.free_rank, q.torsion)
}
