//! Equivariant and ordinary graph cohomology, degree by degree.
//!
//! Polynomials live in `Sym(Z^k)` with monomials in graded lexicographic
//! order. A class of degree `d` is a tuple of degree-`d` polynomials, one per
//! vertex, stored vertex-major.

mod poly;

use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::graph::GkmGraph;
use crate::lattice::{
    column_hermite_basis, kernel_lattice, quotient_structure, rational_kernel_basis, Int, IntMatrix,
};

pub use poly::{divide_by_linear, divisible_over_q, mul_monomial, sym_dim, Monomials};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Z,
    Q,
}

impl Ring {
    pub fn as_str(self) -> &'static str {
        match self {
            Ring::Z => "z",
            Ring::Q => "q",
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A basis of `H_T^d`: over `Z` a basis of the (saturated) lattice of
/// classes, over `Q` a basis of the vector space with primitive integer
/// representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPiece {
    pub degree: usize,
    pub ring: Ring,
    pub vertex_count: usize,
    pub monomials: Monomials,
    pub basis: Vec<Vec<Int>>,
}

impl GradedPiece {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The polynomial of basis element `i` at vertex `v`.
    pub fn value_at(&self, i: usize, v: usize) -> &[Int] {
        let m = self.monomials.len();
        &self.basis[i][v * m..(v + 1) * m]
    }

    fn as_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(&self.basis, self.vertex_count * self.monomials.len())
    }

    /// Re-checks every basis element by exact polynomial division along each
    /// edge (over `Q` for rational pieces).
    pub fn satisfies_edge_divisibility(&self, g: &GkmGraph) -> bool {
        (0..self.rank()).all(|i| {
            g.edges().iter().all(|e| {
                let [a, b] = e.ends;
                let diff: Vec<Int> =
                    self.value_at(i, a).iter().zip(self.value_at(i, b)).map(|(x, y)| x - y).collect();
                let alpha = e.label.coords();
                match self.ring {
                    Ring::Z => divide_by_linear(&diff, &self.monomials, alpha).is_some(),
                    Ring::Q => divisible_over_q(&diff, &self.monomials, alpha, self.degree),
                }
            })
        })
    }
}

/// `H^d = H_T^d / I^d` where `I^d` is generated by positive-degree
/// polynomials times lower-degree classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPiece {
    pub degree: usize,
    pub ring: Ring,
    pub rank: usize,
    /// Invariant factors greater than one; always empty over `Q`.
    pub torsion: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertTable {
    pub ring: Ring,
    pub max_degree: usize,
    pub equivariant: Vec<usize>,
    pub ordinary: Vec<QuotientPiece>,
}

impl HilbertTable {
    pub fn betti(&self) -> Vec<usize> {
        self.ordinary.iter().map(|p| p.rank).collect()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.ordinary.iter().all(|p| p.torsion.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalityReport {
    pub ring: Ring,
    pub max_degree: usize,
    pub equivariant: Vec<usize>,
    pub ordinary: Vec<usize>,
    /// `sum_j b_j * dim Sym^{d-j}` for each degree `d`.
    pub predicted: Vec<usize>,
    pub first_failure: Option<usize>,
}

impl FormalityReport {
    pub fn is_consistent(&self) -> bool {
        self.first_failure.is_none()
    }
}

impl fmt::Display for FormalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first_failure {
            None => write!(f, "consistent up to degree {}", self.max_degree),
            Some(d) => write!(
                f,
                "inconsistent at degree {d}: equivariant rank {} but predicted {}",
                self.equivariant[d], self.predicted[d]
            ),
        }
    }
}

/// The default top degree, one past the valence.
pub fn default_max_degree(g: &GkmGraph) -> usize {
    g.valence() + 1
}

/// Classes of degree `d`: tuples `omega` with `omega(u) - omega(w)` divisible
/// by the label of every edge `u - w`.
///
/// Solved as a kernel over auxiliary quotient unknowns `h_e`,
/// `omega(u) - omega(w) - alpha(e) h_e = 0`, then projected to the `omega`
/// coordinates; the projection is injective since labels are nonzero.
pub fn equivariant_cohomology_degree(g: &GkmGraph, d: usize, ring: Ring) -> GradedPiece {
    let k = g.rank();
    let nv = g.vertex_count();
    let top = Monomials::new(k, d);
    let mt = top.len();
    let omega_len = nv * mt;
    if d == 0 {
        // the divisibility condition forces equal constants on each component
        let basis = component_indicators(g);
        return GradedPiece {
            degree: 0,
            ring,
            vertex_count: nv,
            monomials: top,
            basis,
        };
    }
    let low = Monomials::new(k, d - 1);
    let ml = low.len();
    let ne = g.edge_count();
    let mut a = IntMatrix::zeros(ne * mt, omega_len + ne * ml);
    for (ei, e) in g.edges().iter().enumerate() {
        let [u, w] = e.ends;
        let alpha = e.label.coords();
        for r in 0..mt {
            let row = ei * mt + r;
            a[(row, u * mt + r)] += Int::one();
            a[(row, w * mt + r)] -= Int::one();
        }
        for (c, q) in low.exponents().iter().enumerate() {
            for (i, ai) in alpha.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                let mut t = q.clone();
                t[i] += 1;
                let r = top.position(&t).expect("degree matches");
                a[(ei * mt + r, omega_len + ei * ml + c)] -= ai;
            }
        }
    }
    let basis = match ring {
        Ring::Z => {
            let kernel = kernel_lattice(&a);
            let projected = kernel.row_slice(0..omega_len);
            column_hermite_basis(&projected).columns()
        }
        Ring::Q => rational_kernel_basis(&a)
            .into_iter()
            .map(|mut v| {
                v.truncate(omega_len);
                primitive(v)
            })
            .collect(),
    };
    GradedPiece {
        degree: d,
        ring,
        vertex_count: nv,
        monomials: top,
        basis,
    }
}

fn component_indicators(g: &GkmGraph) -> Vec<Vec<Int>> {
    let nv = g.vertex_count();
    let mut comp = vec![usize::MAX; nv];
    let mut count = 0;
    for s in 0..nv {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for e in g.edges().iter().filter(|e| e.ends.contains(&v)) {
                let w = if e.ends[0] == v { e.ends[1] } else { e.ends[0] };
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (0..count)
        .map(|c| comp.iter().map(|&x| if x == c { Int::one() } else { Int::zero() }).collect())
        .collect()
}

fn primitive(mut v: Vec<Int>) -> Vec<Int> {
    use num_integer::Integer;
    let g = v.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        v.iter_mut().for_each(|x| *x /= &g);
    }
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        v.iter_mut().for_each(|x| *x = -&*x);
    }
    v
}

/// All equivariant pieces of degree `0..=max_degree`, computed in parallel.
pub fn equivariant_pieces(g: &GkmGraph, max_degree: usize, ring: Ring) -> Vec<GradedPiece> {
    (0..=max_degree)
        .into_par_iter()
        .map(|d| equivariant_cohomology_degree(g, d, ring))
        .collect()
}

/// `H^d` from precomputed equivariant pieces of degree `0..=d`.
fn ordinary_from(g: &GkmGraph, d: usize, ring: Ring, pieces: &[GradedPiece]) -> QuotientPiece {
    let k = g.rank();
    let nv = g.vertex_count();
    let target = &pieces[d];
    let mt = target.monomials.len();
    let mut gens: Vec<Vec<Int>> = Vec::new();
    for j in 1..=d {
        let lower = &pieces[d - j];
        for p in Monomials::new(k, j).exponents() {
            for i in 0..lower.rank() {
                let mut v = Vec::with_capacity(nv * mt);
                for u in 0..nv {
                    v.extend(mul_monomial(lower.value_at(i, u), &lower.monomials, p, &target.monomials));
                }
                gens.push(v);
            }
        }
    }
    let sub = IntMatrix::from_columns(&gens, nv * mt);
    match ring {
        Ring::Q => QuotientPiece {
            degree: d,
            ring,
            rank: target.rank() - sub.rank(),
            torsion: Vec::new(),
        },
        Ring::Z => {
            let reduced = column_hermite_basis(&sub);
            let q = quotient_structure(&target.as_matrix(), &reduced)
                .expect("products of classes are classes");
            QuotientPiece {
                degree: d,
                ring,
                rank: q.free_rank,
                torsion: q.torsion,
            }
        }
    }
}

/// `H^d = H_T^d / I^d`, where `I^d` is spanned by `p * omega` for monomials
/// `p` of degree `j` in `1..=d` and basis classes `omega` of degree `d - j`.
pub fn ordinary_cohomology_degree(g: &GkmGraph, d: usize, ring: Ring) -> QuotientPiece {
    let pieces = equivariant_pieces(g, d, ring);
    ordinary_from(g, d, ring, &pieces)
}

pub fn hilbert_table(g: &GkmGraph, max_degree: usize, ring: Ring) -> HilbertTable {
    let pieces = equivariant_pieces(g, max_degree, ring);
    let ordinary = (0..=max_degree)
        .into_par_iter()
        .map(|d| ordinary_from(g, d, ring, &pieces))
        .collect();
    HilbertTable {
        ring,
        max_degree,
        equivariant: pieces.iter().map(GradedPiece::rank).collect(),
        ordinary,
    }
}

/// Compares equivariant ranks against the free-module prediction
/// `sum_j b_j * dim Sym^{d-j}` and reports the first mismatch.
pub fn formality_report(g: &GkmGraph, max_degree: usize, ring: Ring) -> FormalityReport {
    formality_from_table(g, hilbert_table(g, max_degree, ring))
}

/// The formality comparison for an already computed table.
pub fn formality_from_table(g: &GkmGraph, table: HilbertTable) -> FormalityReport {
    let HilbertTable { ring, max_degree, .. } = table;
    let ordinary = table.betti();
    let k = g.rank();
    let predicted: Vec<usize> = (0..=max_degree)
        .map(|d| (0..=d).map(|j| ordinary[j] * sym_dim(k, d - j)).sum())
        .collect();
    let first_failure = (0..=max_degree).find(|&d| predicted[d] != table.equivariant[d]);
    FormalityReport {
        ring,
        max_degree,
        equivariant: table.equivariant,
        ordinary,
        predicted,
        first_failure,
    }
}
