use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::lattice::Int;

/// Exponent vectors of all degree-`d` monomials in `k` variables, in graded
/// lexicographic order (`x_1^d` first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomials {
    exps: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl Monomials {
    pub fn new(k: usize, d: usize) -> Self {
        let mut exps = Vec::new();
        let mut cur = vec![0u32; k];
        fill(&mut cur, 0, d as u32, &mut exps);
        let index = exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Monomials { exps, index }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exps
    }

    pub fn position(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

fn fill(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    let k = cur.len();
    if k == 0 {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if i == k - 1 {
        cur[i] = left;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        fill(cur, i + 1, left - e, out);
    }
    cur[i] = 0;
}

/// `dim Sym^d(Q^k)`.
pub fn sym_dim(k: usize, d: usize) -> usize {
    if k == 0 {
        return usize::from(d == 0);
    }
    // binomial(d + k - 1, k - 1)
    let (n, r) = (d + k - 1, k - 1);
    let mut acc: u128 = 1;
    for i in 0..r as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as usize
}

/// Multiplies the coefficient vector `p` (degree `d`, basis `from`) by the
/// monomial `m`, returning coefficients in the basis `to`.
pub fn mul_monomial(p: &[Int], from: &Monomials, m: &[u32], to: &Monomials) -> Vec<Int> {
    let mut out = vec![Int::zero(); to.len()];
    for (c, e) in p.iter().zip(from.exponents()) {
        if c.is_zero() {
            continue;
        }
        let prod: Vec<u32> = e.iter().zip(m).map(|(a, b)| a + b).collect();
        out[to.position(&prod).expect("degree matches")] += c;
    }
    out
}

/// Exact division of the homogeneous polynomial `p` by the nonzero linear
/// form `alpha`. Returns the quotient if `p = alpha * q` with `q` integral.
pub fn divide_by_linear(p: &[Int], basis: &Monomials, alpha: &[Int]) -> Option<HashMap<Vec<u32>, Int>> {
    let i = alpha.iter().position(|a| !a.is_zero())?;
    let mut rem: HashMap<Vec<u32>, Int> = basis
        .exponents()
        .iter()
        .zip(p)
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    let mut quotient = HashMap::new();
    // order with x_i most significant, then the remaining variables lex
    let key = |e: &Vec<u32>| -> (u32, Vec<u32>) {
        let rest: Vec<u32> = e.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &x)| x).collect();
        (e[i], rest)
    };
    while let Some(lead) = rem.keys().max_by_key(|e| key(e)).cloned() {
        if lead[i] == 0 {
            return None;
        }
        let c = rem[&lead].clone();
        if !(&c % &alpha[i]).is_zero() {
            return None;
        }
        let q = &c / &alpha[i];
        let mut qe = lead.clone();
        qe[i] -= 1;
        for (j, a) in alpha.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut t = qe.clone();
            t[j] += 1;
            let entry = rem.entry(t.clone()).or_insert_with(Int::zero);
            *entry -= &q * a;
            if entry.is_zero() {
                rem.remove(&t);
            }
        }
        quotient.insert(qe, q);
    }
    Some(quotient)
}

/// Divisibility over the rationals: scale by a power of the pivot
/// coefficient first.
pub fn divisible_over_q(p: &[Int], basis: &Monomials, alpha: &[Int], degree: usize) -> bool {
    let Some(i) = alpha.iter().position(|a| !a.is_zero()) else {
        return false;
    };
    let mut scale = Int::one();
    for _ in 0..degree {
        scale *= &alpha[i];
    }
    let scaled: Vec<Int> = p.iter().map(|c| c * &scale).collect();
    divide_by_linear(&scaled, basis, alpha).is_some()
}
