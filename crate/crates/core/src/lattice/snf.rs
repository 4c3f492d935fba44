use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{Int, IntMatrix};

/// `U * A * V = S` with `U`, `V` unimodular and `S` diagonal.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// The nonzero diagonal entries of `S`, in order.
    pub fn invariant_factors(&self) -> Vec<Int> {
        diagonal_nonzero(&self.s)
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn diagonal_nonzero(s: &IntMatrix) -> Vec<Int> {
    (0..s.rows().min(s.cols()))
        .map(|i| s[(i, i)].clone())
        .take_while(|d| !d.is_zero())
        .collect()
}

/// Smith normal form with transforms.
///
/// Pivots are the entry of least absolute value in the active block, ties
/// broken by row then column index. Invariant factors come out nonnegative
/// with each dividing the next and zeros trailing.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let mut calc = SnfCalc::new(a.clone(), true, false);
    calc.run();
    SnfResult {
        u: calc.u.unwrap(),
        s: calc.a,
        v: calc.v.unwrap(),
    }
}

/// Smith normal form together with `U^{-1}`.
pub(crate) fn smith_normal_form_with_inverse(a: &IntMatrix) -> (SnfResult, IntMatrix) {
    let mut calc = SnfCalc::new(a.clone(), true, true);
    calc.run();
    (
        SnfResult {
            u: calc.u.unwrap(),
            s: calc.a,
            v: calc.v.unwrap(),
        },
        calc.u_inv.unwrap(),
    )
}

/// Nonzero invariant factors only, skipping the transform bookkeeping.
pub fn invariant_factors(a: &IntMatrix) -> Vec<Int> {
    let mut calc = SnfCalc::new(a.clone(), false, false);
    calc.run();
    diagonal_nonzero(&calc.a)
}

struct SnfCalc {
    a: IntMatrix,
    u: Option<IntMatrix>,
    u_inv: Option<IntMatrix>,
    v: Option<IntMatrix>,
}

impl SnfCalc {
    fn new(a: IntMatrix, track: bool, track_inverse: bool) -> Self {
        let (r, c) = (a.rows(), a.cols());
        SnfCalc {
            a,
            u: track.then(|| IntMatrix::identity(r)),
            u_inv: track_inverse.then(|| IntMatrix::identity(r)),
            v: track.then(|| IntMatrix::identity(c)),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        if let Some(u) = &mut self.u {
            u.swap_rows(i, j);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.swap_cols(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        if let Some(v) = &mut self.v {
            v.swap_cols(i, j);
        }
    }

    /// `row[dst] += q * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, q: &Int) {
        self.a.add_row_multiple(dst, src, q);
        if let Some(u) = &mut self.u {
            u.add_row_multiple(dst, src, q);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.add_col_multiple(src, dst, &-q);
        }
    }

    /// `col[dst] += q * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, q: &Int) {
        self.a.add_col_multiple(dst, src, q);
        if let Some(v) = &mut self.v {
            v.add_col_multiple(dst, src, q);
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if let Some(u) = &mut self.u {
            u.negate_row(i);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.negate_col(i);
        }
    }

    /// Least |entry| in the block `[t.., t..]`, ties by (row, col).
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), Int)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().is_none_or(|(_, b)| ax < *b) {
                    best = Some(((i, j), ax));
                }
            }
        }
        best.map(|(p, _)| p)
    }

    /// Least |entry| among row t and column t of the active block.
    fn find_cross_pivot(&self, t: usize) -> (usize, usize) {
        let mut best = ((t, t), self.a[(t, t)].abs());
        for i in t + 1..self.a.rows() {
            let x = &self.a[(i, t)];
            if !x.is_zero() && (best.1.is_zero() || x.abs() < best.1) {
                best = ((i, t), x.abs());
            }
        }
        for j in t + 1..self.a.cols() {
            let x = &self.a[(t, j)];
            if !x.is_zero() && (best.1.is_zero() || x.abs() < best.1) {
                best = ((t, j), x.abs());
            }
        }
        best.0
    }

    fn run(&mut self) {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        for t in 0..rows.min(cols) {
            let Some((pi, pj)) = self.find_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..rows {
                    if self.a[(i, t)].is_zero() {
                        continue;
                    }
                    let q = self.a[(i, t)].div_floor(&self.a[(t, t)]);
                    self.add_row(i, t, &-q);
                    if !self.a[(i, t)].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..cols {
                    if self.a[(t, j)].is_zero() {
                        continue;
                    }
                    let q = self.a[(t, j)].div_floor(&self.a[(t, t)]);
                    self.add_col(j, t, &-q);
                    if !self.a[(t, j)].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    let (pi, pj) = self.find_cross_pivot(t);
                    self.swap_rows(t, pi);
                    self.swap_cols(t, pj);
                    continue;
                }
                // Row and column are clear; enforce divisibility on the rest.
                let p = self.a[(t, t)].clone();
                let bad = (t + 1..rows).find(|&i| {
                    (t + 1..cols).any(|j| !self.a[(i, j)].is_multiple_of(&p))
                });
                match bad {
                    Some(i) => self.add_row(t, i, &Int::one()),
                    None => break,
                }
            }
            if self.a[(t, t)].is_negative() {
                self.negate_row(t);
            }
        }
    }
}
