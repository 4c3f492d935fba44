use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{remove_content, Int, IntMatrix};
use super::snf::{invariant_factors, smith_normal_form, smith_normal_form_with_inverse};
use super::LatticeError;

/// Whether the torus homomorphism `T^k -> T^n` with weight rows `a` (n x k) is
/// injective: rank `k` and every invariant factor equal to one.
pub fn is_faithful_weight_matrix(a: &IntMatrix) -> bool {
    let factors = invariant_factors(a);
    factors.len() == a.cols() && factors.iter().all(One::is_one)
}

/// Full rank `min(rows, cols)` with all invariant factors one. For `rows <= cols`
/// this says the rows span a saturated sublattice.
pub fn has_unit_invariant_factors(a: &IntMatrix) -> bool {
    let factors = invariant_factors(a);
    factors.len() == a.rows().min(a.cols()) && factors.iter().all(One::is_one)
}

/// Columns `B` (n x (n-k)) with `|det [A | B]| = 1`.
pub fn unimodular_completion(a: &IntMatrix) -> Result<IntMatrix, LatticeError> {
    let (n, k) = (a.rows(), a.cols());
    if k > n || !is_faithful_weight_matrix(a) {
        return Err(LatticeError::NotCompletable);
    }
    // U A V = [I_k; 0]  =>  U^{-1} = [A V | B] with B the trailing columns.
    let (_, u_inv) = smith_normal_form_with_inverse(a);
    Ok(u_inv.column_slice(k..n))
}

/// The integer `c` with `v = c * w`, if there is one.
pub fn exact_ratio(v: &[Int], w: &[Int]) -> Result<Option<Int>, LatticeError> {
    if v.len() != w.len() {
        return Err(LatticeError::DimensionMismatch {
            expected: w.len(),
            found: v.len(),
        });
    }
    let Some(p) = w.iter().position(|x| !x.is_zero()) else {
        return Err(LatticeError::ZeroDivisor);
    };
    let (c, r) = v[p].div_rem(&w[p]);
    if !r.is_zero() {
        return Ok(None);
    }
    let ok = v.iter().zip(w).all(|(x, y)| *x == &c * y);
    Ok(ok.then_some(c))
}

/// Column operations bringing `a` to column echelon form: each pivot row holds
/// a single nonzero entry among the not-yet-pivoted columns. Returns the
/// number of pivots; the trailing columns of `a` are zero afterwards.
/// Column operations are mirrored into `track`.
fn column_echelon(a: &mut IntMatrix, mut track: Option<&mut IntMatrix>) -> Vec<(usize, usize)> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut next = 0;
    for i in 0..rows {
        if next == cols {
            break;
        }
        loop {
            // least nonzero |a[i][j]| among active columns
            let mut best: Option<(usize, Int)> = None;
            for j in next..cols {
                let x = &a[(i, j)];
                if !x.is_zero() {
                    let ax = x.abs();
                    if best.as_ref().is_none_or(|(_, b)| ax < *b) {
                        best = Some((j, ax));
                    }
                }
            }
            let Some((pj, _)) = best else { break };
            if pj != next {
                a.swap_cols(pj, next);
                if let Some(t) = track.as_deref_mut() {
                    t.swap_cols(pj, next);
                }
            }
            let mut clean = true;
            for j in next + 1..cols {
                if a[(i, j)].is_zero() {
                    continue;
                }
                let q = -a[(i, j)].div_floor(&a[(i, next)]);
                a.add_col_multiple(j, next, &q);
                if let Some(t) = track.as_deref_mut() {
                    t.add_col_multiple(j, next, &q);
                }
                if !a[(i, j)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                pivots.push((i, next));
                next += 1;
                break;
            }
        }
    }
    pivots
}

/// Column Hermite normal form of the lattice spanned by the columns of `a`:
/// zero columns dropped, pivots positive, entries left of each pivot reduced
/// into `[0, pivot)`.
pub fn column_hermite_basis(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    let pivots = column_echelon(&mut h, None);
    for (idx, &(i, j)) in pivots.iter().enumerate() {
        if h[(i, j)].is_negative() {
            h.negate_col(j);
        }
        for &(_, jj) in &pivots[..idx] {
            let q = -h[(i, jj)].div_floor(&h[(i, j)]);
            h.add_col_multiple(jj, j, &q);
        }
    }
    h.column_slice(0..pivots.len())
}

/// Basis (as columns) of the saturated lattice `{x in Z^cols : A x = 0}`, in
/// column Hermite form.
pub fn kernel_lattice(a: &IntMatrix) -> IntMatrix {
    let cols = a.cols();
    let mut work = a.clone();
    let mut v = IntMatrix::identity(cols);
    let r = column_echelon(&mut work, Some(&mut v)).len();
    column_hermite_basis(&v.column_slice(r..cols))
}

/// Group structure of `L / M` where `L` is spanned by the columns of `ambient`
/// and `M` by the columns of `sub`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientStructure {
    pub free_rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<Int>,
}

/// Coordinates `X` with `ambient * X = sub`, where `ambient` has independent
/// columns. Fails if some column of `sub` is outside the lattice.
pub fn solve_in_lattice(ambient: &IntMatrix, sub: &IntMatrix) -> Result<IntMatrix, LatticeError> {
    if ambient.rows() != sub.rows() {
        return Err(LatticeError::DimensionMismatch {
            expected: ambient.rows(),
            found: sub.rows(),
        });
    }
    let snf = smith_normal_form(ambient);
    let d = snf.invariant_factors();
    let r = d.len();
    if r < ambient.cols() {
        return Err(LatticeError::DependentBasis);
    }
    let y = &snf.u * sub;
    let mut z = IntMatrix::zeros(ambient.cols(), sub.cols());
    for j in 0..sub.cols() {
        for i in 0..y.rows() {
            let val = &y[(i, j)];
            if i < r {
                let (q, rem) = val.div_rem(&d[i]);
                if !rem.is_zero() {
                    return Err(LatticeError::NotASublattice);
                }
                z[(i, j)] = q;
            } else if !val.is_zero() {
                return Err(LatticeError::NotASublattice);
            }
        }
    }
    Ok(&snf.v * &z)
}

/// Structure of the quotient of the lattice spanned by `ambient_basis` by the
/// lattice spanned by `sub_basis` (columns in a common coordinate space).
pub fn quotient_structure(
    ambient_basis: &IntMatrix,
    sub_basis: &IntMatrix,
) -> Result<QuotientStructure, LatticeError> {
    let ambient = column_hermite_basis(ambient_basis);
    if ambient_basis.rows() != sub_basis.rows() {
        return Err(LatticeError::DimensionMismatch {
            expected: ambient_basis.rows(),
            found: sub_basis.rows(),
        });
    }
    if sub_basis.cols() == 0 {
        return Ok(QuotientStructure {
            free_rank: ambient.cols(),
            torsion: Vec::new(),
        });
    }
    let coords = solve_in_lattice(&ambient, sub_basis)?;
    let factors = invariant_factors(&coords);
    Ok(QuotientStructure {
        free_rank: ambient.cols() - factors.len(),
        torsion: factors.into_iter().filter(|d| !d.is_one()).collect(),
    })
}

/// Primitive integer vectors spanning the kernel of `a` over the rationals,
/// read off a fraction-free reduced row echelon form. One vector per free
/// column, in column order.
pub fn rational_kernel_basis(a: &IntMatrix) -> Vec<Vec<Int>> {
    let cols = a.cols();
    let (rows, pivots) = reduced_row_echelon(a);
    let pivot_of_col: Vec<Option<usize>> = {
        let mut m = vec![None; cols];
        for (r, &c) in pivots.iter().enumerate() {
            m[c] = Some(r);
        }
        m
    };
    let mut basis = Vec::new();
    for f in (0..cols).filter(|&c| pivot_of_col[c].is_none()) {
        // x_f = L, x_{p_r} = -L * rows[r][f] / rows[r][p_r]
        let l = pivots
            .iter()
            .enumerate()
            .filter(|(r, _)| !rows[*r][f].is_zero())
            .fold(Int::one(), |acc, (r, &p)| acc.lcm(&rows[r][p]));
        let mut x = vec![Int::zero(); cols];
        x[f] = l.clone();
        for (r, &p) in pivots.iter().enumerate() {
            if !rows[r][f].is_zero() {
                x[p] = -(&l * &rows[r][f]) / &rows[r][p];
            }
        }
        remove_content(&mut x);
        basis.push(x);
    }
    basis
}

/// Fraction-free reduced row echelon form: each pivot column is zero outside
/// its pivot row; rows are content-free with positive pivots.
fn reduced_row_echelon(a: &IntMatrix) -> (Vec<Vec<Int>>, Vec<usize>) {
    let cols = a.cols();
    let mut rows: Vec<Vec<Int>> = a.row_vecs();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .min_by(|&x, &y| rows[x][col].abs().cmp(&rows[y][col].abs()))
        else {
            continue;
        };
        rows.swap(rank, p);
        if rows[rank][col].is_negative() {
            for x in rows[rank].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        let pivot_row = rows[rank].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i == rank || r[col].is_zero() {
                continue;
            }
            let g = pivot_row[col].gcd(&r[col]);
            let a = &pivot_row[col] / &g;
            let b = &r[col] / &g;
            for j in 0..cols {
                if pivot_row[j].is_zero() && r[j].is_zero() {
                    continue;
                }
                r[j] = &r[j] * &a - &pivot_row[j] * &b;
            }
            remove_content(r);
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}
