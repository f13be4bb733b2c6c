//! Dense linear algebra over the constant field `K`.

use alloc::vec::Vec;

use crate::ratfunc::RatFunc;

pub type Matrix = Vec<Vec<RatFunc>>;

/// Reduced row echelon form, visiting columns in `order`. Zero rows are
/// dropped. Returns the pivot column of each remaining row.
pub fn rref_with_order(m: &mut Matrix, order: &[usize]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for &c in order {
        if row >= m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][c].inv().unwrap();
        if !inv.is_one() {
            for x in m[row].iter_mut() {
                if !x.is_zero() {
                    *x = x.mul(&inv);
                }
            }
        }
        let prow = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[c].is_zero() {
                continue;
            }
            let f = other[c].clone();
            for (x, y) in other.iter_mut().zip(prow.iter()) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    m.truncate(row);
    m.retain(|r| r.iter().any(|x| !x.is_zero()));
    pivots
}

pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let n = m.first().map_or(0, |r| r.len());
    let order: Vec<usize> = (0..n).collect();
    rref_with_order(m, &order)
}

/// Basis of `{x : m x = 0}` for a matrix with `ncols` columns.
pub fn nullspace(m: &Matrix, ncols: usize) -> Matrix {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = alloc::vec![RatFunc::zero(); ncols];
        v[free] = RatFunc::one();
        for (row, &pc) in a.iter().zip(pivots.iter()) {
            v[pc] = row[free].neg();
        }
        out.push(v);
    }
    out
}
