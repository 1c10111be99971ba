//! Exact linear algebra over the integers and rationals (Bareiss elimination).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::coeff::Q;

/// Fraction-free forward elimination of `rows` in place.
///
/// Returns the pivot columns. Every division performed is exact.
fn bareiss(rows: &mut [Vec<BigInt>], ncols_pivot: usize) -> Vec<usize> {
    let nrows = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols_pivot {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let (top, bottom) = rows.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in bottom.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..width {
                row[j] = (&row[j] * &pivot_row[c] - &factor * &pivot_row[j]) / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = rows[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of an integer matrix.
pub fn rank(matrix: &[Vec<BigInt>]) -> usize {
    let mut rows = matrix.to_vec();
    let ncols = rows.first().map_or(0, Vec::len);
    bareiss(&mut rows, ncols).len()
}

/// Inverse of a square integer matrix, or `None` when it is singular.
pub fn inverse(matrix: &[Vec<BigInt>]) -> Option<Vec<Vec<Q>>> {
    let n = matrix.len();
    let mut rows: Vec<Vec<BigInt>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }));
            r
        })
        .collect();
    if bareiss(&mut rows, n).len() < n {
        return None;
    }
    // Back substitution on the triangular system, one right-hand side per column.
    let mut inv = vec![vec![Q::zero(); n]; n];
    for col in 0..n {
        for i in (0..n).rev() {
            let mut acc = Q::from_integer(rows[i][n + col].clone());
            for j in i + 1..n {
                if !rows[i][j].is_zero() {
                    acc -= &inv[j][col] * Q::from_integer(rows[i][j].clone());
                }
            }
            inv[i][col] = acc / Q::from_integer(rows[i][i].clone());
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn inverse_of_small_matrix() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        let expect = [[1, -1], [-1, 2]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(inv[i][j], Q::from_integer(expect[i][j].into()));
            }
        }
    }

    #[test]
    fn singular_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert!(inverse(&a).is_none());
        assert_eq!(rank(&a), 2);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn needs_pivoting() {
        let a = m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 3]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv[0][1], Q::one());
        assert_eq!(inv[2][2], Q::new(1.into(), 3.into()));
    }
}
