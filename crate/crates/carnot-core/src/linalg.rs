//! Dense exact-rational matrices.
//!
//! Everything downstream (cohomology dimensions, the Rumin splitting, the
//! isotropy/regularity predicates) reduces to ranks, kernels and inverses of
//! matrices with rational entries. Ranks run fraction-free over integers
//! (Bareiss pivoting) after clearing denominators, which keeps intermediate
//! coefficient growth polynomial; reduced row echelon form over rationals is
//! used where actual basis vectors are needed, because its output is a
//! canonical representative of the row space.

use num::bigint::BigInt;
use num::Integer;
use num::{One, Zero};

use crate::ratio::Ratio;

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Ratio>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| crate::ratio::format_ratio(self.at(r, c)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Ratio::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Ratio::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Ratio) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Ratio>>) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == nc));
        Mat {
            rows: nr,
            cols: nc,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_columns(cols: Vec<Vec<Ratio>>) -> Self {
        Mat::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Ratio {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Ratio {
        &mut self.data[r * self.cols + c]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ratio::is_zero)
    }

    pub fn column(&self, c: usize) -> Vec<Ratio> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    *out.at_mut(r, c) += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Ratio]) -> Vec<Ratio> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = Ratio::zero();
                for (c, value) in v.iter().enumerate() {
                    let a = self.at(r, c);
                    if !a.is_zero() && !value.is_zero() {
                        acc += a * value;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self.at(r, c) - rhs.at(r, c))
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.rows, rhs.rows);
        Mat::from_fn(self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols {
                self.at(r, c).clone()
            } else {
                rhs.at(r, c - self.cols).clone()
            }
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.cols);
        Mat::from_fn(self.rows + rhs.rows, self.cols, |r, c| {
            if r < self.rows {
                self.at(r, c).clone()
            } else {
                rhs.at(r - self.rows, c).clone()
            }
        })
    }

    /// Reduced row echelon form together with the pivot column indices.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    let tmp = m.at(p, c).clone();
                    *m.at_mut(p, c) = m.at(row, c).clone();
                    *m.at_mut(row, c) = tmp;
                }
            }
            let inv = m.at(row, col).clone().recip();
            for c in col..m.cols {
                let v = m.at(row, c) * &inv;
                *m.at_mut(row, c) = v;
            }
            for r in 0..m.rows {
                if r == row || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for c in col..m.cols {
                    let v = m.at(r, c) - &factor * m.at(row, c);
                    *m.at_mut(r, c) = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Rank by fraction-free Bareiss elimination over cleared integers.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| {
                let mut lcm = BigInt::one();
                for c in 0..self.cols {
                    lcm = lcm.lcm(self.at(r, c).denom());
                }
                (0..self.cols)
                    .map(|c| {
                        let x = self.at(r, c);
                        x.numer() * (&lcm / x.denom())
                    })
                    .collect()
            })
            .collect();
        let mut prev = BigInt::one();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(p, row);
            for r in row + 1..self.rows {
                for c in col + 1..self.cols {
                    let num = &m[row][col] * &m[r][c] - &m[r][col] * &m[row][c];
                    debug_assert!((&num % &prev).is_zero(), "Bareiss divisibility broken");
                    m[r][c] = num / &prev;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[row][col].clone();
            row += 1;
        }
        row
    }

    /// Columns spanning the null space, ordered by free column, each
    /// normalized so that its free coordinate is one.
    pub fn kernel_basis(&self) -> Mat {
        let (r, pivots) = self.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (pr, &pc) in pivots.iter().enumerate() {
                v[pc] = Some(pr);
            }
            v
        };
        let free: Vec<usize> = (0..self.cols)
            .filter(|c| pivot_of_col[*c].is_none())
            .collect();
        let mut out = Mat::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            *out.at_mut(f, k) = Ratio::one();
            for (pr, &pc) in pivots.iter().enumerate() {
                *out.at_mut(pc, k) = -r.at(pr, f).clone();
            }
        }
        out
    }

    /// Canonical basis of the row space: the nonzero rows of the RREF.
    pub fn row_space_canonical(&self) -> Mat {
        let (r, pivots) = self.rref();
        Mat::from_fn(pivots.len(), self.cols, |i, c| r.at(i, c).clone())
    }

    /// Canonical basis of the column space, returned as columns.
    pub fn column_space_canonical(&self) -> Mat {
        self.transpose().row_space_canonical().transpose()
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = self.hstack(&Mat::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| r.at(i, j + n).clone()))
    }

    /// Submatrix given by row and column position lists, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat {
        Mat::from_fn(rows.len(), cols.len(), |r, c| {
            self.at(rows[r], cols[c]).clone()
        })
    }

    /// True when every nonzero entry satisfies `allowed(row, col)`.
    pub fn support_within(&self, allowed: impl Fn(usize, usize) -> bool) -> bool {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if !self.at(r, c).is_zero() && !allowed(r, c) {
                    return false;
                }
            }
        }
        true
    }
}

/// Do the given columns span direct summands filling the whole space?
/// Checks that the horizontal stack is square and invertible.
pub fn is_direct_sum_basis(parts: &[&Mat], dim: usize) -> bool {
    let total: usize = parts.iter().map(|m| m.cols()).sum();
    if total != dim {
        return false;
    }
    let mut stacked = Mat::zeros(dim, 0);
    for part in parts {
        assert_eq!(part.rows(), dim);
        stacked = stacked.hstack(part);
    }
    stacked.rank() == dim
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::frac;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| frac(x, 1)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_rref_agree() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.rref().1.len(), 2);
    }

    #[test]
    fn rank_handles_rationals() {
        let a = Mat::from_rows(vec![
            vec![frac(1, 2), frac(1, 3)],
            vec![frac(3, 2), frac(2, 1)],
        ]);
        assert_eq!(a.rank(), 2);
        // Third row is a multiple of the first: rank stays 2.
        let b = Mat::from_rows(vec![
            vec![frac(1, 2), frac(1, 3)],
            vec![frac(3, 2), frac(2, 1)],
            vec![frac(2, 1), frac(4, 3)],
        ]);
        assert_eq!(b.rank(), 2);
        // Singular rational matrix.
        let c = Mat::from_rows(vec![
            vec![frac(1, 2), frac(1, 3)],
            vec![frac(3, 2), frac(1, 1)],
        ]);
        assert_eq!(c.rank(), 1);
    }

    #[test]
    fn kernel_is_annihilated() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = a.kernel_basis();
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(2));
        let singular = m(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn direct_sum_detection() {
        let e1 = Mat::from_columns(vec![vec![frac(1, 1), frac(0, 1)]]);
        let e2 = Mat::from_columns(vec![vec![frac(1, 1), frac(1, 1)]]);
        assert!(is_direct_sum_basis(&[&e1, &e2], 2));
        assert!(!is_direct_sum_basis(&[&e1, &e1], 2));
        assert!(!is_direct_sum_basis(&[&e1], 2));
    }

    #[test]
    fn row_space_is_canonical_under_row_ops() {
        let a = m(&[&[1, 2, 0], &[0, 0, 1]]);
        let b = m(&[&[2, 4, 1], &[3, 6, -1]]);
        assert_eq!(a.row_space_canonical(), b.row_space_canonical());
    }
}
