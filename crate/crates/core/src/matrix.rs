//! Exact dense matrices over any [`Scalar`] field, with Gaussian elimination.
//!
//! Everything here is exact for exact tags; float callers should go through
//! the numeric module instead.

use crate::field::{FieldTag, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    tag: FieldTag,
    data: Vec<Scalar>, // row-major
}

impl Mat {
    pub fn new(rows: usize, cols: usize, tag: FieldTag, data: Vec<Scalar>) -> Mat {
        assert_eq!(rows * cols, data.len());
        Mat { rows, cols, tag, data }
    }

    pub fn zeros(rows: usize, cols: usize, tag: FieldTag) -> Mat {
        Mat { rows, cols, tag, data: vec![Scalar::zero(tag); rows * cols] }
    }

    pub fn identity(n: usize, tag: FieldTag) -> Mat {
        let mut m = Mat::zeros(n, n, tag);
        for i in 0..n {
            m.set(i, i, Scalar::one(tag));
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Scalar>], tag: FieldTag) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row.iter().cloned());
        }
        Mat { rows: r, cols: c, tag, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows, self.tag);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols, self.tag);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Scalar::zero(self.tag);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero(self.tag);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    /// Pivot choice is the first nonzero entry in each column, so the result
    /// is deterministic.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    let a = m.get(r, j).clone();
                    let b = m.get(pr, j).clone();
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = m.get(r, c).inv().expect("pivot nonzero");
            for j in 0..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in 0..m.cols {
                        let v = m.get(i, j).sub(&m.get(r, j).mul(&f));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Exact rank by elimination.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Solve self * x = b; None when inconsistent. Self may be any shape;
    /// free variables are set to zero.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zeros(self.rows, self.cols + 1, self.tag);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        // inconsistent if a pivot lands in the last column
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(self.tag); self.cols];
        for (pi, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(pi, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n, self.tag);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one(self.tag));
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut out = Mat::zeros(n, n, self.tag);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    pub fn det2(&self) -> Scalar {
        assert_eq!((self.rows, self.cols), (2, 2));
        self.get(0, 0)
            .mul(self.get(1, 1))
            .sub(&self.get(0, 1).mul(self.get(1, 0)))
    }

    /// Basis of the column space: the pivot columns of the original matrix,
    /// in order (deterministic, first-pivot rule).
    pub fn column_space_basis(&self) -> Vec<Vec<Scalar>> {
        let (_, piv) = self.rref();
        piv.iter().map(|&c| self.col(c)).collect()
    }

    /// Rank of a set of vectors (as rows).
    pub fn rank_of_rows(vectors: &[Vec<Scalar>], tag: FieldTag) -> usize {
        if vectors.is_empty() {
            return 0;
        }
        Mat::from_rows(vectors, tag).rank()
    }
}

/// Are two vectors collinear (one a scalar multiple of the other, both nonzero)?
pub fn collinear(a: &[Scalar], b: &[Scalar], tag: FieldTag) -> bool {
    if crate::tensor::vec_is_zero(a) || crate::tensor::vec_is_zero(b) {
        return false;
    }
    Mat::rank_of_rows(&[a.to_vec(), b.to_vec()], tag) == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Scalar {
        Scalar::from_i64(FieldTag::Rational, v)
    }

    #[test]
    fn rank_examples() {
        let g2 = FieldTag::Finite(2);
        let m = Mat::from_rows(
            &[
                vec![Scalar::zero(g2), Scalar::one(g2)],
                vec![Scalar::one(g2), Scalar::zero(g2)],
            ],
            g2,
        );
        assert_eq!(m.rank(), 2);

        let z = Mat::zeros(3, 4, FieldTag::Rational);
        assert_eq!(z.rank(), 0);

        let m = Mat::from_rows(&[vec![q(1), q(1)], vec![q(1), q(1)]], FieldTag::Rational);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn solve_and_inverse_round_trip() {
        let g5 = FieldTag::Finite(5);
        let s = |v: i64| Scalar::from_i64(g5, v);
        let m = Mat::from_rows(
            &[vec![s(2), s(3), s(1)], vec![s(0), s(1), s(4)], vec![s(1), s(0), s(3)]],
            g5,
        );
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Mat::identity(3, g5));

        let x = vec![s(3), s(1), s(2)];
        let b = m.mul_vec(&x);
        let got = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&got), b);

        // singular
        let m = Mat::from_rows(&[vec![q(1), q(2)], vec![q(2), q(4)]], FieldTag::Rational);
        assert!(m.inverse().is_none());
        assert!(m.solve(&[q(1), q(0)]).is_none());
    }

    #[test]
    fn column_space_basis_picks_pivot_columns() {
        let m = Mat::from_rows(
            &[vec![q(1), q(2), q(3)], vec![q(2), q(4), q(7)]],
            FieldTag::Rational,
        );
        let basis = m.column_space_basis();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], vec![q(1), q(2)]);
        assert_eq!(basis[1], vec![q(3), q(7)]);
    }

    #[test]
    fn collinearity() {
        assert!(collinear(&[q(1), q(2)], &[q(2), q(4)], FieldTag::Rational));
        assert!(!collinear(&[q(1), q(2)], &[q(2), q(5)], FieldTag::Rational));
        assert!(!collinear(&[q(0), q(0)], &[q(0), q(0)], FieldTag::Rational));
    }
}
