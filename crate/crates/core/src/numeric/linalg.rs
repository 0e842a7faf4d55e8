//! Small dense complex matrices with a one-sided Jacobi SVD.
//!
//! Shapes here are tiny (at most a handful of rows or columns), so a simple
//! robust Jacobi sweep beats pulling in a full linear algebra stack and keeps
//! the tolerance story explicit.

use num_complex::Complex64;

pub const JACOBI_EPS: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>, // row-major
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> CMat {
        CMat { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> CMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        CMat { rows: r, cols: c, data }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) * v[k]).sum())
            .collect()
    }

    pub fn inverse2(&self) -> Option<CMat> {
        assert_eq!((self.rows, self.cols), (2, 2));
        let det = self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0);
        if det.norm() == 0.0 {
            return None;
        }
        let mut out = CMat::zeros(2, 2);
        out.set(0, 0, self.get(1, 1) / det);
        out.set(0, 1, -self.get(0, 1) / det);
        out.set(1, 0, -self.get(1, 0) / det);
        out.set(1, 1, self.get(0, 0) / det);
        Some(out)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct Svd {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Orthonormal columns of U (length = rows), one per singular value.
    pub left: Vec<Vec<Complex64>>,
    /// Orthonormal columns of V.
    pub right: Vec<Vec<Complex64>>,
}

impl Svd {
    pub fn rank(&self, rel_tol: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.singular_values.iter().filter(|&&s| s > rel_tol * top).count()
    }
}

/// One-sided Jacobi SVD. Exact enough for the tiny matrices this crate uses.
pub fn svd(a: &CMat) -> Svd {
    if a.cols > a.rows {
        let s = svd(&a.adjoint());
        return Svd { singular_values: s.singular_values, left: s.right, right: s.left };
    }
    let n = a.cols;
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();

    let dot = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
        x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
    };

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let gii = dot(&cols[i], &cols[i]).re;
                let gjj = dot(&cols[j], &cols[j]).re;
                let gij = dot(&cols[i], &cols[j]);
                let mag = gij.norm();
                if mag <= JACOBI_EPS * (gii * gjj).sqrt().max(f64::MIN_POSITIVE) {
                    continue;
                }
                rotated = true;
                let phase = gij / mag;
                let tau = (gii - gjj) / (2.0 * mag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // columns i, j <- [ci cj] * [[c, -s*phase],[s*conj(phase), c]]
                for row in 0..cols[i].len() {
                    let ci = cols[i][row];
                    let cj = cols[j][row];
                    cols[i][row] = c * ci + s * phase.conj() * cj;
                    cols[j][row] = -s * phase * ci + c * cj;
                }
                for row in 0..n {
                    let vi = v[i][row];
                    let vj = v[j][row];
                    v[i][row] = c * vi + s * phase.conj() * vj;
                    v[j][row] = -s * phase * vi + c * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let mut singular_values = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for &k in &order {
        let s = norms[k];
        singular_values.push(s);
        let u = if s > 0.0 {
            cols[k].iter().map(|z| z / s).collect()
        } else {
            vec![Complex64::new(0.0, 0.0); cols[k].len()]
        };
        left.push(u);
        right.push(v[k].clone());
    }
    Svd { singular_values, left, right }
}

/// Eigenvalues of a 2x2 complex matrix, by the quadratic formula.
pub fn eigenvalues_2x2(m: &CMat) -> (Complex64, Complex64) {
    assert_eq!((m.rows, m.cols), (2, 2));
    let tr = m.get(0, 0) + m.get(1, 1);
    let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
    let disc = (tr * tr - 4.0 * det).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

/// A kernel direction of an (approximately) singular 2x2 matrix, via the
/// adjugate: columns of adj(N) lie in ker(N) when det(N) = 0.
pub fn kernel_direction_2x2(n: &CMat) -> Vec<Complex64> {
    assert_eq!((n.rows, n.cols), (2, 2));
    let c1 = [n.get(1, 1), -n.get(1, 0)];
    let c2 = [-n.get(0, 1), n.get(0, 0)];
    let n1 = c1[0].norm_sqr() + c1[1].norm_sqr();
    let n2 = c2[0].norm_sqr() + c2[1].norm_sqr();
    let (v, nv) = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
    if nv == 0.0 {
        // N = 0: anything is in the kernel
        return vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    }
    let s = nv.sqrt();
    vec![v[0] / s, v[1] / s]
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    // <x, y> = sum x * conj(y)
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn svd_recovers_rank_and_factors() {
        // rank-1 real
        let m = CMat::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0), c(6.0, 0.0)],
        ]);
        let s = svd(&m);
        assert_eq!(s.rank(1e-8), 1);
        let expect = (1.0f64 + 4.0 + 9.0 + 4.0 + 16.0 + 36.0).sqrt();
        assert!((s.singular_values[0] - expect).abs() < 1e-12);

        // reconstruct A = U S V^H for a random-ish complex matrix
        let m = CMat::from_rows(&[
            vec![c(1.0, 1.0), c(0.0, -2.0)],
            vec![c(3.0, 0.5), c(1.0, 0.0)],
            vec![c(-1.0, 2.0), c(0.5, 0.5)],
        ]);
        let s = svd(&m);
        for i in 0..3 {
            for j in 0..2 {
                let mut acc = c(0.0, 0.0);
                for k in 0..s.singular_values.len() {
                    acc += s.left[k][i] * s.singular_values[k] * s.right[k][j].conj();
                }
                assert!((acc - m.get(i, j)).norm() < 1e-10);
            }
        }
        // orthonormality of left vectors
        for a in 0..2 {
            for b in 0..2 {
                let d: Complex64 = (0..3).map(|i| s.left[a][i].conj() * s.left[b][i]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((d - c(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn eigen_2x2_and_kernel() {
        let m = CMat::from_rows(&[vec![c(2.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(3.0, 0.0)]]);
        let (l1, l2) = eigenvalues_2x2(&m);
        let mut vals = [l1.re, l2.re];
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] - 2.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);

        // nilpotent [[0,1],[0,0]]: kernel is e1
        let n = CMat::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        let k = kernel_direction_2x2(&n);
        assert!(k[1].norm() < 1e-14 && (k[0].norm() - 1.0).abs() < 1e-12);
    }
}
