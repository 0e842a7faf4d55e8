//! Exact rank of order-3 tensors over GF(p) via slice spaces.
//!
//! A 3-tensor has rank <= k exactly when its mode-1 slices lie in the span of
//! k rank-one matrices, i.e. when some subspace V containing the slice span U
//! is spanned by its own rank-one elements with dim V <= k. The minimum such
//! dimension is the rank, so searching dimensions r, r+1, .. upward from
//! r = dim U gives the exact value with a tiny search space: the candidate
//! extensions live in the quotient F^(n^2) / U.

use crate::error::{Error, Result};

use super::space::{ff_rref, ff_solve_columns, inv_table, FfShape};
use super::Budget;

struct Search<'a> {
    p: u32,
    n: usize,
    nn: usize,
    /// rref basis of the slice span
    u_basis: Vec<Vec<u8>>,
    u_pivots: Vec<usize>,
    /// all vectors of span(U) (including zero), for cheap element sweeps
    u_elements: Vec<Vec<u8>>,
    nodes: u64,
    budget: &'a Budget,
}

/// rank <= 1 test for an n x n digit matrix: locate a pivot and check the
/// minors through it.
fn is_rank_le_1(v: &[u8], p: u32, n: usize) -> bool {
    let mut pivot = None;
    'find: for i in 0..n {
        for j in 0..n {
            if v[i * n + j] != 0 {
                pivot = Some((i, j));
                break 'find;
            }
        }
    }
    let Some((pi, pj)) = pivot else {
        return false; // zero matrix: not a usable generator
    };
    let pv = v[pi * n + pj] as u64;
    let p64 = p as u64;
    for i in 0..n {
        if i == pi {
            continue;
        }
        for j in 0..n {
            if j == pj {
                continue;
            }
            let lhs = v[i * n + j] as u64 * pv % p64;
            let rhs = v[i * n + pj] as u64 * v[pi * n + j] as u64 % p64;
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Split a rank-one n x n digit matrix into (row vector, column vector) with
/// m = y z^T.
fn split_rank_one(v: &[u8], p: u32, n: usize) -> (Vec<u8>, Vec<u8>) {
    let inv = inv_table(p);
    let (mut pi, mut pj) = (0, 0);
    'find: for i in 0..n {
        for j in 0..n {
            if v[i * n + j] != 0 {
                pi = i;
                pj = j;
                break 'find;
            }
        }
    }
    let piv_inv = inv[v[pi * n + pj] as usize] as u64;
    let y: Vec<u8> = (0..n).map(|i| v[i * n + pj]).collect();
    let z: Vec<u8> = (0..n)
        .map(|j| (v[pi * n + j] as u64 * piv_inv % p as u64) as u8)
        .collect();
    (y, z)
}

impl<'a> Search<'a> {
    fn new(digits: &[u8], shape: &FfShape, budget: &'a Budget) -> Result<Search<'a>> {
        if shape.d != 3 {
            return Err(Error::Internal("slice ranks are an order-3 method".into()));
        }
        let n = shape.n;
        let nn = n * n;
        // mode-1 slices are contiguous in the row-major layout
        let mut rows: Vec<Vec<u8>> = (0..n).map(|a| digits[a * nn..(a + 1) * nn].to_vec()).collect();
        let u_pivots = ff_rref(&mut rows, shape.p);
        let u_basis = rows;
        let mut u_elements = vec![vec![0u8; nn]];
        for b in &u_basis {
            let mut grown = Vec::new();
            for e in &u_elements {
                for c in 1..shape.p as u8 {
                    let mut v = e.clone();
                    for i in 0..nn {
                        v[i] = ((v[i] as u32 + c as u32 * b[i] as u32) % shape.p) as u8;
                    }
                    grown.push(v);
                }
            }
            u_elements.extend(grown);
        }
        Ok(Search { p: shape.p, n, nn, u_basis, u_pivots, u_elements, nodes: 0, budget })
    }

    fn r(&self) -> usize {
        self.u_basis.len()
    }

    fn charge(&mut self, amount: u64) -> Result<()> {
        self.nodes += amount;
        if self.nodes > self.budget.search_nodes {
            Err(Error::BudgetExceeded(format!(
                "slice-space search exceeded {} nodes",
                self.budget.search_nodes
            )))
        } else {
            Ok(())
        }
    }

    /// Rank-one elements of span(U) itself (projective sweep over U).
    fn rank_ones_in_u(&mut self) -> Result<Vec<Vec<u8>>> {
        self.charge(self.u_elements.len() as u64)?;
        Ok(self
            .u_elements
            .iter()
            .filter(|v| is_rank_le_1(v, self.p, self.n))
            .cloned()
            .collect())
    }

    /// Do the given vectors span a space of dimension `dim`?
    fn spans_dim(&self, vectors: &[Vec<u8>], dim: usize) -> bool {
        if vectors.len() < dim {
            return false;
        }
        let mut work = vectors.to_vec();
        ff_rref(&mut work, self.p).len() == dim
    }

    /// Enumerate the k-dimensional subspaces of the quotient F^(n^2)/U in
    /// reduced echelon form and test each extension V = U + lift(W): is V
    /// spanned by its rank-one elements? On success returns such a spanning
    /// rank-one set.
    fn try_extensions(&mut self, k: usize) -> Result<Option<Vec<Vec<u8>>>> {
        if k == 0 {
            let ones = self.rank_ones_in_u()?;
            if self.spans_dim(&ones, self.r()) {
                return Ok(Some(ones));
            }
            return Ok(None);
        }
        let free: Vec<usize> = (0..self.nn).filter(|i| !self.u_pivots.contains(i)).collect();
        let q = free.len();
        if k > q {
            return Ok(None);
        }
        let u_rank_ones = self.rank_ones_in_u()?;

        // Choose the k pivot columns, then fill each row's free entries:
        // row i has a 1 at pivot_i, zeros at and before earlier positions and
        // at all other pivots, arbitrary values elsewhere right of pivot_i.
        let p64 = self.p as u64;
        let mut pivots: Vec<usize> = (0..k).collect();
        loop {
            let free_slots: Vec<Vec<usize>> = (0..k)
                .map(|i| {
                    ((pivots[i] + 1)..q)
                        .filter(|pos| !pivots.contains(pos))
                        .collect()
                })
                .collect();
            let total_free: usize = free_slots.iter().map(|s| s.len()).sum();
            let combos = p64.pow(total_free as u32);
            self.charge(combos)?;
            for mut code in 0..combos {
                let mut rows: Vec<Vec<u8>> = vec![vec![0u8; q]; k];
                for i in 0..k {
                    rows[i][pivots[i]] = 1;
                    for &pos in &free_slots[i] {
                        rows[i][pos] = (code % p64) as u8;
                        code /= p64;
                    }
                }
                if let Some(found) = self.check_extension(&free, &u_rank_ones, &rows)? {
                    return Ok(Some(found));
                }
            }
            // next pivot combination
            let mut i = k;
            while i > 0 && pivots[i - 1] == q - k + (i - 1) {
                i -= 1;
            }
            if i == 0 {
                return Ok(None);
            }
            pivots[i - 1] += 1;
            for j in i..k {
                pivots[j] = pivots[j - 1] + 1;
            }
        }
    }

    fn check_extension(
        &mut self,
        free: &[usize],
        u_rank_ones: &[Vec<u8>],
        rows: &[Vec<u8>],
    ) -> Result<Option<Vec<Vec<u8>>>> {
        let k = rows.len();
        let target_dim = self.r() + k;
        // lift quotient rows into full vectors (zero at U's pivot columns)
        let lifted: Vec<Vec<u8>> = rows
            .iter()
            .map(|row| {
                let mut v = vec![0u8; self.nn];
                for (qi, &pos) in free.iter().enumerate() {
                    v[pos] = row[qi];
                }
                v
            })
            .collect();
        // sweep all projective elements of V with a nonzero lifted part:
        // w + u for w in span(lifted) \ {0} (projective reps), u in span(U)
        let mut w_reps: Vec<Vec<u8>> = Vec::new();
        let total = (self.p as u64).pow(k as u32);
        for mut code in 1..total {
            let mut coeffs = vec![0u8; k];
            for slot in coeffs.iter_mut() {
                *slot = (code % self.p as u64) as u8;
                code /= self.p as u64;
            }
            if coeffs.iter().find(|&&c| c != 0) != Some(&1) {
                continue;
            }
            let mut v = vec![0u8; self.nn];
            for (ci, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    for i in 0..self.nn {
                        v[i] = ((v[i] as u32 + c as u32 * lifted[ci][i] as u32) % self.p) as u8;
                    }
                }
            }
            w_reps.push(v);
        }
        self.charge((w_reps.len() * self.u_elements.len()) as u64)?;
        let mut found: Vec<Vec<u8>> = u_rank_ones.to_vec();
        for w in &w_reps {
            for u in &self.u_elements {
                let mut v = vec![0u8; self.nn];
                for i in 0..self.nn {
                    let s = w[i] + u[i];
                    v[i] = if s >= self.p as u8 { s - self.p as u8 } else { s };
                }
                if is_rank_le_1(&v, self.p, self.n) {
                    found.push(v);
                }
            }
        }
        if self.spans_dim(&found, target_dim) {
            Ok(Some(found))
        } else {
            Ok(None)
        }
    }
}

/// Exact rank of an order-3 digit tensor, or None if it exceeds `max_rank`.
pub fn slice_rank_at_most(
    digits: &[u8],
    shape: &FfShape,
    max_rank: usize,
    budget: &Budget,
) -> Result<Option<u32>> {
    let mut search = Search::new(digits, shape, budget)?;
    let r = search.r();
    if r == 0 {
        return Ok(Some(0));
    }
    if max_rank < r {
        return Ok(None);
    }
    let top = max_rank.min(search.nn);
    for m in r..=top {
        if search.try_extensions(m - r)?.is_some() {
            return Ok(Some(m as u32));
        }
    }
    Ok(None)
}

/// Exact rank of an order-3 digit tensor (complete search up to dim n^2).
pub fn slice_rank_exact(digits: &[u8], shape: &FfShape, budget: &Budget) -> Result<u32> {
    match slice_rank_at_most(digits, shape, shape.n * shape.n, budget)? {
        Some(v) => Ok(v),
        None => Err(Error::Internal(
            "the full matrix space is spanned by rank ones; search cannot fail".into(),
        )),
    }
}

/// A rank witness: terms (x, y, z) with t = sum x_i (x) y_i (x) z_i.
pub fn slice_rank_witness(
    digits: &[u8],
    shape: &FfShape,
    budget: &Budget,
) -> Result<(u32, Vec<(Vec<u8>, Vec<u8>, Vec<u8>)>)> {
    let mut search = Search::new(digits, shape, budget)?;
    let r = search.r();
    if r == 0 {
        return Ok((0, Vec::new()));
    }
    for m in r..=search.nn {
        if let Some(ones) = search.try_extensions(m - r)? {
            // greedy independent subset of size m
            let mut basis: Vec<Vec<u8>> = Vec::new();
            for v in &ones {
                if basis.len() == m {
                    break;
                }
                let mut trial = basis.clone();
                trial.push(v.clone());
                if ff_rref(&mut trial, shape.p).len() == basis.len() + 1 {
                    basis.push(v.clone());
                }
            }
            debug_assert_eq!(basis.len(), m);
            // solve slice_a = sum_i c_{a,i} basis_i
            let n = shape.n;
            let nn = n * n;
            let mut xs: Vec<Vec<u8>> = vec![vec![0u8; n]; m];
            for a in 0..n {
                let rhs = &digits[a * nn..(a + 1) * nn];
                let coeffs = ff_solve_columns(&basis, rhs, shape.p)
                    .ok_or_else(|| Error::Internal("slice outside spanned space".into()))?;
                for i in 0..m {
                    xs[i][a] = coeffs[i];
                }
            }
            let mut terms = Vec::new();
            for (i, b) in basis.iter().enumerate() {
                let (y, z) = split_rank_one(b, shape.p, n);
                terms.push((xs[i].clone(), y, z));
            }
            // drop terms whose x vector is zero (the basis element was not
            // actually needed by the slices)
            terms.retain(|(x, _, _)| x.iter().any(|&v| v != 0));
            return Ok((m as u32, terms));
        }
    }
    Err(Error::Internal("slice search exhausted all dimensions".into()))
}
