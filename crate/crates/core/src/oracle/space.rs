//! Digit-level representation of tensors over GF(p) for exhaustive search:
//! dense base-p encodings, the symmetric orbit coordinate system, projective
//! representatives, and rank-one generator sets.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{FieldTag, Scalar};
use crate::tensor::{multi_indices, SymTensor, Tensor};

/// Shape of a dense GF(p) tensor space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FfShape {
    pub p: u32,
    pub d: usize,
    pub n: usize,
}

impl FfShape {
    pub fn entry_count(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// p^(n^d) if it fits in u64.
    pub fn space_size(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for _ in 0..self.entry_count() {
            acc = acc.checked_mul(self.p as u64)?;
        }
        Some(acc)
    }

    pub fn encode(&self, digits: &[u8]) -> u64 {
        debug_assert_eq!(digits.len(), self.entry_count());
        let mut acc: u64 = 0;
        for &v in digits.iter().rev() {
            acc = acc * self.p as u64 + v as u64;
        }
        acc
    }

    pub fn decode(&self, mut code: u64, out: &mut [u8]) {
        let p = self.p as u64;
        for slot in out.iter_mut() {
            *slot = (code % p) as u8;
            code /= p;
        }
    }

    pub fn add_into(&self, a: &[u8], b: &[u8], out: &mut [u8]) {
        let p = self.p as u8;
        for i in 0..a.len() {
            let s = a[i] + b[i];
            out[i] = if s >= p { s - p } else { s };
        }
    }

    pub fn sub_into(&self, a: &[u8], b: &[u8], out: &mut [u8]) {
        let p = self.p as u8;
        for i in 0..a.len() {
            out[i] = if a[i] >= b[i] { a[i] - b[i] } else { a[i] + p - b[i] };
        }
    }

    pub fn from_tensor(t: &Tensor) -> Result<(FfShape, Vec<u8>)> {
        let FieldTag::Finite(p) = t.tag() else {
            return Err(Error::UnsupportedField(
                t.tag(),
                "exhaustive search needs a finite field".into(),
            ));
        };
        let shape = FfShape { p, d: t.order(), n: t.dim() };
        let digits = t
            .entries()
            .iter()
            .map(|s| s.as_finite().expect("finite tag").1 as u8)
            .collect();
        Ok((shape, digits))
    }

    pub fn to_tensor(&self, digits: &[u8]) -> Tensor {
        let tag = FieldTag::Finite(self.p);
        let entries = digits
            .iter()
            .map(|&v| Scalar::Finite { p: self.p, residue: v as u32 })
            .collect();
        Tensor::new(self.d, self.n, tag, entries).expect("digit count matches")
    }
}

/// Projective representatives of F_p^n \ {0}: first nonzero coordinate 1,
/// in lexicographic order.
pub fn projective_reps(p: u32, n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let total = (p as u64).pow(n as u32);
    let mut v = vec![0u8; n];
    for code in 1..total {
        let mut c = code;
        for slot in v.iter_mut() {
            *slot = (c % p as u64) as u8;
            c /= p as u64;
        }
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(v.clone());
        }
    }
    out
}

/// Multiplicative inverse tables for the supported primes.
pub fn inv_table(p: u32) -> Vec<u8> {
    let mut inv = vec![0u8; p as usize];
    for a in 1..p {
        for b in 1..p {
            if a * b % p == 1 {
                inv[a as usize] = b as u8;
            }
        }
    }
    inv
}

/// The symmetric-orbit coordinate system: one coordinate per nondecreasing
/// multi-index.
#[derive(Debug, Clone)]
pub struct SymSpace {
    pub shape: FfShape,
    /// Nondecreasing multi-indices in lexicographic order.
    pub reps: Vec<Vec<usize>>,
    /// Orbit id of every dense position.
    orbit_of: Vec<u32>,
}

impl SymSpace {
    pub fn new(shape: FfShape) -> SymSpace {
        let mut reps = Vec::new();
        let mut rep_id: HashMap<Vec<usize>, u32> = HashMap::new();
        for idx in multi_indices(shape.n, shape.d) {
            if idx.windows(2).all(|w| w[0] <= w[1]) {
                rep_id.insert(idx.clone(), reps.len() as u32);
                reps.push(idx);
            }
        }
        let mut orbit_of = Vec::with_capacity(shape.entry_count());
        for idx in multi_indices(shape.n, shape.d) {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            orbit_of.push(rep_id[&sorted]);
        }
        SymSpace { shape, reps, orbit_of }
    }

    pub fn coord_count(&self) -> usize {
        self.reps.len()
    }

    /// p^(number of orbits) if it fits.
    pub fn space_size(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for _ in 0..self.coord_count() {
            acc = acc.checked_mul(self.shape.p as u64)?;
        }
        Some(acc)
    }

    pub fn encode(&self, coords: &[u8]) -> u64 {
        let mut acc: u64 = 0;
        for &v in coords.iter().rev() {
            acc = acc * self.shape.p as u64 + v as u64;
        }
        acc
    }

    pub fn decode(&self, mut code: u64, out: &mut [u8]) {
        let p = self.shape.p as u64;
        for slot in out.iter_mut() {
            *slot = (code % p) as u8;
            code /= p;
        }
    }

    pub fn add_into(&self, a: &[u8], b: &[u8], out: &mut [u8]) {
        let p = self.shape.p as u8;
        for i in 0..a.len() {
            let s = a[i] + b[i];
            out[i] = if s >= p { s - p } else { s };
        }
    }

    pub fn coords_to_dense(&self, coords: &[u8]) -> Vec<u8> {
        self.orbit_of.iter().map(|&o| coords[o as usize]).collect()
    }

    pub fn dense_to_coords(&self, digits: &[u8]) -> Vec<u8> {
        let mut coords = vec![0u8; self.coord_count()];
        for (pos, &o) in self.orbit_of.iter().enumerate() {
            coords[o as usize] = digits[pos];
        }
        coords
    }

    pub fn coords_from_sym(&self, s: &SymTensor) -> Result<Vec<u8>> {
        let (shape, digits) = FfShape::from_tensor(s.as_tensor())?;
        if shape != self.shape {
            return Err(Error::ShapeMismatch("symmetric space shape".into()));
        }
        Ok(self.dense_to_coords(&digits))
    }

    pub fn sym_from_coords(&self, coords: &[u8]) -> SymTensor {
        SymTensor::new(self.shape.to_tensor(&self.coords_to_dense(coords)))
            .expect("orbit coordinates are symmetric by construction")
    }

    /// Orbit coordinates of c * u^(⊗d).
    pub fn sym_power_coords(&self, u: &[u8], c: u8) -> Vec<u8> {
        let p = self.shape.p as u64;
        self.reps
            .iter()
            .map(|rep| {
                let mut acc = c as u64;
                for &i in rep {
                    acc = acc * u[i] as u64 % p;
                }
                acc as u8
            })
            .collect()
    }

    /// All nonzero symmetric rank-one generators c * u^(⊗d), u projective,
    /// c in F_p^*, as (coords, u, c) triples in deterministic order.
    pub fn symmetric_generators(&self) -> Vec<SymGen> {
        let mut out = Vec::new();
        for u in projective_reps(self.shape.p, self.shape.n) {
            for c in 1..self.shape.p as u8 {
                out.push(SymGen { coords: self.sym_power_coords(&u, c), u: u.clone(), c });
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SymGen {
    pub coords: Vec<u8>,
    pub u: Vec<u8>,
    pub c: u8,
}

/// A general rank-one generator c * x_1 (x) .. (x) x_d with projective
/// factors and the scale folded into the coefficient.
#[derive(Debug, Clone)]
pub struct GeneralGen {
    pub dense: Vec<u8>,
    pub factors: Vec<Vec<u8>>,
    pub c: u8,
}

/// All nonzero rank-one tensors in the dense digit representation,
/// enumerated factor-lexicographically.
pub fn general_generators(shape: &FfShape) -> Vec<GeneralGen> {
    let reps = projective_reps(shape.p, shape.n);
    let mut out = Vec::new();
    let mut choice = vec![0usize; shape.d];
    loop {
        for c in 1..shape.p as u8 {
            let factors: Vec<Vec<u8>> = choice.iter().map(|&k| reps[k].clone()).collect();
            let mut dense = vec![0u8; shape.entry_count()];
            for (pos, idx) in multi_indices(shape.n, shape.d).enumerate() {
                let mut acc = c as u64;
                for (j, &i) in idx.iter().enumerate() {
                    acc = acc * factors[j][i] as u64 % shape.p as u64;
                }
                dense[pos] = acc as u8;
            }
            out.push(GeneralGen { dense, factors, c });
        }
        // advance the factor choice
        let mut k = shape.d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < reps.len() {
                break;
            }
            choice[k] = 0;
            if k == 0 {
                return out;
            }
        }
    }
}

/// Reduced row echelon form of digit rows over GF(p), in place.
/// Returns the pivot columns; the row count of the echelon part is the rank.
pub fn ff_rref(rows: &mut Vec<Vec<u8>>, p: u32) -> Vec<usize> {
    let inv = inv_table(p);
    let pp = p as u16;
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pr) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        let iv = inv[rows[rank][col] as usize] as u16;
        for v in rows[rank].iter_mut() {
            *v = (*v as u16 * iv % pp) as u8;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let f = rows[i][col] as u16;
                for j in 0..ncols {
                    let sub = f * rows[rank][j] as u16 % pp;
                    let cur = rows[i][j] as u16;
                    rows[i][j] = ((cur + pp - sub) % pp) as u8;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    // rows below the echelon part are zero by construction
    rows.truncate(rank);
    pivots
}

/// Rank of digit rows over GF(p) without destroying the input.
pub fn ff_rank(rows: &[Vec<u8>], p: u32) -> usize {
    let mut work: Vec<Vec<u8>> = rows.to_vec();
    ff_rref(&mut work, p).len()
}

/// Solve `columns * x = rhs` over GF(p), where `columns` is a list of equal
/// length digit vectors. Returns None when inconsistent; free variables are 0.
pub fn ff_solve_columns(columns: &[Vec<u8>], rhs: &[u8], p: u32) -> Option<Vec<u8>> {
    let m = columns.len();
    let rows = rhs.len();
    let mut aug: Vec<Vec<u8>> = (0..rows)
        .map(|i| {
            let mut row: Vec<u8> = columns.iter().map(|c| c[i]).collect();
            row.push(rhs[i]);
            row
        })
        .collect();
    let pivots = ff_rref(&mut aug, p);
    if pivots.contains(&m) {
        return None;
    }
    let mut x = vec![0u8; m];
    for (ri, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[ri][m];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_round_trip() {
        let shape = FfShape { p: 3, d: 3, n: 2 };
        let mut buf = vec![0u8; 8];
        for code in [0u64, 1, 5, 6560] {
            shape.decode(code, &mut buf);
            assert_eq!(shape.encode(&buf), code);
        }
        assert_eq!(shape.space_size(), Some(6561));
    }

    #[test]
    fn projective_counts() {
        assert_eq!(projective_reps(2, 2).len(), 3);
        assert_eq!(projective_reps(3, 2).len(), 4);
        assert_eq!(projective_reps(5, 2).len(), 6);
        assert_eq!(projective_reps(3, 3).len(), 13);
        for v in projective_reps(7, 3) {
            assert_eq!(*v.iter().find(|&&x| x != 0).unwrap(), 1);
        }
    }

    #[test]
    fn orbit_counts() {
        // C(n+d-1, d)
        assert_eq!(SymSpace::new(FfShape { p: 3, d: 3, n: 2 }).coord_count(), 4);
        assert_eq!(SymSpace::new(FfShape { p: 3, d: 3, n: 3 }).coord_count(), 10);
        assert_eq!(SymSpace::new(FfShape { p: 2, d: 2, n: 2 }).coord_count(), 3);
        assert_eq!(SymSpace::new(FfShape { p: 3, d: 4, n: 3 }).coord_count(), 15);
    }

    #[test]
    fn sym_round_trip_and_generators() {
        let sym = SymSpace::new(FfShape { p: 3, d: 3, n: 2 });
        assert_eq!(sym.space_size(), Some(81));
        for code in 0..81u64 {
            let mut coords = vec![0u8; 4];
            sym.decode(code, &mut coords);
            let t = sym.sym_from_coords(&coords);
            assert_eq!(sym.coords_from_sym(&t).unwrap(), coords);
        }
        // 4 projective directions x 2 coefficients
        let gens = sym.symmetric_generators();
        assert_eq!(gens.len(), 8);
        // all distinct
        let codes: std::collections::HashSet<u64> =
            gens.iter().map(|g| sym.encode(&g.coords)).collect();
        assert_eq!(codes.len(), 8);
    }

    #[test]
    fn general_generator_count() {
        let shape = FfShape { p: 3, d: 3, n: 2 };
        let gens = general_generators(&shape);
        assert_eq!(gens.len(), 4 * 4 * 4 * 2);
        let codes: std::collections::HashSet<u64> =
            gens.iter().map(|g| shape.encode(&g.dense)).collect();
        assert_eq!(codes.len(), gens.len());
    }

    #[test]
    fn ff_linear_algebra() {
        // rank over GF(2)
        let rows = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
        assert_eq!(ff_rank(&rows, 2), 2);
        // solve over GF(5): columns (1,2), (3,4); rhs = 2*c1 + 1*c2
        let cols = vec![vec![1, 2], vec![3, 4]];
        let rhs = vec![(2 * 1 + 3) % 5, (2 * 2 + 4) % 5];
        let x = ff_solve_columns(&cols, &rhs, 5).unwrap();
        assert_eq!(x, vec![2, 1]);
        // inconsistent
        let cols = vec![vec![1, 2]];
        assert!(ff_solve_columns(&cols, &[0, 1], 5).is_none());
    }
}
