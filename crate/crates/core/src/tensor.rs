//! Dense order-d tensors on F^n, symmetric tensors, rank-one terms and
//! decompositions.
//!
//! Entries are stored row-major with the first index slowest, so the linear
//! offset of (i1, .., id) is (((i1*n + i2)*n + i3)*n + ..). Indices are
//! 0-based internally.

use crate::error::{Error, Result};
use crate::field::{FieldTag, Scalar};

/// Relative symmetry tolerance for float-tagged tensors: construction noise
/// only, not numerical computation noise.
pub const SYMMETRY_REL_TOL: f64 = 1e-10;

/// Iterate all multi-indices of length `d` over 0..n, row-major order.
pub fn multi_indices(n: usize, d: usize) -> MultiIndexIter {
    MultiIndexIter { n, idx: vec![0; d], done: n == 0 }
}

pub struct MultiIndexIter {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        // increment, last index fastest
        let mut k = self.idx.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < self.n {
                break;
            }
            self.idx[k] = 0;
        }
        if self.idx.iter().all(|&v| v == 0) && out.iter().any(|&v| v != 0) {
            self.done = true;
        }
        Some(out)
    }
}

/// Dense order-d tensor on F^n with all modes of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    order: usize,
    dim: usize,
    tag: FieldTag,
    entries: Vec<Scalar>,
}

impl Tensor {
    pub fn new(order: usize, dim: usize, tag: FieldTag, entries: Vec<Scalar>) -> Result<Tensor> {
        let want = dim.checked_pow(order as u32).ok_or_else(|| {
            Error::WrongShape(format!("n^d overflows for n={dim}, d={order}"))
        })?;
        if entries.len() != want {
            return Err(Error::ShapeMismatch(format!(
                "expected {want} entries for order {order}, dim {dim}; got {}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|s| s.tag() != tag) {
            return Err(Error::MixedFields(tag, bad.tag()));
        }
        Ok(Tensor { order, dim, tag, entries })
    }

    pub fn zero(order: usize, dim: usize, tag: FieldTag) -> Tensor {
        let len = dim.pow(order as u32);
        Tensor { order, dim, tag, entries: vec![Scalar::zero(tag); len] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        let mut o = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            o = o * self.dim + i;
        }
        o
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        &self.entries[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        let o = self.offset(idx);
        self.entries[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|s| s.is_zero())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(Tensor { order: self.order, dim: self.dim, tag: self.tag, entries })
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect();
        Ok(Tensor { order: self.order, dim: self.dim, tag: self.tag, entries })
    }

    pub fn scale(&self, c: &Scalar) -> Tensor {
        let entries = self.entries.iter().map(|a| a.mul(c)).collect();
        Tensor { order: self.order, dim: self.dim, tag: self.tag, entries }
    }

    fn check_same_shape(&self, other: &Tensor) -> Result<()> {
        if self.tag != other.tag {
            return Err(Error::MixedFields(self.tag, other.tag));
        }
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.order, self.dim, other.order, other.dim
            )));
        }
        Ok(())
    }

    /// Frobenius norm (entries coerced to floats if exact).
    pub fn frobenius(&self) -> f64 {
        self.entries
            .iter()
            .map(|s| {
                let z = s.to_c64();
                z.norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|s| s.abs_f64()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from full symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in multi_indices(self.dim, self.order) {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            let a = self.get(&idx).to_c64();
            let b = self.get(&sorted).to_c64();
            worst = worst.max((a - b).norm());
        }
        worst
    }

    pub fn is_symmetric(&self) -> bool {
        if self.tag.is_exact() {
            for idx in multi_indices(self.dim, self.order) {
                let mut sorted = idx.clone();
                sorted.sort_unstable();
                if self.get(&idx) != self.get(&sorted) {
                    return false;
                }
            }
            true
        } else {
            self.symmetry_defect() <= SYMMETRY_REL_TOL * (1.0 + self.max_abs())
        }
    }
}

/// A tensor with the full-symmetry invariant checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor(Tensor);

impl SymTensor {
    pub fn new(t: Tensor) -> Result<SymTensor> {
        if t.is_symmetric() {
            Ok(SymTensor(t))
        } else {
            Err(Error::NotSymmetric(format!(
                "max deviation over permutation orbits {:.3e}",
                t.symmetry_defect()
            )))
        }
    }

    /// Build from the free entries: a closure giving the value at each
    /// nondecreasing multi-index.
    pub fn from_orbit_values(
        order: usize,
        dim: usize,
        tag: FieldTag,
        mut value: impl FnMut(&[usize]) -> Scalar,
    ) -> SymTensor {
        let mut t = Tensor::zero(order, dim, tag);
        for idx in multi_indices(dim, order) {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            if sorted == idx {
                let v = value(&idx);
                t.set(&idx, v);
            }
        }
        // fill the rest of each orbit
        for idx in multi_indices(dim, order) {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            if sorted != idx {
                let v = t.get(&sorted).clone();
                t.set(&idx, v);
            }
        }
        SymTensor(t)
    }

    pub fn as_tensor(&self) -> &Tensor {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor {
        self.0
    }
}

impl std::ops::Deref for SymTensor {
    type Target = Tensor;
    fn deref(&self) -> &Tensor {
        &self.0
    }
}

/// Order-2 SymTensor in S^3 F^2 from its four free entries
/// (s111, s112, s122, s222). Handy for the binary cubic machinery and tests.
pub fn s3f2_from_parts(tag: FieldTag, parts: [Scalar; 4]) -> SymTensor {
    let [s111, s112, s122, s222] = parts;
    SymTensor::from_orbit_values(3, 2, tag, move |idx| match idx.iter().sum::<usize>() {
        0 => s111.clone(),
        1 => s112.clone(),
        2 => s122.clone(),
        _ => s222.clone(),
    })
}

/// Outer product of `d` vectors: entries(i1..id) = prod_j factors[j][i_j].
pub fn rank_one(factors: &[Vec<Scalar>]) -> Result<Tensor> {
    if factors.is_empty() {
        return Err(Error::ShapeMismatch("no factors".into()));
    }
    let n = factors[0].len();
    if n == 0 {
        return Err(Error::ShapeMismatch("empty factor".into()));
    }
    let tag = factors[0][0].tag();
    for f in factors {
        if f.len() != n {
            return Err(Error::ShapeMismatch("factor lengths differ".into()));
        }
        for s in f {
            if s.tag() != tag {
                return Err(Error::MixedFields(tag, s.tag()));
            }
        }
    }
    let d = factors.len();
    let mut t = Tensor::zero(d, n, tag);
    for idx in multi_indices(n, d) {
        let mut v = Scalar::one(tag);
        for (j, &i) in idx.iter().enumerate() {
            v = v.mul(&factors[j][i]);
        }
        t.set(&idx, v);
    }
    Ok(t)
}

/// Symmetric power u^(⊗d); symmetric by construction.
pub fn sym_power(u: &[Scalar], d: usize) -> SymTensor {
    let factors: Vec<Vec<Scalar>> = (0..d).map(|_| u.to_vec()).collect();
    SymTensor(rank_one(&factors).expect("uniform factors"))
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Project onto symmetric tensors by averaging each permutation orbit.
/// Requires d! invertible in the field.
pub fn symmetrize(t: &Tensor) -> Result<SymTensor> {
    let d = t.order();
    let ch = t.tag().characteristic();
    if ch != 0 && (ch as u64) <= d as u64 {
        // d! has a factor of ch exactly when ch <= d
        return Err(Error::BadCharacteristic(d, ch));
    }
    let dfact = Scalar::from_i64(t.tag(), factorial(d) as i64);
    let inv = dfact.inv()?;
    let mut out = Tensor::zero(d, t.dim(), t.tag());
    let mut perm_buf = vec![0usize; d];
    for idx in multi_indices(t.dim(), d) {
        let mut acc = Scalar::zero(t.tag());
        for perm in permutations(d) {
            for (k, &pk) in perm.iter().enumerate() {
                perm_buf[k] = idx[pk];
            }
            acc = acc.add(t.get(&perm_buf));
        }
        out.set(&idx, acc.mul(&inv));
    }
    SymTensor::new(out)
}

/// All permutations of 0..d (small d only).
pub fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(acc: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, used: &mut Vec<bool>, d: usize) {
        if cur.len() == d {
            acc.push(cur.clone());
            return;
        }
        for v in 0..d {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(acc, cur, used, d);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut acc = Vec::new();
    rec(&mut acc, &mut Vec::new(), &mut vec![false; d], d);
    acc
}

/// Standard inner product <P,Q> = sum p * conj(q).
///
/// Conjugation is the identity on exact tags, so this doubles as the plain
/// bilinear pairing there.
pub fn inner_product(p: &Tensor, q: &Tensor) -> Result<Scalar> {
    p.check_same_shape(q)?;
    let mut acc = Scalar::zero(p.tag());
    for (a, b) in p.entries.iter().zip(&q.entries) {
        acc = acc.add(&a.mul(&b.conj()));
    }
    Ok(acc)
}

/// One rank-one summand of a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum RankOneTerm {
    General {
        coefficient: Scalar,
        factors: Vec<Vec<Scalar>>,
    },
    /// coefficient * u^(⊗ order)
    Symmetric {
        coefficient: Scalar,
        vector: Vec<Scalar>,
        order: usize,
    },
}

impl RankOneTerm {
    pub fn symmetric(coefficient: Scalar, vector: Vec<Scalar>, order: usize) -> RankOneTerm {
        RankOneTerm::Symmetric { coefficient, vector, order }
    }

    pub fn general(coefficient: Scalar, factors: Vec<Vec<Scalar>>) -> RankOneTerm {
        RankOneTerm::General { coefficient, factors }
    }

    pub fn coefficient(&self) -> &Scalar {
        match self {
            RankOneTerm::General { coefficient, .. } => coefficient,
            RankOneTerm::Symmetric { coefficient, .. } => coefficient,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            RankOneTerm::General { factors, .. } => factors.len(),
            RankOneTerm::Symmetric { order, .. } => *order,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RankOneTerm::General { factors, .. } => factors.first().map_or(0, |f| f.len()),
            RankOneTerm::Symmetric { vector, .. } => vector.len(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, RankOneTerm::Symmetric { .. })
    }

    pub fn factor(&self, mode: usize) -> &[Scalar] {
        match self {
            RankOneTerm::General { factors, .. } => &factors[mode],
            RankOneTerm::Symmetric { vector, .. } => vector,
        }
    }

    pub fn has_zero_factor(&self) -> bool {
        (0..self.order()).any(|j| self.factor(j).iter().all(|s| s.is_zero()))
    }

    pub fn expand(&self) -> Result<Tensor> {
        let factors: Vec<Vec<Scalar>> = (0..self.order()).map(|j| self.factor(j).to_vec()).collect();
        Ok(rank_one(&factors)?.scale(self.coefficient()))
    }
}

/// A list of rank-one terms summing to a target tensor.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Decomposition {
    pub terms: Vec<RankOneTerm>,
    pub symmetric: bool,
    pub certificate: Option<crate::multilinear::KruskalCertificate>,
}

impl Decomposition {
    pub fn symmetric_terms(terms: Vec<RankOneTerm>) -> Decomposition {
        debug_assert!(terms.iter().all(|t| t.is_symmetric()));
        Decomposition { terms, symmetric: true, certificate: None }
    }

    pub fn general_terms(terms: Vec<RankOneTerm>) -> Decomposition {
        Decomposition { terms, symmetric: false, certificate: None }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Entrywise sum of the expanded terms; `shape` is (order, dim, tag) so that
/// the empty decomposition has a well-defined zero reconstruction.
pub fn reconstruct(dec: &Decomposition, order: usize, dim: usize, tag: FieldTag) -> Result<Tensor> {
    let mut acc = Tensor::zero(order, dim, tag);
    for term in &dec.terms {
        if term.order() != order || term.dim() != dim {
            return Err(Error::ShapeMismatch(format!(
                "term of order {}, dim {} in a ({order}, {dim}) reconstruction",
                term.order(),
                term.dim()
            )));
        }
        acc = acc.add(&term.expand()?)?;
    }
    Ok(acc)
}

/// Exact equality for exact tags; Frobenius closeness for float tags.
pub fn tensors_match(a: &Tensor, b: &Tensor, rel_tol: f64) -> bool {
    if a.tag() != b.tag() || a.order() != b.order() || a.dim() != b.dim() {
        return false;
    }
    if a.tag().is_exact() {
        a == b
    } else {
        let scale = 1.0 + a.frobenius().max(b.frobenius());
        a.sub(b).map(|d| d.frobenius() <= rel_tol * scale).unwrap_or(false)
    }
}

pub(crate) fn vec_is_zero(v: &[Scalar]) -> bool {
    v.iter().all(|s| s.is_zero())
}
