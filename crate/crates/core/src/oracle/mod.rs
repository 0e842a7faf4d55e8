//! Ground-truth exhaustive rank and symmetric rank over small finite fields.
//!
//! The public entry points pick the cheapest exact strategy for the shape at
//! hand: Gaussian elimination for matrices, the slice-space search for
//! order 3, and memoized breadth-first closure tables elsewhere, with a
//! depth-first fallback under an explicit node budget.

pub mod slicerank;
pub mod space;
pub mod sweep;
pub mod tables;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::tensor::{Decomposition, RankOneTerm, SymTensor, Tensor};

pub use space::{FfShape, SymSpace};
pub use sweep::{
    census, decompositions_of_length, minimal_decompositions, normalize_term_to_generator,
    theorem_sweep, CensusBucket, CensusReport, GenIndex, SweepMode, SweepReport, TheoremId,
    Violation,
};
pub use tables::{rank_table, srank_table};

/// Limits on the exhaustive machinery. Defaults keep every search in scope
/// comfortably under a few seconds; larger jobs return `BudgetExceeded`
/// rather than running away.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    /// Largest table (dense or symmetric space cardinality) we will build.
    pub table_entries: u64,
    /// Node cap for slice-space and depth-first searches.
    pub search_nodes: u64,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { table_entries: 1 << 24, search_nodes: 400_000_000 }
    }
}

impl Budget {
    pub fn with_nodes(nodes: u64) -> Budget {
        Budget { table_entries: nodes.min(1 << 32), search_nodes: nodes }
    }
}

/// Result of a symmetric-rank search: over a finite field a symmetric tensor
/// may fail to be a sum of symmetric rank-one tensors at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrankResult {
    Value(u32),
    NotExpressible,
}

impl SrankResult {
    pub fn value(&self) -> Option<u32> {
        match self {
            SrankResult::Value(v) => Some(*v),
            SrankResult::NotExpressible => None,
        }
    }
}

pub(crate) fn digit_vec_to_scalars(v: &[u8], p: u32) -> Vec<Scalar> {
    v.iter().map(|&x| Scalar::Finite { p, residue: x as u32 }).collect()
}

/// Exact tensor rank over a finite field.
pub fn brute_rank(t: &Tensor, budget: &Budget) -> Result<u32> {
    let (shape, digits) = FfShape::from_tensor(t)?;
    if digits.iter().all(|&v| v == 0) {
        return Ok(0);
    }
    match shape.d {
        1 => Ok(1),
        2 => {
            let n = shape.n;
            let rows: Vec<Vec<u8>> = (0..n).map(|i| digits[i * n..(i + 1) * n].to_vec()).collect();
            Ok(space::ff_rank(&rows, shape.p) as u32)
        }
        3 => slicerank::slice_rank_exact(&digits, &shape, budget),
        _ => {
            if let Ok(table) = tables::rank_table(shape, budget) {
                Ok(table.rank_of(&digits) as u32)
            } else {
                dfs_rank(&digits, &shape, budget)
            }
        }
    }
}

/// Exact rank together with a verified witness decomposition.
pub fn brute_rank_with_witness(t: &Tensor, budget: &Budget) -> Result<(u32, Decomposition)> {
    let (shape, digits) = FfShape::from_tensor(t)?;
    let p = shape.p;
    if digits.iter().all(|&v| v == 0) {
        return Ok((0, Decomposition::general_terms(Vec::new())));
    }
    let one = Scalar::one(t.tag());
    let dec = match shape.d {
        1 => Decomposition::general_terms(vec![RankOneTerm::general(
            one,
            vec![digit_vec_to_scalars(&digits, p)],
        )]),
        3 => {
            let (_, terms) = slicerank::slice_rank_witness(&digits, &shape, budget)?;
            Decomposition::general_terms(
                terms
                    .into_iter()
                    .map(|(x, y, z)| {
                        RankOneTerm::general(
                            one.clone(),
                            vec![
                                digit_vec_to_scalars(&x, p),
                                digit_vec_to_scalars(&y, p),
                                digit_vec_to_scalars(&z, p),
                            ],
                        )
                    })
                    .collect(),
            )
        }
        2 => matrix_witness(&digits, &shape)?,
        _ => {
            let table = tables::rank_table(shape, budget)?;
            let gens = table.witness(&digits);
            Decomposition::general_terms(
                gens.into_iter()
                    .map(|g| {
                        RankOneTerm::general(
                            Scalar::Finite { p, residue: g.c as u32 },
                            g.factors.iter().map(|f| digit_vec_to_scalars(f, p)).collect(),
                        )
                    })
                    .collect(),
            )
        }
    };
    // admissibility: the witness must reconstruct exactly
    let back = crate::tensor::reconstruct(&dec, t.order(), t.dim(), t.tag())?;
    if back != *t {
        return Err(Error::Internal("rank witness failed reconstruction".into()));
    }
    Ok((dec.terms.len() as u32, dec))
}

fn matrix_witness(digits: &[u8], shape: &FfShape) -> Result<Decomposition> {
    let p = shape.p;
    let n = shape.n;
    let inv = space::inv_table(p);
    let mut work = digits.to_vec();
    let mut terms = Vec::new();
    loop {
        let Some(pos) = work.iter().position(|&v| v != 0) else {
            break;
        };
        let (pi, pj) = (pos / n, pos % n);
        let piv_inv = inv[work[pi * n + pj] as usize] as u32;
        let col: Vec<u8> = (0..n).map(|i| work[i * n + pj]).collect();
        let row: Vec<u8> = (0..n)
            .map(|j| (work[pi * n + j] as u32 * piv_inv % p) as u8)
            .collect();
        for i in 0..n {
            for j in 0..n {
                let sub = col[i] as u32 * row[j] as u32 % p;
                let cur = work[i * n + j] as u32;
                work[i * n + j] = ((cur + p - sub) % p) as u8;
            }
        }
        terms.push(RankOneTerm::general(
            Scalar::one(crate::field::FieldTag::Finite(p)),
            vec![digit_vec_to_scalars(&col, p), digit_vec_to_scalars(&row, p)],
        ));
    }
    Ok(Decomposition::general_terms(terms))
}

/// Depth-first iterative deepening over the normalized rank-one generators.
fn dfs_rank(digits: &[u8], shape: &FfShape, budget: &Budget) -> Result<u32> {
    let gens = space::general_generators(shape);
    let mut codes: Vec<u64> = gens.iter().map(|g| shape.encode(&g.dense)).collect();
    codes.sort_unstable();
    // unfolding rank is a lower bound
    let n = shape.n;
    let width = shape.entry_count() / n;
    let rows: Vec<Vec<u8>> = (0..n).map(|i| digits[i * width..(i + 1) * width].to_vec()).collect();
    let lower = space::ff_rank(&rows, shape.p) as u32;
    let cap = width as u32;
    let mut nodes = 0u64;
    for k in lower.max(1)..=cap {
        if dfs_step(digits, shape, &gens, &codes, k, 0, &mut nodes, budget)? {
            return Ok(k);
        }
    }
    Err(Error::Internal("deepening exceeded the unfolding-width cap".into()))
}

fn dfs_step(
    target: &[u8],
    shape: &FfShape,
    gens: &[space::GeneralGen],
    codes: &[u64],
    k: u32,
    min_gen: usize,
    nodes: &mut u64,
    budget: &Budget,
) -> Result<bool> {
    *nodes += 1;
    if *nodes > budget.search_nodes {
        return Err(Error::BudgetExceeded(format!(
            "depth-first rank search exceeded {} nodes",
            budget.search_nodes
        )));
    }
    if k == 1 {
        return Ok(codes.binary_search(&shape.encode(target)).is_ok());
    }
    let mut rem = vec![0u8; target.len()];
    for (gi, g) in gens.iter().enumerate().skip(min_gen) {
        shape.sub_into(target, &g.dense, &mut rem);
        if dfs_step(&rem, shape, gens, codes, k - 1, gi, nodes, budget)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact symmetric rank over a finite field, or NotExpressible.
pub fn brute_srank(s: &SymTensor, budget: &Budget) -> Result<SrankResult> {
    let (shape, _) = FfShape::from_tensor(s.as_tensor())?;
    let table = tables::srank_table(shape, budget)?;
    let coords = table.sym.coords_from_sym(s)?;
    Ok(match table.srank_of_coords(&coords) {
        Some(v) => SrankResult::Value(v as u32),
        None => SrankResult::NotExpressible,
    })
}

/// Symmetric rank with a verified symmetric witness.
pub fn brute_srank_with_witness(
    s: &SymTensor,
    budget: &Budget,
) -> Result<(SrankResult, Option<Decomposition>)> {
    let (shape, _) = FfShape::from_tensor(s.as_tensor())?;
    let p = shape.p;
    let table = tables::srank_table(shape, budget)?;
    let coords = table.sym.coords_from_sym(s)?;
    let Some(gens) = table.witness(&coords) else {
        return Ok((SrankResult::NotExpressible, None));
    };
    let dec = Decomposition::symmetric_terms(
        gens.iter()
            .map(|g| {
                RankOneTerm::symmetric(
                    Scalar::Finite { p, residue: g.c as u32 },
                    digit_vec_to_scalars(&g.u, p),
                    shape.d,
                )
            })
            .collect(),
    );
    let back = crate::tensor::reconstruct(&dec, shape.d, shape.n, s.tag())?;
    if back != *s.as_tensor() {
        return Err(Error::Internal("symmetric witness failed reconstruction".into()));
    }
    Ok((SrankResult::Value(dec.terms.len() as u32), Some(dec)))
}
