//! Censuses, theorem sweeps, and exhaustive decomposition enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldTag;
use crate::tensor::RankOneTerm;
use crate::util::par_map_indexed;

use super::slicerank::slice_rank_at_most;
use super::space::{ff_rank, general_generators, FfShape, GeneralGen};
use super::tables::{rank_table, srank_table, SrankTable};
use super::Budget;

/// Progress sink: called with (done, total) from the driving loop.
pub type Progress<'a> = Option<&'a (dyn Fn(u64, u64) + Sync)>;

/// Census of a symmetric tensor space over a finite field.
#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub field: String,
    pub d: usize,
    pub n: usize,
    pub total_symmetric: u64,
    pub expressible_nonzero: u64,
    pub histogram: Vec<CensusBucket>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CensusBucket {
    pub rank: u32,
    /// None marks tensors that are not sums of symmetric rank-one tensors.
    pub srank: Option<u32>,
    pub count: u64,
}

fn dense_rank_a(digits: &[u8], shape: &FfShape) -> u32 {
    let n = shape.n;
    let width = shape.entry_count() / n;
    let rows: Vec<Vec<u8>> = (0..n).map(|i| digits[i * width..(i + 1) * width].to_vec()).collect();
    ff_rank(&rows, shape.p) as u32
}

/// Exact rank of a dense digit tensor via the cheapest applicable method.
fn rank_exact(digits: &[u8], shape: &FfShape, budget: &Budget) -> Result<u32> {
    match shape.d {
        1 => Ok(u32::from(digits.iter().any(|&v| v != 0))),
        2 => Ok(dense_rank_a(digits, shape)),
        3 => super::slicerank::slice_rank_exact(digits, shape, budget),
        _ => {
            let table = rank_table(*shape, budget)?;
            Ok(table.rank_of(digits) as u32)
        }
    }
}

/// Is rank <= bound? Returns the exact rank when so.
fn rank_at_most(digits: &[u8], shape: &FfShape, bound: u32, budget: &Budget) -> Result<Option<u32>> {
    match shape.d {
        1 => Ok(Some(u32::from(digits.iter().any(|&v| v != 0))).filter(|&r| r <= bound)),
        2 => Ok(Some(dense_rank_a(digits, shape)).filter(|&r| r <= bound)),
        3 => slice_rank_at_most(digits, shape, bound as usize, budget),
        _ => {
            let table = rank_table(*shape, budget)?;
            Ok(Some(table.rank_of(digits) as u32).filter(|&r| r <= bound))
        }
    }
}

/// Exhaustive census: counts, expressibility, and the joint
/// (rank, symmetric rank) histogram.
pub fn census(
    tag: FieldTag,
    d: usize,
    n: usize,
    budget: &Budget,
    progress: Progress,
) -> Result<CensusReport> {
    let FieldTag::Finite(p) = tag else {
        return Err(Error::InfiniteField(tag));
    };
    let shape = FfShape { p, d, n };
    let table = srank_table(shape, budget)?;
    let total = table.sym.space_size().expect("table built");

    let mut expressible_nonzero = 0u64;
    let mut hist: std::collections::BTreeMap<(u32, Option<u32>), u64> = Default::default();
    let chunk = 8192u64;
    let mut done = 0u64;
    while done < total {
        let hi = (done + chunk).min(total);
        let results = par_map_indexed((hi - done) as usize, |i| {
            let code = done + i as u64;
            let mut coords = vec![0u8; table.sym.coord_count()];
            table.sym.decode(code, &mut coords);
            let digits = table.sym.coords_to_dense(&coords);
            let srank = table.srank_of_coords(&coords).map(u32::from);
            let rank = rank_exact(&digits, &shape, budget);
            rank.map(|r| (r, srank))
        });
        for r in results {
            let (rank, srank) = r?;
            if srank.is_some() && !(rank == 0) {
                expressible_nonzero += 1;
            }
            *hist.entry((rank, srank)).or_insert(0) += 1;
        }
        done = hi;
        if let Some(cb) = progress {
            cb(done, total);
        }
    }

    Ok(CensusReport {
        field: tag.name(),
        d,
        n,
        total_symmetric: total,
        expressible_nonzero,
        histogram: hist
            .into_iter()
            .map(|((rank, srank), count)| CensusBucket { rank, srank, count })
            .collect(),
    })
}

/// Statements that can be swept instance-by-instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremId {
    /// rank S <= rank A(S) + 1 implies srank S = rank S (needs |F| >= 3).
    MainTheo,
    /// rank S = rank A(S) implies srank S = rank S and the minimal
    /// decomposition is unique.
    EqCase,
    /// rank S <= 2 implies srank S = rank S (any field).
    Rank2Eq,
    /// d = 3, rank S = 3 implies srank S = 3 (needs |F| >= 3).
    Rank3SymTen,
    /// rank S <= 3 implies srank = rank; srank <= 4 implies srank = rank
    /// (needs |F| >= 3).
    Rank3Case,
}

impl TheoremId {
    pub fn parse(s: &str) -> Result<TheoremId> {
        Ok(match s {
            "maintheo" => TheoremId::MainTheo,
            "eqcase" => TheoremId::EqCase,
            "rank2eq" => TheoremId::Rank2Eq,
            "rank3symten" => TheoremId::Rank3SymTen,
            "rank3case" => TheoremId::Rank3Case,
            _ => return Err(Error::Parse(format!("unknown theorem id {s:?}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::MainTheo => "maintheo",
            TheoremId::EqCase => "eqcase",
            TheoremId::Rank2Eq => "rank2eq",
            TheoremId::Rank3SymTen => "rank3symten",
            TheoremId::Rank3Case => "rank3case",
        }
    }

    fn needs_field_at_least_3(&self) -> bool {
        matches!(
            self,
            TheoremId::MainTheo | TheoremId::Rank3SymTen | TheoremId::Rank3Case
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    /// Dense entries of the witness tensor, row-major residues.
    pub entries: Vec<u8>,
    pub rank_a: u32,
    pub rank: Option<u32>,
    pub srank: Option<u32>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub theorem: String,
    pub field: String,
    pub d: usize,
    pub n: usize,
    pub mode: String,
    pub seed: Option<u64>,
    /// False when the statement's field-size hypothesis does not apply to
    /// this field; nothing is asserted in that case.
    pub field_precondition_met: bool,
    pub total: u64,
    pub hypothesis_met: u64,
    pub conclusion_held: u64,
    pub violations: Vec<Violation>,
    pub uniqueness_checked: bool,
}

struct TensorVerdict {
    hypothesis: bool,
    holds: bool,
    violation: Option<Violation>,
}

fn eval_instance(
    id: TheoremId,
    table: &SrankTable,
    shape: &FfShape,
    coords: &[u8],
    budget: &Budget,
    check_uniqueness: bool,
) -> Result<TensorVerdict> {
    let digits = table.sym.coords_to_dense(coords);
    let rank_a = dense_rank_a(&digits, shape);
    let srank = table.srank_of_coords(coords).map(u32::from);
    let nothing = |hypothesis| TensorVerdict { hypothesis, holds: hypothesis, violation: None };

    let make_violation = |rank: Option<u32>, detail: String| Violation {
        entries: digits.clone(),
        rank_a,
        rank,
        srank,
        detail,
    };

    let zero = digits.iter().all(|&v| v == 0);
    let verdict = match id {
        TheoremId::MainTheo => {
            let rank = rank_at_most(&digits, shape, rank_a + 1, budget)?;
            match rank {
                None => nothing(false),
                Some(r) => {
                    if srank == Some(r) {
                        nothing(true)
                    } else {
                        TensorVerdict {
                            hypothesis: true,
                            holds: false,
                            violation: Some(make_violation(
                                Some(r),
                                format!("rank {r} <= rank_a + 1 = {} but srank {:?}", rank_a + 1, srank),
                            )),
                        }
                    }
                }
            }
        }
        TheoremId::EqCase => {
            let rank = rank_at_most(&digits, shape, rank_a, budget)?;
            match rank {
                None => nothing(false),
                Some(r) => {
                    let mut holds = srank == Some(r);
                    let mut detail = String::new();
                    if !holds {
                        detail = format!("rank {r} = rank_a but srank {srank:?}");
                    } else if check_uniqueness && r >= 1 {
                        let decs = decompositions_of_length(&digits, shape, r, budget)?;
                        if decs.len() != 1 {
                            holds = false;
                            detail = format!(
                                "rank {r} = rank_a but {} distinct minimal decompositions",
                                decs.len()
                            );
                        }
                    }
                    if holds {
                        nothing(true)
                    } else {
                        TensorVerdict {
                            hypothesis: true,
                            holds: false,
                            violation: Some(make_violation(Some(r), detail)),
                        }
                    }
                }
            }
        }
        TheoremId::Rank2Eq => {
            if zero {
                nothing(false)
            } else {
                let rank = rank_at_most(&digits, shape, 2, budget)?;
                match rank {
                    None => nothing(false),
                    Some(r) => {
                        if srank == Some(r) {
                            nothing(true)
                        } else {
                            TensorVerdict {
                                hypothesis: true,
                                holds: false,
                                violation: Some(make_violation(
                                    Some(r),
                                    format!("rank {r} <= 2 but srank {srank:?}"),
                                )),
                            }
                        }
                    }
                }
            }
        }
        TheoremId::Rank3SymTen => {
            let rank = rank_at_most(&digits, shape, 3, budget)?;
            match rank {
                Some(3) => {
                    if srank == Some(3) {
                        nothing(true)
                    } else {
                        TensorVerdict {
                            hypothesis: true,
                            holds: false,
                            violation: Some(make_violation(
                                Some(3),
                                format!("rank 3 but srank {srank:?}"),
                            )),
                        }
                    }
                }
                _ => nothing(false),
            }
        }
        TheoremId::Rank3Case => {
            let rank = rank_at_most(&digits, shape, 4, budget)?;
            let hyp_rank3 = matches!(rank, Some(r) if r <= 3 && !zero);
            let hyp_srank4 = matches!(srank, Some(s) if s <= 4 && !zero);
            if !hyp_rank3 && !hyp_srank4 {
                nothing(false)
            } else {
                // both implications conclude srank = rank
                let holds = match (rank, srank) {
                    (Some(r), Some(s)) => {
                        (!hyp_rank3 || s == r) && (!hyp_srank4 || s == r)
                    }
                    _ => false,
                };
                if holds {
                    nothing(true)
                } else {
                    TensorVerdict {
                        hypothesis: true,
                        holds: false,
                        violation: Some(make_violation(
                            rank,
                            format!(
                                "rank {rank:?}, srank {srank:?} break one of the two implications"
                            ),
                        )),
                    }
                }
            }
        }
    };
    Ok(verdict)
}

/// Sweep a statement over a symmetric tensor space, exhaustively or on a
/// seeded uniform sample. Violations carry full witnesses.
pub fn theorem_sweep(
    id: TheoremId,
    tag: FieldTag,
    d: usize,
    n: usize,
    mode: SweepMode,
    budget: &Budget,
    progress: Progress,
) -> Result<SweepReport> {
    let FieldTag::Finite(p) = tag else {
        return Err(Error::InfiniteField(tag));
    };
    if d < 3 || n < 2 {
        return Err(Error::PreconditionFailed(format!(
            "statement {} needs d >= 3 and n >= 2, got d={d}, n={n}",
            id.name()
        )));
    }
    let (mode_name, seed) = match mode {
        SweepMode::Exhaustive => ("exhaustive".to_string(), None),
        SweepMode::Sample { count, seed } => (format!("sample-{count}"), Some(seed)),
    };
    let mut report = SweepReport {
        theorem: id.name().to_string(),
        field: tag.name(),
        d,
        n,
        mode: mode_name,
        seed,
        field_precondition_met: true,
        total: 0,
        hypothesis_met: 0,
        conclusion_held: 0,
        violations: Vec::new(),
        uniqueness_checked: false,
    };
    if id.needs_field_at_least_3() && p < 3 {
        report.field_precondition_met = false;
        return Ok(report);
    }

    let shape = FfShape { p, d, n };
    let table = srank_table(shape, budget)?;
    let space = table.sym.space_size().expect("table built");
    let codes: Vec<u64> = match mode {
        SweepMode::Exhaustive => (0..space).collect(),
        SweepMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| rng.gen_range(0..space)).collect()
        }
    };

    // uniqueness checks need the generator enumeration to stay small
    let check_uniqueness =
        id == TheoremId::EqCase && d == 3 && gen_count(&shape) <= 5000;
    report.uniqueness_checked = check_uniqueness;

    let chunk = 4096usize;
    let total = codes.len() as u64;
    let mut done = 0usize;
    while done < codes.len() {
        let hi = (done + chunk).min(codes.len());
        let slice = &codes[done..hi];
        let results = par_map_indexed(slice.len(), |i| {
            let mut coords = vec![0u8; table.sym.coord_count()];
            table.sym.decode(slice[i], &mut coords);
            eval_instance(id, &table, &shape, &coords, budget, check_uniqueness)
        });
        for r in results {
            let v = r?;
            report.total += 1;
            if v.hypothesis {
                report.hypothesis_met += 1;
                if v.holds {
                    report.conclusion_held += 1;
                }
            }
            if let Some(vi) = v.violation {
                report.violations.push(vi);
            }
        }
        done = hi;
        if let Some(cb) = progress {
            cb(done as u64, total);
        }
    }
    Ok(report)
}

fn gen_count(shape: &FfShape) -> u64 {
    let reps = ((shape.p as u64).pow(shape.n as u32) - 1) / (shape.p as u64 - 1);
    reps.pow(shape.d as u32) * (shape.p as u64 - 1)
}

/// Sorted index over all rank-one generators of a dense space.
pub struct GenIndex {
    pub shape: FfShape,
    pub gens: Vec<GeneralGen>,
    codes: Vec<(u64, u32)>,
}

impl GenIndex {
    pub fn new(shape: FfShape) -> Result<GenIndex> {
        shape.space_size().ok_or_else(|| {
            Error::BudgetExceeded("dense codes exceed 64 bits; enumeration unsupported".into())
        })?;
        let gens = general_generators(&shape);
        let mut codes: Vec<(u64, u32)> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| (shape.encode(&g.dense), i as u32))
            .collect();
        codes.sort_unstable();
        Ok(GenIndex { shape, gens, codes })
    }

    pub fn find(&self, code: u64) -> Option<u32> {
        self.codes
            .binary_search_by_key(&code, |&(c, _)| c)
            .ok()
            .map(|i| self.codes[i].1)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
}

/// Map an arbitrary nonzero rank-one term over GF(p) to its generator id.
pub fn normalize_term_to_generator(index: &GenIndex, term: &RankOneTerm) -> Result<u32> {
    let expanded = term.expand()?;
    let (shape, digits) = FfShape::from_tensor(&expanded)?;
    if shape != index.shape {
        return Err(Error::ShapeMismatch("term shape vs generator index".into()));
    }
    index
        .find(shape.encode(&digits))
        .ok_or_else(|| Error::Internal("expanded term is not rank one or is zero".into()))
}

/// All decompositions of `digits` into exactly `r` nonzero rank-one tensors,
/// as nondecreasing generator-id multisets. Exact and exhaustive.
pub fn decompositions_of_length(
    digits: &[u8],
    shape: &FfShape,
    r: u32,
    budget: &Budget,
) -> Result<Vec<Vec<u32>>> {
    let index = GenIndex::new(*shape)?;
    decompositions_with_index(digits, &index, r, budget)
}

pub fn decompositions_with_index(
    digits: &[u8],
    index: &GenIndex,
    r: u32,
    budget: &Budget,
) -> Result<Vec<Vec<u32>>> {
    let shape = &index.shape;
    let zero = digits.iter().all(|&v| v == 0);
    let mut out = Vec::new();
    match r {
        0 => {
            if zero {
                out.push(Vec::new());
            }
        }
        1 => {
            if let Some(g) = index.find(shape.encode(digits)) {
                out.push(vec![g]);
            }
        }
        2 => {
            let g = index.len();
            charge(budget, g as u64)?;
            let mut rem = vec![0u8; digits.len()];
            for g1 in 0..g as u32 {
                shape.sub_into(digits, &index.gens[g1 as usize].dense, &mut rem);
                if let Some(g2) = index.find(shape.encode(&rem)) {
                    if g2 >= g1 {
                        out.push(vec![g1, g2]);
                    }
                }
            }
        }
        3 => {
            let g = index.len() as u64;
            charge(budget, g * (g + 1) / 2)?;
            let mut rem1 = vec![0u8; digits.len()];
            let mut rem2 = vec![0u8; digits.len()];
            for g1 in 0..index.len() as u32 {
                shape.sub_into(digits, &index.gens[g1 as usize].dense, &mut rem1);
                for g2 in g1..index.len() as u32 {
                    shape.sub_into(&rem1, &index.gens[g2 as usize].dense, &mut rem2);
                    if let Some(g3) = index.find(shape.encode(&rem2)) {
                        if g3 >= g2 {
                            out.push(vec![g1, g2, g3]);
                        }
                    }
                }
            }
        }
        _ => {
            return Err(Error::BudgetExceeded(format!(
                "decomposition enumeration supports length <= 3, asked for {r}"
            )));
        }
    }
    Ok(out)
}

/// The minimal decomposition length of a tensor with all witnesses at that
/// length (rank confirmation by exhaustion over lengths 0..=3).
pub fn minimal_decompositions(
    digits: &[u8],
    shape: &FfShape,
    budget: &Budget,
) -> Result<(u32, Vec<Vec<u32>>)> {
    let index = GenIndex::new(*shape)?;
    for r in 0..=3u32 {
        let found = decompositions_with_index(digits, &index, r, budget)?;
        if !found.is_empty() {
            return Ok((r, found));
        }
    }
    Err(Error::BudgetExceeded(
        "rank exceeds 3; full enumeration not supported at this size".into(),
    ))
}

fn charge(budget: &Budget, nodes: u64) -> Result<()> {
    if nodes > budget.search_nodes {
        Err(Error::BudgetExceeded(format!(
            "enumeration of {nodes} nodes exceeds the budget {}",
            budget.search_nodes
        )))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldTag;
    use crate::oracle::{brute_rank, brute_srank, SrankResult};

    #[test]
    fn census_gf2_cubic() {
        let r = census(FieldTag::Finite(2), 3, 2, &Budget::default(), None).unwrap();
        assert_eq!(r.total_symmetric, 16);
        assert_eq!(r.expressible_nonzero, 7);
    }

    #[test]
    fn census_gf3_cubic() {
        let r = census(FieldTag::Finite(3), 3, 2, &Budget::default(), None).unwrap();
        assert_eq!(r.total_symmetric, 81);
        // the four projective cubes form a basis, so everything is expressible
        assert_eq!(r.expressible_nonzero, 80);
        // regression: the srank-4 family exists (16 tensors of rank 3)
        let srank4: u64 = r
            .histogram
            .iter()
            .filter(|b| b.srank == Some(4))
            .map(|b| b.count)
            .sum();
        assert_eq!(srank4, 16);
        for b in &r.histogram {
            if b.srank == Some(4) {
                assert_eq!(b.rank, 3);
            }
        }
    }

    #[test]
    fn census_gf2_matrices_has_srank3() {
        let r = census(FieldTag::Finite(2), 2, 2, &Budget::default(), None).unwrap();
        assert_eq!(r.total_symmetric, 8);
        assert!(r.histogram.iter().any(|b| b.srank == Some(3)));
    }

    #[test]
    fn sweep_field_precondition_flag() {
        let r = theorem_sweep(
            TheoremId::MainTheo,
            FieldTag::Finite(2),
            3,
            2,
            SweepMode::Exhaustive,
            &Budget::default(),
            None,
        )
        .unwrap();
        assert!(!r.field_precondition_met);
        assert_eq!(r.total, 0);
    }

    #[test]
    fn sweep_rank2eq_gf3_clean() {
        let r = theorem_sweep(
            TheoremId::Rank2Eq,
            FieldTag::Finite(3),
            3,
            2,
            SweepMode::Exhaustive,
            &Budget::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.total, 81);
        assert!(r.violations.is_empty());
        assert_eq!(r.hypothesis_met, r.conclusion_held);
    }

    /// The maintheo sweep over GF(3) finds exactly the sixteen symmetric
    /// tensors whose minimal symmetric decomposition needs four terms; they
    /// have rank 3 = rank_a + 1, so the equality fails there. Frozen as a
    /// regression: the counterexample family is real.
    #[test]
    fn sweep_maintheo_gf3_finds_the_sixteen() {
        let r = theorem_sweep(
            TheoremId::MainTheo,
            FieldTag::Finite(3),
            3,
            2,
            SweepMode::Exhaustive,
            &Budget::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.total, 81);
        assert_eq!(r.violations.len(), 16);
        for v in &r.violations {
            assert_eq!(v.rank_a, 2);
            assert_eq!(v.rank, Some(3));
            assert_eq!(v.srank, Some(4));
        }
    }

    #[test]
    fn sweep_maintheo_gf5_clean() {
        let r = theorem_sweep(
            TheoremId::MainTheo,
            FieldTag::Finite(5),
            3,
            2,
            SweepMode::Exhaustive,
            &Budget::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.total, 625);
        assert!(r.violations.is_empty(), "violations: {:?}", r.violations.first());
        assert_eq!(r.hypothesis_met, r.conclusion_held);
    }

    #[test]
    fn sweep_rank2eq_gf3_n3_sampled_clean() {
        let r = theorem_sweep(
            TheoremId::Rank2Eq,
            FieldTag::Finite(3),
            3,
            3,
            SweepMode::Sample { count: 10_000, seed: 99 },
            &Budget::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.total, 10_000);
        assert!(r.violations.is_empty());
        assert_eq!(r.hypothesis_met, r.conclusion_held);
    }

    #[test]
    fn sweep_eqcase_gf3_unique() {
        let r = theorem_sweep(
            TheoremId::EqCase,
            FieldTag::Finite(3),
            3,
            2,
            SweepMode::Exhaustive,
            &Budget::default(),
            None,
        )
        .unwrap();
        assert!(r.uniqueness_checked);
        assert!(r.violations.is_empty());
        assert_eq!(r.hypothesis_met, r.conclusion_held);
        assert!(r.hypothesis_met > 0);
    }

    #[test]
    fn enumeration_agrees_with_tables() {
        // the explicit srank-4 witness over GF(3): s122 = 1, s222 = 2
        let g3 = FieldTag::Finite(3);
        let one = crate::field::Scalar::one(g3);
        let two = crate::field::Scalar::from_i64(g3, 2);
        let s = crate::tensor::s3f2_from_parts(
            g3,
            [crate::field::Scalar::zero(g3), crate::field::Scalar::zero(g3), one, two],
        );
        let b = Budget::default();
        assert_eq!(brute_rank(s.as_tensor(), &b).unwrap(), 3);
        assert_eq!(brute_srank(&s, &b).unwrap(), SrankResult::Value(4));
        // rank confirmation by enumeration: no 2-term sum, some 3-term sum
        let (shape, digits) = FfShape::from_tensor(s.as_tensor()).unwrap();
        let (r, sets) = minimal_decompositions(&digits, &shape, &b).unwrap();
        assert_eq!(r, 3);
        assert!(!sets.is_empty());
    }
}
