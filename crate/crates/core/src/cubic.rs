//! Constructive decomposition of symmetric 2x2x2 tensors (binary cubics)
//! into symmetric rank-one terms over any exact field with at least three
//! elements, by an explicit change-of-variables case tree.
//!
//! In almost every case at most three terms suffice and the term count
//! equals the symmetric rank. Over GF(3) there is a sixteen-tensor family
//! whose symmetric rank is four (the four projective cubes form a basis of
//! the symmetric space, and those tensors have no zero coordinate in it);
//! the case tree detects that corner and falls back to an exact solve in the
//! cube basis, so the result is still minimal.

use num::Signed;

use crate::error::{Error, Result};
use crate::field::{field_elements, FieldTag, Scalar};
use crate::matrix::Mat;
use crate::multilinear::{mode_apply_all, rank_a};
use crate::tensor::{reconstruct, Decomposition, RankOneTerm, SymTensor};

/// Branch labels of the decomposition case tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseLabel {
    /// Both mixed entries nonzero: direct formulas.
    Case1,
    /// Both mixed entries zero: diagonal two-term decomposition.
    Case2,
    /// Characteristic-3 shear into case 1.
    Case3a,
    /// Nonzero leading cube coefficient: shear with a chosen scale.
    Case3bi,
    /// Both cube coefficients zero: fixed shear into case 1.
    Case3bii,
    /// Trailing cube coefficient nonzero: normalization into case 3bii.
    Case3biii,
    /// GF(3) corner with symmetric rank four: exact solve in the basis of
    /// projective cubes.
    CubeBasis,
}

impl CaseLabel {
    pub fn name(&self) -> &'static str {
        match self {
            CaseLabel::Case1 => "1",
            CaseLabel::Case2 => "2",
            CaseLabel::Case3a => "3a",
            CaseLabel::Case3bi => "3bi",
            CaseLabel::Case3bii => "3bii",
            CaseLabel::Case3biii => "3biii",
            CaseLabel::CubeBasis => "cube-basis",
        }
    }
}

/// One hop of the case tree: the branch taken and the substitution applied
/// to reach the next tensor (None for terminal branches).
#[derive(Debug, Clone, PartialEq)]
pub struct CaseStep {
    pub label: CaseLabel,
    pub substitution: Option<Mat>,
}

/// The audited path through the case tree. Composing the recorded
/// substitutions and pulling the final decomposition back through the
/// inverse reproduces the input tensor.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CaseTrace {
    pub steps: Vec<CaseStep>,
}

/// Change of variables on a symmetric tensor, acting on rank-one vectors as
/// u -> m u. Errors on singular m.
pub fn apply_substitution(s: &SymTensor, m: &Mat) -> Result<SymTensor> {
    if m.rows() != s.dim() || m.cols() != s.dim() {
        return Err(Error::ShapeMismatch("substitution must be square n x n".into()));
    }
    if m.inverse().is_none() {
        return Err(Error::SingularSubstitution);
    }
    SymTensor::new(mode_apply_all(s.as_tensor(), m)?)
}

struct Parts {
    s111: Scalar,
    s112: Scalar,
    s122: Scalar,
    s222: Scalar,
}

fn parts_of(s: &SymTensor) -> Parts {
    Parts {
        s111: s.get(&[0, 0, 0]).clone(),
        s112: s.get(&[0, 0, 1]).clone(),
        s122: s.get(&[0, 1, 1]).clone(),
        s222: s.get(&[1, 1, 1]).clone(),
    }
}

fn term(t: Scalar, u: Vec<Scalar>) -> RankOneTerm {
    RankOneTerm::symmetric(t, u, 3)
}

/// Decompose S in S^3 F^2 into symmetric rank-one terms with the case trace.
///
/// Exact tags only; GF(2) is rejected (half of its nonzero symmetric cubics
/// are not sums of symmetric rank-one tensors at all).
pub fn decompose_s3f2(s: &SymTensor) -> Result<(Decomposition, CaseTrace)> {
    if s.order() != 3 || s.dim() != 2 {
        return Err(Error::WrongShape(format!(
            "need order 3, dimension 2; got ({}, {})",
            s.order(),
            s.dim()
        )));
    }
    let tag = s.tag();
    match tag {
        FieldTag::Finite(2) => {
            return Err(Error::UnsupportedField(
                tag,
                "the three projective cubes span only half of the space".into(),
            ));
        }
        FieldTag::Finite(_) | FieldTag::Rational => {}
        _ => {
            return Err(Error::UnsupportedField(
                tag,
                "case dispatch tests exact zeroness; float input is rejected".into(),
            ));
        }
    }

    let mut trace = CaseTrace::default();
    let ra = rank_a(s.as_tensor(), None);

    // rank A(S) short-circuits: 0 and 1 are immediate
    if ra == 0 {
        return Ok((Decomposition::symmetric_terms(Vec::new()), trace));
    }
    if ra == 1 {
        let dec = rank_one_extract(s)?;
        return verify(s, dec, trace);
    }

    let p = parts_of(s);
    // the diagonal branch keeps its own label
    if p.s112.is_zero() && p.s122.is_zero() {
        let mut terms = Vec::new();
        if !p.s111.is_zero() {
            terms.push(term(p.s111.clone(), vec![Scalar::one(tag), Scalar::zero(tag)]));
        }
        if !p.s222.is_zero() {
            terms.push(term(p.s222.clone(), vec![Scalar::zero(tag), Scalar::one(tag)]));
        }
        trace.steps.push(CaseStep { label: CaseLabel::Case2, substitution: None });
        return verify(s, Decomposition::symmetric_terms(terms), trace);
    }

    // two-term short-circuit so the term count matches the symmetric rank
    if let Some(dec) = try_two_term(s)? {
        return verify(s, dec, trace);
    }

    // the case tree proper; substitutions accumulate left to right
    let mut current = s.clone();
    let mut total: Option<Mat> = None;
    for _hop in 0..4 {
        let p = parts_of(&current);
        if !p.s112.is_zero() && !p.s122.is_zero() {
            trace.steps.push(CaseStep { label: CaseLabel::Case1, substitution: None });
            let dec = case1_terms(&p, tag);
            let dec = pull_back(dec, total.as_ref())?;
            return verify(s, dec, trace);
        }
        // normalize to s112 = 0, s122 != 0, composing a swap when needed
        let mut pending = Mat::identity(2, tag);
        let mut q = p;
        if !q.s112.is_zero() {
            let swap = Mat::from_rows(
                &[
                    vec![Scalar::zero(tag), Scalar::one(tag)],
                    vec![Scalar::one(tag), Scalar::zero(tag)],
                ],
                tag,
            );
            current = apply_substitution(&current, &swap)?;
            pending = swap;
            q = parts_of(&current);
        }
        debug_assert!(q.s112.is_zero() && !q.s122.is_zero());
        let (label, shear) = pick_case3_substitution(&q, tag)?;
        match shear {
            Some(shear) => {
                let step_m = shear.matmul(&pending);
                current = apply_substitution(&current, &shear)?;
                total = Some(match total {
                    Some(t) => step_m.matmul(&t),
                    None => step_m.clone(),
                });
                trace.steps.push(CaseStep { label, substitution: Some(step_m) });
            }
            None => {
                // GF(3) symmetric-rank-4 corner: exact cube-basis solve
                debug_assert_eq!(label, CaseLabel::CubeBasis);
                let step_m = pending.clone();
                let composed = match &total {
                    Some(t) => step_m.matmul(t),
                    None => step_m.clone(),
                };
                let had_swap = composed != Mat::identity(2, tag);
                let dec = cube_basis_solve(&current, tag)?;
                let dec = pull_back(dec, if had_swap { Some(&composed) } else { None })?;
                trace.steps.push(CaseStep {
                    label,
                    substitution: if had_swap { Some(composed) } else { None },
                });
                return verify(s, dec, trace);
            }
        }
    }
    Err(Error::Internal("case tree did not terminate within four hops".into()))
}

/// Choose the substitution for the normalized case-3 shape
/// (s112 = 0, s122 != 0). Returns the label and the substitution matrix, or
/// (CubeBasis, None) in the GF(3) corner where no shear can work.
fn pick_case3_substitution(q: &Parts, tag: FieldTag) -> Result<(CaseLabel, Option<Mat>)> {
    let one = Scalar::one(tag);
    let zero = Scalar::zero(tag);
    let ch = tag.characteristic();
    // vector action u -> m u; the shear "x1 = y1 + a y2" is [[1,0],[a,1]]
    let shear_x1 = |a: &Scalar| {
        Mat::from_rows(&[vec![one.clone(), zero.clone()], vec![a.clone(), one.clone()]], tag)
    };
    // the shear "x2 = t y1 + y2" is [[1,t],[0,1]]
    let shear_x2 = |t: &Scalar| {
        Mat::from_rows(&[vec![one.clone(), t.clone()], vec![zero.clone(), one.clone()]], tag)
    };
    let three = Scalar::from_i64(tag, 3);
    let two = Scalar::from_i64(tag, 2);

    if ch == 3 {
        // after the shear x1 = y1 + a y2: s'112 = a*s111, s'122 = a^2*s111 + s122
        let candidates = field_elements(tag)?;
        for a in candidates.iter().skip(1) {
            let c112 = a.mul(&q.s111);
            let c122 = a.mul(a).mul(&q.s111).add(&q.s122);
            if !c112.is_zero() && !c122.is_zero() {
                return Ok((CaseLabel::Case3a, Some(shear_x1(a))));
            }
        }
        // after the shear x2 = t y1 + y2: s'112 = t(2*s122 + t*s222),
        // s'122 = s122 + t*s222
        for t in candidates.iter().skip(1) {
            let c112 = t.mul(&two.mul(&q.s122).add(&t.mul(&q.s222)));
            let c122 = q.s122.add(&t.mul(&q.s222));
            if !c112.is_zero() && !c122.is_zero() {
                return Ok((CaseLabel::Case3a, Some(shear_x2(t))));
            }
        }
        // no shear lands in case 1: the symmetric-rank-4 corner
        return Ok((CaseLabel::CubeBasis, None));
    }

    if !q.s111.is_zero() {
        // pick a != 0 with a^2*s111 + s122 != 0; possible whenever |F| >= 4
        let mut k = 1i64;
        loop {
            let a = match tag {
                FieldTag::Finite(p) => {
                    if k >= p as i64 {
                        return Err(Error::Internal(
                            "no usable shear scale in a field of size >= 4".into(),
                        ));
                    }
                    Scalar::from_i64(tag, k)
                }
                _ => Scalar::from_i64(tag, k),
            };
            let c122 = a.mul(&a).mul(&q.s111).add(&q.s122);
            if !c122.is_zero() {
                return Ok((CaseLabel::Case3bi, Some(shear_x1(&a))));
            }
            k += 1;
            if k > 64 {
                return Err(Error::Internal("shear scale search ran away".into()));
            }
        }
    }
    if q.s222.is_zero() {
        // s111 = s222 = 0: the fixed shear x2 = y1 + y2 reaches case 1
        return Ok((CaseLabel::Case3bii, Some(shear_x2(&one))));
    }
    // s111 = 0, s222 != 0: map the zero set of the cubic onto {e1, e2}:
    // u = (1,0), v = (-s222, 3*s122) puts the tensor in case 3bii
    let m = Mat::from_rows(
        &[
            vec![one.clone(), zero.clone()],
            vec![q.s222.neg(), three.mul(&q.s122)],
        ],
        tag,
    );
    Ok((CaseLabel::Case3biii, Some(m)))
}

fn case1_terms(p: &Parts, tag: FieldTag) -> Decomposition {
    let t1 = p.s112.mul(&p.s112).div(&p.s122).expect("s122 nonzero");
    let b = p.s122.div(&p.s112).expect("s112 nonzero");
    let t2 = p.s111.sub(&t1);
    let t3 = p.s222.sub(&t1.mul(&b).mul(&b).mul(&b));
    let mut terms = vec![term(t1, vec![Scalar::one(tag), b])];
    if !t2.is_zero() {
        terms.push(term(t2, vec![Scalar::one(tag), Scalar::zero(tag)]));
    }
    if !t3.is_zero() {
        terms.push(term(t3, vec![Scalar::zero(tag), Scalar::one(tag)]));
    }
    Decomposition::symmetric_terms(terms)
}

fn rank_one_extract(s: &SymTensor) -> Result<Decomposition> {
    let unf = crate::multilinear::unfold(s.as_tensor());
    let basis = unf.mat().column_space_basis();
    let u = basis
        .first()
        .cloned()
        .ok_or_else(|| Error::Internal("rank-one extraction on a zero tensor".into()))?;
    let i0 = u
        .iter()
        .position(|v| !v.is_zero())
        .ok_or_else(|| Error::Internal("zero basis column".into()))?;
    let c = s
        .get(&[i0, i0, i0])
        .div(&u[i0].pow(3))
        .map_err(|_| Error::Internal("pivot coordinate vanished".into()))?;
    Ok(Decomposition::symmetric_terms(vec![term(c, u)]))
}

/// Search for a two-term symmetric decomposition (the srank <= 2 case).
/// Complete for finite fields (projective pair sweep) and for the rationals
/// (roots of the annihilating quadratic).
fn try_two_term(s: &SymTensor) -> Result<Option<Decomposition>> {
    let tag = s.tag();
    let p = parts_of(s);
    let dirs: Vec<Vec<Scalar>> = match tag {
        FieldTag::Finite(fp) => crate::oracle::space::projective_reps(fp, 2)
            .into_iter()
            .map(|v| {
                v.into_iter()
                    .map(|x| Scalar::Finite { p: fp, residue: x as u32 })
                    .collect()
            })
            .collect(),
        FieldTag::Rational => {
            // kernel of [[a,b,c],[b,c,d]]: q = (bd - c^2, bc - ad, ac - b^2);
            // the two directions are the projective roots of
            // q0 w1^2 + q1 w1 w2 + q2 w2^2
            let (a, b, c, d) = (&p.s111, &p.s112, &p.s122, &p.s222);
            let q0 = b.mul(d).sub(&c.mul(c));
            let q1 = b.mul(c).sub(&a.mul(d));
            let q2 = a.mul(c).sub(&b.mul(b));
            match quadratic_root_dirs(&q0, &q1, &q2, tag) {
                Some(dirs) => dirs,
                None => return Ok(None),
            }
        }
        _ => unreachable!("exact tags only"),
    };
    let parts_vec = [p.s111.clone(), p.s112.clone(), p.s122.clone(), p.s222.clone()];
    for i in 0..dirs.len() {
        for j in (i + 1)..dirs.len() {
            if let Some(dec) = solve_pair(&parts_vec, &dirs[i], &dirs[j], tag) {
                return Ok(Some(dec));
            }
        }
    }
    Ok(None)
}

fn cube_parts(u: &[Scalar]) -> [Scalar; 4] {
    [
        u[0].pow(3),
        u[0].mul(&u[0]).mul(&u[1]),
        u[0].mul(&u[1]).mul(&u[1]),
        u[1].pow(3),
    ]
}

fn solve_pair(target: &[Scalar; 4], u: &[Scalar], v: &[Scalar], tag: FieldTag) -> Option<Decomposition> {
    let cu = cube_parts(u);
    let cv = cube_parts(v);
    let mut rows = Vec::new();
    for k in 0..4 {
        rows.push(vec![cu[k].clone(), cv[k].clone()]);
    }
    let m = Mat::from_rows(&rows, tag);
    let x = m.solve(&[target[0].clone(), target[1].clone(), target[2].clone(), target[3].clone()])?;
    if x[0].is_zero() || x[1].is_zero() {
        return None;
    }
    // confirm exactly
    for k in 0..4 {
        let got = x[0].mul(&cu[k]).add(&x[1].mul(&cv[k]));
        if got != target[k] {
            return None;
        }
    }
    Some(Decomposition::symmetric_terms(vec![
        term(x[0].clone(), u.to_vec()),
        term(x[1].clone(), v.to_vec()),
    ]))
}

/// Distinct projective rational roots of q0 w1^2 + q1 w1 w2 + q2 w2^2,
/// or None when there are fewer than two over Q.
fn quadratic_root_dirs(
    q0: &Scalar,
    q1: &Scalar,
    q2: &Scalar,
    tag: FieldTag,
) -> Option<Vec<Vec<Scalar>>> {
    let one = Scalar::one(tag);
    let zero = Scalar::zero(tag);
    if q0.is_zero() && q2.is_zero() {
        if q1.is_zero() {
            return None;
        }
        return Some(vec![vec![one.clone(), zero.clone()], vec![zero, one]]);
    }
    if q2.is_zero() {
        // w1 * (q0 w1 + q1 w2): roots (0,1) and (q1, -q0)
        if q1.is_zero() {
            return None;
        }
        return Some(vec![vec![zero.clone(), one], vec![q1.clone(), q0.neg()]]);
    }
    if q0.is_zero() {
        // w2 * (q1 w1 + q2 w2): roots (1,0) and (q2, -q1)
        if q1.is_zero() {
            return None;
        }
        return Some(vec![vec![one, zero], vec![q2.clone(), q1.neg()]]);
    }
    // w = (1, t): q2 t^2 + q1 t + q0 = 0
    let disc = q1.mul(q1).sub(&Scalar::from_i64(tag, 4).mul(&q0.mul(q2)));
    let root = rational_sqrt(&disc)?;
    if root.is_zero() {
        return None; // a double root: no two-term decomposition over Q
    }
    let two_q2 = Scalar::from_i64(tag, 2).mul(q2);
    let t1 = q1.neg().add(&root).div(&two_q2).ok()?;
    let t2 = q1.neg().sub(&root).div(&two_q2).ok()?;
    Some(vec![vec![one.clone(), t1], vec![one, t2]])
}

/// Exact square root of a nonnegative rational, if it exists.
fn rational_sqrt(s: &Scalar) -> Option<Scalar> {
    let r = s.as_rational()?;
    if r.is_negative() {
        return None;
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(Scalar::Rational(num::BigRational::new(sn, sd)))
    } else {
        None
    }
}

/// Exact coordinates in the basis of the four projective cubes over GF(3).
fn cube_basis_solve(s: &SymTensor, tag: FieldTag) -> Result<Decomposition> {
    debug_assert_eq!(tag.characteristic(), 3);
    let p = parts_of(s);
    let target = [p.s111, p.s112, p.s122, p.s222];
    let dirs: Vec<Vec<Scalar>> = crate::oracle::space::projective_reps(3, 2)
        .into_iter()
        .map(|v| v.into_iter().map(|x| Scalar::Finite { p: 3, residue: x as u32 }).collect())
        .collect();
    let rows: Vec<Vec<Scalar>> = (0..4)
        .map(|k| dirs.iter().map(|u| cube_parts(u)[k].clone()).collect())
        .collect();
    let m = Mat::from_rows(&rows, tag);
    let x = m
        .solve(&target)
        .ok_or_else(|| Error::Internal("projective cubes failed to span".into()))?;
    let terms: Vec<RankOneTerm> = x
        .into_iter()
        .zip(dirs)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, u)| term(c, u))
        .collect();
    Ok(Decomposition::symmetric_terms(terms))
}

fn pull_back(dec: Decomposition, total: Option<&Mat>) -> Result<Decomposition> {
    let Some(m) = total else {
        return Ok(dec);
    };
    let inv = m.inverse().ok_or(Error::SingularSubstitution)?;
    let terms = dec
        .terms
        .into_iter()
        .map(|t| match t {
            RankOneTerm::Symmetric { coefficient, vector, order } => {
                RankOneTerm::Symmetric { coefficient, vector: inv.mul_vec(&vector), order }
            }
            other => other,
        })
        .collect();
    Ok(Decomposition { terms, symmetric: true, certificate: None })
}

fn verify(
    s: &SymTensor,
    dec: Decomposition,
    trace: CaseTrace,
) -> Result<(Decomposition, CaseTrace)> {
    let back = reconstruct(&dec, 3, 2, s.tag())?;
    if back != *s.as_tensor() {
        return Err(Error::Internal("decomposition failed exact reconstruction".into()));
    }
    Ok((dec, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldTag;
    use crate::oracle::{brute_rank, brute_srank, Budget, SrankResult};
    use crate::tensor::s3f2_from_parts;

    fn q(v: i64) -> Scalar {
        Scalar::from_i64(FieldTag::Rational, v)
    }

    fn decompose_parts(tag: FieldTag, parts: [i64; 4]) -> (Decomposition, CaseTrace) {
        let s = s3f2_from_parts(
            tag,
            [
                Scalar::from_i64(tag, parts[0]),
                Scalar::from_i64(tag, parts[1]),
                Scalar::from_i64(tag, parts[2]),
                Scalar::from_i64(tag, parts[3]),
            ],
        );
        decompose_s3f2(&s).unwrap()
    }

    #[test]
    fn case1_rational_instance_exact_values() {
        // s111=2, s112=1, s122=1, s222=0: t1=1, b=1, t2=1, t3=-1
        let (dec, trace) = decompose_parts(FieldTag::Rational, [2, 1, 1, 0]);
        assert_eq!(dec.terms.len(), 3);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].label, CaseLabel::Case1);
        let got: Vec<(Scalar, Vec<Scalar>)> = dec
            .terms
            .iter()
            .map(|t| (t.coefficient().clone(), t.factor(0).to_vec()))
            .collect();
        assert_eq!(got[0], (q(1), vec![q(1), q(1)]));
        assert_eq!(got[1], (q(1), vec![q(1), q(0)]));
        assert_eq!(got[2], (q(-1), vec![q(0), q(1)]));
    }

    #[test]
    fn diagonal_case2_gf3() {
        let (dec, trace) = decompose_parts(FieldTag::Finite(3), [1, 0, 0, 2]);
        assert_eq!(dec.terms.len(), 2);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].label, CaseLabel::Case2);
    }

    #[test]
    fn gf2_rejected_totally() {
        let g2 = FieldTag::Finite(2);
        for code in 0..16u64 {
            let bits = [code & 1, (code >> 1) & 1, (code >> 2) & 1, (code >> 3) & 1];
            let s = s3f2_from_parts(
                g2,
                [
                    Scalar::from_i64(g2, bits[0] as i64),
                    Scalar::from_i64(g2, bits[1] as i64),
                    Scalar::from_i64(g2, bits[2] as i64),
                    Scalar::from_i64(g2, bits[3] as i64),
                ],
            );
            assert!(matches!(
                decompose_s3f2(&s),
                Err(Error::UnsupportedField(FieldTag::Finite(2), _))
            ));
        }
    }

    #[test]
    fn float_rejected() {
        let s = crate::instances::w_tensor(FieldTag::RealFloat);
        assert!(matches!(decompose_s3f2(&s), Err(Error::UnsupportedField(_, _))));
    }

    #[test]
    fn w_tensor_rational_three_terms() {
        let w = crate::instances::w_tensor(FieldTag::Rational);
        let (dec, trace) = decompose_s3f2(&w).unwrap();
        assert_eq!(dec.terms.len(), 3);
        // the path normalizes into the 3b sub-tree and ends in case 1
        assert_eq!(trace.steps.last().unwrap().label, CaseLabel::Case1);
        assert!(trace
            .steps
            .iter()
            .any(|s| matches!(s.label, CaseLabel::Case3bii | CaseLabel::Case3biii)));
        let back = reconstruct(&dec, 3, 2, FieldTag::Rational).unwrap();
        assert_eq!(back, *w.as_tensor());
        // cross-check the count against the exhaustive oracle over GF(5)
        let w5 = crate::instances::w_tensor(FieldTag::Finite(5));
        assert_eq!(
            brute_srank(&w5, &Budget::default()).unwrap(),
            SrankResult::Value(3)
        );
    }

    #[test]
    fn trace_substitutions_compose_invertibly() {
        let w = crate::instances::w_tensor(FieldTag::Rational);
        let (_, trace) = decompose_s3f2(&w).unwrap();
        let mut total = Mat::identity(2, FieldTag::Rational);
        for step in &trace.steps {
            if let Some(m) = &step.substitution {
                total = m.matmul(&total);
            }
        }
        assert!(total.inverse().is_some());
    }

    fn exhaustive_field_check(p: u32) {
        let tag = FieldTag::Finite(p);
        let budget = Budget::default();
        let total = (p as u64).pow(4);
        let mut max_terms = 0usize;
        for code in 0..total {
            let mut c = code;
            let mut parts = [0i64; 4];
            for slot in parts.iter_mut() {
                *slot = (c % p as u64) as i64;
                c /= p as u64;
            }
            let s = s3f2_from_parts(
                tag,
                [
                    Scalar::from_i64(tag, parts[0]),
                    Scalar::from_i64(tag, parts[1]),
                    Scalar::from_i64(tag, parts[2]),
                    Scalar::from_i64(tag, parts[3]),
                ],
            );
            let (dec, _) = decompose_s3f2(&s).expect("decomposition succeeds");
            let back = reconstruct(&dec, 3, 2, tag).unwrap();
            assert_eq!(back, *s.as_tensor(), "reconstruction at code {code}");
            let srank = brute_srank(&s, &budget).unwrap();
            assert_eq!(
                SrankResult::Value(dec.terms.len() as u32),
                srank,
                "term count vs oracle srank at code {code}"
            );
            max_terms = max_terms.max(dec.terms.len());
            if p != 3 {
                // over GF(3) the sixteen-tensor corner has srank 4 > rank;
                // everywhere else count also equals the plain rank
                let rank = brute_rank(s.as_tensor(), &budget).unwrap();
                assert_eq!(rank, dec.terms.len() as u32, "count vs rank at code {code}");
                assert!(dec.terms.len() <= 3);
            }
        }
        if p == 3 {
            assert_eq!(max_terms, 4);
        } else {
            assert_eq!(max_terms, 3);
        }
    }

    #[test]
    fn exhaustive_gf3() {
        exhaustive_field_check(3);
    }

    #[test]
    fn exhaustive_gf5() {
        exhaustive_field_check(5);
    }

    #[test]
    fn exhaustive_gf7() {
        exhaustive_field_check(7);
    }

    #[test]
    fn random_rationals_reconstruct_with_at_most_three_terms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..1000 {
            let parts: [i64; 4] = [
                rng.gen_range(-9..=9),
                rng.gen_range(-9..=9),
                rng.gen_range(-9..=9),
                rng.gen_range(-9..=9),
            ];
            let s = s3f2_from_parts(
                FieldTag::Rational,
                [q(parts[0]), q(parts[1]), q(parts[2]), q(parts[3])],
            );
            let (dec, _) = decompose_s3f2(&s).unwrap();
            assert!(dec.terms.len() <= 3);
            let back = reconstruct(&dec, 3, 2, FieldTag::Rational).unwrap();
            assert_eq!(back, *s.as_tensor());
        }
    }

    #[test]
    fn two_term_shortcut_catches_hidden_rank2() {
        // (x + y)^3 + (x - y)^3 = 2x^3 + 6xy^2: s111=2, s112=0, s122=2, s222=0
        let s = s3f2_from_parts(FieldTag::Rational, [q(2), q(0), q(2), q(0)]);
        let (dec, trace) = decompose_s3f2(&s).unwrap();
        assert_eq!(dec.terms.len(), 2);
        assert!(trace.steps.is_empty());

        // (1,1)^3 + (1,2)^3 has every entry nonzero yet symmetric rank 2
        let u = vec![q(1), q(1)];
        let v = vec![q(1), q(2)];
        let t = crate::tensor::sym_power(&u, 3)
            .as_tensor()
            .add(crate::tensor::sym_power(&v, 3).as_tensor())
            .unwrap();
        let s = SymTensor::new(t).unwrap();
        let (dec, _) = decompose_s3f2(&s).unwrap();
        assert_eq!(dec.terms.len(), 2);
    }

    #[test]
    fn substitution_examples() {
        let tag = FieldTag::Rational;
        let s = crate::tensor::sym_power(&[q(1), q(0)], 3);
        // identity leaves the tensor alone
        let id = Mat::identity(2, tag);
        assert_eq!(apply_substitution(&s, &id).unwrap(), s);
        // swap exchanges the two cube entries of a diagonal tensor
        let swap = Mat::from_rows(&[vec![q(0), q(1)], vec![q(1), q(0)]], tag);
        let d = s3f2_from_parts(tag, [q(5), q(0), q(0), q(7)]);
        let sw = apply_substitution(&d, &swap).unwrap();
        assert_eq!(*sw.get(&[0, 0, 0]), q(7));
        assert_eq!(*sw.get(&[1, 1, 1]), q(5));
        // vector action coherence: m applied to u^(x3) is (m u)^(x3)
        let m = Mat::from_rows(&[vec![q(1), q(0)], vec![q(1), q(1)]], tag);
        let got = apply_substitution(&s, &m).unwrap();
        assert_eq!(got, crate::tensor::sym_power(&[q(1), q(1)], 3));
        // singular substitution is rejected
        let sing = Mat::from_rows(&[vec![q(1), q(1)], vec![q(2), q(2)]], tag);
        assert_eq!(apply_substitution(&s, &sing).unwrap_err(), Error::SingularSubstitution);
    }

    #[test]
    fn substitution_equivariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let tag = FieldTag::Finite(5);
        for _ in 0..200 {
            let s = s3f2_from_parts(
                tag,
                [
                    Scalar::from_i64(tag, rng.gen_range(0..5)),
                    Scalar::from_i64(tag, rng.gen_range(0..5)),
                    Scalar::from_i64(tag, rng.gen_range(0..5)),
                    Scalar::from_i64(tag, rng.gen_range(0..5)),
                ],
            );
            // random invertible m
            let m = loop {
                let cand = Mat::from_rows(
                    &[
                        vec![
                            Scalar::from_i64(tag, rng.gen_range(0..5)),
                            Scalar::from_i64(tag, rng.gen_range(0..5)),
                        ],
                        vec![
                            Scalar::from_i64(tag, rng.gen_range(0..5)),
                            Scalar::from_i64(tag, rng.gen_range(0..5)),
                        ],
                    ],
                    tag,
                );
                if cand.inverse().is_some() {
                    break cand;
                }
            };
            let sub = apply_substitution(&s, &m).unwrap();
            let (dec_sub, _) = decompose_s3f2(&sub).unwrap();
            let (dec, _) = decompose_s3f2(&s).unwrap();
            assert_eq!(dec.terms.len(), dec_sub.terms.len());
            // pull the substituted decomposition back through m^{-1}
            let pulled = pull_back(dec_sub, Some(&m)).unwrap();
            let back = reconstruct(&pulled, 3, 2, tag).unwrap();
            assert_eq!(back, *s.as_tensor());
        }
    }
}
