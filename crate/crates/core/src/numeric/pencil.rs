//! The 2x2x2 slice-pencil rank test: with slices F = [s_{ij1}] and
//! G = [s_{ij2}] and F invertible, the tensor has rank at most 2 exactly when
//! G F^{-1} is diagonalizable.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::SymTensor;

use super::linalg::{eigenvalues_2x2, kernel_direction_2x2, CMat};
use super::{require_float_tag, Cnd};

/// Default relative tolerance for eigenvalue clustering and the
/// scalar-matrix test.
pub const DEFAULT_PENCIL_TOL: f64 = 1e-7;

/// Deterministic slice-mix sequence tried when the first slice is singular.
const MIXES: [(f64, f64); 5] = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0), (1.0, 2.0)];

#[derive(Debug, Clone, Serialize)]
pub struct PencilVerdict {
    pub rank_le_2: bool,
    /// Eigenvalues of the tested pencil quotient, as [re, im] pairs.
    pub eigenvalues: [[f64; 2]; 2],
    pub eigenvalue_gap: f64,
    /// Geometric multiplicity of the clustered eigenvalue (2 when the
    /// eigenvalues are distinct, counting each separately).
    pub geometric_multiplicity: usize,
    /// The (alpha, beta) combination that produced an invertible slice.
    pub slice_mix: (f64, f64),
    /// Present exactly when the quotient is defective: the repeated
    /// direction, as [re, im] pairs.
    pub defective_direction: Option<Vec<[f64; 2]>>,
}

fn slice(c: &Cnd, third: usize) -> CMat {
    let mut m = CMat::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            m.set(i, j, c.get(&[i, j, third]));
        }
    }
    m
}

pub(crate) fn pencil_quotient(c: &Cnd, tol: f64) -> Result<(CMat, (f64, f64))> {
    let f = slice(c, 0);
    let g = slice(c, 1);
    let scale = f.frobenius().max(g.frobenius()).max(1.0);
    for (alpha, beta) in MIXES {
        let mut h = CMat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                h.set(i, j, alpha * f.get(i, j) + beta * g.get(i, j));
            }
        }
        let det = h.get(0, 0) * h.get(1, 1) - h.get(0, 1) * h.get(1, 0);
        if det.norm() <= tol * scale * scale {
            continue;
        }
        let hinv = h.inverse2().expect("nonzero determinant");
        // complementary slice: keep the pair spanning the pencil
        let k = if beta == 0.0 { &g } else { &f };
        return Ok((k.matmul(&hinv), (alpha, beta)));
    }
    Err(Error::SingularPencil)
}

/// Decide rank <= 2 for a symmetric 2x2x2 float tensor via diagonalizability
/// of the slice-pencil quotient.
pub fn pencil_rank2_test(s: &SymTensor, tol: f64) -> Result<PencilVerdict> {
    require_float_tag(s.as_tensor())?;
    if s.order() != 3 || s.dim() != 2 {
        return Err(Error::WrongShape(format!(
            "pencil test needs a 2x2x2 tensor, got ({}, {})",
            s.order(),
            s.dim()
        )));
    }
    let c = Cnd::from_tensor(s.as_tensor());
    let (m, slice_mix) = pencil_quotient(&c, tol)?;
    let (l1, l2) = eigenvalues_2x2(&m);
    let gap = (l1 - l2).norm();
    // the gap is judged against the matrix scale: a defective quotient has
    // coincident eigenvalues whose computed values only carry noise of order
    // sqrt(eps) * |M|
    let scale = m.frobenius().max(1e-300);
    let as_pair = |z: Complex64| [z.re, z.im];

    if gap > tol * scale {
        return Ok(PencilVerdict {
            rank_le_2: true,
            eigenvalues: [as_pair(l1), as_pair(l2)],
            eigenvalue_gap: gap,
            geometric_multiplicity: 1,
            slice_mix,
            defective_direction: None,
        });
    }
    // clustered: diagonalizable iff M is (approximately) the scalar matrix
    let lambda = (l1 + l2) / 2.0;
    let mut nilpotent = m.clone();
    nilpotent.set(0, 0, m.get(0, 0) - lambda);
    nilpotent.set(1, 1, m.get(1, 1) - lambda);
    let defect = nilpotent.frobenius();
    if defect <= tol * m.frobenius().max(1.0) {
        Ok(PencilVerdict {
            rank_le_2: true,
            eigenvalues: [as_pair(l1), as_pair(l2)],
            eigenvalue_gap: gap,
            geometric_multiplicity: 2,
            slice_mix,
            defective_direction: None,
        })
    } else {
        let dir = kernel_direction_2x2(&nilpotent);
        Ok(PencilVerdict {
            rank_le_2: false,
            eigenvalues: [as_pair(l1), as_pair(l2)],
            eigenvalue_gap: gap,
            geometric_multiplicity: 1,
            slice_mix,
            defective_direction: Some(dir.iter().map(|z| as_pair(*z)).collect()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldTag, Scalar};
    use crate::instances;
    use crate::tensor::{sym_power, SymTensor};

    #[test]
    fn pencil_example_not_diagonalizable() {
        // F = [[a,1],[1,0]], G = [[1,0],[0,0]]: G F^{-1} = [[0,1],[0,0]]
        for a in [0.0, 1.0, 2.5] {
            let s = instances::pencil_example(
                FieldTag::ComplexFloat,
                Scalar::Complex(num_complex::Complex64::new(a, 0.0)),
            );
            let v = pencil_rank2_test(&s, DEFAULT_PENCIL_TOL).unwrap();
            assert!(!v.rank_le_2, "a = {a}");
            // both eigenvalues collapse at zero
            assert!(v.eigenvalue_gap <= 1e-9);
            let dir = v.defective_direction.unwrap();
            // the repeated direction is e1
            assert!(dir[1][0].abs() < 1e-9 && dir[1][1].abs() < 1e-9);
        }
    }

    #[test]
    fn diagonal_tensor_is_rank_le_2() {
        let f = FieldTag::RealFloat;
        let one = |i: usize| {
            let mut v = vec![Scalar::Real(0.0); 2];
            v[i] = Scalar::Real(1.0);
            v
        };
        let t = sym_power(&one(0), 3)
            .as_tensor()
            .add(sym_power(&one(1), 3).as_tensor())
            .unwrap();
        let s = SymTensor::new(t).unwrap();
        let v = pencil_rank2_test(&s, DEFAULT_PENCIL_TOL).unwrap();
        assert!(v.rank_le_2);
        assert!(v.eigenvalue_gap > 0.5);
        let _ = f;
    }

    /// Exact cross-check on every symmetric 2x2x2 tensor with entries in
    /// {-1, 0, 1}: given a full-rank unfolding, the pencil verdict must agree
    /// with the exact classification of binary cubics, which has rank <= 2
    /// over the complex numbers exactly when the discriminant of the
    /// annihilating quadratic is nonzero.
    #[test]
    fn pencil_agrees_with_exact_discriminant_classification() {
        let q = |v: i64| Scalar::from_i64(FieldTag::Rational, v);
        let mut tested = 0;
        for code in 0..81u32 {
            let mut c = code;
            let mut parts = [0i64; 4];
            for slot in parts.iter_mut() {
                *slot = (c % 3) as i64 - 1;
                c /= 3;
            }
            // exact side over the rationals
            let exact = crate::tensor::s3f2_from_parts(
                FieldTag::Rational,
                [q(parts[0]), q(parts[1]), q(parts[2]), q(parts[3])],
            );
            if crate::multilinear::rank_a(exact.as_tensor(), None) != 2 {
                continue;
            }
            let (a, b, cc, d) = (parts[0], parts[1], parts[2], parts[3]);
            let q0 = b * d - cc * cc;
            let q1 = b * cc - a * d;
            let q2 = a * cc - b * b;
            let disc = q1 * q1 - 4 * q0 * q2;
            let rank_le_2_exact = disc != 0;

            // float side through the pencil
            let float = crate::tensor::s3f2_from_parts(
                FieldTag::ComplexFloat,
                [
                    Scalar::Complex((parts[0] as f64).into()),
                    Scalar::Complex((parts[1] as f64).into()),
                    Scalar::Complex((parts[2] as f64).into()),
                    Scalar::Complex((parts[3] as f64).into()),
                ],
            );
            let verdict = pencil_rank2_test(&float, DEFAULT_PENCIL_TOL).unwrap();
            assert_eq!(
                verdict.rank_le_2, rank_le_2_exact,
                "disagreement at entries {parts:?} (disc = {disc})"
            );
            tested += 1;
        }
        assert!(tested > 40, "only {tested} full-rank pencils exercised");
    }

    #[test]
    fn degenerate_tensor_reports_singular_pencil() {
        // u^(x3) with u = (1,1): every slice mix is singular (rank A = 1)
        let u = vec![Scalar::Real(1.0), Scalar::Real(1.0)];
        let s = sym_power(&u, 3);
        match pencil_rank2_test(&s, DEFAULT_PENCIL_TOL) {
            Err(crate::error::Error::SingularPencil) => {}
            other => panic!("expected SingularPencil, got {other:?}"),
        }
    }
}
