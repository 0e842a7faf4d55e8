//! Named example tensors and seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::{FieldTag, Scalar};
use crate::tensor::{multi_indices, symmetrize, SymTensor, Tensor};

/// The symmetric 2x2 matrix [[0,1],[1,0]] over GF(2): rank 2 but symmetric
/// rank 3.
pub fn z2_counterexample() -> SymTensor {
    let g2 = FieldTag::Finite(2);
    SymTensor::from_orbit_values(2, 2, g2, |idx| {
        if idx == [0, 1] {
            Scalar::one(g2)
        } else {
            Scalar::zero(g2)
        }
    })
}

/// The W tensor x(x)x(x)y + x(x)y(x)x + y(x)x(x)x with x = e1, y = e2:
/// rank 3 but border rank 2.
pub fn w_tensor(tag: FieldTag) -> SymTensor {
    SymTensor::from_orbit_values(3, 2, tag, |idx| {
        if idx.iter().sum::<usize>() == 1 {
            Scalar::one(tag)
        } else {
            Scalar::zero(tag)
        }
    })
}

/// Order-d generalization of the W pattern plus a top coefficient:
/// a*x^(xd) + sum_j x..y..x with x = e1, y = e2.
pub fn w_tensor_d(tag: FieldTag, d: usize, a: Scalar) -> SymTensor {
    SymTensor::from_orbit_values(d, 2, tag, move |idx| {
        match idx.iter().sum::<usize>() {
            0 => a.clone(),
            1 => Scalar::one(tag),
            _ => Scalar::zero(tag),
        }
    })
}

/// The 2x2x2 pencil example with slices F = [[a,1],[1,0]], G = [[1,0],[0,0]]:
/// s111 = a, the s112 orbit is 1, everything else 0.
pub fn pencil_example(tag: FieldTag, a: Scalar) -> SymTensor {
    SymTensor::from_orbit_values(3, 2, tag, move |idx| {
        match idx.iter().sum::<usize>() {
            0 => a.clone(),
            1 => Scalar::one(tag),
            _ => Scalar::zero(tag),
        }
    })
}

/// Seeded random symmetric tensor. Exact tags draw uniform small entries;
/// float tags draw from the orbit-averaged standard normal cube.
pub fn random_sym(tag: FieldTag, d: usize, n: usize, seed: u64) -> Result<SymTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match tag {
        FieldTag::Finite(p) => Ok(SymTensor::from_orbit_values(d, n, tag, |_| {
            Scalar::Finite { p, residue: rng.gen_range(0..p) }
        })),
        FieldTag::Rational => Ok(SymTensor::from_orbit_values(d, n, tag, |_| {
            Scalar::from_i64(tag, rng.gen_range(-9..=9))
        })),
        FieldTag::RealFloat | FieldTag::ComplexFloat => {
            let mut t = Tensor::zero(d, n, tag);
            for idx in multi_indices(n, d) {
                let v = match tag {
                    FieldTag::RealFloat => Scalar::Real(rng.gen_range(-1.0..1.0)),
                    _ => Scalar::Complex(num_complex::Complex64::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    )),
                };
                t.set(&idx, v);
            }
            symmetrize(&t)
        }
    }
}

/// Seeded well-conditioned border-rank-2 normal form: unit x, unit y with a
/// bounded angle to x, and coefficients away from zero.
pub fn random_border_form(
    tag: FieldTag,
    d: usize,
    n: usize,
    rng: &mut impl Rng,
) -> crate::numeric::BorderForm {
    let complex = tag == FieldTag::ComplexFloat;
    let draw_unit = |rng: &mut dyn rand::RngCore, n: usize| -> Vec<num_complex::Complex64> {
        loop {
            let v: Vec<num_complex::Complex64> = (0..n)
                .map(|_| {
                    num_complex::Complex64::new(
                        rng.gen_range(-1.0..1.0),
                        if complex { rng.gen_range(-1.0..1.0) } else { 0.0 },
                    )
                })
                .collect();
            let nm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nm > 0.3 {
                return v.iter().map(|z| z / nm).collect();
            }
        }
    };
    let x = draw_unit(rng, n);
    let y = loop {
        let cand = draw_unit(rng, n);
        let overlap: num_complex::Complex64 =
            x.iter().zip(&cand).map(|(a, b)| a * b.conj()).sum();
        if overlap.norm() < 0.8 {
            break cand;
        }
    };
    let to_scalar = |z: num_complex::Complex64| -> Scalar {
        if complex {
            Scalar::Complex(z)
        } else {
            Scalar::Real(z.re)
        }
    };
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let b_mag: f64 = rng.gen_range(0.5..1.5) * sign;
    let b = if complex {
        Scalar::Complex(num_complex::Complex64::from_polar(
            b_mag.abs(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        ))
    } else {
        Scalar::Real(b_mag)
    };
    let a = to_scalar(num_complex::Complex64::new(
        rng.gen_range(-2.0..2.0),
        if complex { rng.gen_range(-2.0..2.0) } else { 0.0 },
    ));
    crate::numeric::BorderForm {
        x: x.into_iter().map(to_scalar).collect(),
        y: y.into_iter().map(to_scalar).collect(),
        a,
        b,
        order: d,
    }
}
