//! Floating-point procedures: the 2x2x2 pencil rank test, border-rank-2
//! normal forms with their approximating curves, and best symmetric rank-one
//! approximation.

pub mod approx;
pub mod border;
pub mod linalg;
pub mod pencil;

pub use approx::{banach_symmetry_check, best_sym_rank1, BanachReport, BanachSeed, SymRankOne};
pub use border::{
    border_form_residual, border_form_tensor, detect_border_rank2, eps_curve, eps_curve_error,
    eps_error_exact, eval_eps, BorderForm, EpsCurve,
};
pub use pencil::{pencil_rank2_test, PencilVerdict};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldTag, Scalar};
use crate::tensor::{multi_indices, Tensor};

/// Dense complex working copy of a tensor.
#[derive(Debug, Clone)]
pub(crate) struct Cnd {
    pub d: usize,
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl Cnd {
    pub fn from_tensor(t: &Tensor) -> Cnd {
        Cnd {
            d: t.order(),
            n: t.dim(),
            data: t.entries().iter().map(|s| s.to_c64()).collect(),
        }
    }

    pub fn zero(d: usize, n: usize) -> Cnd {
        Cnd { d, n, data: vec![Complex64::new(0.0, 0.0); n.pow(d as u32)] }
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        let mut o = 0;
        for &i in idx {
            o = o * self.n + i;
        }
        o
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.data[self.offset(idx)]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Contract every mode except `mode` with conj of the given vectors:
    /// out_i = sum s[.., i at mode, ..] prod_k conj(w_k)[idx_k].
    pub fn contract_all_but(&self, mode: usize, ws: &[Vec<Complex64>]) -> Vec<Complex64> {
        debug_assert_eq!(ws.len(), self.d);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for idx in multi_indices(self.n, self.d) {
            let mut w = self.data[self.offset(&idx)];
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (k, wk) in ws.iter().enumerate() {
                if k != mode {
                    w *= wk[idx[k]].conj();
                }
            }
            out[idx[mode]] += w;
        }
        out
    }

    /// <S, w_1 (x) .. (x) w_d> = sum s * conj(prod w).
    pub fn pairing(&self, ws: &[Vec<Complex64>]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for idx in multi_indices(self.n, self.d) {
            let mut w = self.data[self.offset(&idx)];
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (k, wk) in ws.iter().enumerate() {
                w *= wk[idx[k]].conj();
            }
            acc += w;
        }
        acc
    }

    /// Apply an r x n matrix (rows of `m`) to every mode.
    pub fn mode_apply_all(&self, m: &[Vec<Complex64>]) -> Cnd {
        let r = m.len();
        let mut out = Cnd::zero(self.d, r);
        for jdx in multi_indices(r, self.d) {
            let mut acc = Complex64::new(0.0, 0.0);
            for idx in multi_indices(self.n, self.d) {
                let mut w = self.data[self.offset(&idx)];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..self.d {
                    w *= m[jdx[k]][idx[k]];
                }
                acc += w;
            }
            let o = out.offset(&jdx);
            out.data[o] = acc;
        }
        out
    }

    /// Frobenius distance to sigma * w_1 (x) .. (x) w_d, computed
    /// entrywise to avoid the cancellation in |S|^2 - |sigma|^2.
    pub fn rank_one_residual(&self, sigma: Complex64, ws: &[Vec<Complex64>]) -> f64 {
        let mut acc = 0.0;
        for idx in multi_indices(self.n, self.d) {
            let mut w = sigma;
            for (k, wk) in ws.iter().enumerate() {
                w *= wk[idx[k]];
            }
            acc += (self.data[self.offset(&idx)] - w).norm_sqr();
        }
        acc.sqrt()
    }

    pub fn sub(&self, other: &Cnd) -> Cnd {
        debug_assert_eq!((self.d, self.n), (other.d, other.n));
        Cnd {
            d: self.d,
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

pub(crate) fn require_float_tag(t: &Tensor) -> Result<()> {
    if t.tag().is_float() {
        Ok(())
    } else {
        Err(Error::UnsupportedField(
            t.tag(),
            "numeric procedures need float64 or complex128".into(),
        ))
    }
}

/// Convert a complex value back into a scalar of the requested float tag.
/// For the real tag the imaginary part must be negligible.
pub(crate) fn c64_to_scalar(tag: FieldTag, z: Complex64, tol: f64) -> Result<Scalar> {
    match tag {
        FieldTag::ComplexFloat => Ok(Scalar::Complex(z)),
        FieldTag::RealFloat => {
            if z.im.abs() <= tol * (1.0 + z.re.abs()) {
                Ok(Scalar::Real(z.re))
            } else {
                Err(Error::Internal(format!(
                    "expected a real value, got imaginary part {:.3e}",
                    z.im
                )))
            }
        }
        _ => Err(Error::UnsupportedField(tag, "float tags only".into())),
    }
}

#[allow(dead_code)]
pub(crate) fn scalar_vec_to_c64(v: &[Scalar]) -> Vec<Complex64> {
    v.iter().map(|s| s.to_c64()).collect()
}
