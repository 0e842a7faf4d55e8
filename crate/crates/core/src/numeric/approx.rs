//! Best rank-one approximation of symmetric tensors.
//!
//! The symmetric optimizer is a shifted symmetric power iteration on the
//! pairing |<S, u^(xd)>| over unit vectors; the unconstrained one is the
//! classic cyclic per-mode update. For a symmetric tensor the two optima
//! coincide (a best rank-one approximation can be chosen symmetric), which
//! [`banach_symmetry_check`] verifies empirically from shared seeds.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldTag, Scalar};
use crate::tensor::SymTensor;

use super::linalg::{vec_dot, vec_norm};
use super::{c64_to_scalar, require_float_tag, Cnd};

pub const DEFAULT_RESTARTS: usize = 16;
pub const MAX_ITERATIONS: usize = 500;
pub const DEFAULT_CONV_TOL: f64 = 1e-12;

/// A symmetric rank-one approximant sigma * u^(xd) with unit u.
#[derive(Debug, Clone)]
pub struct SymRankOne {
    pub sigma: Scalar,
    pub u: Vec<Scalar>,
    pub residual: f64,
    pub converged_starts: usize,
    pub failed_starts: usize,
    /// Pairing magnitudes per accepted iteration of the winning start.
    pub objective_history: Vec<f64>,
}

struct StartOutcome {
    u: Vec<Complex64>,
    sigma: Complex64,
    objective: f64,
    history: Vec<f64>,
    converged: bool,
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::new(
                    rng.gen_range(-1.0..1.0),
                    if complex { rng.gen_range(-1.0..1.0) } else { 0.0 },
                )
            })
            .collect();
        let nm = vec_norm(&v);
        if nm > 1e-3 {
            return v.iter().map(|z| z / nm).collect();
        }
    }
}

/// One shifted power-iteration start. The shift grows adaptively whenever a
/// step would decrease the pairing magnitude, which keeps the objective
/// monotone for every order. For real tensors the step follows sign(f) * v,
/// the ascent direction of |f|; the two signs are disconnected there, unlike
/// the complex case where the phase of u is free.
fn symmetric_power_start(c: &Cnd, u0: Vec<Complex64>, conv_tol: f64, real_field: bool) -> StartOutcome {
    let d = c.d;
    let norm_s = c.frobenius();
    let mut u = u0;
    let mut alpha = 0.0f64;
    let ws = |u: &Vec<Complex64>| -> Vec<Vec<Complex64>> { vec![u.clone(); d] };
    let mut objective = c.pairing(&ws(&u)).norm();
    let mut history = vec![objective];
    let mut converged = false;
    // successive-iterate alignment overestimates convergence by the linear
    // rate, so once the threshold is hit we keep polishing until the iterate
    // is bitwise stationary (or the cap runs out)
    let threshold = (0.5 * conv_tol * conv_tol).max(4.0 * f64::EPSILON);
    for _ in 0..MAX_ITERATIONS {
        // pairing(u) = <v, u>, so the unshifted optimal direction is v, with
        // the sign flipped while f is negative on a real tensor
        let v = c.contract_all_but(0, &ws(&u));
        let sign = if real_field && c.pairing(&ws(&u)).re < 0.0 { -1.0 } else { 1.0 };
        let shifted: Vec<Complex64> =
            v.iter().zip(&u).map(|(vi, ui)| sign * vi + alpha * ui).collect();
        let nm = vec_norm(&shifted);
        if nm < 1e-300 {
            // stationary at a dead point: bump the shift and try again
            if alpha == 0.0 {
                alpha = norm_s.max(1e-12);
                continue;
            }
            break;
        }
        let u_new: Vec<Complex64> = shifted.iter().map(|z| z / nm).collect();
        let obj_new = c.pairing(&ws(&u_new)).norm();
        if obj_new + 1e-14 * norm_s.max(1.0) < objective {
            // the plain step overshot: redo with a stronger shift
            alpha = if alpha == 0.0 { 0.5 * norm_s.max(1e-12) } else { 2.0 * alpha };
            if alpha > 1e6 * norm_s.max(1.0) {
                break;
            }
            continue;
        }
        let align = 1.0 - vec_dot(&u_new, &u).norm();
        objective = obj_new.max(objective);
        history.push(objective);
        u = u_new;
        if align <= threshold {
            converged = true;
        }
        if align <= 0.0 {
            break;
        }
    }
    let sigma = c.pairing(&ws(&u));
    StartOutcome { u, sigma, objective: sigma.norm(), history, converged }
}

/// Best symmetric rank-one approximation by multi-start shifted power
/// iteration. Deterministic for a fixed seed; fails only if every start
/// fails to converge.
pub fn best_sym_rank1(
    s: &SymTensor,
    restarts: usize,
    seed: u64,
    conv_tol: f64,
) -> Result<SymRankOne> {
    require_float_tag(s.as_tensor())?;
    if s.as_tensor().is_zero() {
        return Err(Error::PreconditionFailed("zero tensor has no direction".into()));
    }
    let tag = s.tag();
    let c = Cnd::from_tensor(s.as_tensor());
    let complex = tag == FieldTag::ComplexFloat;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<StartOutcome> = None;
    let mut converged_starts = 0;
    let mut failed = 0;
    for _ in 0..restarts.max(1) {
        let u0 = random_unit(&mut rng, c.n, complex);
        let out = symmetric_power_start(&c, u0, conv_tol, !complex);
        if out.converged {
            converged_starts += 1;
        } else {
            failed += 1;
        }
        if best.as_ref().map_or(true, |b| out.objective > b.objective) {
            best = Some(out);
        }
    }
    if converged_starts == 0 {
        return Err(Error::DidNotConverge(MAX_ITERATIONS));
    }
    let best = best.expect("at least one start ran");
    let residual = c.rank_one_residual(best.sigma, &vec![best.u.clone(); c.d]);
    Ok(SymRankOne {
        sigma: c64_to_scalar(tag, best.sigma, 1e300)?,
        u: best
            .u
            .iter()
            .map(|z| c64_to_scalar(tag, *z, 1e300))
            .collect::<Result<_>>()?,
        residual,
        converged_starts,
        failed_starts: failed,
        objective_history: best.history,
    })
}

struct AlsOutcome {
    factors: Vec<Vec<Complex64>>,
    sigma: Complex64,
    converged: bool,
}

/// Unconstrained rank-one approximation: cyclic per-mode updates, each of
/// which is the exact optimum given the other factors, so the objective is
/// monotone without shifts.
fn als_rank_one_start(c: &Cnd, starts: Vec<Vec<Complex64>>, conv_tol: f64) -> AlsOutcome {
    let d = c.d;
    let mut us = starts;
    let mut objective = c.pairing(&us).norm();
    let mut converged = false;
    let threshold = (0.5 * conv_tol * conv_tol).max(4.0 * f64::EPSILON);
    for _ in 0..MAX_ITERATIONS {
        let mut moved = 0.0f64;
        for mode in 0..d {
            let v = c.contract_all_but(mode, &us);
            let nm = vec_norm(&v);
            if nm < 1e-300 {
                let sigma = c.pairing(&us);
                return AlsOutcome { factors: us, sigma, converged: false };
            }
            let u_new: Vec<Complex64> = v.iter().map(|z| z / nm).collect();
            moved = moved.max(1.0 - vec_dot(&u_new, &us[mode]).norm());
            us[mode] = u_new;
        }
        let obj_new = c.pairing(&us).norm();
        debug_assert!(obj_new + 1e-10 * (1.0 + objective) >= objective);
        objective = obj_new;
        if moved <= threshold {
            converged = true;
        }
        if moved <= 0.0 {
            break;
        }
    }
    let sigma = c.pairing(&us);
    AlsOutcome { factors: us, sigma, converged }
}

#[derive(Debug, Clone, Serialize)]
pub struct BanachSeed {
    pub seed_index: usize,
    pub symmetric_residual: f64,
    pub unconstrained_residual: f64,
    pub symmetric_converged: bool,
    pub unconstrained_converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BanachReport {
    pub seeds: Vec<BanachSeed>,
    pub symmetric_best_residual: f64,
    pub unconstrained_best_residual: f64,
    /// unconstrained best minus symmetric best; nonnegative (within
    /// tolerance) when a best rank-one approximation can be taken symmetric.
    pub residual_gap: f64,
}

/// Run the symmetric and unconstrained optimizers from shared seeds and
/// report the residual gap. A negative gap beyond tolerance would mean the
/// symmetric optimum is strictly worse than the unconstrained one.
pub fn banach_symmetry_check(
    s: &SymTensor,
    restarts: usize,
    seed: u64,
    conv_tol: f64,
) -> Result<BanachReport> {
    require_float_tag(s.as_tensor())?;
    let c = Cnd::from_tensor(s.as_tensor());
    let complex = s.tag() == FieldTag::ComplexFloat;

    let mut seeds = Vec::new();
    let mut sym_best = f64::INFINITY;
    let mut unc_best = f64::INFINITY;
    let mut any_converged = false;
    for i in 0..restarts.max(1) {
        // one RNG stream per seed index keeps the two optimizers aligned
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let u0 = random_unit(&mut rng, c.n, complex);
        let sym = symmetric_power_start(&c, u0.clone(), conv_tol, !complex);
        let unc_starts: Vec<Vec<Complex64>> = std::iter::once(u0)
            .chain((1..c.d).map(|_| random_unit(&mut rng, c.n, complex)))
            .collect();
        let unc = als_rank_one_start(&c, unc_starts, conv_tol);
        let entry = BanachSeed {
            seed_index: i,
            symmetric_residual: c.rank_one_residual(sym.sigma, &vec![sym.u.clone(); c.d]),
            unconstrained_residual: c.rank_one_residual(unc.sigma, &unc.factors),
            symmetric_converged: sym.converged,
            unconstrained_converged: unc.converged,
        };
        any_converged |= sym.converged && unc.converged;
        sym_best = sym_best.min(entry.symmetric_residual);
        unc_best = unc_best.min(entry.unconstrained_residual);
        seeds.push(entry);
    }
    if !any_converged {
        return Err(Error::DidNotConverge(MAX_ITERATIONS));
    }
    Ok(BanachReport {
        seeds,
        symmetric_best_residual: sym_best,
        unconstrained_best_residual: unc_best,
        residual_gap: unc_best - sym_best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::tensor::{sym_power, SymTensor};

    fn e(n: usize, i: usize) -> Vec<Scalar> {
        (0..n)
            .map(|k| Scalar::Real(if k == i { 1.0 } else { 0.0 }))
            .collect()
    }

    /// Dense sweep over the unit circle: the independent oracle for 2-dim
    /// symmetric tensors.
    fn circle_oracle(s: &SymTensor, steps: usize) -> f64 {
        let c = Cnd::from_tensor(s.as_tensor());
        let mut best = 0.0f64;
        for k in 0..steps {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / (steps as f64);
            let u = vec![
                Complex64::new(th.cos(), 0.0),
                Complex64::new(th.sin(), 0.0),
            ];
            let val = c.pairing(&vec![u.clone(); c.d]).norm();
            best = best.max(val);
        }
        best
    }

    #[test]
    fn axis_dominant_tensor() {
        // S = e1^3 + 0.5 e2^3: sigma = 1, u = +-e1, residual 0.5
        let t = sym_power(&e(2, 0), 3)
            .as_tensor()
            .add(&sym_power(&e(2, 1), 3).as_tensor().scale(&Scalar::Real(0.5)))
            .unwrap();
        let s = SymTensor::new(t).unwrap();
        let out = best_sym_rank1(&s, 16, 7, DEFAULT_CONV_TOL).unwrap();
        assert!((out.sigma.abs_f64() - 1.0).abs() < 1e-9);
        assert!((out.residual - 0.5).abs() < 1e-9);
        let u0 = out.u[0].to_c64().norm();
        assert!((u0 - 1.0).abs() < 1e-7);
        // grid oracle agrees
        let oracle = circle_oracle(&s, 200_000);
        assert!((oracle - 1.0).abs() < 1e-6);
    }

    #[test]
    fn exact_rank_one_input() {
        let u = vec![Scalar::Real(0.6), Scalar::Real(0.8)];
        let s = sym_power(&u, 4);
        let out = best_sym_rank1(&s, 8, 3, DEFAULT_CONV_TOL).unwrap();
        assert!((out.sigma.abs_f64() - 1.0).abs() < 1e-10);
        assert!(out.residual < 1e-10);
    }

    #[test]
    fn w_tensor_optimum_matches_the_circle_oracle() {
        let w = instances::w_tensor(FieldTag::RealFloat);
        let out = best_sym_rank1(&w, 16, 11, DEFAULT_CONV_TOL).unwrap();
        let expect = 2.0 / 3.0f64.sqrt();
        assert!((out.sigma.abs_f64() - expect).abs() < 1e-9, "sigma {:?}", out.sigma);
        // maximizer (sqrt(2/3), sqrt(1/3)) up to sign
        let u: Vec<f64> = out.u.iter().map(|s| s.to_c64().re).collect();
        assert!((u[0].abs() - (2.0f64 / 3.0).sqrt()).abs() < 1e-6);
        assert!((u[1].abs() - (1.0f64 / 3.0).sqrt()).abs() < 1e-6);
        let oracle = circle_oracle(&w, 400_000);
        assert!((oracle - expect).abs() < 1e-9);
        assert!((out.sigma.abs_f64() - oracle).abs() < 1e-6);
    }

    #[test]
    fn objective_history_is_monotone() {
        for seed in 0..6u64 {
            let s = instances::random_sym(FieldTag::RealFloat, 4, 3, 100 + seed).unwrap();
            let out = best_sym_rank1(&s, 4, seed, DEFAULT_CONV_TOL).unwrap();
            for w in out.objective_history.windows(2) {
                assert!(w[1] + 1e-10 >= w[0], "objective decreased: {w:?}");
            }
        }
    }

    #[test]
    fn order2_matches_dominant_eigenpair() {
        // [[2,1],[1,2]]: eigenvalues 3 and 1, dominant vector (1,1)/sqrt(2)
        let tag = FieldTag::RealFloat;
        let entries = vec![
            Scalar::Real(2.0),
            Scalar::Real(1.0),
            Scalar::Real(1.0),
            Scalar::Real(2.0),
        ];
        let t = crate::tensor::Tensor::new(2, 2, tag, entries).unwrap();
        let s = SymTensor::new(t).unwrap();
        let out = best_sym_rank1(&s, 8, 5, 1e-14).unwrap();
        assert!((out.sigma.abs_f64() - 3.0).abs() < 1e-8);
        let u: Vec<f64> = out.u.iter().map(|v| v.to_c64().re).collect();
        assert!((u[0].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        assert!((u[0] - u[1]).abs() < 1e-7);
    }

    #[test]
    fn banach_examples() {
        // exact rank-one: both residuals vanish
        let u = vec![Scalar::Real(1.0), Scalar::Real(-2.0), Scalar::Real(0.5)];
        let s = sym_power(&u, 3);
        let r = banach_symmetry_check(&s, 8, 17, DEFAULT_CONV_TOL).unwrap();
        assert!(r.symmetric_best_residual < 1e-9);
        assert!(r.unconstrained_best_residual < 1e-9);

        // W tensor: the two optima agree
        let w = instances::w_tensor(FieldTag::RealFloat);
        let r = banach_symmetry_check(&w, 16, 23, DEFAULT_CONV_TOL).unwrap();
        assert!((r.symmetric_best_residual - r.unconstrained_best_residual).abs() < 1e-6);
        // cross-check the symmetric value against the circle oracle:
        // residual^2 = |W|^2 - sigma^2 = 3 - 4/3
        let expect = (3.0f64 - 4.0 / 3.0).sqrt();
        assert!((r.symmetric_best_residual - expect).abs() < 1e-8);

        // random symmetric tensors: symmetric never loses beyond tolerance
        for seed in 0..5u64 {
            let s = instances::random_sym(FieldTag::RealFloat, 3, 3, 500 + seed).unwrap();
            let r = banach_symmetry_check(&s, 12, seed, DEFAULT_CONV_TOL).unwrap();
            assert!(r.residual_gap >= -1e-8, "gap {}", r.residual_gap);
        }
    }
}
