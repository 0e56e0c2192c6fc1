//! The Einstein-Hilbert volume functional `V` of the conformally rescaled
//! metric, the constants `d` and `c`, the cKEM-Futaki obstruction, and the
//! `d = 1` normalization, all in toric form for complex dimension `m = 2`:
//!
//! ```text
//!   V  = 2 sqrt(2) pi * B(2) / sqrt(I(4))        B(k) = bd integral of f^-k
//!   d  = 2 B(2) / I(4)                           I(k) = int. integral of f^-k
//!   c  = 2 B(3) / I(5)
//!   F(H) = 2 * bd integral of f_H f^-3 - c * int. integral of f_H f^-5
//! ```
//!
//! for `f_H` in `{mu1, mu2, 1}`. The common `(2pi)^m/m!` measure factor is
//! kept only inside `V`; it cancels in `d`, `c` and scales `F` globally
//! (convention tag `bare-2pi` in serialized reports).

use std::f64::consts::PI;

use crate::error::{CkemError, Result};
use crate::geometry::{check_positive, AffineFn, Polytope, SliceConstraint};
use crate::integrals::{
    boundary_power_integral, boundary_raw, interior_power_integral, interior_raw, ConditionFlag,
};

#[derive(Debug, Clone)]
pub struct FunctionalValue {
    pub v: f64,
    pub v2: f64,
    pub d_const: f64,
    pub c_const: f64,
    /// `(F(mu1), F(mu2), F(1))`; the last vanishes by the definition of `c`.
    pub futaki: [f64; 3],
    /// Gradient of `V^2` in `(k1, k2, c0)`.
    pub grad_v2_full: [f64; 3],
    /// Gradient of `V^2` in `(k1, k2)` after slice elimination of `c0`,
    /// when a slice was supplied.
    pub grad_v2_slice: Option<[f64; 2]>,
    pub condition_flag: ConditionFlag,
}

impl FunctionalValue {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "V": self.v,
            "d": self.d_const,
            "c": self.c_const,
            "futaki": self.futaki,
            "grad": self.grad_v2_full,
            "convention": "bare-2pi",
        })
    }
}

fn v2_combine(
    b: f64,
    gb: &[f64; 3],
    hb: &[[f64; 3]; 3],
    i: f64,
    gi: &[f64; 3],
    hi: &[[f64; 3]; 3],
) -> (f64, [f64; 3], [[f64; 3]; 3]) {
    let pref = 8.0 * PI * PI;
    let v2 = pref * b * b / i;
    let mut grad = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    for r in 0..3 {
        grad[r] = pref * (2.0 * b * gb[r] / i - b * b * gi[r] / (i * i));
        for s in 0..3 {
            hess[r][s] = pref
                * (2.0 * (gb[r] * gb[s] + b * hb[r][s]) / i
                    - 2.0 * b * (gb[r] * gi[s] + gb[s] * gi[r]) / (i * i)
                    - b * b * hi[r][s] / (i * i)
                    + 2.0 * b * b * gi[r] * gi[s] / (i * i * i));
        }
    }
    (v2, grad, hess)
}

/// Value, gradient and Hessian of `V^2 = 8 pi^2 B(2)^2 / I(4)` in
/// `(k1, k2, c0)`.
pub(crate) fn v2_report(
    p: &Polytope,
    f: &AffineFn,
) -> Result<(f64, [f64; 3], [[f64; 3]; 3], ConditionFlag)> {
    let bd = boundary_power_integral(p, f, 2)?;
    let int = interior_power_integral(p, f, 4, (0, 0))?;
    let (v2, grad, hess) = v2_combine(
        bd.value,
        &bd.grad,
        &bd.hessian.unwrap(),
        int.value,
        &int.grad,
        &int.hessian.unwrap(),
    );
    let flag = if bd.condition_flag == ConditionFlag::Exact
        && int.condition_flag == ConditionFlag::Exact
    {
        ConditionFlag::Exact
    } else {
        ConditionFlag::NearDegenerateFallback
    };
    Ok((v2, grad, hess, flag))
}

/// Continued `V^2` with value, gradient and Hessian: no positivity check,
/// valid as the rational continuation outside the cone.
pub(crate) fn v2_full_unchecked(
    p: &Polytope,
    f: &AffineFn,
) -> (f64, [f64; 3], [[f64; 3]; 3]) {
    let bd = crate::integrals::boundary_report_unchecked(p, f, 2);
    let int = crate::integrals::interior_report_unchecked(p, f, 4, (0, 0));
    v2_combine(
        bd.value,
        &bd.grad,
        &bd.hessian.unwrap(),
        int.value,
        &int.grad,
        &int.hessian.unwrap(),
    )
}

/// Continued `V^2` value and gradient only (cheaper: no Hessian moments).
pub(crate) fn v2_grad_unchecked(p: &Polytope, f: &AffineFn) -> (f64, [f64; 3]) {
    let b = boundary_raw(p, f, 2, 0, 0).0;
    let gb = [
        -2.0 * boundary_raw(p, f, 3, 1, 0).0,
        -2.0 * boundary_raw(p, f, 3, 0, 1).0,
        -2.0 * boundary_raw(p, f, 3, 0, 0).0,
    ];
    let i = interior_raw(p, f, 4, 0, 0).0;
    let gi = [
        -4.0 * interior_raw(p, f, 5, 1, 0).0,
        -4.0 * interior_raw(p, f, 5, 0, 1).0,
        -4.0 * interior_raw(p, f, 5, 0, 0).0,
    ];
    let pref = 8.0 * PI * PI;
    let v2 = pref * b * b / i;
    let mut grad = [0.0; 3];
    for r in 0..3 {
        grad[r] = pref * (2.0 * b * gb[r] / i - b * b * gi[r] / (i * i));
    }
    (v2, grad)
}

/// Continued `d`, `c` and Futaki data at `f`, no positivity check.
pub(crate) fn invariants_unchecked(p: &Polytope, f: &AffineFn) -> (f64, f64, [f64; 3]) {
    let b2 = boundary_raw(p, f, 2, 0, 0).0;
    let i4 = interior_raw(p, f, 4, 0, 0).0;
    let b3 = boundary_raw(p, f, 3, 0, 0).0;
    let i5 = interior_raw(p, f, 5, 0, 0).0;
    let d = 2.0 * b2 / i4;
    let c = 2.0 * b3 / i5;
    let futaki = [
        2.0 * boundary_raw(p, f, 3, 1, 0).0 - c * interior_raw(p, f, 5, 1, 0).0,
        2.0 * boundary_raw(p, f, 3, 0, 1).0 - c * interior_raw(p, f, 5, 0, 1).0,
        2.0 * b3 - c * i5,
    ];
    (d, c, futaki)
}

fn slice_tangent(slice: &SliceConstraint) -> Result<[f64; 2]> {
    if slice.s0 == 0.0 {
        return Err(CkemError::Domain(
            "slice has zero c0 coefficient; c0 cannot be eliminated".into(),
        ));
    }
    Ok([-slice.s1 / slice.s0, -slice.s2 / slice.s0])
}

fn check_on_slice(f: &AffineFn, slice: &SliceConstraint) -> Result<()> {
    let r = slice.residual(f);
    if r.abs() > 1e-12 {
        return Err(CkemError::Contract(format!(
            "point is off the slice: residual {r:e}"
        )));
    }
    Ok(())
}

fn reduce_grad(grad: &[f64; 3], t: &[f64; 2]) -> [f64; 2] {
    [grad[0] + t[0] * grad[2], grad[1] + t[1] * grad[2]]
}

fn compute(p: &Polytope, f: &AffineFn, slice: Option<&SliceConstraint>) -> Result<FunctionalValue> {
    check_positive(f, p)?;
    if let Some(s) = slice {
        check_on_slice(f, s)?;
    }
    let (v2, grad_full, _hess, flag_v2) = v2_report(p, f)?;
    let mut degraded = flag_v2 == ConditionFlag::NearDegenerateFallback;
    let mut raw_b = |k, i, j| {
        let (v, d) = boundary_raw(p, f, k, i, j);
        degraded |= d;
        v
    };
    let b3 = raw_b(3, 0, 0);
    let b3m1 = raw_b(3, 1, 0);
    let b3m2 = raw_b(3, 0, 1);
    let mut raw_i = |k, i, j| {
        let (v, d) = interior_raw(p, f, k, i, j);
        degraded |= d;
        v
    };
    let i5 = raw_i(5, 0, 0);
    let i5m1 = raw_i(5, 1, 0);
    let i5m2 = raw_i(5, 0, 1);
    let (b2, _) = boundary_raw(p, f, 2, 0, 0);
    let (i4, _) = interior_raw(p, f, 4, 0, 0);

    let d_const = 2.0 * b2 / i4;
    let c_const = 2.0 * b3 / i5;
    let futaki = [
        2.0 * b3m1 - c_const * i5m1,
        2.0 * b3m2 - c_const * i5m2,
        2.0 * b3 - c_const * i5,
    ];
    let grad_v2_slice = match slice {
        Some(s) => Some(reduce_grad(&grad_full, &slice_tangent(s)?)),
        None => None,
    };
    Ok(FunctionalValue {
        v: v2.sqrt(),
        v2,
        d_const,
        c_const,
        futaki,
        grad_v2_full: grad_full,
        grad_v2_slice,
        condition_flag: if degraded {
            ConditionFlag::NearDegenerateFallback
        } else {
            ConditionFlag::Exact
        },
    })
}

pub fn volume_functional(p: &Polytope, f: &AffineFn) -> Result<FunctionalValue> {
    compute(p, f, None)
}

/// Like [`volume_functional`] but also populates `grad_v2_slice`; `f` must
/// satisfy the slice constraint.
pub fn volume_functional_sliced(
    p: &Polytope,
    f: &AffineFn,
    slice: &SliceConstraint,
) -> Result<FunctionalValue> {
    compute(p, f, Some(slice))
}

pub fn d_constant(p: &Polytope, f: &AffineFn) -> Result<f64> {
    check_positive(f, p)?;
    let (b2, _) = boundary_raw(p, f, 2, 0, 0);
    let (i4, _) = interior_raw(p, f, 4, 0, 0);
    Ok(2.0 * b2 / i4)
}

pub fn c_constant(p: &Polytope, f: &AffineFn) -> Result<f64> {
    check_positive(f, p)?;
    let (b3, _) = boundary_raw(p, f, 3, 0, 0);
    let (i5, _) = interior_raw(p, f, 5, 0, 0);
    Ok(2.0 * b3 / i5)
}

/// `(F(mu1), F(mu2), F(1))`, bare-2pi convention.
pub fn futaki_invariant(p: &Polytope, f: &AffineFn) -> Result<[f64; 3]> {
    Ok(volume_functional(p, f)?.futaki)
}

/// Rescale `f` so `d_constant` becomes 1 (`d(Cf) = C^2 d(f)`).
pub fn normalize_to_tilde(p: &Polytope, f: &AffineFn) -> Result<AffineFn> {
    let d = d_constant(p, f)?;
    Ok(f.scaled(d.powf(-0.5)))
}

/// Gradient of `V^2` in `(k1, k2)` with `c0` eliminated by the slice.
pub fn slice_gradient(p: &Polytope, f: &AffineFn, slice: &SliceConstraint) -> Result<[f64; 2]> {
    check_on_slice(f, slice)?;
    let (_, grad, _, _) = v2_report(p, f)?;
    Ok(reduce_grad(&grad, &slice_tangent(slice)?))
}

/// Hessian of `V^2` in `(k1, k2)` on the slice (exact: `c0` is affine in
/// `(k1, k2)`, so no curvature term enters).
pub fn v2_slice_hessian(
    p: &Polytope,
    f: &AffineFn,
    slice: &SliceConstraint,
) -> Result<[[f64; 2]; 2]> {
    let (_, _, h, _) = v2_report(p, f)?;
    let t = slice_tangent(slice)?;
    let mut out = [[0.0; 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            out[r][s] =
                h[r][s] + h[r][2] * t[s] + h[2][s] * t[r] + h[2][2] * t[r] * t[s];
        }
    }
    Ok(out)
}
