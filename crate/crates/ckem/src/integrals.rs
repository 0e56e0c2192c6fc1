//! Closed-form evaluation of the boundary and interior polytope integrals
//!
//! ```text
//!   B(k; i, j) = integral over the polygon boundary of mu1^i mu2^j f^-k dsigma
//!   I(k; i, j) = integral over the polygon of mu1^i mu2^j f^-k dmu
//! ```
//!
//! with `f` affine and positive on the polygon, together with their
//! derivatives in the coefficients of `f`.
//!
//! The interior integral is evaluated by slab decomposition along level sets
//! of `f`: after the linear change of coordinates `u = k1*mu1 + k2*mu2`,
//! `v = -k2*mu1 + k1*mu2` the cross-section width between consecutive vertex
//! levels is affine in `u`, so every slab reduces to a line integral of a
//! polynomial against `(u + c0)^-k`. That line integral (also the one on each
//! boundary edge) is computed in closed form; the antiderivative exponent -1
//! produces a logarithm, which the kernels keep symbolic so the same code
//! runs on exact rationals.

use crate::error::{CkemError, Result};
use crate::geometry::{check_positive, AffineFn, Polytope, RatAffine};
use crate::scalar::{pairwise_sum, poly_add, poly_affine_pow, poly_mul, poly_shift, Dd, Rat, Scalar};

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionFlag {
    Exact,
    NearDegenerateFallback,
}

/// Value and coefficient-derivatives of one integral.
#[derive(Debug, Clone)]
pub struct IntegralReport {
    pub value: f64,
    /// d/dk1, d/dk2, d/dc0.
    pub grad: [f64; 3],
    /// Symmetric 3x3 second-derivative matrix, same coefficient order.
    pub hessian: Option<[[f64; 3]; 3]>,
    pub condition_flag: ConditionFlag,
}

/// A closed-form result: rational part plus symbolic log terms
/// `sum coeff * ln(arg)`.
#[derive(Debug, Clone)]
pub struct PowSum<T: Scalar> {
    pub val: T,
    pub logs: Vec<(T, T)>,
    pub degraded: bool,
}

impl<T: Scalar> PowSum<T> {
    fn zero() -> Self {
        PowSum {
            val: T::zero(),
            logs: vec![],
            degraded: false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mut s = self.val.to_f64();
        for (c, a) in &self.logs {
            s += c.to_f64() * a.to_f64().ln();
        }
        s
    }
}

fn powsum_total<T: Scalar>(parts: Vec<PowSum<T>>) -> PowSum<T> {
    let vals: Vec<T> = parts.iter().map(|p| p.val.clone()).collect();
    let degraded = parts.iter().any(|p| p.degraded);
    let logs = parts.into_iter().flat_map(|p| p.logs).collect();
    PowSum {
        val: pairwise_sum(&vals),
        logs,
        degraded,
    }
}

/// Exact-mode result for rational inputs. `rational` is exact; when the
/// antiderivative produced log terms the value is a flagged hybrid
/// (rational coefficients, floating log evaluation via [`ExactIntegral::to_f64`]).
#[derive(Debug, Clone)]
pub struct ExactIntegral {
    pub rational: Rat,
    pub logs: Vec<(Rat, Rat)>,
}

impl ExactIntegral {
    pub fn is_pure(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        let mut s = Scalar::to_f64(&self.rational);
        for (c, a) in &self.logs {
            s += Scalar::to_f64(c) * Scalar::to_f64(a).ln();
        }
        s
    }
}

fn powi<T: Scalar>(x: &T, n: i64) -> T {
    if n == 0 {
        return T::one();
    }
    let mut base = if n > 0 { x.clone() } else { T::one().div(x) };
    let mut e = n.unsigned_abs();
    let mut acc = T::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        base = base.mul(&base);
        e >>= 1;
    }
    acc
}

/// `integral over [0, len] of poly(s) * (beta + alpha*s)^-k ds`, `k >= 0`.
///
/// Requires `beta > 0` and `beta + alpha*len > 0`. When `|alpha*len|` is
/// small against `beta` the direct antiderivative cancels badly, so a
/// binomial series in `alpha*s/beta` is used instead (exact rational inputs
/// take that branch only for `alpha == 0`, where it terminates immediately).
fn powline<T: Scalar>(poly: &[T], alpha: &T, beta: &T, len: &T, k: i64) -> PowSum<T> {
    debug_assert!(k >= 0);
    if poly.is_empty() {
        return PowSum::zero();
    }
    let al = alpha.mul(len);
    if al.below(beta, 1e-3) {
        return powline_series(poly, alpha, beta, len, k);
    }

    // Substitute t = beta + alpha*s; expand poly((t - beta)/alpha) in t.
    let inv_alpha = T::one().div(alpha);
    let mut d = vec![T::zero(); poly.len()];
    for (r, cr) in poly.iter().enumerate() {
        if cr.is_zero() {
            continue;
        }
        let scale = cr.mul(&powi(&inv_alpha, r as i64));
        let binom = poly_affine_pow(&beta.neg(), &T::one(), r); // (t - beta)^r
        for (jj, bj) in binom.iter().enumerate() {
            d[jj] = d[jj].add(&scale.mul(bj));
        }
    }
    let t0 = beta.clone();
    let t1 = beta.add(&al);
    let mut val = T::zero();
    let mut logs = Vec::new();
    for (jj, dj) in d.iter().enumerate() {
        if dj.is_zero() {
            continue;
        }
        let e = jj as i64 - k;
        if e == -1 {
            // (1/alpha) * d_j * ln(t1/t0)
            logs.push((dj.mul(&inv_alpha), t1.div(&t0)));
        } else {
            let ep = e + 1;
            let term = powi(&t1, ep).sub(&powi(&t0, ep)).div(&T::from_int(ep));
            val = val.add(&dj.mul(&inv_alpha).mul(&term));
        }
    }
    PowSum {
        val,
        logs,
        degraded: false,
    }
}

fn powline_series<T: Scalar>(poly: &[T], alpha: &T, beta: &T, len: &T, k: i64) -> PowSum<T> {
    // beta^-k * sum_j binom(-k, j) (alpha/beta)^j * sum_r c_r len^{r+j+1}/(r+j+1)
    let ratio = alpha.div(beta);
    let mut coef = T::one(); // binom(-k, j) * ratio^j
    let mut total = T::zero();
    for j in 0..64i64 {
        let mut inner = T::zero();
        let mut lp = powi(len, j + 1);
        for (r, cr) in poly.iter().enumerate() {
            inner = inner.add(&cr.mul(&lp).div(&T::from_int(r as i64 + j + 1)));
            lp = lp.mul(len);
        }
        let term = coef.mul(&inner);
        total = total.add(&term);
        // Truncate at the working precision of the scalar type.
        if term.below(&total, T::SERIES_EPS) && j > 0 {
            break;
        }
        // next binomial coefficient: binom(-k, j+1) = binom(-k, j) * -(k+j)/(j+1)
        coef = coef
            .mul(&ratio)
            .mul(&T::from_int(-(k + j)))
            .div(&T::from_int(j + 1));
        if coef.is_zero() {
            break;
        }
    }
    PowSum {
        val: total.mul(&powi(beta, -k)),
        logs: vec![],
        degraded: !alpha.is_zero(),
    }
}

// ---------------------------------------------------------------------------
// Small bivariate polynomial helpers: c[r][s] is the coefficient of u^r v^s.
// ---------------------------------------------------------------------------

type Bivar<T> = Vec<Vec<T>>;

fn bivar_const<T: Scalar>(c: T) -> Bivar<T> {
    vec![vec![c]]
}

fn bivar_mul<T: Scalar>(a: &Bivar<T>, b: &Bivar<T>) -> Bivar<T> {
    let ra = a.len();
    let rb = b.len();
    let sa = a.iter().map(|x| x.len()).max().unwrap_or(0);
    let sb = b.iter().map(|x| x.len()).max().unwrap_or(0);
    let mut out: Bivar<T> = vec![vec![T::zero(); sa + sb - 1]; ra + rb - 1];
    for (i, rowa) in a.iter().enumerate() {
        for (s, ca) in rowa.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (i2, rowb) in b.iter().enumerate() {
                for (s2, cb) in rowb.iter().enumerate() {
                    out[i + i2][s + s2] = out[i + i2][s + s2].add(&ca.mul(cb));
                }
            }
        }
    }
    out
}

fn bivar_pow<T: Scalar>(a: &Bivar<T>, n: usize) -> Bivar<T> {
    let mut out = bivar_const(T::one());
    for _ in 0..n {
        out = bivar_mul(&out, a);
    }
    out
}

/// Exact monomial moment of the polygon: `integral of mu1^i mu2^j dmu`
/// by fan triangulation and the standard simplex formula
/// `integral of u^r v^s over {u,v>=0, u+v<=1} = r! s! / (r+s+2)!`.
pub fn polygon_moment<T: Scalar>(verts: &[[T; 2]], i: usize, j: usize) -> T {
    let mut parts = Vec::new();
    let v0 = &verts[0];
    for t in 1..verts.len() - 1 {
        let v1 = &verts[t];
        let v2 = &verts[t + 1];
        let d1 = [v1[0].sub(&v0[0]), v1[1].sub(&v0[1])];
        let d2 = [v2[0].sub(&v0[0]), v2[1].sub(&v0[1])];
        let jac = d1[0].mul(&d2[1]).sub(&d1[1].mul(&d2[0]));
        // mu1 = v0x + u d1x + v d2x, mu2 = v0y + u d1y + v d2y
        let mu1 = vec![
            vec![v0[0].clone(), d2[0].clone()],
            vec![d1[0].clone()],
        ];
        let mu2 = vec![
            vec![v0[1].clone(), d2[1].clone()],
            vec![d1[1].clone()],
        ];
        let prod = bivar_mul(&bivar_pow(&mu1, i), &bivar_pow(&mu2, j));
        let mut tri = T::zero();
        for (r, row) in prod.iter().enumerate() {
            for (s, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                tri = tri.add(&c.mul(&simplex_factor::<T>(r, s)));
            }
        }
        parts.push(tri.mul(&jac));
    }
    pairwise_sum(&parts)
}

fn simplex_factor<T: Scalar>(r: usize, s: usize) -> T {
    // r! s! / (r+s+2)!
    let mut num = T::one();
    for t in 1..=r {
        num = num.mul(&T::from_int(t as i64));
    }
    for t in 1..=s {
        num = num.mul(&T::from_int(t as i64));
    }
    let mut den = T::one();
    for t in 1..=(r + s + 2) {
        den = den.mul(&T::from_int(t as i64));
    }
    num.div(&den)
}

// ---------------------------------------------------------------------------
// Interior slab decomposition.
// ---------------------------------------------------------------------------

struct AffineCoeffs<T> {
    k1: T,
    k2: T,
    c0: T,
}

fn interior_moment_scalar<T: Scalar>(
    verts: &[[T; 2]],
    f: &AffineCoeffs<T>,
    k: i64,
    i: usize,
    j: usize,
) -> PowSum<T> {
    // Bounding-box extent stands in for the diameter in the degeneracy test.
    let extent = {
        let mut minx = verts[0][0].clone();
        let mut maxx = minx.clone();
        let mut miny = verts[0][1].clone();
        let mut maxy = miny.clone();
        for v in verts.iter().skip(1) {
            if v[0] < minx {
                minx = v[0].clone();
            }
            if v[0] > maxx {
                maxx = v[0].clone();
            }
            if v[1] < miny {
                miny = v[1].clone();
            }
            if v[1] > maxy {
                maxy = v[1].clone();
            }
        }
        maxx.sub(&minx).add(&maxy.sub(&miny))
    };
    let dir_size = f.k1.abs().add(&f.k2.abs()).mul(&extent);
    if dir_size.below(&f.c0, 1e-12) {
        // f is (numerically) constant on the polygon.
        let val = polygon_moment(verts, i, j).mul(&powi(&f.c0, -k));
        return PowSum {
            val,
            logs: vec![],
            degraded: !(f.k1.is_zero() && f.k2.is_zero()),
        };
    }

    let n2 = f.k1.mul(&f.k1).add(&f.k2.mul(&f.k2));
    let n = verts.len();
    let two = T::from_int(2);
    // Level u and transverse coordinate v of each vertex.
    let us: Vec<T> = verts
        .iter()
        .map(|p| f.k1.mul(&p[0]).add(&f.k2.mul(&p[1])))
        .collect();
    let vs: Vec<T> = verts
        .iter()
        .map(|p| f.k2.neg().mul(&p[0]).add(&f.k1.mul(&p[1])))
        .collect();

    let mut levels = us.clone();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let span = levels[levels.len() - 1].sub(&levels[0]);
    // Merge coincident levels; thin slabs would make the edge-width
    // coefficients 0/0.
    let mut merged: Vec<T> = vec![levels[0].clone()];
    let mut any_merge = false;
    for l in levels.into_iter().skip(1) {
        let d = l.sub(merged.last().unwrap());
        if d.below(&span, T::MERGE_EPS) {
            any_merge = !d.is_zero();
        } else {
            merged.push(l);
        }
    }

    // mu1 = (k1 u - k2 v)/n2, mu2 = (k2 u + k1 v)/n2 as bivariate polys.
    let mu1 = vec![
        vec![T::zero(), f.k2.neg().div(&n2)],
        vec![f.k1.div(&n2)],
    ];
    let mu2 = vec![vec![T::zero(), f.k1.div(&n2)], vec![f.k2.div(&n2)]];
    let integrand = bivar_mul(&bivar_pow(&mu1, i), &bivar_pow(&mu2, j));
    let max_s = integrand.iter().map(|r| r.len()).max().unwrap_or(1);

    let mut parts = Vec::new();
    for w in merged.windows(2) {
        let (ua, ub) = (&w[0], &w[1]);
        let mid = ua.add(ub).div(&two);
        // The two polygon edges spanning this slab, ordered by width.
        let mut lo: Option<(T, [T; 2])> = None; // (v at mid, affine coeffs [h0, h1])
        let mut hi: Option<(T, [T; 2])> = None;
        for e in 0..n {
            let e2 = (e + 1) % n;
            let (u0, u1) = (&us[e], &us[e2]);
            let (lo_u, hi_u) = if u0 < u1 { (u0, u1) } else { (u1, u0) };
            if !(lo_u < &mid && &mid < hi_u) {
                continue;
            }
            let h1 = vs[e2].sub(&vs[e]).div(&u1.sub(u0));
            let h0 = vs[e].sub(&u0.mul(&h1));
            let vmid = h0.add(&mid.mul(&h1));
            match (&lo, &hi) {
                (None, None) => {
                    lo = Some((vmid.clone(), [h0.clone(), h1.clone()]));
                    hi = Some((vmid, [h0, h1]));
                }
                _ => {
                    if vmid < lo.as_ref().unwrap().0 {
                        lo = Some((vmid, [h0, h1]));
                    } else if vmid > hi.as_ref().unwrap().0 {
                        hi = Some((vmid, [h0, h1]));
                    }
                }
            }
        }
        let (Some((_, lo_aff)), Some((_, hi_aff))) = (lo, hi) else {
            continue;
        };

        // Q(u) = sum_{r,s} c[r][s]/(s+1) * u^r * (hi(u)^{s+1} - lo(u)^{s+1})
        let mut width_pows: Vec<Vec<T>> = Vec::with_capacity(max_s);
        for s in 0..max_s {
            let hp = poly_affine_pow(&hi_aff[0], &hi_aff[1], s + 1);
            let lp = poly_affine_pow(&lo_aff[0], &lo_aff[1], s + 1);
            let mut diff = hp;
            for (t, c) in lp.into_iter().enumerate() {
                diff[t] = diff[t].sub(&c);
            }
            width_pows.push(poly_mul(
                &diff,
                &[T::one().div(&T::from_int(s as i64 + 1))],
            ));
        }
        let mut q: Vec<T> = vec![];
        for (r, row) in integrand.iter().enumerate() {
            for (s, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                // c * u^r * width_pows[s]
                let mut term = vec![T::zero(); r];
                term.extend(width_pows[s].iter().map(|x| x.mul(c)));
                poly_add(&mut q, &term);
            }
        }
        // Shift to s = u - ua and integrate against (s + ua + c0)^-k.
        let qs = poly_shift(&q, ua);
        let beta = ua.add(&f.c0);
        let len = ub.sub(ua);
        let mut part = powline(&qs, &T::one(), &beta, &len, k);
        part.degraded |= any_merge;
        parts.push(part);
    }
    let mut total = powsum_total(parts);
    // Jacobian of (mu1, mu2) -> (u, v).
    let inv_n2 = T::one().div(&n2);
    total.val = total.val.mul(&inv_n2);
    for (c, _) in total.logs.iter_mut() {
        *c = c.mul(&inv_n2);
    }
    total
}

// ---------------------------------------------------------------------------
// Boundary edge integrals against the lattice measure.
// ---------------------------------------------------------------------------

struct EdgeGeom<T> {
    start: [T; 2],
    primitive: [T; 2],
    lattice_length: T,
}

fn boundary_moment_scalar<T: Scalar>(
    edges: &[EdgeGeom<T>],
    f: &AffineCoeffs<T>,
    k: i64,
    i: usize,
    j: usize,
) -> PowSum<T> {
    let mut parts = Vec::new();
    for e in edges {
        let alpha = f.k1.mul(&e.primitive[0]).add(&f.k2.mul(&e.primitive[1]));
        let beta = f
            .k1
            .mul(&e.start[0])
            .add(&f.k2.mul(&e.start[1]))
            .add(&f.c0);
        let px = poly_affine_pow(&e.start[0], &e.primitive[0], i);
        let py = poly_affine_pow(&e.start[1], &e.primitive[1], j);
        let poly = poly_mul(&px, &py);
        parts.push(powline(&poly, &alpha, &beta, &e.lattice_length, k));
    }
    powsum_total(parts)
}

fn edges_f64(p: &Polytope) -> Vec<EdgeGeom<f64>> {
    p.edges()
        .iter()
        .map(|e| EdgeGeom {
            start: p.vertices_f64()[e.start],
            primitive: e.primitive_f64,
            lattice_length: e.lattice_length_f64,
        })
        .collect()
}

fn edges_rat(p: &Polytope) -> Vec<EdgeGeom<Rat>> {
    p.edges()
        .iter()
        .map(|e| EdgeGeom {
            start: p.vertices()[e.start].clone(),
            primitive: e.primitive.clone(),
            lattice_length: e.lattice_length.clone(),
        })
        .collect()
}

fn affine_f64(f: &AffineFn) -> AffineCoeffs<f64> {
    AffineCoeffs {
        k1: f.k1,
        k2: f.k2,
        c0: f.c0,
    }
}

// ---------------------------------------------------------------------------
// Crate-internal raw moments (f64 fast path). No positivity re-check; the
// public entry points validate once.
// ---------------------------------------------------------------------------

/// The slab decomposition divides by consecutive level gaps; when two vertex
/// levels nearly (but not exactly) coincide, f64 precision degrades like
/// (unit roundoff)/gap^2. Such evaluations are rerouted through the
/// double-double kernel, which also merges sub-roundoff gaps away.
fn level_hazard(verts: &[[f64; 2]], f: &AffineFn) -> bool {
    let mut us: Vec<f64> = verts
        .iter()
        .map(|v| f.k1 * v[0] + f.k2 * v[1])
        .collect();
    us.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let span = us[us.len() - 1] - us[0];
    if span == 0.0 {
        return false;
    }
    us.windows(2).any(|w| {
        let d = w[1] - w[0];
        d > 0.0 && d < 1e-2 * span
    })
}

pub(crate) fn interior_raw(p: &Polytope, f: &AffineFn, k: i64, i: usize, j: usize) -> (f64, bool) {
    if level_hazard(p.vertices_f64(), f) {
        let verts: Vec<[Dd; 2]> = p
            .vertices_f64()
            .iter()
            .map(|v| [Dd::from_f64(v[0]), Dd::from_f64(v[1])])
            .collect();
        let fd = AffineCoeffs {
            k1: Dd::from_f64(f.k1),
            k2: Dd::from_f64(f.k2),
            c0: Dd::from_f64(f.c0),
        };
        let ps = interior_moment_scalar(&verts, &fd, k, i, j);
        return (ps.to_f64(), true);
    }
    let ps = interior_moment_scalar(p.vertices_f64(), &affine_f64(f), k, i, j);
    (ps.to_f64(), ps.degraded)
}

pub(crate) fn boundary_raw(p: &Polytope, f: &AffineFn, k: i64, i: usize, j: usize) -> (f64, bool) {
    let ps = boundary_moment_scalar(&edges_f64(p), &affine_f64(f), k, i, j);
    (ps.to_f64(), ps.degraded)
}

fn assemble_report(
    p: &Polytope,
    f: &AffineFn,
    k: i64,
    moment: (usize, usize),
    raw: fn(&Polytope, &AffineFn, i64, usize, usize) -> (f64, bool),
) -> IntegralReport {
    let (i, j) = moment;
    let kk = k as f64;
    let mut degraded = false;
    let mut get = |kq: i64, iq: usize, jq: usize| {
        let (v, d) = raw(p, f, kq, iq, jq);
        degraded |= d;
        v
    };
    let value = get(k, i, j);
    let grad = [
        -kk * get(k + 1, i + 1, j),
        -kk * get(k + 1, i, j + 1),
        -kk * get(k + 1, i, j),
    ];
    let kk2 = kk * (kk + 1.0);
    let h11 = kk2 * get(k + 2, i + 2, j);
    let h12 = kk2 * get(k + 2, i + 1, j + 1);
    let h13 = kk2 * get(k + 2, i + 1, j);
    let h22 = kk2 * get(k + 2, i, j + 2);
    let h23 = kk2 * get(k + 2, i, j + 1);
    let h33 = kk2 * get(k + 2, i, j);
    IntegralReport {
        value,
        grad,
        hessian: Some([[h11, h12, h13], [h12, h22, h23], [h13, h23, h33]]),
        condition_flag: if degraded {
            ConditionFlag::NearDegenerateFallback
        } else {
            ConditionFlag::Exact
        },
    }
}

/// Reports without the positivity precondition. Off the cone the closed
/// forms are no longer integrals but their rational continuation, which is
/// what the critical-point solver follows across the cone boundary.
pub(crate) fn boundary_report_unchecked(p: &Polytope, f: &AffineFn, k: i64) -> IntegralReport {
    assemble_report(p, f, k, (0, 0), boundary_raw)
}

pub(crate) fn interior_report_unchecked(
    p: &Polytope,
    f: &AffineFn,
    k: i64,
    moment: (usize, usize),
) -> IntegralReport {
    assemble_report(p, f, k, moment, interior_raw)
}

/// `integral over the boundary of f^-k dsigma` with derivatives in
/// `(k1, k2, c0)`.
pub fn boundary_power_integral(p: &Polytope, f: &AffineFn, k: i64) -> Result<IntegralReport> {
    if k < 1 {
        return Err(CkemError::Domain(format!("power k must be >= 1, got {k}")));
    }
    check_positive(f, p)?;
    Ok(assemble_report(p, f, k, (0, 0), boundary_raw))
}

/// `integral over the polygon of mu1^i mu2^j f^-k dmu` with derivatives,
/// `i + j <= 2`.
pub fn interior_power_integral(
    p: &Polytope,
    f: &AffineFn,
    k: i64,
    moment: (usize, usize),
) -> Result<IntegralReport> {
    if k < 1 {
        return Err(CkemError::Domain(format!("power k must be >= 1, got {k}")));
    }
    if moment.0 + moment.1 > 2 {
        return Err(CkemError::Domain(format!(
            "moment degree {} + {} exceeds 2",
            moment.0, moment.1
        )));
    }
    check_positive(f, p)?;
    Ok(assemble_report(p, f, k, moment, interior_raw))
}

/// Boundary moment integral `B(k; i, j)`, exposed for the functional module.
pub fn boundary_moment_integral(
    p: &Polytope,
    f: &AffineFn,
    k: i64,
    moment: (usize, usize),
) -> Result<IntegralReport> {
    if k < 1 {
        return Err(CkemError::Domain(format!("power k must be >= 1, got {k}")));
    }
    check_positive(f, p)?;
    Ok(assemble_report(p, f, k, moment, boundary_raw))
}

// ---------------------------------------------------------------------------
// Exact rational mode.
// ---------------------------------------------------------------------------

fn rat_affine(f: &RatAffine) -> AffineCoeffs<Rat> {
    AffineCoeffs {
        k1: f.k1.clone(),
        k2: f.k2.clone(),
        c0: f.c0.clone(),
    }
}

fn check_positive_rat(p: &Polytope, f: &RatAffine) -> Result<()> {
    check_positive(&f.to_f64(), p)
}

pub fn interior_power_integral_exact(
    p: &Polytope,
    f: &RatAffine,
    k: i64,
    moment: (usize, usize),
) -> Result<ExactIntegral> {
    if k < 1 {
        return Err(CkemError::Domain(format!("power k must be >= 1, got {k}")));
    }
    check_positive_rat(p, f)?;
    let ps = interior_moment_scalar(p.vertices(), &rat_affine(f), k, moment.0, moment.1);
    Ok(ExactIntegral {
        rational: ps.val,
        logs: ps.logs,
    })
}

pub fn boundary_power_integral_exact(
    p: &Polytope,
    f: &RatAffine,
    k: i64,
) -> Result<ExactIntegral> {
    if k < 1 {
        return Err(CkemError::Domain(format!("power k must be >= 1, got {k}")));
    }
    check_positive_rat(p, f)?;
    let ps = boundary_moment_scalar(&edges_rat(p), &rat_affine(f), k, 0, 0);
    Ok(ExactIntegral {
        rational: ps.val,
        logs: ps.logs,
    })
}

// ---------------------------------------------------------------------------
// Independent quadrature oracles (verification only; O(n^-2) convergent).
// ---------------------------------------------------------------------------

/// Composite midpoint rule on a barycentric refinement with `n^2` cells per
/// fan triangle.
pub fn quadrature_oracle(
    p: &Polytope,
    f: &AffineFn,
    k: i64,
    moment: (usize, usize),
    n: usize,
) -> f64 {
    let verts = p.vertices_f64();
    let (i, j) = moment;
    let g = |mu: [f64; 2]| mu[0].powi(i as i32) * mu[1].powi(j as i32) * f.eval(mu).powi(-k as i32);
    let mut total = 0.0;
    let v0 = verts[0];
    for t in 1..verts.len() - 1 {
        let v1 = verts[t];
        let v2 = verts[t + 1];
        let d1 = [v1[0] - v0[0], v1[1] - v0[1]];
        let d2 = [v2[0] - v0[0], v2[1] - v0[1]];
        let jac = d1[0] * d2[1] - d1[1] * d2[0];
        let cell_area = jac / (n * n) as f64 / 2.0;
        let nf = n as f64;
        let at = |uu: f64, vv: f64| {
            [
                v0[0] + uu * d1[0] + vv * d2[0],
                v0[1] + uu * d1[1] + vv * d2[1],
            ]
        };
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..(n - a) {
                // upward cell centroid
                let cu = (a as f64 + 1.0 / 3.0) / nf;
                let cv = (b as f64 + 1.0 / 3.0) / nf;
                acc += g(at(cu, cv));
                // downward cell
                if b < n - a - 1 {
                    let cu = (a as f64 + 2.0 / 3.0) / nf;
                    let cv = (b as f64 + 2.0 / 3.0) / nf;
                    acc += g(at(cu, cv));
                }
            }
        }
        total += acc * cell_area;
    }
    total
}

/// Composite midpoint rule on each boundary edge with `n` subdivisions,
/// against the lattice measure.
pub fn boundary_quadrature_oracle(p: &Polytope, f: &AffineFn, k: i64, n: usize) -> f64 {
    let mut total = 0.0;
    for e in p.edges() {
        let start = p.vertices_f64()[e.start];
        let len = e.lattice_length_f64;
        let h = len / n as f64;
        let mut acc = 0.0;
        for t in 0..n {
            let s = (t as f64 + 0.5) * h;
            let mu = [
                start[0] + s * e.primitive_f64[0],
                start[1] + s * e.primitive_f64[1],
            ];
            acc += f.eval(mu).powi(-k as i32);
        }
        total += acc * h;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_family, Family};
    use crate::scalar::{rat_from_f64, rat_from_int};
    use approx::assert_relative_eq;
    use num::bigint::BigInt;

    fn cp2() -> Polytope {
        make_family(&Family::Cp2).unwrap()
    }

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cp2_boundary_closed_form() {
        let p = cp2();
        let f = AffineFn::new(0.0, 0.0, 1.0);
        let rep = boundary_power_integral(&p, &f, 2).unwrap();
        assert_relative_eq!(rep.value, 3.0, max_relative = 1e-14);
        let f = AffineFn::new(1.0, 0.0, 1.0);
        let rep = boundary_power_integral(&p, &f, 2).unwrap();
        assert_relative_eq!(rep.value, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn p1xp1_constant_boundary() {
        let p = make_family(&Family::P1xP1 { p: rat_from_int(1) }).unwrap();
        let rep = boundary_power_integral(&p, &AffineFn::new(0.0, 0.0, 1.0), 2).unwrap();
        assert_relative_eq!(rep.value, 4.0, max_relative = 1e-14);
    }

    #[test]
    fn cp2_interior_closed_form() {
        let p = cp2();
        // constant integrand: area
        let rep = interior_power_integral(&p, &AffineFn::new(0.0, 0.0, 1.0), 4, (0, 0)).unwrap();
        assert_relative_eq!(rep.value, 0.5, max_relative = 1e-14);
        // first moment over the unit simplex
        let rep = interior_power_integral(&p, &AffineFn::new(0.0, 0.0, 1.0), 5, (1, 0)).unwrap();
        assert_relative_eq!(rep.value, 1.0 / 6.0, max_relative = 1e-14);
        // a = b = c = 1: reference closed form (3+4+1)/(6*1*4*4)
        let rep = interior_power_integral(&p, &AffineFn::new(1.0, 1.0, 1.0), 4, (0, 0)).unwrap();
        assert_relative_eq!(rep.value, 1.0 / 12.0, max_relative = 1e-13);
    }

    fn cp2_boundary_formula(a: f64, b: f64, c: f64) -> f64 {
        (3.0 * c + a + b) / (c * (a + c) * (b + c))
    }

    fn cp2_interior_formula(a: f64, b: f64, c: f64) -> f64 {
        (3.0 * c * c + 2.0 * (a + b) * c + a * b)
            / (6.0 * c * c * (a + c) * (a + c) * (b + c) * (b + c))
    }

    #[test]
    fn cp2_random_cone_points_match_reference_forms() {
        let p = cp2();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let c = 0.2 + rng();
            let a = -0.9 * c + 1.8 * c * rng();
            let b = -0.9 * c + 1.8 * c * rng();
            let f = AffineFn::new(a, b, c);
            let rep = boundary_power_integral(&p, &f, 2).unwrap();
            assert_relative_eq!(rep.value, cp2_boundary_formula(a, b, c), max_relative = 1e-11);
            let rep = interior_power_integral(&p, &f, 4, (0, 0)).unwrap();
            assert_relative_eq!(rep.value, cp2_interior_formula(a, b, c), max_relative = 1e-11);
        }
    }

    #[test]
    fn p1xp1_matches_reference_rational_function() {
        // random cone point on Delta_2, k = 2 boundary and k = 4 interior
        let pv = 2.0;
        let p = make_family(&Family::P1xP1 { p: rat_from_int(2) }).unwrap();
        let (a, b, c) = (0.11, -0.07, 0.45);
        let f = AffineFn::new(a, b, c);
        let s_p = (2.0 * a * c + a * a + a * b) * pv * pv
            + (2.0 * c * c + 2.0 * (a + b) * c + a * b + b * b) * pv
            + 2.0 * c * c
            + 2.0 * b * c;
        let den = (pv * a + c) * (b + pv * a + c) * (b + c) * c;
        let rep = boundary_power_integral(&p, &f, 2).unwrap();
        assert_relative_eq!(rep.value, s_p / den, max_relative = 1e-12);
        let v_p = pv
            * ((2.0 * a.powi(3) * c + a.powi(3) * b) * pv.powi(3)
                + (8.0 * a * a * c * c + 8.0 * a * a * b * c + 2.0 * a * a * b * b) * pv * pv
                + (12.0 * a * c.powi(3)
                    + 18.0 * a * b * c * c
                    + 8.0 * a * b * b * c
                    + a * b.powi(3))
                    * pv
                + 6.0 * c.powi(4)
                + 12.0 * b * c.powi(3)
                + 8.0 * b * b * c * c
                + 2.0 * b.powi(3) * c);
        let den4 = 6.0 * (pv * a + c).powi(2) * (b + pv * a + c).powi(2) * (b + c).powi(2) * c * c;
        let rep = interior_power_integral(&p, &f, 4, (0, 0)).unwrap();
        assert_relative_eq!(rep.value, v_p / den4, max_relative = 1e-12);
    }

    #[test]
    fn blowup_matches_reference_rational_function() {
        let pv = 0.37;
        let poly = make_family(&Family::Blowup { p: rat_from_f64(0.37) }).unwrap();
        let (a, b, c) = (0.05, -0.08, 0.5);
        let f = AffineFn::new(a, b, c);
        let s_p = ((2.0 * a - b) * c + a * a - b * b) * pv * pv
            + (c * c + 2.0 * a * c + a * b + b * b) * pv
            + 2.0 * c * c
            + 2.0 * b * c;
        let den = c * (b + c) * (pv * a + c) * ((1.0 - pv) * b + pv * a + c);
        let rep = boundary_power_integral(&poly, &f, 2).unwrap();
        assert_relative_eq!(rep.value, s_p / den, max_relative = 1e-12);
    }

    #[test]
    fn derivative_consistency_identity() {
        // d/dc0 of I(k) = -k I(k+1), as an identity between closed forms
        let p = cp2();
        let f = AffineFn::new(0.3, -0.1, 0.8);
        let rep = interior_power_integral(&p, &f, 4, (0, 0)).unwrap();
        let next = interior_power_integral(&p, &f, 5, (0, 0)).unwrap();
        assert_relative_eq!(rep.grad[2], -4.0 * next.value, max_relative = 1e-12);
        let rep = boundary_power_integral(&p, &f, 2).unwrap();
        let next = boundary_moment_integral(&p, &f, 3, (0, 0)).unwrap();
        assert_relative_eq!(rep.grad[2], -2.0 * next.value, max_relative = 1e-12);
    }

    #[test]
    fn finite_difference_gradient() {
        let p = make_family(&Family::Blowup { p: rat_from_f64(0.6) }).unwrap();
        let f = AffineFn::new(0.12, -0.2, 0.7);
        let h = 1e-5;
        for which in 0..3 {
            let mut fp = f;
            let mut fm = f;
            match which {
                0 => {
                    fp.k1 += h;
                    fm.k1 -= h;
                }
                1 => {
                    fp.k2 += h;
                    fm.k2 -= h;
                }
                _ => {
                    fp.c0 += h;
                    fm.c0 -= h;
                }
            }
            let rep = interior_power_integral(&p, &f, 4, (0, 0)).unwrap();
            let vp = interior_power_integral(&p, &fp, 4, (0, 0)).unwrap().value;
            let vm = interior_power_integral(&p, &fm, 4, (0, 0)).unwrap().value;
            let fd = (vp - vm) / (2.0 * h);
            assert_relative_eq!(rep.grad[which], fd, max_relative = 1e-6);
            let rep = boundary_power_integral(&p, &f, 2).unwrap();
            let vp = boundary_power_integral(&p, &fp, 2).unwrap().value;
            let vm = boundary_power_integral(&p, &fm, 2).unwrap().value;
            let fd = (vp - vm) / (2.0 * h);
            assert_relative_eq!(rep.grad[which], fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn hessian_finite_difference() {
        let p = cp2();
        let f = AffineFn::new(0.2, 0.1, 0.9);
        let rep = interior_power_integral(&p, &f, 4, (0, 0)).unwrap();
        let hess = rep.hessian.unwrap();
        let h = 1e-4;
        // d2/dk1 dc0 by central differences of the analytic gradient
        let gp = interior_power_integral(&p, &AffineFn::new(0.2 + h, 0.1, 0.9), 4, (0, 0))
            .unwrap()
            .grad[2];
        let gm = interior_power_integral(&p, &AffineFn::new(0.2 - h, 0.1, 0.9), 4, (0, 0))
            .unwrap()
            .grad[2];
        assert_relative_eq!(hess[0][2], (gp - gm) / (2.0 * h), max_relative = 1e-6);
    }

    #[test]
    fn quadrature_oracle_agreement() {
        let p = cp2();
        let f = AffineFn::new(0.0, 0.0, 1.0);
        assert_relative_eq!(quadrature_oracle(&p, &f, 4, (0, 0), 64), 0.5, epsilon = 1e-6);
        let f = AffineFn::new(1.0, 0.0, 1.0);
        assert_relative_eq!(boundary_quadrature_oracle(&p, &f, 2, 1024), 2.0, epsilon = 1e-5);
        // O(n^-2) refinement on a nontrivial integrand
        let f = AffineFn::new(0.4, -0.2, 0.8);
        let exact = interior_power_integral(&p, &f, 4, (0, 0)).unwrap().value;
        let e1 = (quadrature_oracle(&p, &f, 4, (0, 0), 64) - exact).abs();
        let e2 = (quadrature_oracle(&p, &f, 4, (0, 0), 128) - exact).abs();
        assert!(e2 < e1 / 3.0, "e1={e1}, e2={e2}");
    }

    #[test]
    fn positivity_and_domain_errors() {
        let p = cp2();
        let f = AffineFn::new(-1.0, 0.0, 0.1);
        assert!(matches!(
            boundary_power_integral(&p, &f, 2),
            Err(CkemError::Positivity { .. })
        ));
        let f = AffineFn::new(0.0, 0.0, 1.0);
        assert!(boundary_power_integral(&p, &f, 0).is_err());
        assert!(interior_power_integral(&p, &f, 4, (2, 1)).is_err());
    }

    #[test]
    fn exact_mode_values() {
        let p = cp2();
        let f = RatAffine {
            k1: r(1, 3),
            k2: r(1, 5),
            c0: r(1, 2),
        };
        let exact = interior_power_integral_exact(&p, &f, 4, (0, 0)).unwrap();
        assert!(exact.is_pure());
        // reference closed form at the same rational point
        let (a, b, c) = (r(1, 3), r(1, 5), r(1, 2));
        let num = r(3, 1) * &c * &c + r(2, 1) * (&a + &b) * &c + &a * &b;
        let den = r(6, 1) * &c * &c * (&a + &c) * (&a + &c) * (&b + &c) * (&b + &c);
        assert_eq!(exact.rational, num / den);
        // scaling law is exact: value(C f) = C^-k value(f)
        let f2 = RatAffine {
            k1: r(2, 3),
            k2: r(2, 5),
            c0: r(1, 1),
        };
        let exact2 = interior_power_integral_exact(&p, &f2, 4, (0, 0)).unwrap();
        assert_eq!(exact2.rational, exact.rational.clone() / r(16, 1));
        let eb = boundary_power_integral_exact(&p, &f, 2).unwrap();
        let eb2 = boundary_power_integral_exact(&p, &f2, 2).unwrap();
        assert!(eb.is_pure());
        assert_eq!(eb2.rational, eb.rational / r(4, 1));
    }

    #[test]
    fn exact_mode_log_terms_flagged() {
        // interior k = 2, moment (0,0): the slab antiderivative hits f^-1
        let p = cp2();
        let f = RatAffine {
            k1: r(1, 1),
            k2: r(1, 2),
            c0: r(1, 1),
        };
        let exact = interior_power_integral_exact(&p, &f, 2, (0, 0)).unwrap();
        assert!(!exact.is_pure());
        let quad = quadrature_oracle(&p, &f.to_f64(), 2, (0, 0), 512);
        assert_relative_eq!(exact.to_f64(), quad, max_relative = 1e-4);
    }

    #[test]
    fn subdivision_additivity() {
        // split cp2 by the chord from (1/2, 0) to (0, 1/2)
        let p = cp2();
        let f = AffineFn::new(0.25, -0.15, 0.6);
        let whole = interior_power_integral(&p, &f, 4, (0, 0)).unwrap().value;
        let corner = Polytope::from_f64_vertices(
            &[[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]],
            None,
        )
        .unwrap();
        let rest = Polytope::from_f64_vertices(
            &[[0.5, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 0.5]],
            None,
        )
        .unwrap();
        let sum = interior_power_integral(&corner, &f, 4, (0, 0)).unwrap().value
            + interior_power_integral(&rest, &f, 4, (0, 0)).unwrap().value;
        assert_relative_eq!(whole, sum, max_relative = 1e-12);
    }

    #[test]
    fn degenerate_direction_falls_back() {
        let p = cp2();
        let f = AffineFn::new(1e-15, 0.0, 1.0);
        let rep = interior_power_integral(&p, &f, 4, (0, 0)).unwrap();
        assert_eq!(rep.condition_flag, ConditionFlag::NearDegenerateFallback);
        assert_relative_eq!(rep.value, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn coincident_vertex_levels() {
        // f depends only on mu1 over the square: two vertex pairs share levels
        let p = make_family(&Family::P1xP1 { p: rat_from_int(2) }).unwrap();
        let f = AffineFn::new(1.0, 0.0, 1.0);
        let rep = interior_power_integral(&p, &f, 4, (0, 0)).unwrap();
        // exact: integral over x of (x+1)^-4 over [0,2] times 1 = [ -(x+1)^-3/3 ]
        let exact = (1.0 - 27f64.recip()) / 3.0;
        assert_relative_eq!(rep.value, exact, max_relative = 1e-13);
    }
}
