//! Critical points of `V^2` on a slice: multistart damped Newton, the
//! closed-form case tables of the standard families, parameter scans with
//! bisection threshold detection, and quartic root extraction.
//!
//! The solver follows the rational continuation of `V^2` outside the
//! positivity cone as well, because the families' classification tables
//! contain solutions whose `f` is not positive on the polytope; those are
//! reported with `in_cone = false`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{CkemError, Result};
use crate::exec::Exec;
use crate::functional::{
    invariants_unchecked, normalize_to_tilde, v2_full_unchecked, v2_grad_unchecked,
    volume_functional,
};
use crate::geometry::{
    make_family, margin, vertex_values, AffineFn, Family, Polytope, SliceConstraint,
};
use crate::scalar::Scalar;

/// Search box half-width in the slice coordinates `(k1, k2)`.
const BOX_R: f64 = 12.0;
/// Minimum `|f(vertex)|` kept during iteration: the continued `V^2` has
/// poles exactly on the vertex-value zero sets.
const POLE_GUARD: f64 = 1e-13;

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub k1: f64,
    pub k2: f64,
    pub c0: f64,
    pub grad_norm: f64,
    pub in_cone: bool,
    /// Smallest vertex value of `f`.
    pub margin: f64,
    /// `V` at the point; `NaN` when the continued `V^2` is negative.
    pub v: f64,
    pub d_const: f64,
    pub c_const: f64,
    /// In-cone points report the norm after `d = 1` normalization.
    pub futaki_norm: f64,
    pub classification: Option<String>,
    /// `(n_pos, n_neg, n_zero)` of the 2x2 slice Hessian.
    pub hessian_signature: (usize, usize, usize),
}

impl CriticalPoint {
    pub fn is_curve_hit(&self) -> bool {
        self.hessian_signature.2 > 0
    }
}

fn hessian_signature(h: &[[f64; 2]; 2]) -> (usize, usize, usize) {
    let tr = h[0][0] + h[1][1];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    let scale = l1.abs().max(l2.abs());
    let mut sig = (0, 0, 0);
    for l in [l1, l2] {
        if l.abs() < 1e-6 * scale || scale == 0.0 {
            sig.2 += 1;
        } else if l > 0.0 {
            sig.0 += 1;
        } else {
            sig.1 += 1;
        }
    }
    sig
}

struct SliceProblem<'a> {
    p: &'a Polytope,
    slice: &'a SliceConstraint,
    t: [f64; 2], // dc0/d(k1, k2)
}

impl<'a> SliceProblem<'a> {
    fn new(p: &'a Polytope, slice: &'a SliceConstraint) -> Result<Self> {
        if slice.s0 == 0.0 {
            return Err(CkemError::Domain(
                "slice has zero c0 coefficient; c0 cannot be eliminated".into(),
            ));
        }
        Ok(SliceProblem {
            p,
            slice,
            t: [-slice.s1 / slice.s0, -slice.s2 / slice.s0],
        })
    }

    fn f_at(&self, x: [f64; 2]) -> AffineFn {
        let c0 = (1.0 - self.slice.s1 * x[0] - self.slice.s2 * x[1]) / self.slice.s0;
        AffineFn::new(x[0], x[1], c0)
    }

    fn min_abs_vertex(&self, f: &AffineFn) -> f64 {
        vertex_values(f, self.p)
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    fn grad(&self, x: [f64; 2]) -> [f64; 2] {
        let (_, g) = v2_grad_unchecked(self.p, &self.f_at(x));
        [g[0] + self.t[0] * g[2], g[1] + self.t[1] * g[2]]
    }

    fn grad_hess(&self, x: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        let (_, g, h) = v2_full_unchecked(self.p, &self.f_at(x));
        let gr = [g[0] + self.t[0] * g[2], g[1] + self.t[1] * g[2]];
        let mut hr = [[0.0; 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                hr[r][s] = h[r][s]
                    + h[r][2] * self.t[s]
                    + h[2][s] * self.t[r]
                    + h[2][2] * self.t[r] * self.t[s];
            }
        }
        (gr, hr)
    }
}

fn norm2(g: &[f64; 2]) -> f64 {
    (g[0] * g[0] + g[1] * g[1]).sqrt()
}

/// Damped Newton on the slice gradient from one seed. Returns the final
/// iterate and its gradient norm if usable.
fn newton_from_seed(prob: &SliceProblem, seed: [f64; 2], tol: f64) -> Option<([f64; 2], f64)> {
    let mut x = seed;
    let mut phi = {
        let g = prob.grad(x);
        if !g[0].is_finite() || !g[1].is_finite() {
            return None;
        }
        norm2(&g)
    };
    let mut crawls = 0u32;
    for _ in 0..80 {
        if phi <= tol {
            return Some((x, phi));
        }
        let (g, h) = prob.grad_hess(x);
        if !(g[0].is_finite() && g[1].is_finite()) {
            return None;
        }
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let hscale = h
            .iter()
            .flatten()
            .fold(0f64, |m, v| m.max(v.abs()));
        let step = if det.abs() > 1e-14 * hscale * hscale {
            let s = [
                -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                -(h[0][0] * g[1] - h[1][0] * g[0]) / det,
            ];
            // Near poles the gradient scale is enormous and the absolute
            // tolerance is unreachable; quadratic convergence makes the
            // Newton step length itself a reliable convergence measure.
            if norm2(&s) <= 1e-10 * (1.0 + norm2(&x)) {
                let xn = [x[0] + s[0], x[1] + s[1]];
                let gn = prob.grad(xn);
                if gn[0].is_finite() && gn[1].is_finite() && norm2(&gn) < phi {
                    return Some((xn, norm2(&gn)));
                }
                return Some((x, phi));
            }
            s
        } else {
            // near-singular Hessian: gradient descent with a conservative step
            let s = if hscale > 0.0 { 1.0 / hscale } else { 1.0 };
            [-g[0] * s, -g[1] * s]
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..25 {
            let xn = [x[0] + t * step[0], x[1] + t * step[1]];
            if xn[0].abs() > BOX_R || xn[1].abs() > BOX_R {
                t *= 0.5;
                continue;
            }
            let fnx = prob.f_at(xn);
            if prob.min_abs_vertex(&fnx) < POLE_GUARD {
                t *= 0.5;
                continue;
            }
            let gn = prob.grad(xn);
            if gn[0].is_finite() && gn[1].is_finite() {
                let phin = norm2(&gn);
                if phin <= (1.0 - 1e-4 * t) * phi {
                    x = xn;
                    phi = phin;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break; // stalled (typically pinned against a pole locus)
        }
        // Steps that only survive with microscopic damping are crawling
        // along a pole locus; they never reach the tolerance, so stop
        // paying for the full iteration budget.
        if t < 1e-5 {
            crawls += 1;
            if crawls >= 3 {
                break;
            }
        } else {
            crawls = 0;
        }
    }
    // accept stalls very close to a zero: near pole-pinned solutions the
    // continued gradient is evaluated with relative error ~1e-16/margin
    if phi <= 1e3 * tol {
        Some((x, phi))
    } else {
        None
    }
}

fn build_point(prob: &SliceProblem, x: [f64; 2], grad_norm: f64) -> CriticalPoint {
    let f = prob.f_at(x);
    let mg = margin(&f, prob.p);
    let in_cone = mg > 0.0;
    let (_, hess) = prob.grad_hess(x);
    let sig = hessian_signature(&hess);
    let (v, d_const, c_const, futaki_norm);
    if in_cone {
        let fv = volume_functional(prob.p, &f).expect("in-cone point");
        v = fv.v;
        d_const = fv.d_const;
        c_const = fv.c_const;
        let fnorm = normalize_to_tilde(prob.p, &f).expect("in-cone point");
        let fut = volume_functional(prob.p, &fnorm).expect("in-cone point").futaki;
        futaki_norm = (fut[0] * fut[0] + fut[1] * fut[1] + fut[2] * fut[2]).sqrt();
    } else {
        let (v2, _) = v2_grad_unchecked(prob.p, &f);
        v = if v2 >= 0.0 { v2.sqrt() } else { f64::NAN };
        let (d, c, fut) = invariants_unchecked(prob.p, &f);
        d_const = d;
        c_const = c;
        futaki_norm = (fut[0] * fut[0] + fut[1] * fut[1] + fut[2] * fut[2]).sqrt();
    }
    CriticalPoint {
        k1: x[0],
        k2: x[1],
        c0: f.c0,
        grad_norm,
        in_cone,
        margin: mg,
        v,
        d_const,
        c_const,
        futaki_norm,
        classification: if sig.2 > 0 {
            Some("curve-family".into())
        } else {
            None
        },
        hessian_signature: sig,
    }
}

/// Multistart damped Newton over a `grid x grid` seed set on `[-R, R]^2`.
/// Converged iterates are deduplicated at distance `100 * tol` and reported
/// with full diagnostics; out-of-cone zeros of the continued gradient are
/// kept with `in_cone = false`.
pub fn find_critical_points(
    p: &Polytope,
    slice: &SliceConstraint,
    grid: usize,
    tol: f64,
    exec: Exec,
) -> Result<Vec<CriticalPoint>> {
    if grid < 4 {
        return Err(CkemError::Domain(format!("grid must be >= 4, got {grid}")));
    }
    if !(tol > 0.0) {
        return Err(CkemError::Domain(format!("tol must be > 0, got {tol}")));
    }
    let prob = SliceProblem::new(p, slice)?;
    // Multi-resolution seeding: the positivity cone on the slice is a small
    // neighborhood of the origin, while the continued gradient's other zeros
    // can sit anywhere in the box, so nested grids cover both.
    let mut raw_seeds = Vec::with_capacity(4 * grid * grid);
    let mut max_margin = f64::NEG_INFINITY;
    for r in [BOX_R, BOX_R / 3.0, BOX_R / 10.0, BOX_R / 30.0] {
        for i in 0..grid {
            for j in 0..grid {
                let x = [
                    -r + 2.0 * r * (i as f64 + 0.5) / grid as f64,
                    -r + 2.0 * r * (j as f64 + 0.5) / grid as f64,
                ];
                let m = margin(&prob.f_at(x), p);
                max_margin = max_margin.max(m);
                raw_seeds.push((x, m));
            }
        }
    }
    if max_margin <= 0.0 {
        return Err(CkemError::Domain(
            "no seeds inside the positivity cone on this slice".into(),
        ));
    }
    // interior cone seeds away from the boundary, plus safely-exterior seeds
    // (to land on out-of-cone table solutions)
    let seeds: Vec<[f64; 2]> = raw_seeds
        .into_iter()
        .filter(|(_, m)| *m >= 0.05 * max_margin || *m < -1e-3)
        .map(|(x, _)| x)
        .collect();

    let found = exec.map(seeds, |s| newton_from_seed(&prob, s, tol));
    let mut hits: Vec<([f64; 2], f64)> = found.into_iter().flatten().collect();
    let dedup = |hits: &mut Vec<([f64; 2], f64)>| {
        hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // greedy cluster within 100*tol, keeping the best-converged member
        let dedup_r = 100.0 * tol;
        let mut reps: Vec<([f64; 2], f64)> = Vec::new();
        for &(x, g) in hits.iter() {
            match reps
                .iter_mut()
                .find(|(r, _)| (r[0] - x[0]).hypot(r[1] - x[1]) < dedup_r)
            {
                Some(rep) => {
                    if g < rep.1 {
                        *rep = (x, g);
                    }
                }
                None => reps.push((x, g)),
            }
        }
        *hits = reps;
    };
    dedup(&mut hits);
    // Saddles squeezed between two nearby extrema have tiny Newton basins
    // that the grid misses; reseed from midpoints of close pairs.
    let mut mids = Vec::new();
    for i in 0..hits.len() {
        for j in (i + 1)..hits.len() {
            let (a, b) = (hits[i].0, hits[j].0);
            let d = (a[0] - b[0]).hypot(a[1] - b[1]);
            if d < 0.2 {
                mids.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            }
        }
    }
    if !mids.is_empty() {
        let extra = exec.map(mids, |s| newton_from_seed(&prob, s, tol));
        hits.extend(extra.into_iter().flatten());
        dedup(&mut hits);
    }
    Ok(hits
        .into_iter()
        .map(|(x, g)| build_point(&prob, x, g))
        .collect())
}

// ---------------------------------------------------------------------------
// Family classification tables (family slices, coordinates (a, b) = (k1, k2)).
// ---------------------------------------------------------------------------

enum CaseDef {
    Point(&'static str, f64, f64),
    /// `a` as a function of `b` along a one-parameter solution curve.
    Curve(&'static str, Box<dyn Fn(f64) -> f64>),
}

fn family_case_table(family: &Family) -> Vec<CaseDef> {
    use CaseDef::*;
    match family {
        Family::Cp2 => vec![Point("cp2-origin", 0.0, 0.0)],
        Family::P1xP1 { p } => {
            let p = Scalar::to_f64(p);
            let mut t = vec![Point("p1xp1-case-origin", 0.0, 0.0)];
            if p > 1.0 {
                let r = (p + 1.0) / (p - 1.0);
                t.push(Curve(
                    "p1xp1-curve-plus",
                    Box::new(move |b: f64| (b * b + r).sqrt() / p),
                ));
                t.push(Curve(
                    "p1xp1-curve-minus",
                    Box::new(move |b: f64| -(b * b + r).sqrt() / p),
                ));
            }
            if p > 2.0 {
                let a = (p - 2.0).sqrt() / p.powf(1.5);
                t.push(Point("p1xp1-case-minus", -a, 0.0));
                t.push(Point("p1xp1-case-plus", a, 0.0));
            }
            t
        }
        Family::Blowup { p } => blowup_case_table(Scalar::to_f64(p)),
        Family::Hirzebruch { p, q } => hirzebruch_case_table(Scalar::to_f64(p), *q as f64),
    }
}

fn blowup_case_table(p: f64) -> Vec<CaseDef> {
    use CaseDef::*;
    let mut t = Vec::new();
    let rad1 = move |b: f64| {
        -9.0 * b * b * p.powi(3) + (21.0 * b * b + 1.0) * p * p + (1.0 - 16.0 * b * b) * p
            + 4.0 * b * b
            - 1.0
    };
    let d0 = 6.0 * p * p - 4.0 * p;
    t.push(Curve(
        "blowup-case-1",
        Box::new(move |b: f64| {
            (2.0 * rad1(b).sqrt() + 3.0 * b * p * p + (1.0 - 2.0 * b) * p) / d0
        }),
    ));
    t.push(Curve(
        "blowup-case-2",
        Box::new(move |b: f64| {
            -(2.0 * rad1(b).sqrt() - 3.0 * b * p * p + (2.0 * b - 1.0) * p) / d0
        }),
    ));
    // cases (3)-(6) are not real for 0 < p < 1
    t.push(Point("blowup-case-7", (p - 1.0) / (p * p), 1.0 / p));
    t.push(Point("blowup-case-8", -1.0 / (p * p), -1.0 / p));
    let r9 = (9.0 * p * p - 8.0 * p).sqrt();
    t.push(Point("blowup-case-9", -(r9 + p) / (4.0 * p * p), 0.0));
    t.push(Point("blowup-case-10", (r9 - p) / (4.0 * p * p), 0.0));
    let s = ((p * p + p - 1.0) / (p - 1.0)).sqrt();
    t.push(Point(
        "blowup-case-11",
        (1.0 - s) / (6.0 * p - 4.0),
        -s / (3.0 * p - 2.0),
    ));
    t.push(Point(
        "blowup-case-12",
        (1.0 + s) / (6.0 * p - 4.0),
        s / (3.0 * p - 2.0),
    ));
    let r = (p.powi(4) - 4.0 * p.powi(3) + 16.0 * p * p - 16.0 * p + 4.0).sqrt();
    let den = p.powi(3) - 2.0 * p * p + 6.0 * p - 4.0;
    t.push(Point(
        "blowup-case-13",
        -(r - p * p + 4.0 * p - 2.0) / (2.0 * den),
        -r / den,
    ));
    t.push(Point(
        "blowup-case-14",
        (r + p * p - 4.0 * p + 2.0) / (2.0 * den),
        r / den,
    ));
    let u = (1.0 - p).sqrt();
    t.push(Point("blowup-case-15", (p - 2.0 * u - 2.0) / (2.0 * p * p), 0.0));
    t.push(Point("blowup-case-16", (p + 2.0 * u - 2.0) / (2.0 * p * p), 0.0));
    t
}

fn hirzebruch_case_table(p: f64, q: f64) -> Vec<CaseDef> {
    use CaseDef::*;
    let mut t = Vec::new();
    let u = (1.0 - p).sqrt();
    t.push(Point(
        "hirzebruch-case-1",
        (p + 2.0 * u - 2.0) / (2.0 * p * p),
        0.0,
    ));
    let rad2 = p * (p * q * q + 4.0 * q * (p - 2.0) - 4.0 * p);
    if rad2 >= 0.0 {
        let r2 = rad2.sqrt();
        t.push(Point("hirzebruch-case-2", (r2 - p * q) / (4.0 * p * p), 0.0));
        t.push(Point("hirzebruch-case-2", (-r2 - p * q) / (4.0 * p * p), 0.0));
    }
    let d = 2.0 * (p - 1.0) * (p - 2.0) * q - p.powi(3);
    let r = (4.0 * (1.0 - p) * (1.0 - p) * q * q - 4.0 * (p - 1.0) * (p - 2.0) * p * q
        + p.powi(4))
    .sqrt();
    t.push(Point(
        "hirzebruch-case-3",
        -(r - 2.0 * (p - 1.0) * q + p * (p - 2.0)) / (2.0 * d),
        -r / (q * d),
    ));
    t.push(Point(
        "hirzebruch-case-4",
        (r + 2.0 * (p - 1.0) * q - p * (p - 2.0)) / (2.0 * d),
        r / (q * d),
    ));
    t
}

/// Match a critical point against the family's closed-form case table
/// (family-slice coordinates). Points matched against a one-parameter curve
/// get the curve's tag.
pub fn classify_against_family(pt: &CriticalPoint, family: &Family) -> Option<String> {
    const TOL_POINT: f64 = 1e-7;
    const TOL_CURVE: f64 = 1e-6;
    let table = family_case_table(family);
    // Isolated cases first: curve branch points coincide with isolated
    // entries of the table and must keep their own tag.
    for case in &table {
        if let CaseDef::Point(tag, a, b) = case {
            if a.is_finite() && b.is_finite() && (pt.k1 - a).hypot(pt.k2 - b) < TOL_POINT {
                return Some(tag.to_string());
            }
        }
    }
    for case in &table {
        if let CaseDef::Curve(tag, a_of_b) = case {
            let a = a_of_b(pt.k2);
            if a.is_finite() && (pt.k1 - a).abs() < TOL_CURVE {
                return Some(tag.to_string());
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Parameter scans.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub param: f64,
    pub points: Vec<CriticalPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    /// Parameter values (to 1e-6) where the solution-set signature changes.
    pub thresholds: Vec<f64>,
}

pub const SCAN_CSV_HEADER: &str =
    "param,case_tag,k1,k2,c0,margin,V,d,c,futaki_norm,hessian_sig";

impl ScanRow {
    pub fn csv_lines(&self) -> Vec<String> {
        self.points
            .iter()
            .map(|pt| {
                format!(
                    "{},{},{},{},{},{},{},{},{},{},{}+{}-{}0",
                    self.param,
                    pt.classification.as_deref().unwrap_or("none"),
                    pt.k1,
                    pt.k2,
                    pt.c0,
                    pt.margin,
                    pt.v,
                    pt.d_const,
                    pt.c_const,
                    pt.futaki_norm,
                    pt.hessian_signature.0,
                    pt.hessian_signature.1,
                    pt.hessian_signature.2,
                )
            })
            .collect()
    }
}

/// The structural signature used for threshold detection: the in-cone
/// isolated-point count plus the set of matched out-of-cone isolated case
/// tags. Curve hits are excluded (their sampled positions are grid
/// artifacts), as are the pole-pinned blow-up cases (7), (8) whose recovery
/// is precision-limited.
fn row_signature(row: &ScanRow) -> (usize, Vec<String>) {
    let in_count = row
        .points
        .iter()
        .filter(|p| p.in_cone && !p.is_curve_hit())
        .count();
    let mut out_tags: Vec<String> = row
        .points
        .iter()
        .filter(|p| !p.in_cone && !p.is_curve_hit())
        .filter_map(|p| p.classification.clone())
        .filter(|t| t != "blowup-case-7" && t != "blowup-case-8")
        .collect();
    out_tags.sort();
    out_tags.dedup();
    (in_count, out_tags)
}

fn scan_one<F>(make: &F, param: f64, grid: usize, tol: f64, exec: Exec) -> Result<ScanRow>
where
    F: Fn(f64) -> Family,
{
    let family = make(param);
    let p = make_family(&family)?;
    let slice = SliceConstraint::family_slice(&family, &p)?;
    let mut points = find_critical_points(&p, &slice, grid, tol, exec)?;
    for pt in points.iter_mut() {
        if let Some(tag) = classify_against_family(pt, &family) {
            pt.classification = Some(tag);
        }
    }
    Ok(ScanRow { param, points })
}

/// Scan a one-parameter family: critical points (classified) per parameter
/// value, and bisection-refined thresholds (1e-6 in the parameter) where the
/// solution-set signature changes.
pub fn family_scan<F>(
    make: F,
    params: &[f64],
    grid: usize,
    tol: f64,
    exec: Exec,
) -> Result<ScanResult>
where
    F: Fn(f64) -> Family + Sync,
{
    let rows: Vec<Result<ScanRow>> = exec.map(params.to_vec(), |pv| {
        scan_one(&make, pv, grid, tol, Exec::Sequential)
    });
    let rows: Vec<ScanRow> = rows.into_iter().collect::<Result<_>>()?;
    let mut thresholds = Vec::new();
    for w in 1..rows.len() {
        let sig_lo = row_signature(&rows[w - 1]);
        let sig_hi = row_signature(&rows[w]);
        if sig_lo == sig_hi {
            continue;
        }
        let (mut lo, mut hi) = (rows[w - 1].param, rows[w].param);
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            let sig_mid = row_signature(&scan_one(&make, mid, grid, tol, exec)?);
            if sig_mid == sig_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        thresholds.push(0.5 * (lo + hi));
    }
    Ok(ScanResult { rows, thresholds })
}

/// Real roots of a quartic (leading coefficient first), via companion-matrix
/// eigenvalues with one Newton polish each. Sorted ascending.
pub fn quartic_roots(coeffs: [f64; 5]) -> Vec<f64> {
    let c4 = coeffs[0];
    assert!(c4 != 0.0, "leading coefficient must be nonzero");
    let a: Vec<f64> = coeffs[1..].iter().map(|c| c / c4).collect();
    let mut comp = DMatrix::<f64>::zeros(4, 4);
    for i in 0..4 {
        comp[(0, i)] = -a[i];
    }
    for i in 1..4 {
        comp[(i, i - 1)] = 1.0;
    }
    let eigs = comp.complex_eigenvalues();
    let pval = |x: f64| coeffs.iter().fold(0.0, |acc, c| acc * x + c);
    let pder = |x: f64| {
        let mut acc = 0.0;
        for (i, c) in coeffs[..4].iter().enumerate() {
            acc = acc * x + c * (4 - i) as f64;
        }
        acc
    };
    let mut roots: Vec<f64> = Vec::new();
    for e in eigs.iter() {
        if e.im.abs() > 1e-8 * (1.0 + e.re.abs()) {
            continue;
        }
        let mut x = e.re;
        let d = pder(x);
        if d != 0.0 {
            x -= pval(x) / d;
        }
        if !roots.iter().any(|r| (r - x).abs() < 1e-9 * (1.0 + x.abs())) {
            roots.push(x);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompareReport {
    pub v_equal: bool,
    /// `V` is the homothety invariant: equal `V` means homothetic solutions.
    pub homothetic: bool,
}

pub fn compare_solutions(a: &CriticalPoint, b: &CriticalPoint) -> CompareReport {
    let v_equal = (a.v - b.v).abs() / a.v.abs().max(f64::MIN_POSITIVE) < 1e-8;
    CompareReport {
        v_equal,
        homothetic: v_equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_from_f64, rat_from_int};
    use approx::assert_relative_eq;

    fn run_family(family: &Family, grid: usize, tol: f64) -> Vec<CriticalPoint> {
        let p = make_family(family).unwrap();
        let slice = SliceConstraint::family_slice(family, &p).unwrap();
        let mut pts =
            find_critical_points(&p, &slice, grid, tol, Exec::Parallel).unwrap();
        for pt in pts.iter_mut() {
            if let Some(tag) = classify_against_family(pt, family) {
                pt.classification = Some(tag);
            }
        }
        pts
    }

    fn in_cone(pts: &[CriticalPoint]) -> Vec<&CriticalPoint> {
        pts.iter().filter(|p| p.in_cone).collect()
    }

    #[test]
    fn cp2_single_critical_point() {
        let p = make_family(&Family::Cp2).unwrap();
        let slice = SliceConstraint::new(1.0, 1.0, 3.0, &p).unwrap();
        let pts = find_critical_points(&p, &slice, 8, 1e-6, Exec::Parallel).unwrap();
        let inside = in_cone(&pts);
        assert_eq!(inside.len(), 1);
        assert!(inside[0].k1.abs() < 1e-8 && inside[0].k2.abs() < 1e-8);
        assert_relative_eq!(inside[0].v, 12.0 * std::f64::consts::PI, max_relative = 1e-9);
    }

    #[test]
    fn p1xp1_p3_three_in_cone_points() {
        let pts = run_family(&Family::P1xP1 { p: rat_from_int(3) }, 10, 1e-6);
        let mut inside: Vec<f64> = in_cone(&pts).iter().map(|p| p.k1).collect();
        inside.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(inside.len(), 3, "points: {pts:#?}");
        let a = 0.1924500897298753; // sqrt(p-2)/p^1.5 at p = 3
        assert_relative_eq!(inside[0], -a, epsilon = 1e-8);
        assert!(inside[1].abs() < 1e-8);
        assert_relative_eq!(inside[2], a, epsilon = 1e-8);
        let tags: Vec<_> = in_cone(&pts)
            .iter()
            .map(|p| p.classification.clone().unwrap())
            .collect();
        assert!(tags.contains(&"p1xp1-case-origin".to_string()));
        assert!(tags.contains(&"p1xp1-case-plus".to_string()));
        assert!(tags.contains(&"p1xp1-case-minus".to_string()));
    }

    #[test]
    fn p1xp1_p15_only_origin() {
        let pts = run_family(&Family::P1xP1 { p: rat_from_f64(1.5) }, 10, 1e-6);
        let inside = in_cone(&pts);
        assert_eq!(inside.len(), 1);
        assert!(inside[0].k1.abs() < 1e-8 && inside[0].k2.abs() < 1e-8);
    }

    fn tags_of(pts: &[&CriticalPoint]) -> Vec<String> {
        let mut t: Vec<String> = pts
            .iter()
            .filter_map(|p| p.classification.clone())
            .collect();
        t.sort();
        t.dedup();
        t
    }

    #[test]
    fn blowup_p095_cases() {
        let pts = run_family(&Family::Blowup { p: rat_from_f64(0.95) }, 16, 1e-6);
        let inside = in_cone(&pts);
        assert_eq!(inside.len(), 3, "in-cone: {inside:#?}");
        let tags = tags_of(&inside);
        assert_eq!(
            tags,
            vec!["blowup-case-10", "blowup-case-16", "blowup-case-9"]
        );
        // (13), (14) are real again above beta but lie outside the cone
        let out = tags_of(&pts.iter().filter(|p| !p.in_cone).collect::<Vec<_>>());
        assert!(out.contains(&"blowup-case-13".to_string()), "out: {out:?}");
        assert!(out.contains(&"blowup-case-14".to_string()));
        assert!(out.contains(&"blowup-case-15".to_string()));
    }

    #[test]
    fn blowup_p03_cases() {
        let pts = run_family(&Family::Blowup { p: rat_from_f64(0.3) }, 12, 1e-6);
        let tags = tags_of(&in_cone(&pts));
        assert_eq!(
            tags,
            vec!["blowup-case-13", "blowup-case-14", "blowup-case-16"]
        );
    }

    #[test]
    fn blowup_p05_out_of_cone_cases() {
        // alpha < 0.5 < 8/9: only (16) in cone; (15) isolated out of cone;
        // (11), (12) are the branch points where the solution curves (1)
        // and (2) meet, sampled by the solver as curve endpoints.
        let pts = run_family(&Family::Blowup { p: rat_from_f64(0.5) }, 12, 1e-6);
        let tags = tags_of(&in_cone(&pts));
        assert_eq!(tags, vec!["blowup-case-16"]);
        let out = tags_of(&pts.iter().filter(|p| !p.in_cone).collect::<Vec<_>>());
        for want in ["blowup-case-1", "blowup-case-2", "blowup-case-15"] {
            assert!(out.contains(&want.to_string()), "missing {want} in {out:?}");
        }
        let p = 0.5f64;
        let s = ((p * p + p - 1.0) / (p - 1.0)).sqrt();
        let b11 = [(1.0 - s) / (6.0 * p - 4.0), -s / (3.0 * p - 2.0)];
        let b12 = [(1.0 + s) / (6.0 * p - 4.0), s / (3.0 * p - 2.0)];
        for target in [b11, b12] {
            let dist = pts
                .iter()
                .map(|pt| (pt.k1 - target[0]).hypot(pt.k2 - target[1]))
                .fold(f64::INFINITY, f64::min);
            // curve sampling density near the endpoints is grid-limited
            assert!(dist < 2e-2, "no curve point near {target:?} (dist {dist})");
        }
        // vertex-value sign check: the closed-form points
        // (7), (8), (11), (12), (15) are never inside the cone
        let family = Family::Blowup { p: rat_from_f64(0.5) };
        let poly = make_family(&family).unwrap();
        let slice = SliceConstraint::family_slice(&family, &poly).unwrap();
        for (a, b) in [
            ((p - 1.0) / (p * p), 1.0 / p),
            (-1.0 / (p * p), -1.0 / p),
            (b11[0], b11[1]),
            (b12[0], b12[1]),
            ((p - 2.0 * (1.0 - p).sqrt() - 2.0) / (2.0 * p * p), 0.0),
        ] {
            let f = slice.complete(a, b).unwrap();
            assert!(margin(&f, &poly) <= 0.0, "({a}, {b}) unexpectedly in cone");
        }
    }

    #[test]
    fn in_cone_critical_points_satisfy_invariant_identities() {
        for pts in [
            run_family(&Family::P1xP1 { p: rat_from_int(3) }, 8, 1e-6),
            run_family(&Family::Blowup { p: rat_from_f64(0.95) }, 10, 1e-6),
        ] {
            for pt in in_cone(&pts) {
                assert!(pt.futaki_norm < 1e-8, "futaki_norm = {}", pt.futaki_norm);
                assert!(
                    (pt.c_const / pt.d_const - 1.0).abs() < 1e-6,
                    "c = {}, d = {}",
                    pt.c_const,
                    pt.d_const
                );
            }
        }
    }

    #[test]
    fn slice_independence() {
        // family slice vs c0 = 1 slice: matched points agree after d = 1
        // normalization
        let family = Family::P1xP1 { p: rat_from_int(3) };
        let p = make_family(&family).unwrap();
        let base = SliceConstraint::family_slice(&family, &p).unwrap();
        let alt = SliceConstraint::new(0.0, 0.0, 1.0, &p).unwrap();
        let on_base = find_critical_points(&p, &base, 10, 1e-6, Exec::Parallel).unwrap();
        let on_alt = find_critical_points(&p, &alt, 10, 1e-6, Exec::Parallel).unwrap();
        let norm = |pt: &CriticalPoint| {
            normalize_to_tilde(&p, &AffineFn::new(pt.k1, pt.k2, pt.c0)).unwrap()
        };
        let a_norm: Vec<AffineFn> = in_cone(&on_base).iter().map(|pt| norm(pt)).collect();
        let b_norm: Vec<AffineFn> = in_cone(&on_alt).iter().map(|pt| norm(pt)).collect();
        assert_eq!(a_norm.len(), b_norm.len());
        for fa in &a_norm {
            let best = b_norm
                .iter()
                .map(|fb| {
                    (fa.k1 - fb.k1)
                        .abs()
                        .max((fa.k2 - fb.k2).abs())
                        .max((fa.c0 - fb.c0).abs())
                })
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "unmatched normalized point {fa:?}");
        }
    }

    #[test]
    fn determinism_across_exec() {
        let family = Family::Blowup { p: rat_from_f64(0.9) };
        let p = make_family(&family).unwrap();
        let slice = SliceConstraint::family_slice(&family, &p).unwrap();
        let seq = find_critical_points(&p, &slice, 8, 1e-6, Exec::Sequential).unwrap();
        let par = find_critical_points(&p, &slice, 8, 1e-6, Exec::Parallel).unwrap();
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.iter().zip(par.iter()) {
            assert_eq!(a.k1.to_bits(), b.k1.to_bits());
            assert_eq!(a.k2.to_bits(), b.k2.to_bits());
            assert_eq!(a.v.to_bits(), b.v.to_bits());
        }
    }

    #[test]
    fn quartic_root_examples() {
        let r = quartic_roots([1.0, -4.0, 16.0, -16.0, 4.0]);
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[0], 0.3860165172833447, epsilon = 1e-10);
        assert_relative_eq!(r[1], 0.8448306092128594, epsilon = 1e-10);
        let r = quartic_roots([1.0, 0.0, 0.0, 0.0, -1.0]);
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(r[1], 1.0, epsilon = 1e-12);
    }

    /// `4(1-p)^2 q^2 - 4(p-1)(p-2)pq + p^4` as quartic coefficients in `p`.
    fn hirzebruch_quartic(q: f64) -> [f64; 5] {
        [
            1.0,
            -4.0 * q,
            12.0 * q + 4.0 * q * q,
            -8.0 * q - 8.0 * q * q,
            4.0 * q * q,
        ]
    }

    #[test]
    fn hirzebruch_quartic_roots() {
        // q = 1 reduces to the blow-up quartic
        assert_eq!(hirzebruch_quartic(1.0), [1.0, -4.0, 16.0, -16.0, 4.0]);
        // q = 3: two roots in (0, 1), confirmed by sign changes on a grid
        let c = hirzebruch_quartic(3.0);
        let eval = |x: f64| c.iter().fold(0.0, |acc, ci| acc * x + ci);
        let roots = quartic_roots(c);
        let in01: Vec<f64> = roots.into_iter().filter(|r| (0.0..1.0).contains(r)).collect();
        assert_eq!(in01.len(), 2, "roots in (0,1): {in01:?}");
        let mut sign_changes = 0;
        let mut prev = eval(0.0);
        let mut x = 1e-3;
        while x < 1.0 {
            let cur = eval(x);
            if prev.signum() != cur.signum() {
                sign_changes += 1;
            }
            prev = cur;
            x += 1e-3;
        }
        assert_eq!(sign_changes, 2);
    }

    #[test]
    fn p1xp1_scan_threshold_at_2() {
        let params: Vec<f64> = (0..13).map(|i| 1.4 + 0.1 * i as f64).collect();
        let scan = family_scan(
            |pv| Family::P1xP1 { p: rat_from_f64(pv) },
            &params,
            8,
            1e-6,
            Exec::Parallel,
        )
        .unwrap();
        let near_2: Vec<f64> = scan
            .thresholds
            .iter()
            .copied()
            .filter(|t| (t - 2.0).abs() < 1e-4)
            .collect();
        assert_eq!(near_2.len(), 1, "thresholds: {:?}", scan.thresholds);
    }

    #[test]
    fn blowup_scan_thresholds() {
        let params: Vec<f64> = (0..9).map(|i| 0.34 + 0.02 * i as f64).collect();
        let scan = family_scan(
            |pv| Family::Blowup { p: rat_from_f64(pv) },
            &params,
            8,
            1e-6,
            Exec::Parallel,
        )
        .unwrap();
        let alpha = quartic_roots([1.0, -4.0, 16.0, -16.0, 4.0])[0];
        assert!(
            scan.thresholds.iter().any(|t| (t - alpha).abs() < 1e-3),
            "thresholds {:?} vs alpha {alpha}",
            scan.thresholds
        );
        let params: Vec<f64> = (0..7).map(|i| 0.86 + 0.01 * i as f64).collect();
        let scan = family_scan(
            |pv| Family::Blowup { p: rat_from_f64(pv) },
            &params,
            8,
            1e-6,
            Exec::Parallel,
        )
        .unwrap();
        let right = 8.0 / 9.0;
        assert!(
            scan.thresholds.iter().any(|t| (t - right).abs() < 1e-3),
            "thresholds {:?} vs 8/9",
            scan.thresholds
        );
    }

    #[test]
    fn hirzebruch_q2_alpha_matches_quartic() {
        let alpha2 = quartic_roots(hirzebruch_quartic(2.0))
            .into_iter()
            .find(|r| *r > 0.0)
            .unwrap();
        let params: Vec<f64> = (0..7)
            .map(|i| alpha2 - 0.03 + 0.01 * i as f64)
            .collect();
        let scan = family_scan(
            |pv| Family::Hirzebruch { p: rat_from_f64(pv), q: 2 },
            &params,
            8,
            1e-6,
            Exec::Parallel,
        )
        .unwrap();
        assert!(
            scan.thresholds.iter().any(|t| (t - alpha2).abs() < 1e-5),
            "thresholds {:?} vs alpha_2 {alpha2}",
            scan.thresholds
        );
    }

    #[test]
    fn compare_blowup_homothetic_pair() {
        let pts = run_family(&Family::Blowup { p: rat_from_f64(0.95) }, 12, 1e-6);
        let find = |tag: &str| {
            pts.iter()
                .find(|p| p.classification.as_deref() == Some(tag))
                .unwrap()
        };
        let (c9, c10, c16) = (
            find("blowup-case-9"),
            find("blowup-case-10"),
            find("blowup-case-16"),
        );
        let rep = compare_solutions(c9, c10);
        assert!(rep.v_equal && rep.homothetic);
        // V^2/(48 pi^2) = 5 - 2/p for the homothetic pair
        let expect = 5.0 - 2.0 / 0.95;
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert_relative_eq!(c9.v * c9.v / (48.0 * pi2), expect, max_relative = 1e-8);
        assert_relative_eq!(c10.v * c10.v / (48.0 * pi2), expect, max_relative = 1e-8);
        let rep = compare_solutions(c9, c16);
        assert!(!rep.v_equal);
        assert!((c9.v - c16.v).abs() / c9.v > 1e-4);
        let same = compare_solutions(c9, c9);
        assert!(same.v_equal);
    }

    #[test]
    fn hirzebruch_case_membership() {
        // closed-form membership: case (1) is always inside the cone, case
        // (2) never is (for q in {3, 4} its radicand is negative on (0, 1))
        for q in [2u32, 3, 4] {
            let qf = q as f64;
            for i in 0..20 {
                let pv = 0.04 + 0.048 * i as f64;
                let family = Family::Hirzebruch { p: rat_from_f64(pv), q };
                let poly = make_family(&family).unwrap();
                let slice = SliceConstraint::family_slice(&family, &poly).unwrap();
                let a1 = (pv + 2.0 * (1.0 - pv).sqrt() - 2.0) / (2.0 * pv * pv);
                let f1 = slice.complete(a1, 0.0).unwrap();
                assert!(
                    margin(&f1, &poly) > 0.0,
                    "case 1 not in cone at p={pv}, q={q}"
                );
                if q >= 3 {
                    let rad2 = pv * (pv * qf * qf + 4.0 * qf * (pv - 2.0) - 4.0 * pv);
                    if rad2 >= 0.0 {
                        for sgn in [1.0, -1.0] {
                            let a2 = (sgn * rad2.sqrt() - pv * qf) / (4.0 * pv * pv);
                            let f2 = slice.complete(a2, 0.0).unwrap();
                            assert!(margin(&f2, &poly) <= 0.0, "case 2 in cone at p={pv}, q={q}");
                        }
                    }
                }
            }
        }
        // solver discovery: at q = 2, p = 0.6 the in-cone points are the
        // saddle (1) flanked by (3) and (4)
        let family = Family::Hirzebruch { p: rat_from_f64(0.6), q: 2 };
        let pts = run_family(&family, 10, 1e-6);
        let tags_in = tags_of(&in_cone(&pts));
        assert_eq!(
            tags_in,
            vec!["hirzebruch-case-1", "hirzebruch-case-3", "hirzebruch-case-4"]
        );
    }

    #[test]
    fn invalid_inputs_rejected() {
        let p = make_family(&Family::Cp2).unwrap();
        let slice = SliceConstraint::new(1.0, 1.0, 3.0, &p).unwrap();
        assert!(find_critical_points(&p, &slice, 3, 1e-6, Exec::Sequential).is_err());
        assert!(find_critical_points(&p, &slice, 8, 0.0, Exec::Sequential).is_err());
    }

    #[test]
    fn scan_csv_shape() {
        let row = scan_one(
            &|pv| Family::P1xP1 { p: rat_from_f64(pv) },
            1.0,
            8,
            1e-6,
            Exec::Sequential,
        )
        .unwrap();
        let lines = row.csv_lines();
        assert!(!lines.is_empty());
        for l in &lines {
            assert_eq!(l.split(',').count(), SCAN_CSV_HEADER.split(',').count());
        }
    }
}
