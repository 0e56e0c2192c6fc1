//! Moment polytopes, affine Killing potentials and the built-in families.
//!
//! Vertices are stored as exact rationals (every finite `f64` converts
//! exactly), so convexity, lattice edge data and positivity are decided
//! without tolerances. Fast `f64` mirrors are cached for the numeric
//! kernels.

use num::bigint::BigInt;
use num::{Integer, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CkemError, Result};
use crate::scalar::{rat_from_f64, rat_from_int, rat_from_str, Rat, Scalar};

/// One polygon edge with its lattice (Guillemin) data.
///
/// `dsigma` on the edge is the pushforward of Lebesgue measure on
/// `[0, lattice_length]` under `s -> start + s * primitive`.
#[derive(Debug, Clone)]
pub struct Edge {
    pub start: usize,
    pub end: usize,
    /// Primitive integer direction; `end - start = lattice_length * primitive`.
    pub primitive: [Rat; 2],
    pub lattice_length: Rat,
    pub primitive_f64: [f64; 2],
    pub lattice_length_f64: f64,
}

/// A 2D convex moment polytope with counterclockwise vertices.
#[derive(Debug, Clone)]
pub struct Polytope {
    vertices: Vec<[Rat; 2]>,
    vertices_f64: Vec<[f64; 2]>,
    edges: Vec<Edge>,
    pub label: Option<String>,
}

impl Polytope {
    /// Build from an arbitrarily ordered vertex list. Vertices are re-sorted
    /// counterclockwise about the centroid; repeated vertices, collinear
    /// triples and fewer than 3 vertices are rejected.
    pub fn from_vertices(vertices: Vec<[Rat; 2]>, label: Option<String>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(CkemError::InvalidPolytope(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        for i in 0..vertices.len() {
            for j in (i + 1)..vertices.len() {
                if vertices[i] == vertices[j] {
                    return Err(CkemError::InvalidPolytope(format!(
                        "repeated vertex at indices {i} and {j}"
                    )));
                }
            }
        }
        let n = rat_from_int(vertices.len() as i64);
        let cx: Rat = vertices.iter().fold(<Rat as num::Zero>::zero(), |a, v| a + &v[0]) / &n;
        let cy: Rat = vertices.iter().fold(<Rat as num::Zero>::zero(), |a, v| a + &v[1]) / &n;
        let mut sorted = vertices;
        sorted.sort_by(|p, q| {
            let ap = (Scalar::to_f64(&(&p[1] - &cy))).atan2(Scalar::to_f64(&(&p[0] - &cx)));
            let aq = (Scalar::to_f64(&(&q[1] - &cy))).atan2(Scalar::to_f64(&(&q[0] - &cx)));
            ap.partial_cmp(&aq).unwrap()
        });
        // Strict convexity: cross product of consecutive edge vectors positive.
        let m = sorted.len();
        for i in 0..m {
            let a = &sorted[i];
            let b = &sorted[(i + 1) % m];
            let c = &sorted[(i + 2) % m];
            let cross = (&b[0] - &a[0]) * (&c[1] - &b[1]) - (&b[1] - &a[1]) * (&c[0] - &b[0]);
            if !cross.is_positive() {
                return Err(CkemError::InvalidPolytope(format!(
                    "vertices are not in strictly convex counterclockwise position \
                     (cross product at sorted index {} is {})",
                    (i + 1) % m,
                    Scalar::to_f64(&cross)
                )));
            }
        }
        let edges = (0..m)
            .map(|i| {
                let j = (i + 1) % m;
                let dx = &sorted[j][0] - &sorted[i][0];
                let dy = &sorted[j][1] - &sorted[i][1];
                let (len, prim) = lattice_decompose(&dx, &dy);
                Edge {
                    start: i,
                    end: j,
                    primitive_f64: [Scalar::to_f64(&prim[0]), Scalar::to_f64(&prim[1])],
                    lattice_length_f64: Scalar::to_f64(&len),
                    primitive: prim,
                    lattice_length: len,
                }
            })
            .collect();
        let vertices_f64 = sorted
            .iter()
            .map(|v| [Scalar::to_f64(&v[0]), Scalar::to_f64(&v[1])])
            .collect();
        Ok(Polytope {
            vertices: sorted,
            vertices_f64,
            edges,
            label,
        })
    }

    pub fn from_f64_vertices(vertices: &[[f64; 2]], label: Option<String>) -> Result<Self> {
        Self::from_vertices(
            vertices
                .iter()
                .map(|v| [rat_from_f64(v[0]), rat_from_f64(v[1])])
                .collect(),
            label,
        )
    }

    pub fn vertices(&self) -> &[[Rat; 2]] {
        &self.vertices
    }

    pub fn vertices_f64(&self) -> &[[f64; 2]] {
        &self.vertices_f64
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn diameter_f64(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.vertices_f64.iter().enumerate() {
            for q in &self.vertices_f64[i + 1..] {
                d = d.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
            }
        }
        d
    }

    /// Indices of vertices where the two incident primitive edge vectors do
    /// not span the lattice (`|det| != 1`), i.e. where the Delzant smoothness
    /// condition fails. Reported, never enforced.
    pub fn non_delzant_vertices(&self) -> Vec<usize> {
        let m = self.vertices.len();
        let mut out = Vec::new();
        for i in 0..m {
            let e_in = &self.edges[(i + m - 1) % m];
            let e_out = &self.edges[i];
            let det = &e_in.primitive[0] * &e_out.primitive[1]
                - &e_in.primitive[1] * &e_out.primitive[0];
            let one = <Rat as Scalar>::one();
            if Signed::abs(&det) != one {
                out.push(i);
            }
        }
        out
    }
}

/// Lattice length and primitive direction of an edge vector.
///
/// For rational components this is the rational content: the largest `L`
/// with `(dx, dy) = L * (n1, n2)` and `gcd(n1, n2) = 1` over the integers.
/// This extends the integer `gcd(|dx|, |dy|)` continuously in the edge
/// parameters, which is what makes the boundary measure vary continuously
/// in the family parameter `p`.
fn lattice_decompose(dx: &Rat, dy: &Rat) -> (Rat, [Rat; 2]) {
    let d = dx.denom().lcm(dy.denom());
    let dr = Rat::from_integer(d.clone());
    let n1: BigInt = (dx * &dr).to_integer();
    let n2: BigInt = (dy * &dr).to_integer();
    let g = n1.gcd(&n2);
    debug_assert!(!g.is_zero(), "zero-length edge");
    let len = Rat::new(g.clone(), d);
    let prim = [Rat::from_integer(&n1 / &g), Rat::from_integer(&n2 / &g)];
    (len, prim)
}

/// The four polytope families used throughout.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Unit simplex: hull of (0,0), (1,0), (0,1).
    Cp2,
    /// Rectangle: hull of (0,0), (p,0), (p,1), (0,1), p >= 1.
    P1xP1 { p: Rat },
    /// Hull of (0,0), (p,0), (p,1-p), (0,1), 0 < p < 1.
    Blowup { p: Rat },
    /// Hull of (0,0), (p,0), (p,(1-p)q), (0,q), 0 < p < 1, q >= 1.
    Hirzebruch { p: Rat, q: u32 },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Cp2 => "cp2".into(),
            Family::P1xP1 { p } => format!("p1xp1(p={})", Scalar::to_f64(p)),
            Family::Blowup { p } => format!("blowup(p={})", Scalar::to_f64(p)),
            Family::Hirzebruch { p, q } => {
                format!("hirzebruch(p={},q={})", Scalar::to_f64(p), q)
            }
        }
    }
}

pub fn make_family(family: &Family) -> Result<Polytope> {
    let zero = <Rat as num::Zero>::zero();
    let one = <Rat as Scalar>::one();
    let verts: Vec<[Rat; 2]> = match family {
        Family::Cp2 => vec![
            [zero.clone(), zero.clone()],
            [one.clone(), zero.clone()],
            [zero.clone(), one.clone()],
        ],
        Family::P1xP1 { p } => {
            if p < &one {
                return Err(CkemError::Domain(format!(
                    "p1xp1 requires p >= 1, got {}",
                    Scalar::to_f64(p)
                )));
            }
            vec![
                [zero.clone(), zero.clone()],
                [p.clone(), zero.clone()],
                [p.clone(), one.clone()],
                [zero.clone(), one.clone()],
            ]
        }
        Family::Blowup { p } => {
            if !p.is_positive() || p >= &one {
                return Err(CkemError::Domain(format!(
                    "blowup requires 0 < p < 1, got {}",
                    Scalar::to_f64(p)
                )));
            }
            vec![
                [zero.clone(), zero.clone()],
                [p.clone(), zero.clone()],
                [p.clone(), &one - p],
                [zero.clone(), one.clone()],
            ]
        }
        Family::Hirzebruch { p, q } => {
            if !p.is_positive() || p >= &one {
                return Err(CkemError::Domain(format!(
                    "hirzebruch requires 0 < p < 1, got {}",
                    Scalar::to_f64(p)
                )));
            }
            if *q == 0 {
                return Err(CkemError::Domain(
                    "hirzebruch requires a positive integer q".into(),
                ));
            }
            let qr = rat_from_int(*q as i64);
            vec![
                [zero.clone(), zero.clone()],
                [p.clone(), zero.clone()],
                [p.clone(), (&one - p) * &qr],
                [zero.clone(), qr],
            ]
        }
    };
    Polytope::from_vertices(verts, Some(family.label()))
}

/// An affine function `f(mu) = k1*mu1 + k2*mu2 + c0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineFn {
    pub k1: f64,
    pub k2: f64,
    pub c0: f64,
}

impl AffineFn {
    pub fn new(k1: f64, k2: f64, c0: f64) -> Self {
        AffineFn { k1, k2, c0 }
    }

    pub fn eval(&self, mu: [f64; 2]) -> f64 {
        self.k1 * mu[0] + self.k2 * mu[1] + self.c0
    }

    pub fn scaled(&self, c: f64) -> Self {
        AffineFn::new(c * self.k1, c * self.k2, c * self.c0)
    }

    pub fn to_rat(&self) -> RatAffine {
        RatAffine {
            k1: rat_from_f64(self.k1),
            k2: rat_from_f64(self.k2),
            c0: rat_from_f64(self.c0),
        }
    }
}

/// Exact-coefficient variant of [`AffineFn`].
#[derive(Debug, Clone, PartialEq)]
pub struct RatAffine {
    pub k1: Rat,
    pub k2: Rat,
    pub c0: Rat,
}

impl RatAffine {
    pub fn eval(&self, mu: &[Rat; 2]) -> Rat {
        &self.k1 * &mu[0] + &self.k2 * &mu[1] + &self.c0
    }

    pub fn to_f64(&self) -> AffineFn {
        AffineFn::new(
            Scalar::to_f64(&self.k1),
            Scalar::to_f64(&self.k2),
            Scalar::to_f64(&self.c0),
        )
    }
}

/// f at each vertex, in vertex order.
pub fn vertex_values(f: &AffineFn, p: &Polytope) -> Vec<f64> {
    p.vertices_f64().iter().map(|v| f.eval(*v)).collect()
}

/// Smallest vertex value; f > 0 on the polytope iff this is positive.
pub fn margin(f: &AffineFn, p: &Polytope) -> f64 {
    vertex_values(f, p).into_iter().fold(f64::INFINITY, f64::min)
}

/// Exact positivity test: `f > 0` on the polytope iff `f` is positive at
/// every vertex. The comparison is done in rationals so boundary cases like
/// `f(v) = 0` are decided correctly.
pub fn is_positive(f: &AffineFn, p: &Polytope) -> bool {
    let fr = f.to_rat();
    p.vertices().iter().all(|v| fr.eval(v).is_positive())
}

/// Locate the first non-positive vertex, as a positivity error payload.
pub fn check_positive(f: &AffineFn, p: &Polytope) -> Result<()> {
    let fr = f.to_rat();
    for (i, v) in p.vertices().iter().enumerate() {
        if !fr.eval(v).is_positive() {
            return Err(CkemError::Positivity {
                vertex_index: i,
                x: p.vertices_f64()[i][0],
                y: p.vertices_f64()[i][1],
                value: f.eval(p.vertices_f64()[i]),
            });
        }
    }
    Ok(())
}

/// The open cone of affine functions positive on a fixed polytope.
#[derive(Debug, Clone, Copy)]
pub struct PositivityCone<'a> {
    pub polytope: &'a Polytope,
}

impl<'a> PositivityCone<'a> {
    pub fn new(polytope: &'a Polytope) -> Self {
        PositivityCone { polytope }
    }

    pub fn contains(&self, f: &AffineFn) -> bool {
        is_positive(f, self.polytope)
    }

    pub fn margin(&self, f: &AffineFn) -> f64 {
        margin(f, self.polytope)
    }
}

/// The affine slice `s1*k1 + s2*k2 + s0*c0 = 1` used to normalize rays of
/// the positivity cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceConstraint {
    pub s1: f64,
    pub s2: f64,
    pub s0: f64,
}

impl SliceConstraint {
    /// Construct and verify the slice meets the positivity cone of `p`:
    /// the constraint functional must be positive somewhere on the cone,
    /// otherwise no ray crosses the slice.
    pub fn new(s1: f64, s2: f64, s0: f64, p: &Polytope) -> Result<Self> {
        let s = SliceConstraint { s1, s2, s0 };
        if s1 == 0.0 && s2 == 0.0 && s0 == 0.0 {
            return Err(CkemError::Domain("slice coefficients are all zero".into()));
        }
        // (0,0,1) is always interior to the cone; probe it and a fan of
        // directions tilted toward each coordinate.
        if s0 > 0.0 {
            return Ok(s);
        }
        let diam = p.diameter_f64().max(1.0);
        let m = 64;
        for i in 0..m {
            let th = std::f64::consts::TAU * i as f64 / m as f64;
            // Tilt just enough to stay in the cone: with |k| = t/diam the
            // constant term 1 dominates every vertex value for t < 1.
            for t in [0.1, 0.5, 0.9] {
                let f = AffineFn::new(t * th.cos() / diam, t * th.sin() / diam, 1.0);
                if is_positive(&f, p) && s1 * f.k1 + s2 * f.k2 + s0 * f.c0 > 1e-12 {
                    return Ok(s);
                }
            }
        }
        Err(CkemError::Domain(
            "slice functional is nowhere positive on the positivity cone".into(),
        ))
    }

    pub fn eval(&self, f: &AffineFn) -> f64 {
        self.s1 * f.k1 + self.s2 * f.k2 + self.s0 * f.c0
    }

    pub fn residual(&self, f: &AffineFn) -> f64 {
        self.eval(f) - 1.0
    }

    /// Complete `(k1, k2)` to a slice point by eliminating `c0`.
    /// Requires `s0 != 0`.
    pub fn complete(&self, k1: f64, k2: f64) -> Result<AffineFn> {
        if self.s0 == 0.0 {
            return Err(CkemError::Contract(
                "slice has s0 = 0; cannot eliminate c0".into(),
            ));
        }
        Ok(AffineFn::new(
            k1,
            k2,
            (1.0 - self.s1 * k1 - self.s2 * k2) / self.s0,
        ))
    }

    /// The normalization slice conventionally used for the family.
    pub fn family_slice(family: &Family, p: &Polytope) -> Result<SliceConstraint> {
        match family {
            Family::Cp2 => SliceConstraint::new(1.0, 1.0, 3.0, p),
            Family::P1xP1 { p: pp } => {
                SliceConstraint::new(Scalar::to_f64(pp), 1.0, 2.0, p)
            }
            Family::Blowup { p: pp } => {
                let pf = Scalar::to_f64(pp);
                SliceConstraint::new(2.0 * pf, 2.0 - pf, 4.0, p)
            }
            Family::Hirzebruch { p: pp, q } => {
                let pf = Scalar::to_f64(pp);
                SliceConstraint::new(2.0 * pf, (2.0 - pf) * (*q as f64), 4.0, p)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON interface: {"label": ..., "vertices": [[x, y], ...]} where x, y are
// numbers or rational strings like "3/7".
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    vertices: Vec<[CoordJson; 2]>,
}

#[derive(Clone)]
struct CoordJson(Rat);

impl Serialize for CoordJson {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            ser.serialize_str(&self.0.numer().to_string())
        } else {
            ser.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
        }
    }
}

impl<'de> Deserialize<'de> for CoordJson {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(x) => {
                if !x.is_finite() {
                    return Err(D::Error::custom("non-finite coordinate"));
                }
                Ok(CoordJson(rat_from_f64(x)))
            }
            Raw::Str(s) => rat_from_str(&s)
                .map(CoordJson)
                .ok_or_else(|| D::Error::custom(format!("cannot parse coordinate {s:?}"))),
        }
    }
}

impl Polytope {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PolytopeJson = serde_json::from_str(text).map_err(|e| {
            CkemError::InvalidPolytope(format!(
                "polytope JSON parse error at line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        Polytope::from_vertices(
            raw.vertices.into_iter().map(|[x, y]| [x.0, y.0]).collect(),
            raw.label,
        )
    }

    pub fn to_json(&self) -> String {
        let raw = PolytopeJson {
            label: self.label.clone(),
            vertices: self
                .vertices
                .iter()
                .map(|v| [CoordJson(v[0].clone()), CoordJson(v[1].clone())])
                .collect(),
        };
        serde_json::to_string(&raw).expect("polytope serialization")
    }
}
