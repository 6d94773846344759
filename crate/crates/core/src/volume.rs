//! Hyperbolic volume of realized polyhedra.
//!
//! Ideal polyhedra are coned from one ideal vertex over a triangulation of the
//! remaining faces; each piece is an ideal tetrahedron measured through the
//! cross-ratio of its vertices on the sphere at infinity. Compact polyhedra
//! are cut into birectangular orthoschemes from an interior point. Both
//! decompositions are signed, so they stay correct when a foot of a
//! perpendicular falls outside its face or a cone point sees a face from
//! behind.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::Class;
use crate::lobachevsky::{cross_ratio_volume, orthoscheme_volume, LobachevskyError};
use crate::realization::{MinkowskiVec, RealizedPolyhedron};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VolumeError {
    #[error("expected a {expected} realization")]
    WrongClass { expected: Class },
    #[error("base vertex {0} does not exist")]
    BadBase(usize),
    #[error("interior point is not a future time-like vector inside every face")]
    BadInteriorPoint,
    #[error("orthoscheme angles ({0}, {1}, {2}) are outside the formula's domain")]
    NumericalDegeneracy(f64, f64, f64),
    #[error(transparent)]
    Lobachevsky(#[from] LobachevskyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    IdealTetra,
    Orthoscheme,
}

/// One signed piece: `parameters` is the cross-ratio `[re, im]` for an ideal
/// tetrahedron and the angles `[α, β, γ]` for an orthoscheme.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Piece {
    pub kind: PieceKind,
    pub parameters: Vec<f64>,
    pub signed_volume: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
    pub total: f64,
}

impl Decomposition {
    fn push(&mut self, piece: Piece) {
        self.total += piece.signed_volume;
        self.pieces.push(piece);
    }
}

/// How faces are cut into triangles for the ideal cone.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FaceTriangulation {
    /// Every diagonal from the face's first vertex.
    #[default]
    Fan,
    /// Alternating ears from both ends, a zig-zag strip.
    Zigzag,
}

fn triangles(face: &[usize], how: FaceTriangulation) -> Vec<[usize; 3]> {
    let n = face.len();
    match how {
        FaceTriangulation::Fan => (1..n - 1).map(|i| [face[0], face[i], face[i + 1]]).collect(),
        FaceTriangulation::Zigzag => {
            let (mut lo, mut hi) = (0usize, n - 1);
            let mut out = Vec::with_capacity(n - 2);
            let mut take_low = true;
            while hi - lo >= 2 {
                if take_low {
                    out.push([face[lo], face[lo + 1], face[hi]]);
                    lo += 1;
                } else {
                    out.push([face[lo], face[hi - 1], face[hi]]);
                    hi -= 1;
                }
                take_low = !take_low;
            }
            out
        }
    }
}

/// Deterministic list of candidate poles: a Fibonacci lattice on the sphere.
fn pole_candidates() -> Vec<[f64; 3]> {
    let n = 200;
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Picks the candidate pole farthest from every vertex, so no vertex lands
/// near infinity, and returns a stereographic projection from it.
fn projection(points: &[[f64; 3]]) -> impl Fn(&[f64; 3]) -> Complex64 {
    let pole = pole_candidates()
        .into_iter()
        .map(|c| (points.iter().map(|p| dot3(p, &c)).fold(f64::MIN, f64::max), c))
        .fold((f64::MAX, [0.0, 0.0, 1.0]), |best, cand| if cand.0 < best.0 { cand } else { best })
        .1;
    // orthonormal frame (u, w, pole)
    let helper = if pole[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = dot3(&helper, &pole);
    let mut u = [helper[0] - d * pole[0], helper[1] - d * pole[1], helper[2] - d * pole[2]];
    let len = dot3(&u, &u).sqrt();
    u = u.map(|x| x / len);
    let w = [
        pole[1] * u[2] - pole[2] * u[1],
        pole[2] * u[0] - pole[0] * u[2],
        pole[0] * u[1] - pole[1] * u[0],
    ];
    move |x: &[f64; 3]| {
        let s = 1.0 - dot3(x, &pole);
        Complex64::new(dot3(x, &u) / s, dot3(x, &w) / s)
    }
}

fn on_sphere(v: &MinkowskiVec) -> [f64; 3] {
    [v.x / v.t, v.y / v.t, v.z / v.t]
}

/// Signed volume of the ideal tetrahedron with the given boundary points.
fn ideal_tetra(z0: Complex64, z1: Complex64, z2: Complex64, z3: Complex64) -> Result<Piece, VolumeError> {
    let z = (z3 - z1) * (z2 - z0) / ((z2 - z1) * (z3 - z0));
    Ok(Piece { kind: PieceKind::IdealTetra, parameters: vec![z.re, z.im], signed_volume: cross_ratio_volume(z)? })
}

/// Cone from vertex `base` over every face not containing it.
pub fn ideal_decomposition(
    r: &RealizedPolyhedron,
    base: usize,
    how: FaceTriangulation,
) -> Result<Decomposition, VolumeError> {
    if r.klass() != Class::Ideal {
        return Err(VolumeError::WrongClass { expected: Class::Ideal });
    }
    if base >= r.vertices.len() {
        return Err(VolumeError::BadBase(base));
    }
    let pts: Vec<[f64; 3]> = r.vertices.iter().map(on_sphere).collect();
    let proj = projection(&pts);
    let z: Vec<Complex64> = pts.iter().map(&proj).collect();
    let mut d = Decomposition::default();
    for face in r.comb.faces() {
        if face.contains(&base) {
            continue;
        }
        for [a, b, c] in triangles(face, how) {
            d.push(ideal_tetra(z[base], z[a], z[b], z[c])?);
        }
    }
    Ok(d)
}

pub fn volume_ideal(r: &RealizedPolyhedron) -> Result<f64, VolumeError> {
    Ok(ideal_decomposition(r, 0, FaceTriangulation::Fan)?.total.abs())
}

/// The normalized sum of the vertices; inside every compact realization.
pub fn default_interior_point(r: &RealizedPolyhedron) -> MinkowskiVec {
    let s = r.vertices.iter().fold(MinkowskiVec::default(), |acc, v| acc + *v);
    s * (1.0 / (-s.norm2()).sqrt())
}

/// Foot of the perpendicular from the unit time-like `p` to the plane with
/// unit normal `n`.
fn foot(p: &MinkowskiVec, n: &MinkowskiVec) -> MinkowskiVec {
    let d = p.dot(n);
    (*p - *n * d) * (1.0 / (1.0 + d * d).sqrt())
}

/// Unit normal of the plane through `a`, `b`, `c`, oriented away from `opposite`.
fn plane_normal(a: &MinkowskiVec, b: &MinkowskiVec, c: &MinkowskiVec, opposite: &MinkowskiVec) -> Option<MinkowskiVec> {
    let w = MinkowskiVec::orthogonal_to(a, b, c);
    let n2 = w.norm2();
    if !(n2 > 0.0) {
        return None;
    }
    let w = w * (1.0 / n2.sqrt());
    Some(if w.dot(opposite) > 0.0 { -w } else { w })
}

/// Distance below which two points of the hyperboloid are treated as equal.
const COINCIDENT: f64 = 1e-9;

fn coincide(a: &MinkowskiVec, b: &MinkowskiVec) -> bool {
    // -⟨a, b⟩ = cosh(distance)
    (-a.dot(b) - 1.0).max(0.0).sqrt() * std::f64::consts::SQRT_2 < COINCIDENT
}

/// Volume of the orthoscheme with vertex chain `r0 r1 r2 r3` (consecutive
/// segments mutually orthogonal); zero when it is flat.
fn orthoscheme_piece(chain: [MinkowskiVec; 4]) -> Result<Piece, VolumeError> {
    let flat = Piece { kind: PieceKind::Orthoscheme, parameters: vec![0.0, 0.0, 0.0], signed_volume: 0.0 };
    if (0..3).any(|k| coincide(&chain[k], &chain[k + 1])) {
        return Ok(flat);
    }
    let mut normals = Vec::with_capacity(4);
    for i in 0..4 {
        let o: Vec<&MinkowskiVec> = (0..4).filter(|&j| j != i).map(|j| &chain[j]).collect();
        match plane_normal(o[0], o[1], o[2], &chain[i]) {
            Some(n) => normals.push(n),
            None => return Ok(flat),
        }
    }
    let angle = |i: usize, j: usize| (-normals[i].dot(&normals[j])).clamp(-1.0, 1.0).acos();
    let (a, b, c) = (angle(0, 1), angle(1, 2), angle(2, 3));
    match orthoscheme_volume(a, b, c) {
        Ok(v) => Ok(Piece { kind: PieceKind::Orthoscheme, parameters: vec![a, b, c], signed_volume: v }),
        Err(LobachevskyError::NotHyperbolic(..)) => {
            let disc = b.cos().powi(2) - (a.sin() * c.sin()).powi(2);
            if disc > -1e-9 && a <= PI / 2.0 + 1e-9 && c <= PI / 2.0 + 1e-9 {
                Ok(flat)
            } else {
                Err(VolumeError::NumericalDegeneracy(a, b, c))
            }
        }
        Err(e) => Err(e.into()),
    }
}

/// Signed orthoscheme decomposition from the interior point `o`: for each
/// face, edge of that face and endpoint of that edge, the orthoscheme
/// `o → foot on face → foot on edge → vertex`.
pub fn compact_decomposition(r: &RealizedPolyhedron, o: &MinkowskiVec) -> Result<Decomposition, VolumeError> {
    if r.klass() != Class::Compact {
        return Err(VolumeError::WrongClass { expected: Class::Compact });
    }
    let e = &r.normals;
    if !(o.norm2() < 0.0 && o.t > 0.0) || e.iter().any(|n| o.dot(n) >= 0.0) {
        return Err(VolumeError::BadInteriorPoint);
    }
    let o = *o * (1.0 / (-o.norm2()).sqrt());
    let p = &r.comb;
    let mut d = Decomposition::default();
    for (f, face) in p.faces().iter().enumerate() {
        let p1 = foot(&o, &e[f]);
        let k = face.len();
        for i in 0..k {
            let (a, b) = (face[i], face[(i + 1) % k]);
            let around_b = p.vertex_faces(b);
            let g = p
                .vertex_faces(a)
                .into_iter()
                .find(|&g| g != f && around_b.contains(&g))
                .expect("edge borders two faces");
            let p2 = foot(&p1, &e[g]);
            let s_edge = if p1.dot(&e[g]) < 0.0 { 1.0 } else { -1.0 };
            for w in [a, b] {
                let third = p.vertex_faces(w).into_iter().find(|&h| h != f && h != g).expect("cubic vertex");
                let s_vertex = if p2.dot(&e[third]) < 0.0 { 1.0 } else { -1.0 };
                let mut piece = orthoscheme_piece([o, p1, p2, r.vertices[w]])?;
                piece.signed_volume *= s_edge * s_vertex;
                d.push(piece);
            }
        }
    }
    Ok(d)
}

pub fn volume_compact(r: &RealizedPolyhedron) -> Result<f64, VolumeError> {
    Ok(compact_decomposition(r, &default_interior_point(r))?.total)
}

/// Volume of a realization of either class.
pub fn volume(r: &RealizedPolyhedron) -> Result<f64, VolumeError> {
    match r.klass() {
        Class::Ideal => volume_ideal(r),
        Class::Compact => volume_compact(r),
    }
}

/// Decomposition used by [`volume`], for inspection.
pub fn decomposition(r: &RealizedPolyhedron) -> Result<Decomposition, VolumeError> {
    match r.klass() {
        Class::Ideal => ideal_decomposition(r, 0, FaceTriangulation::Fan),
        Class::Compact => compact_decomposition(r, &default_interior_point(r)),
    }
}
