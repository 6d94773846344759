//! Numerical realization of right-angled polyhedra in the hyperboloid model.
//!
//! Each face `i` is a plane `{x : ⟨x, e_i⟩ = 0}` with a space-like unit normal
//! `e_i` pointing out of the polyhedron, so the polyhedron is the set where
//! every `⟨x, e_i⟩ ≤ 0`. Right angles mean `⟨e_i, e_j⟩ = 0` for adjacent faces.
//! At an ideal (4-valent) vertex the two pairs of opposite faces meet at
//! infinity, which for outward normals reads `⟨e_i, e_k⟩ = -1`.
//!
//! The constraint system is solved by Levenberg–Marquardt from a starting
//! configuration built from a barycentric embedding of the dual graph. Three
//! faces at vertex 0 are pinned to a standard frame, which removes the
//! six-dimensional isometry freedom; for compact polyhedra the remaining system
//! is square. Up to [`MAX_RESTARTS`] perturbed restarts are tried.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{canonical_code, has_prismatic_circuit, is_3_connected, Class, CombPolyhedron};

/// Restarts after the first attempt before giving up.
pub const MAX_RESTARTS: usize = 20;

/// A vector in `R^{1,3}` with `⟨u, v⟩ = -u_t v_t + u_x v_x + u_y v_y + u_z v_z`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct MinkowskiVec {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for MinkowskiVec {
    fn from([t, x, y, z]: [f64; 4]) -> Self {
        MinkowskiVec { t, x, y, z }
    }
}

impl From<MinkowskiVec> for [f64; 4] {
    fn from(v: MinkowskiVec) -> Self {
        [v.t, v.x, v.y, v.z]
    }
}

impl MinkowskiVec {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        MinkowskiVec { t, x, y, z }
    }

    pub fn dot(&self, o: &MinkowskiVec) -> f64 {
        -self.t * o.t + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    /// Index-lowered coefficients: `⟨u, v⟩ = lower(u) · v`.
    fn lower(&self) -> [f64; 4] {
        [-self.t, self.x, self.y, self.z]
    }

    fn to_na(self) -> Vector4<f64> {
        Vector4::new(self.t, self.x, self.y, self.z)
    }

    fn from_na(v: Vector4<f64>) -> Self {
        MinkowskiVec::new(v[0], v[1], v[2], v[3])
    }

    /// A vector Minkowski-orthogonal to `a`, `b` and `c`; zero when they are
    /// dependent.
    pub fn orthogonal_to(a: &MinkowskiVec, b: &MinkowskiVec, c: &MinkowskiVec) -> MinkowskiVec {
        let rows = [a.lower(), b.lower(), c.lower()];
        let minor = |skip: usize| {
            let cols: Vec<usize> = (0..4).filter(|&j| j != skip).collect();
            let m = |r: usize, k: usize| rows[r][cols[k]];
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        };
        MinkowskiVec::new(minor(0), -minor(1), minor(2), -minor(3))
    }

    fn max_abs(&self) -> f64 {
        self.t.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs())
    }
}

impl Add for MinkowskiVec {
    type Output = MinkowskiVec;
    fn add(self, o: MinkowskiVec) -> MinkowskiVec {
        MinkowskiVec::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for MinkowskiVec {
    type Output = MinkowskiVec;
    fn sub(self, o: MinkowskiVec) -> MinkowskiVec {
        MinkowskiVec::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for MinkowskiVec {
    type Output = MinkowskiVec;
    fn neg(self) -> MinkowskiVec {
        MinkowskiVec::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for MinkowskiVec {
    type Output = MinkowskiVec;
    fn mul(self, s: f64) -> MinkowskiVec {
        MinkowskiVec::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizeError {
    #[error("solver did not converge after {attempts} attempts (best residual {best_residual:e})")]
    NonConvergence { attempts: usize, best_residual: f64 },
    #[error("vertex {0} is not a finite point")]
    NotCompact(usize),
    #[error("not realizable: {0}")]
    NotRealizable(String),
    #[error("expected a {expected} polyhedron")]
    WrongClass { expected: Class },
}

/// A polyhedron together with its face normals and vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizedPolyhedron {
    pub comb: CombPolyhedron,
    pub normals: Vec<MinkowskiVec>,
    pub vertices: Vec<MinkowskiVec>,
    /// Largest violation of the constraint system.
    pub residual: f64,
}

impl RealizedPolyhedron {
    pub fn klass(&self) -> Class {
        self.comb.klass()
    }

    /// `⟨e_i, e_j⟩` for all pairs of faces.
    pub fn gram_matrix(&self) -> Vec<Vec<f64>> {
        self.normals.iter().map(|a| self.normals.iter().map(|b| a.dot(b)).collect()).collect()
    }
}

/// Solver controls; the defaults are what the library entry points use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub seed: u64,
    pub max_restarts: usize,
    pub max_iterations: usize,
}

impl SolverOptions {
    pub fn with_seed(seed: u64) -> Self {
        SolverOptions { seed, max_restarts: MAX_RESTARTS, max_iterations: 300 }
    }
}

/// One constraint `⟨e_i, e_j⟩ = target`.
#[derive(Clone, Copy, Debug)]
struct Constraint {
    i: usize,
    j: usize,
    target: f64,
}

fn constraints(p: &CombPolyhedron) -> Vec<Constraint> {
    let f = p.face_count();
    let mut out: Vec<Constraint> = (0..f).map(|i| Constraint { i, j: i, target: 1.0 }).collect();
    for i in 0..f {
        for j in p.face_neighbors(i) {
            if i < j {
                out.push(Constraint { i, j, target: 0.0 });
            }
        }
    }
    if p.klass() == Class::Ideal {
        for v in 0..p.vertex_count() {
            let fs = p.vertex_faces(v);
            for (a, b) in [(fs[0], fs[2]), (fs[1], fs[3])] {
                out.push(Constraint { i: a.min(b), j: a.max(b), target: -1.0 });
            }
        }
    }
    out
}

/// Points on the unit sphere from a barycentric embedding of a 3-connected
/// planar graph with the cycle `outer` on the unit circle, lifted by inverse
/// stereographic projection and balanced by a Möbius transformation so their
/// centroid is near the origin.
fn sphere_embedding(n: usize, neighbors: impl Fn(usize) -> Vec<usize>, outer: &[usize]) -> Vec<[f64; 3]> {
    let mut pos = vec![[0.0f64; 2]; n];
    let mut fixed = vec![false; n];
    for (k, &i) in outer.iter().enumerate() {
        let a = 2.0 * PI * k as f64 / outer.len() as f64;
        pos[i] = [a.cos(), a.sin()];
        fixed[i] = true;
    }
    let inner: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    let mut index = vec![usize::MAX; n];
    for (k, &i) in inner.iter().enumerate() {
        index[i] = k;
    }
    let m = inner.len();
    if m > 0 {
        let mut lap = DMatrix::<f64>::zeros(m, m);
        let mut rhs = DMatrix::<f64>::zeros(m, 2);
        for (k, &i) in inner.iter().enumerate() {
            let nbrs = neighbors(i);
            lap[(k, k)] = nbrs.len() as f64;
            for j in nbrs {
                if fixed[j] {
                    rhs[(k, 0)] += pos[j][0];
                    rhs[(k, 1)] += pos[j][1];
                } else {
                    lap[(k, index[j])] -= 1.0;
                }
            }
        }
        let sol = lap.lu().solve(&rhs).expect("the barycentric system of a 3-connected graph is regular");
        for (k, &i) in inner.iter().enumerate() {
            pos[i] = [sol[(k, 0)], sol[(k, 1)]];
        }
    }
    let mut pts: Vec<[f64; 3]> = pos
        .iter()
        .map(|&[x, y]| {
            let s = x * x + y * y;
            [2.0 * x / (1.0 + s), 2.0 * y / (1.0 + s), (s - 1.0) / (s + 1.0)]
        })
        .collect();
    for _ in 0..500 {
        let mut c = [0.0; 3];
        for q in &pts {
            for k in 0..3 {
                c[k] += q[k] / n as f64;
            }
        }
        let len = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        if len < 1e-9 {
            break;
        }
        let d = [c[0] / len, c[1] / len, c[2] / len];
        let beta = len.min(0.5);
        let gamma = 1.0 / (1.0 - beta * beta).sqrt();
        // boost the light-like lift (1, q) along d; points drift away from d
        for q in pts.iter_mut() {
            let par = q[0] * d[0] + q[1] * d[1] + q[2] * d[2];
            let t = gamma * (1.0 - beta * par);
            let par_new = gamma * (par - beta);
            let perp = [q[0] - par * d[0], q[1] - par * d[1], q[2] - par * d[2]];
            for k in 0..3 {
                q[k] = (perp[k] + par_new * d[k]) / t;
            }
        }
    }
    pts
}

/// Face centers from the embedding of the dual graph whose outer face is the
/// cycle of faces around vertex `outer`.
fn face_centers(p: &CombPolyhedron, outer: usize) -> Vec<[f64; 3]> {
    sphere_embedding(p.face_count(), |i| p.face_neighbors(i), &p.vertex_faces(outer))
}

/// Vertex positions from the embedding of the skeleton with face `outer` on
/// the unit circle.
fn vertex_points(p: &CombPolyhedron, outer: usize) -> Vec<[f64; 3]> {
    sphere_embedding(p.vertex_count(), |v| p.skeleton().neighbors(v).to_vec(), &p.faces()[outer])
}

/// Approximate outward normals.
///
/// Compact polyhedra: each face becomes the plane whose circle at infinity
/// is a cap around its center, with a common radius chosen so that caps of
/// adjacent faces are on average orthogonal. Ideal polyhedra: vertices are
/// placed on the sphere and each face plane is fitted through its vertices.
pub fn initial_guess(p: &CombPolyhedron) -> Vec<MinkowskiVec> {
    match p.klass() {
        Class::Compact => fitted_planes(p, &vertex_points(p, largest_face(p)), COMPACT_RADII[0]),
        Class::Ideal => fitted_planes(p, &vertex_points(p, largest_face(p)), 1.0),
    }
}

fn largest_face(p: &CombPolyhedron) -> usize {
    (0..p.face_count()).max_by_key(|&f| (p.faces()[f].len(), std::cmp::Reverse(f))).unwrap_or(0)
}

/// Radii tried in turn for compact starting points.
const COMPACT_RADII: [f64; 4] = [0.9, 0.8, 0.95, 0.7];

fn caps_to_normals(p: &CombPolyhedron, centers: &[[f64; 3]]) -> Vec<MinkowskiVec> {
    let mut total = 0.0;
    let mut count = 0;
    for i in 0..p.face_count() {
        for j in p.face_neighbors(i) {
            let (a, b) = (centers[i], centers[j]);
            total += (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0).acos();
            count += 1;
        }
    }
    let mean = total / count as f64;
    let cos_r = mean.cos().max(0.05).sqrt();
    let sin_r = (1.0 - cos_r * cos_r).sqrt();
    centers.iter().map(|u| MinkowskiVec::new(cos_r, u[0], u[1], u[2]) * (1.0 / sin_r)).collect()
}

/// Least-squares plane `a·x = b` (|a| = 1) through each face's points, as the
/// unit normal `(b, a) / sqrt(1 - b²)` with the remaining points inside. The
/// points are first scaled by `radius`: 1 puts them at infinity, smaller
/// values inside the ball.
fn fitted_planes(p: &CombPolyhedron, pts: &[[f64; 3]], radius: f64) -> Vec<MinkowskiVec> {
    let mut all = [0.0; 3];
    for q in pts {
        for k in 0..3 {
            all[k] += q[k] / pts.len() as f64;
        }
    }
    p.faces()
        .iter()
        .map(|face| {
            let mut mean = [0.0; 3];
            for &v in face {
                for k in 0..3 {
                    mean[k] += pts[v][k] / face.len() as f64;
                }
            }
            let mut cov = nalgebra::Matrix3::<f64>::zeros();
            for &v in face {
                let d = nalgebra::Vector3::new(pts[v][0] - mean[0], pts[v][1] - mean[1], pts[v][2] - mean[2]);
                cov += d * d.transpose();
            }
            let eig = cov.symmetric_eigen();
            let k = eig.eigenvalues.imin();
            let mut a = [eig.eigenvectors[(0, k)], eig.eigenvectors[(1, k)], eig.eigenvectors[(2, k)]];
            let dot = |u: &[f64; 3], w: &[f64; 3]| u[0] * w[0] + u[1] * w[1] + u[2] * w[2];
            let mut b = dot(&a, &mean);
            // the polyhedron's centroid must satisfy a·x < b
            if dot(&a, &all) > b {
                a = a.map(|x| -x);
                b = -b;
            }
            let b = (radius * b).clamp(-0.95, 0.95);
            MinkowskiVec::new(b, a[0], a[1], a[2]) * (1.0 / (1.0 - b * b).sqrt())
        })
        .collect()
}

/// Starting point for restart `attempt`: the embedding is rebuilt around a
/// different outer cycle and jittered.
fn restart_guess(p: &CombPolyhedron, attempt: usize, rng: &mut ChaCha8Rng) -> Vec<MinkowskiVec> {
    let amplitude = 0.01 * attempt as f64;
    let jitter = |pts: &mut Vec<[f64; 3]>, rng: &mut ChaCha8Rng| {
        for c in pts.iter_mut() {
            for k in 0..3 {
                c[k] += amplitude * rng.gen_range(-1.0..1.0);
            }
            let len = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            for k in 0..3 {
                c[k] /= len;
            }
        }
    };
    match p.klass() {
        Class::Compact if attempt % 2 == 1 => {
            let mut centers = face_centers(p, attempt % p.vertex_count());
            jitter(&mut centers, rng);
            caps_to_normals(p, &centers)
        }
        Class::Compact => {
            let mut pts = vertex_points(p, attempt % p.face_count());
            jitter(&mut pts, rng);
            fitted_planes(p, &pts, COMPACT_RADII[(attempt / 2) % COMPACT_RADII.len()])
        }
        Class::Ideal => {
            let mut pts = vertex_points(p, attempt % p.face_count());
            jitter(&mut pts, rng);
            fitted_planes(p, &pts, 1.0)
        }
    }
}

fn apply(m: &Matrix4<f64>, v: &MinkowskiVec) -> MinkowskiVec {
    MinkowskiVec::from_na(m * v.to_na())
}

/// `M^{-1}` for a matrix whose columns form a Lorentz frame.
fn lorentz_inverse(m: &Matrix4<f64>) -> Matrix4<f64> {
    let eta = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
    eta * m.transpose() * eta
}

fn unit(v: MinkowskiVec) -> MinkowskiVec {
    v * (1.0 / v.norm2().abs().sqrt())
}

/// Faces pinned to the standard frame, with their pinned normals.
fn pinned_frame(p: &CombPolyhedron) -> Vec<(usize, MinkowskiVec)> {
    let fs = p.vertex_faces(0);
    match p.klass() {
        Class::Compact => vec![
            (fs[0], MinkowskiVec::new(0.0, 0.0, 0.0, 1.0)),
            (fs[1], MinkowskiVec::new(0.0, 1.0, 0.0, 0.0)),
            (fs[2], MinkowskiVec::new(0.0, 0.0, 1.0, 0.0)),
        ],
        Class::Ideal => vec![
            (fs[0], MinkowskiVec::new(0.0, 0.0, 0.0, 1.0)),
            (fs[1], MinkowskiVec::new(0.0, 1.0, 0.0, 0.0)),
            (fs[2], MinkowskiVec::new(1.0, 0.0, 1.0, -1.0)),
        ],
    }
}

/// Moves a draft by an isometry so the pinned faces sit close to their
/// standard normals, then sets them exactly.
fn to_gauge(p: &CombPolyhedron, draft: &[MinkowskiVec]) -> Vec<MinkowskiVec> {
    let pins = pinned_frame(p);
    let (fa, fb, fc) = (pins[0].0, pins[1].0, pins[2].0);
    let a = unit(draft[fa]);
    let b = unit(draft[fb] - a * draft[fb].dot(&a));
    let transform = match p.klass() {
        Class::Compact => {
            let c0 = draft[fc] - a * draft[fc].dot(&a) - b * draft[fc].dot(&b);
            let c = unit(c0);
            let mut tau = unit(MinkowskiVec::orthogonal_to(&a, &b, &c));
            if tau.t < 0.0 {
                tau = -tau;
            }
            let m = Matrix4::from_columns(&[tau.to_na(), b.to_na(), c.to_na(), a.to_na()]);
            lorentz_inverse(&m)
        }
        Class::Ideal => {
            let origin = MinkowskiVec::new(1.0, 0.0, 0.0, 0.0);
            let tau = unit(origin - a * origin.dot(&a) - b * origin.dot(&b));
            let mut sigma = unit(MinkowskiVec::orthogonal_to(&a, &b, &tau));
            let n = draft[fc] + a;
            if n.dot(&sigma) < 0.0 {
                sigma = -sigma;
            }
            let m = Matrix4::from_columns(&[tau.to_na(), b.to_na(), sigma.to_na(), a.to_na()]);
            let inv = lorentz_inverse(&m);
            let nn = apply(&inv, &n);
            // nn ≈ s (1, 0, 1, 0); a boost along y rescales that null ray
            let s = (0.5 * (nn.t + nn.y)).max(1e-6);
            let phi = s.ln();
            let (ch, sh) = (phi.cosh(), phi.sinh());
            let boost = Matrix4::new(ch, 0.0, -sh, 0.0, 0.0, 1.0, 0.0, 0.0, -sh, 0.0, ch, 0.0, 0.0, 0.0, 0.0, 1.0);
            boost * inv
        }
    };
    let mut out: Vec<MinkowskiVec> = draft.iter().map(|v| apply(&transform, v)).collect();
    for (face, normal) in pins {
        out[face] = normal;
    }
    out
}

struct Solver<'a> {
    cons: &'a [Constraint],
    /// Column block of each face, `None` when pinned.
    block: Vec<Option<usize>>,
    unknowns: usize,
}

impl<'a> Solver<'a> {
    fn new(cons: &'a [Constraint], faces: usize, pinned: &[usize]) -> Self {
        let mut block = vec![None; faces];
        let mut k = 0;
        for (i, b) in block.iter_mut().enumerate() {
            if !pinned.contains(&i) {
                *b = Some(k);
                k += 1;
            }
        }
        Solver { cons, block, unknowns: 4 * k }
    }

    /// Constraints that involve at least one free face.
    fn active(&self) -> impl Iterator<Item = &Constraint> {
        self.cons.iter().filter(|c| self.block[c.i].is_some() || self.block[c.j].is_some())
    }

    fn residuals(&self, e: &[MinkowskiVec]) -> DVector<f64> {
        DVector::from_iterator(self.active().count(), self.active().map(|c| e[c.i].dot(&e[c.j]) - c.target))
    }

    fn jacobian(&self, e: &[MinkowskiVec]) -> DMatrix<f64> {
        let rows = self.active().count();
        let mut jac = DMatrix::zeros(rows, self.unknowns);
        for (r, c) in self.active().enumerate() {
            let mut put = |face: usize, other: &MinkowskiVec, factor: f64| {
                if let Some(b) = self.block[face] {
                    let l = other.lower();
                    for k in 0..4 {
                        jac[(r, 4 * b + k)] += factor * l[k];
                    }
                }
            };
            if c.i == c.j {
                put(c.i, &e[c.i], 2.0);
            } else {
                put(c.i, &e[c.j], 1.0);
                put(c.j, &e[c.i], 1.0);
            }
        }
        jac
    }

    fn step(&self, e: &[MinkowskiVec], delta: &DVector<f64>) -> Vec<MinkowskiVec> {
        let mut out = e.to_vec();
        for (face, b) in self.block.iter().enumerate() {
            if let Some(b) = b {
                let d = MinkowskiVec::new(delta[4 * b], delta[4 * b + 1], delta[4 * b + 2], delta[4 * b + 3]);
                out[face] = out[face] + d;
            }
        }
        out
    }

    /// Levenberg–Marquardt; returns the final normals and the largest
    /// residual.
    fn solve(&self, mut e: Vec<MinkowskiVec>, max_iterations: usize) -> (Vec<MinkowskiVec>, f64) {
        let mut r = self.residuals(&e);
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3;
        for _ in 0..max_iterations {
            if r.amax() < 1e-15 || !cost.is_finite() {
                break;
            }
            let jac = self.jacobian(&e);
            let jt = jac.transpose();
            let normal = &jt * &jac;
            let grad = &jt * &r;
            let mut improved = false;
            while lambda < 1e12 {
                let mut damped = normal.clone();
                for k in 0..self.unknowns {
                    damped[(k, k)] += lambda;
                }
                let Some(chol) = damped.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let delta = -chol.solve(&grad);
                let trial = self.step(&e, &delta);
                let tr = self.residuals(&trial);
                let tc = tr.norm_squared();
                if tc < cost {
                    e = trial;
                    r = tr;
                    cost = tc;
                    lambda = (lambda / 10.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 10.0;
            }
            if !improved {
                break;
            }
        }
        let res = r.amax();
        (e, if res.is_finite() { res } else { f64::INFINITY })
    }
}

fn compact_vertices(p: &CombPolyhedron, e: &[MinkowskiVec]) -> Result<Vec<MinkowskiVec>, RealizeError> {
    (0..p.vertex_count())
        .map(|v| {
            let fs = p.vertex_faces(v);
            let w = MinkowskiVec::orthogonal_to(&e[fs[0]], &e[fs[1]], &e[fs[2]]);
            let n2 = w.norm2();
            if n2 >= 0.0 || !n2.is_finite() {
                return Err(RealizeError::NotCompact(v));
            }
            let w = w * (1.0 / (-n2).sqrt());
            Ok(if w.t < 0.0 { -w } else { w })
        })
        .collect()
}

fn ideal_vertices(p: &CombPolyhedron, e: &[MinkowskiVec]) -> Vec<MinkowskiVec> {
    (0..p.vertex_count())
        .map(|v| {
            let fs = p.vertex_faces(v);
            let w = MinkowskiVec::orthogonal_to(&e[fs[0]], &e[fs[1]], &e[fs[2]]);
            w * (1.0 / w.t)
        })
        .collect()
}

/// Flips normals to point away from the barycenter of the vertices.
fn orient_outward(e: &mut [MinkowskiVec], vertices: &[MinkowskiVec]) {
    let c = vertices.iter().fold(MinkowskiVec::default(), |acc, v| acc + *v);
    for n in e.iter_mut() {
        if c.dot(n) > 0.0 {
            *n = -*n;
        }
    }
}

fn full_residual(cons: &[Constraint], e: &[MinkowskiVec]) -> f64 {
    cons.iter().map(|c| (e[c.i].dot(&e[c.j]) - c.target).abs()).fold(0.0, f64::max)
}

fn realize(p: &CombPolyhedron, options: &SolverOptions, tolerance: f64) -> Result<RealizedPolyhedron, RealizeError> {
    let cons = constraints(p);
    let pinned: Vec<usize> = pinned_frame(p).iter().map(|&(f, _)| f).collect();
    let solver = Solver::new(&cons, p.face_count(), &pinned);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut best_residual = f64::INFINITY;
    for attempt in 0..=options.max_restarts {
        let draft = if attempt == 0 {
            initial_guess(p)
        } else {
            restart_guess(p, attempt, &mut rng)
        };
        let (mut e, res) = solver.solve(to_gauge(p, &draft), options.max_iterations);
        best_residual = best_residual.min(res);
        if res > tolerance {
            continue;
        }
        let vertices = match p.klass() {
            Class::Compact => match compact_vertices(p, &e) {
                Ok(v) => v,
                Err(_) => continue,
            },
            Class::Ideal => ideal_vertices(p, &e),
        };
        orient_outward(&mut e, &vertices);
        let residual = full_residual(&cons, &e);
        let realized = RealizedPolyhedron { comb: p.clone(), normals: e, vertices, residual };
        if validate(&realized).is_valid() {
            return Ok(realized);
        }
    }
    Err(RealizeError::NonConvergence { attempts: options.max_restarts + 1, best_residual })
}

fn default_options(p: &CombPolyhedron) -> SolverOptions {
    SolverOptions::with_seed(canonical_code(p).digest())
}

/// Why a cubic map cannot be a compact right-angled polyhedron, if it cannot.
pub fn compact_obstruction(p: &CombPolyhedron) -> Option<String> {
    if p.vertex_count() < 20 {
        return Some(format!("{} vertices, at least 20 are needed", p.vertex_count()));
    }
    if let Some(f) = p.faces().iter().position(|f| f.len() < 5) {
        return Some(format!("face {f} has {} sides, at least 5 are needed", p.faces()[f].len()));
    }
    if !is_3_connected(p.skeleton()) {
        return Some("the graph is not 3-connected".into());
    }
    for k in [3, 4] {
        if has_prismatic_circuit(p, k) {
            return Some(format!("there is a prismatic {k}-circuit"));
        }
    }
    None
}

pub fn realize_compact(p: &CombPolyhedron) -> Result<RealizedPolyhedron, RealizeError> {
    realize_compact_with(p, &default_options(p))
}

pub fn realize_compact_with(p: &CombPolyhedron, options: &SolverOptions) -> Result<RealizedPolyhedron, RealizeError> {
    if p.klass() != Class::Compact {
        return Err(RealizeError::WrongClass { expected: Class::Compact });
    }
    if let Some(why) = compact_obstruction(p) {
        return Err(RealizeError::NotRealizable(why));
    }
    realize(p, options, 1e-12)
}

pub fn realize_ideal(p: &CombPolyhedron) -> Result<RealizedPolyhedron, RealizeError> {
    realize_ideal_with(p, &default_options(p))
}

/// Ideal realization. Failure after all restarts is reported as
/// [`RealizeError::NotRealizable`]: the solver is what decides admissibility.
pub fn realize_ideal_with(p: &CombPolyhedron, options: &SolverOptions) -> Result<RealizedPolyhedron, RealizeError> {
    if p.klass() != Class::Ideal {
        return Err(RealizeError::WrongClass { expected: Class::Ideal });
    }
    if p.vertex_count() < 6 || !is_3_connected(p.skeleton()) {
        return Err(RealizeError::NotRealizable("needs a 3-connected map with at least 6 vertices".into()));
    }
    realize(p, options, 1e-10).map_err(|e| match e {
        RealizeError::NonConvergence { attempts, best_residual } => RealizeError::NotRealizable(format!(
            "no realization found in {attempts} attempts (best residual {best_residual:e})"
        )),
        other => other,
    })
}

/// Realizes `p` according to its class.
pub fn realize_polyhedron(p: &CombPolyhedron) -> Result<RealizedPolyhedron, RealizeError> {
    match p.klass() {
        Class::Compact => realize_compact(p),
        Class::Ideal => realize_ideal(p),
    }
}

/// Tolerances used by [`validate`].
pub const DIHEDRAL_TOL: f64 = 1e-10;
pub const INCIDENCE_TOL: f64 = 1e-9;
/// Planes farther than this from a vertex (relative to the vector sizes) are
/// counted as not containing it when comparing face lattices.
const LATTICE_GAP: f64 = 1e-6;

/// Outcome of checking a realization against every invariant.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub max_dihedral_error: f64,
    pub max_unit_norm_error: f64,
    pub max_incidence_error: f64,
    pub max_vertex_norm_error: f64,
    pub max_tangency_error: f64,
    /// `(face, vertex)` pairs with the vertex on the wrong side of the plane.
    pub convexity_violations: Vec<(usize, usize)>,
    /// `(face, vertex)` pairs whose geometric and combinatorial incidence differ.
    pub lattice_mismatches: Vec<(usize, usize)>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn validate(r: &RealizedPolyhedron) -> ValidationReport {
    let p = &r.comb;
    let e = &r.normals;
    let mut rep = ValidationReport::default();
    if e.len() != p.face_count() || r.vertices.len() != p.vertex_count() {
        rep.failures.push("wrong number of normals or vertices".into());
        return rep;
    }
    for i in 0..p.face_count() {
        rep.max_unit_norm_error = rep.max_unit_norm_error.max((e[i].norm2() - 1.0).abs());
        for j in p.face_neighbors(i) {
            rep.max_dihedral_error = rep.max_dihedral_error.max(e[i].dot(&e[j]).abs());
        }
    }
    let ideal = p.klass() == Class::Ideal;
    for (v, x) in r.vertices.iter().enumerate() {
        let target = if ideal { 0.0 } else { -1.0 };
        rep.max_vertex_norm_error = rep.max_vertex_norm_error.max((x.norm2() - target).abs());
        let fs = p.vertex_faces(v);
        for &f in &fs {
            rep.max_incidence_error = rep.max_incidence_error.max(x.dot(&e[f]).abs());
        }
        if ideal {
            for (a, b) in [(fs[0], fs[2]), (fs[1], fs[3])] {
                rep.max_tangency_error = rep.max_tangency_error.max((e[a].dot(&e[b]) + 1.0).abs());
            }
        }
        for f in 0..p.face_count() {
            let d = x.dot(&e[f]);
            let scale = x.max_abs() * e[f].max_abs();
            let on_plane = d.abs() <= LATTICE_GAP * scale.max(1.0);
            if on_plane != fs.contains(&f) {
                rep.lattice_mismatches.push((f, v));
            }
            if !fs.contains(&f) && d >= 0.0 {
                rep.convexity_violations.push((f, v));
            }
        }
    }
    if !(rep.max_dihedral_error <= DIHEDRAL_TOL) {
        rep.failures.push(format!("dihedral error {:e} exceeds {DIHEDRAL_TOL:e}", rep.max_dihedral_error));
    }
    if !(rep.max_unit_norm_error <= DIHEDRAL_TOL) {
        rep.failures.push(format!("normal length error {:e} exceeds {DIHEDRAL_TOL:e}", rep.max_unit_norm_error));
    }
    if !(rep.max_incidence_error <= INCIDENCE_TOL) {
        rep.failures.push(format!("incidence error {:e} exceeds {INCIDENCE_TOL:e}", rep.max_incidence_error));
    }
    if !(rep.max_vertex_norm_error <= INCIDENCE_TOL) {
        rep.failures.push(format!("vertex norm error {:e} exceeds {INCIDENCE_TOL:e}", rep.max_vertex_norm_error));
    }
    if ideal && !(rep.max_tangency_error <= INCIDENCE_TOL) {
        rep.failures.push(format!("tangency error {:e} exceeds {INCIDENCE_TOL:e}", rep.max_tangency_error));
    }
    if !ideal && r.vertices.iter().any(|x| x.t <= 0.0) {
        rep.failures.push("a vertex lies on the past sheet".into());
    }
    if !rep.convexity_violations.is_empty() {
        rep.failures.push(format!("{} convexity violations", rep.convexity_violations.len()));
    }
    if !rep.lattice_mismatches.is_empty() {
        rep.failures.push(format!("{} face-lattice mismatches", rep.lattice_mismatches.len()));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::shapes;

    #[test]
    fn minkowski_basics() {
        let a = MinkowskiVec::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(a.norm2(), -1.0);
        let (x, y, z) =
            (MinkowskiVec::new(0.0, 1.0, 0.0, 0.0), MinkowskiVec::new(0.0, 0.0, 1.0, 0.0), MinkowskiVec::new(0.0, 0.0, 0.0, 1.0));
        let w = MinkowskiVec::orthogonal_to(&x, &y, &z);
        assert!(w.x == 0.0 && w.y == 0.0 && w.z == 0.0 && w.t != 0.0);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[1.0,0.0,0.0,0.0]");
    }

    #[test]
    fn centering_spreads_centers() {
        let d = shapes::dodecahedron();
        let c = face_centers(&d, 0);
        let mut m = [0.0; 3];
        for q in &c {
            for k in 0..3 {
                m[k] += q[k];
            }
        }
        assert!(m.iter().all(|x| x.abs() < 1e-6));
    }

    #[test]
    fn guess_is_deterministic_and_roughly_right_angled() {
        for p in [shapes::octahedron(), shapes::dodecahedron()] {
            let g = initial_guess(&p);
            assert_eq!(g, initial_guess(&p));
            for i in 0..p.face_count() {
                assert!((g[i].norm2() - 1.0).abs() < 1e-12);
                for j in p.face_neighbors(i) {
                    assert!(g[i].dot(&g[j]).abs() < 0.5, "faces {i} {j}: {}", g[i].dot(&g[j]));
                }
            }
        }
    }

    #[test]
    fn octahedron_realizes() {
        let r = realize_ideal(&shapes::octahedron()).unwrap();
        let rep = validate(&r);
        assert!(rep.is_valid(), "{rep:?}");
        assert!(r.residual <= 1e-10);
        // opposite faces at a vertex are tangent with outward normals
        let fs = r.comb.vertex_faces(3);
        assert!((r.normals[fs[0]].dot(&r.normals[fs[2]]) + 1.0).abs() < 1e-9);
    }

    #[test]
    fn dodecahedron_realizes() {
        let r = realize_compact(&shapes::dodecahedron()).unwrap();
        assert!(validate(&r).is_valid());
        assert!(r.residual <= 1e-12);
        for v in &r.vertices {
            assert!((v.norm2() + 1.0).abs() < 1e-9 && v.t > 0.0);
        }
    }

    #[test]
    fn compact_prefilter() {
        assert!(matches!(realize_compact(&shapes::cube()), Err(RealizeError::NotRealizable(_))));
        assert!(matches!(realize_compact(&shapes::octahedron()), Err(RealizeError::WrongClass { .. })));
    }

    #[test]
    fn validation_catches_damage() {
        let r = realize_compact(&shapes::dodecahedron()).unwrap();
        let mut bent = r.clone();
        bent.normals[4] = bent.normals[4] + MinkowskiVec::new(1e-3, 0.0, 0.0, 0.0);
        assert!(validate(&bent).max_dihedral_error > DIHEDRAL_TOL);
        assert!(!validate(&bent).is_valid());
        let mut swapped = r.clone();
        swapped.vertices.swap(0, 10);
        let rep = validate(&swapped);
        assert!(!rep.lattice_mismatches.is_empty());
    }

    #[test]
    fn gram_matrix_is_seed_independent() {
        let p = shapes::dodecahedron();
        let a = realize_compact_with(&p, &SolverOptions::with_seed(1)).unwrap().gram_matrix();
        let mut opts = SolverOptions::with_seed(99);
        opts.max_restarts = 3;
        let b = realize_compact_with(&p, &opts).unwrap().gram_matrix();
        for i in 0..a.len() {
            for j in 0..a.len() {
                assert!((a[i][j] - b[i][j]).abs() < 1e-9);
            }
        }
    }
}
