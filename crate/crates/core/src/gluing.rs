//! Gluing copies of a polyhedron along a face.
//!
//! Reflecting a right-angled polyhedron in one of its faces and taking the
//! union gives a right-angled polyhedron of twice the volume: every face that
//! met the mirror plane at a right angle continues straight through it. The
//! surgery here is purely combinatorial: the mirrored copy has all its
//! rotations reversed, the glued face disappears, and
//!
//! * for ideal polyhedra its vertices stay as shared 4-valent vertices
//!   (`V' = 2V - n`), each faces adjacent to it merging into a `(2m - 2)`-gon;
//! * for compact polyhedra its vertices disappear and each outside neighbor
//!   is joined to its mirror image (`V' = 2V - 2n`), faces adjacent to it
//!   merging into `(2m - 4)`-gons.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{Class, CombError, CombPolyhedron, RotationSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GlueError {
    #[error("expected a {expected} polyhedron")]
    WrongClass { expected: Class },
    #[error("face {0} does not exist")]
    BadFace(usize),
    #[error("faces {0} and {1} must be distinct and not adjacent")]
    AdjacentFaces(usize, usize),
    #[error("surgery produced an invalid map: {0}")]
    Surgery(#[from] CombError),
}

/// A glued polyhedron with its bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlueResult {
    #[serde(skip)]
    pub polyhedron: CombPolyhedron,
    /// Vertex count predicted from the input, checked against the result.
    pub vertex_count_check: usize,
    /// Faces of the input adjacent to a glued face, with the gonality of the
    /// face they became.
    pub merged_faces: Vec<(usize, usize)>,
    /// Volume of the result divided by the volume of the input.
    pub volume_factor: usize,
    /// For every vertex of the input, its label in the result if the vertex
    /// belongs to the first copy and survives.
    pub first_copy_labels: Vec<Option<usize>>,
}

/// Rotations of the assembly under construction; deleted vertices are `None`.
struct Assembly {
    rot: Vec<Option<Vec<usize>>>,
}

/// One copy of the input inside an [`Assembly`].
#[derive(Clone)]
struct Copy {
    labels: Vec<usize>,
    mirrored: bool,
}

impl Assembly {
    fn new(p: &CombPolyhedron) -> (Self, Copy) {
        let rot = p.skeleton().rotations().iter().cloned().map(Some).collect();
        let labels = (0..p.vertex_count()).collect();
        (Assembly { rot }, Copy { labels, mirrored: false })
    }

    /// Attaches a mirror image of `end` along face `f` of the input.
    fn attach(&mut self, p: &CombPolyhedron, end: &Copy, f: usize) -> Copy {
        let face = &p.faces()[f];
        let on_face: BTreeSet<usize> = face.iter().copied().collect();
        let ideal = p.klass() == Class::Ideal;
        let mut labels = vec![usize::MAX; p.vertex_count()];
        for v in 0..p.vertex_count() {
            if on_face.contains(&v) {
                if ideal {
                    labels[v] = end.labels[v];
                }
            } else {
                labels[v] = self.rot.len();
                self.rot.push(None);
            }
        }
        let mirrored = !end.mirrored;
        let g = p.skeleton();
        let in_face = |x: usize| face.iter().any(|&u| end.labels[u] == x);
        // current neighbor of each face vertex off the face; after earlier
        // gluings it may belong to another copy
        let across: Vec<usize> = (0..p.vertex_count())
            .map(|w| match (on_face.contains(&w) && !ideal).then(|| &self.rot[end.labels[w]]) {
                Some(Some(r)) => {
                    r.iter().copied().find(|&x| !in_face(x)).expect("cubic face vertex has an outside neighbor")
                }
                _ => usize::MAX,
            })
            .collect();
        for v in (0..p.vertex_count()).filter(|v| !on_face.contains(v)) {
            let mut r: Vec<usize> = g
                .neighbors(v)
                .iter()
                .map(|&u| match (on_face.contains(&u), ideal) {
                    // the edge to the erased face vertex now runs across the mirror
                    (true, false) => across[u],
                    _ => labels[u],
                })
                .collect();
            if mirrored {
                r.reverse();
            }
            self.rot[labels[v]] = Some(r);
        }
        for &w in face {
            let outside: Vec<usize> = g.neighbors(w).iter().copied().filter(|u| !on_face.contains(u)).collect();
            if ideal {
                let old = self.rot[end.labels[w]].take().expect("shared vertex is alive");
                // drop the two face neighbors: rotate to start right after them
                let k = old.len();
                let start = (0..k).find(|&i| in_face(old[i]) && in_face(old[(i + 1) % k])).expect("face corner");
                let half: Vec<usize> = (2..k).map(|d| old[(start + d) % k]).collect();
                let mut new_half: Vec<usize> = half
                    .iter()
                    .map(|&x| {
                        let src = outside.iter().find(|&&u| end.labels[u] == x).expect("outside neighbor");
                        labels[*src]
                    })
                    .collect();
                new_half.reverse();
                self.rot[end.labels[w]] = Some(half.into_iter().chain(new_half).collect());
            } else {
                let r = self.rot[across[w]].as_mut().expect("outside neighbor is alive");
                for slot in r.iter_mut() {
                    if *slot == end.labels[w] {
                        *slot = labels[outside[0]];
                    }
                }
                self.rot[end.labels[w]] = None;
            }
        }
        Copy { labels, mirrored }
    }

    /// Compacts labels and builds the polyhedron; returns the old-to-new map.
    fn finish(self, klass: Class) -> Result<(CombPolyhedron, Vec<Option<usize>>), GlueError> {
        let mut map = vec![None; self.rot.len()];
        let mut next = 0;
        for (v, r) in self.rot.iter().enumerate() {
            if r.is_some() {
                map[v] = Some(next);
                next += 1;
            }
        }
        let rot: Vec<Vec<usize>> = self
            .rot
            .into_iter()
            .flatten()
            .map(|r| r.into_iter().map(|u| map[u].expect("neighbor survives")).collect())
            .collect();
        let p = CombPolyhedron::with_class(RotationSystem::new(rot)?, klass)?;
        Ok((p, map))
    }
}

fn check_face(p: &CombPolyhedron, f: usize) -> Result<(), GlueError> {
    if f < p.face_count() {
        Ok(())
    } else {
        Err(GlueError::BadFace(f))
    }
}

/// Gonality in `result` of each input face adjacent to one of `glued`.
fn merged_faces(p: &CombPolyhedron, glued: &[usize], result: &CombPolyhedron, labels: &[Option<usize>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..p.face_count() {
        if glued.contains(&i) || !glued.iter().any(|&f| p.faces_adjacent(i, f)) {
            continue;
        }
        let face = &p.faces()[i];
        let k = face.len();
        // any dart of the face whose edge survives identifies the merged face
        let dart = (0..k).map(|j| (face[j], face[(j + 1) % k])).find_map(|(u, v)| {
            let (a, b) = (labels[u]?, labels[v]?);
            result.skeleton().has_edge(a, b).then_some((a, b))
        });
        if let Some((a, b)) = dart {
            out.push((i, result.faces()[result.dart_face(a, b)].len()));
        }
    }
    out
}

fn expected_vertices(p: &CombPolyhedron, n: usize) -> usize {
    match p.klass() {
        Class::Ideal => 2 * p.vertex_count() - n,
        Class::Compact => 2 * p.vertex_count() - 2 * n,
    }
}

fn double(p: &CombPolyhedron, f: usize) -> Result<GlueResult, GlueError> {
    check_face(p, f)?;
    let (mut asm, first) = Assembly::new(p);
    asm.attach(p, &first, f);
    let (polyhedron, map) = asm.finish(p.klass())?;
    let first_copy_labels: Vec<Option<usize>> = (0..p.vertex_count()).map(|v| map[v]).collect();
    Ok(GlueResult {
        merged_faces: merged_faces(p, &[f], &polyhedron, &first_copy_labels),
        vertex_count_check: expected_vertices(p, p.faces()[f].len()),
        volume_factor: 2,
        first_copy_labels,
        polyhedron,
    })
}

/// Doubles an ideal polyhedron along face `f`.
pub fn double_ideal(p: &CombPolyhedron, f: usize) -> Result<GlueResult, GlueError> {
    if p.klass() != Class::Ideal {
        return Err(GlueError::WrongClass { expected: Class::Ideal });
    }
    double(p, f)
}

/// Doubles a compact polyhedron along face `f`.
pub fn double_compact(p: &CombPolyhedron, f: usize) -> Result<GlueResult, GlueError> {
    if p.klass() != Class::Compact {
        return Err(GlueError::WrongClass { expected: Class::Compact });
    }
    double(p, f)
}

/// `2k + 1` copies of a compact polyhedron in a row, glued alternately along
/// the disjoint faces `f1` and `f2`.
pub fn chain_glue(p: &CombPolyhedron, f1: usize, f2: usize, k: usize) -> Result<GlueResult, GlueError> {
    if p.klass() != Class::Compact {
        return Err(GlueError::WrongClass { expected: Class::Compact });
    }
    check_face(p, f1)?;
    check_face(p, f2)?;
    if f1 == f2 || p.faces_adjacent(f1, f2) {
        return Err(GlueError::AdjacentFaces(f1, f2));
    }
    let (n1, n2) = (p.faces()[f1].len(), p.faces()[f2].len());
    let (mut asm, first) = Assembly::new(p);
    // the copy at each end of the row, and the face it exposes
    let (mut left, mut right) = (first.clone(), first);
    let (mut left_face, mut right_face) = (f1, f2);
    for _ in 0..k {
        left = asm.attach(p, &left, left_face);
        right = asm.attach(p, &right, right_face);
        // a copy glued along one face exposes the other
        let other = |f: usize| if f == f1 { f2 } else { f1 };
        left_face = other(left_face);
        right_face = other(right_face);
    }
    let (polyhedron, map) = asm.finish(Class::Compact)?;
    let first_copy_labels: Vec<Option<usize>> = (0..p.vertex_count()).map(|v| map[v]).collect();
    let glued: Vec<usize> = if k == 0 { vec![] } else { vec![f1, f2] };
    Ok(GlueResult {
        merged_faces: merged_faces(p, &glued, &polyhedron, &first_copy_labels),
        vertex_count_check: (2 * k + 1) * p.vertex_count() - 2 * k * n1 - 2 * k * n2,
        volume_factor: 2 * k + 1,
        first_copy_labels,
        polyhedron,
    })
}
