use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A face as a cyclic sequence of vertex ids.
pub type Face = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombError {
    #[error("map has no vertices")]
    Empty,
    #[error("vertex {0} has a loop")]
    Loop(usize),
    #[error("parallel edges between {0} and {1}")]
    ParallelEdge(usize, usize),
    #[error("vertex {0} lists out-of-range neighbor {1}")]
    BadVertex(usize, usize),
    #[error("edge {0}-{1} is listed only at one endpoint")]
    Asymmetric(usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("map is not planar (Euler characteristic {0})")]
    NonPlanar(i64),
    #[error("operation requires a {expected} polyhedron")]
    WrongClass { expected: Class },
    #[error("vertex degrees match neither class (all 3 or all 4)")]
    MixedDegrees,
    #[error("Euler identity for the {0} class fails")]
    EulerIdentity(Class),
    #[error("face {0} does not exist")]
    BadFace(usize),
}

/// Combinatorial class of a right-angled polyhedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Ideal,
    Compact,
}

impl Class {
    /// Vertex degree forced by the class.
    pub fn degree(self) -> usize {
        match self {
            Class::Ideal => 4,
            Class::Compact => 3,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Ideal => "ideal",
            Class::Compact => "compact",
        })
    }
}

impl std::str::FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(Class::Ideal),
            "compact" => Ok(Class::Compact),
            other => Err(format!("unknown class `{other}` (expected ideal or compact)")),
        }
    }
}

/// Cyclic neighbor orders of a simple connected graph.
///
/// The rotation at each vertex lists its neighbors in one rotational sense
/// (clockwise in the exchange format). Whether the map is spherical is decided
/// by [`trace_faces`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RotationSystem {
    neighbors: Vec<Vec<usize>>,
}

impl fmt::Debug for RotationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.neighbors.iter().enumerate()).finish()
    }
}

impl RotationSystem {
    /// Builds a rotation system, checking that the graph is simple, symmetric
    /// and connected.
    pub fn new(neighbors: Vec<Vec<usize>>) -> Result<Self, CombError> {
        let n = neighbors.len();
        if n == 0 {
            return Err(CombError::Empty);
        }
        for (v, rot) in neighbors.iter().enumerate() {
            for (i, &u) in rot.iter().enumerate() {
                if u >= n {
                    return Err(CombError::BadVertex(v, u));
                }
                if u == v {
                    return Err(CombError::Loop(v));
                }
                if rot[..i].contains(&u) {
                    return Err(CombError::ParallelEdge(v, u));
                }
                if !neighbors[u].contains(&v) {
                    return Err(CombError::Asymmetric(v, u));
                }
            }
        }
        let rs = RotationSystem { neighbors };
        if !rs.is_connected_without(&[]) {
            return Err(CombError::Disconnected);
        }
        Ok(rs)
    }

    pub(crate) fn from_raw(neighbors: Vec<Vec<usize>>) -> Self {
        debug_assert!(RotationSystem::new(neighbors.clone()).is_ok());
        RotationSystem { neighbors }
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn min_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.neighbors.iter().all(|r| r.len() == d)
    }

    /// Index of `u` in the rotation at `v`.
    pub fn position(&self, v: usize, u: usize) -> Option<usize> {
        self.neighbors[v].iter().position(|&w| w == u)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].contains(&v)
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .neighbors
            .iter()
            .enumerate()
            .flat_map(|(u, rot)| rot.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Neighbor following `u` in the rotation at `v`.
    pub fn next(&self, v: usize, u: usize) -> usize {
        let rot = &self.neighbors[v];
        let i = self.position(v, u).expect("not a neighbor");
        rot[(i + 1) % rot.len()]
    }

    /// Neighbor preceding `u` in the rotation at `v`.
    pub fn prev(&self, v: usize, u: usize) -> usize {
        let rot = &self.neighbors[v];
        let i = self.position(v, u).expect("not a neighbor");
        rot[(i + rot.len() - 1) % rot.len()]
    }

    /// Same graph with every cyclic order reversed.
    pub fn mirror(&self) -> Self {
        RotationSystem {
            neighbors: self
                .neighbors
                .iter()
                .map(|r| r.iter().rev().copied().collect())
                .collect(),
        }
    }

    /// Relabels vertices; `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.vertex_count());
        let mut neighbors = vec![Vec::new(); perm.len()];
        for (old, rot) in self.neighbors.iter().enumerate() {
            neighbors[perm[old]] = rot.iter().map(|&u| perm[u]).collect();
        }
        RotationSystem { neighbors }
    }

    /// Connectivity of the graph with `removed` vertices deleted.
    pub(crate) fn is_connected_without(&self, removed: &[usize]) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        for &r in removed {
            seen[r] = true;
        }
        let Some(start) = (0..n).find(|&v| !seen[v]) else {
            return true;
        };
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut reached = 1 + removed.len();
        while let Some(v) = queue.pop_front() {
            for &u in &self.neighbors[v] {
                if !seen[u] {
                    seen[u] = true;
                    reached += 1;
                    queue.push_back(u);
                }
            }
        }
        reached == n
    }

    /// Deletes the edge `u`-`v` in place. The caller is responsible for
    /// connectivity.
    pub(crate) fn remove_edge(&mut self, u: usize, v: usize) {
        self.neighbors[u].retain(|&w| w != v);
        self.neighbors[v].retain(|&w| w != u);
    }
}

/// Result of tracing the faces of a rotation system.
#[derive(Clone, Debug)]
pub(crate) struct Tracing {
    pub faces: Vec<Face>,
    /// `dart_face[v][i]` is the face containing the dart from `v` to its
    /// `i`-th neighbor.
    pub dart_face: Vec<Vec<usize>>,
}

pub(crate) fn trace(rs: &RotationSystem) -> Tracing {
    let n = rs.vertex_count();
    let mut dart_face: Vec<Vec<usize>> = rs.neighbors.iter().map(|r| vec![usize::MAX; r.len()]).collect();
    let mut faces = Vec::new();
    for v0 in 0..n {
        for i0 in 0..rs.degree(v0) {
            if dart_face[v0][i0] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut face = Vec::new();
            let (mut v, mut i) = (v0, i0);
            while dart_face[v][i] == usize::MAX {
                dart_face[v][i] = id;
                face.push(v);
                let u = rs.neighbors[v][i];
                let j = rs.position(u, v).expect("symmetric");
                // continue with the successor of the arrival edge at `u`
                v = u;
                i = (j + 1) % rs.degree(u);
            }
            faces.push(face);
        }
    }
    Tracing { faces, dart_face }
}

/// Traces the faces of the embedding; errors unless it is spherical.
///
/// Each directed edge lies on exactly one face. A face is listed by the tails
/// of its darts, starting from the lowest-indexed unvisited dart.
pub fn trace_faces(skeleton: &RotationSystem) -> Result<Vec<Face>, CombError> {
    let t = trace(skeleton);
    let chi = skeleton.vertex_count() as i64 - skeleton.edge_count() as i64 + t.faces.len() as i64;
    if chi != 2 {
        return Err(CombError::NonPlanar(chi));
    }
    Ok(t.faces)
}

/// Face-count histogram `k -> p_k`.
pub type FaceVector = BTreeMap<usize, usize>;

pub(crate) fn histogram(faces: &[Face]) -> FaceVector {
    let mut fv = FaceVector::new();
    for f in faces {
        *fv.entry(f.len()).or_insert(0) += 1;
    }
    fv
}

/// A combinatorial right-angled polyhedron candidate: a spherical map whose
/// vertices all have degree 4 (ideal) or 3 (compact).
#[derive(Clone, Debug)]
pub struct CombPolyhedron {
    skeleton: RotationSystem,
    faces: Vec<Face>,
    klass: Class,
    face_vector: FaceVector,
    dart_face: Vec<Vec<usize>>,
}

impl PartialEq for CombPolyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.skeleton == other.skeleton && self.klass == other.klass
    }
}

impl CombPolyhedron {
    /// Traces faces and infers the class from the vertex degrees.
    pub fn new(skeleton: RotationSystem) -> Result<Self, CombError> {
        let klass = if skeleton.is_regular(4) {
            Class::Ideal
        } else if skeleton.is_regular(3) {
            Class::Compact
        } else {
            return Err(CombError::MixedDegrees);
        };
        Self::with_class(skeleton, klass)
    }

    pub fn with_class(skeleton: RotationSystem, klass: Class) -> Result<Self, CombError> {
        if !skeleton.is_regular(klass.degree()) {
            return Err(CombError::MixedDegrees);
        }
        let t = trace(&skeleton);
        let (v, e, f) = (skeleton.vertex_count(), skeleton.edge_count(), t.faces.len());
        let chi = v as i64 - e as i64 + f as i64;
        if chi != 2 {
            return Err(CombError::NonPlanar(chi));
        }
        let euler_ok = match klass {
            Class::Ideal => v + 2 == f,
            Class::Compact => 2 * f == v + 4,
        };
        if !euler_ok {
            return Err(CombError::EulerIdentity(klass));
        }
        let face_vector = histogram(&t.faces);
        Ok(CombPolyhedron { skeleton, faces: t.faces, klass, face_vector, dart_face: t.dart_face })
    }

    pub fn skeleton(&self) -> &RotationSystem {
        &self.skeleton
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> Result<&Face, CombError> {
        self.faces.get(i).ok_or(CombError::BadFace(i))
    }

    pub fn klass(&self) -> Class {
        self.klass
    }

    pub fn vertex_count(&self) -> usize {
        self.skeleton.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.skeleton.edge_count()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_vector(&self) -> &FaceVector {
        &self.face_vector
    }

    /// Face containing the dart `u -> v`.
    pub fn dart_face(&self, u: usize, v: usize) -> usize {
        let i = self.skeleton.position(u, v).expect("not an edge");
        self.dart_face[u][i]
    }

    /// Faces around `v` in rotation order; consecutive entries share an edge.
    pub fn vertex_faces(&self, v: usize) -> Vec<usize> {
        self.dart_face[v].clone()
    }

    /// Faces across each edge of face `i`, in boundary order.
    pub fn face_neighbors(&self, i: usize) -> Vec<usize> {
        let f = &self.faces[i];
        (0..f.len())
            .map(|k| {
                let (a, b) = (f[k], f[(k + 1) % f.len()]);
                self.dart_face(b, a)
            })
            .collect()
    }

    pub fn faces_adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.face_neighbors(i).contains(&j)
    }

    /// Each undirected edge with the two faces on its sides.
    pub fn edge_faces(&self) -> Vec<((usize, usize), (usize, usize))> {
        self.skeleton
            .edges()
            .into_iter()
            .map(|(u, v)| ((u, v), (self.dart_face(u, v), self.dart_face(v, u))))
            .collect()
    }

    /// Mirror image: all cyclic orders reversed.
    pub fn mirror(&self) -> Self {
        CombPolyhedron::with_class(self.skeleton.mirror(), self.klass).expect("mirror preserves validity")
    }

    pub fn relabel(&self, perm: &[usize]) -> Self {
        CombPolyhedron::with_class(self.skeleton.relabel(perm), self.klass).expect("relabel preserves validity")
    }
}

/// Face-count histogram of a traced polyhedron.
pub fn face_vector(p: &CombPolyhedron) -> FaceVector {
    p.face_vector.clone()
}

/// `p_3 = 8 + sum_{k>=5} (k-4) p_k`, which every 4-regular spherical map
/// satisfies.
pub fn check_ideal_identity(p: &CombPolyhedron) -> Result<bool, CombError> {
    if p.klass != Class::Ideal {
        return Err(CombError::WrongClass { expected: Class::Ideal });
    }
    Ok(ideal_identity_holds(&p.face_vector))
}

/// `p_5 = 12 + sum_{k>=7} (k-6) p_k` for cubic maps without faces below 5.
pub fn check_compact_identity(p: &CombPolyhedron) -> Result<bool, CombError> {
    if p.klass != Class::Compact {
        return Err(CombError::WrongClass { expected: Class::Compact });
    }
    Ok(compact_identity_holds(&p.face_vector))
}

pub fn ideal_identity_holds(fv: &FaceVector) -> bool {
    let p3 = fv.get(&3).copied().unwrap_or(0) as i64;
    let extra: i64 = fv.iter().filter(|(&k, _)| k >= 5).map(|(&k, &c)| (k as i64 - 4) * c as i64).sum();
    fv.keys().all(|&k| k >= 3) && p3 == 8 + extra
}

pub fn compact_identity_holds(fv: &FaceVector) -> bool {
    let p5 = fv.get(&5).copied().unwrap_or(0) as i64;
    let extra: i64 = fv.iter().filter(|(&k, _)| k >= 7).map(|(&k, &c)| (k as i64 - 6) * c as i64).sum();
    fv.keys().all(|&k| k >= 5) && p5 == 12 + extra
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::shapes;

    #[test]
    fn rejects_non_simple_input() {
        assert_eq!(RotationSystem::new(vec![vec![0]]), Err(CombError::Loop(0)));
        assert_eq!(RotationSystem::new(vec![vec![1, 1], vec![0, 0]]), Err(CombError::ParallelEdge(0, 1)));
        assert_eq!(RotationSystem::new(vec![vec![1], vec![]]), Err(CombError::Asymmetric(0, 1)));
        assert_eq!(RotationSystem::new(vec![vec![1], vec![0], vec![]]), Err(CombError::Disconnected));
        assert_eq!(RotationSystem::new(vec![vec![3]]), Err(CombError::BadVertex(0, 3)));
    }

    #[test]
    fn octahedron_has_eight_triangles() {
        let faces = trace_faces(shapes::octahedron().skeleton()).unwrap();
        assert_eq!(faces.len(), 8);
        assert!(faces.iter().all(|f| f.len() == 3));
    }

    #[test]
    fn dodecahedron_has_twelve_pentagons() {
        let faces = trace_faces(shapes::dodecahedron().skeleton()).unwrap();
        assert_eq!(faces.len(), 12);
        assert!(faces.iter().all(|f| f.len() == 5));
    }

    #[test]
    fn every_dart_in_exactly_one_face() {
        let p = shapes::dodecahedron();
        let mut count = std::collections::HashMap::new();
        for f in p.faces() {
            for k in 0..f.len() {
                *count.entry((f[k], f[(k + 1) % f.len()])).or_insert(0) += 1;
            }
        }
        assert_eq!(count.len(), 2 * p.edge_count());
        assert!(count.values().all(|&c| c == 1));
    }

    #[test]
    fn k5_is_never_planar() {
        // all (3!)^5 rotation systems of K5
        let perms: Vec<Vec<usize>> = vec![
            vec![0, 1, 2, 3],
            vec![0, 1, 3, 2],
            vec![0, 2, 1, 3],
            vec![0, 2, 3, 1],
            vec![0, 3, 1, 2],
            vec![0, 3, 2, 1],
        ];
        let mut planar = 0;
        for code in 0..6usize.pow(5) {
            let mut c = code;
            let mut rot = Vec::new();
            for v in 0..5 {
                let others: Vec<usize> = (0..5).filter(|&u| u != v).collect();
                let p = &perms[c % 6];
                c /= 6;
                rot.push(p.iter().map(|&k| others[k]).collect());
            }
            let rs = RotationSystem::new(rot).unwrap();
            if trace_faces(&rs).is_ok() {
                planar += 1;
            }
        }
        assert_eq!(planar, 0);
        assert!(matches!(trace_faces(&shapes::k5()), Err(CombError::NonPlanar(_))));
    }

    #[test]
    fn face_vectors_of_small_polyhedra() {
        assert_eq!(face_vector(&shapes::octahedron()), FaceVector::from([(3, 8)]));
        assert_eq!(face_vector(&shapes::antiprism(4)), FaceVector::from([(3, 8), (4, 2)]));
        assert_eq!(face_vector(&shapes::dodecahedron()), FaceVector::from([(5, 12)]));
    }

    #[test]
    fn class_identities() {
        assert!(check_ideal_identity(&shapes::octahedron()).unwrap());
        assert!(check_ideal_identity(&shapes::antiprism(4)).unwrap());
        assert!(check_compact_identity(&shapes::dodecahedron()).unwrap());
        assert_eq!(
            check_ideal_identity(&shapes::dodecahedron()),
            Err(CombError::WrongClass { expected: Class::Ideal })
        );
        assert_eq!(
            check_compact_identity(&shapes::octahedron()),
            Err(CombError::WrongClass { expected: Class::Compact })
        );
        // face vectors from the case analyses
        for p4 in 0..20 {
            assert!(ideal_identity_holds(&FaceVector::from([(3, 9), (4, p4), (5, 1)])));
            assert!(compact_identity_holds(&FaceVector::from([(5, 12), (6, p4)])));
            assert!(compact_identity_holds(&FaceVector::from([(5, 13), (6, p4), (7, 1)])));
        }
        assert!(!ideal_identity_holds(&FaceVector::from([(3, 8), (5, 1)])));
    }

    #[test]
    fn mixed_degrees_rejected() {
        let cube_plus = shapes::pyramid(4);
        assert_eq!(CombPolyhedron::new(cube_plus.clone()).unwrap_err(), CombError::MixedDegrees);
    }
}
