use std::collections::HashMap;

use super::map::trace;
use super::{CanonicalCode, CombError, CombPolyhedron, RotationSystem};

/// Planar dual. Vertex `i` of the result is face `i` of the traced input; its
/// rotation lists the faces across each boundary edge in boundary order.
pub fn dual(rs: &RotationSystem) -> Result<RotationSystem, CombError> {
    let t = trace(rs);
    let chi = rs.vertex_count() as i64 - rs.edge_count() as i64 + t.faces.len() as i64;
    if chi != 2 {
        return Err(CombError::NonPlanar(chi));
    }
    let rot = t
        .faces
        .iter()
        .map(|f| {
            (0..f.len())
                .map(|k| {
                    let (a, b) = (f[k], f[(k + 1) % f.len()]);
                    t.dart_face[b][rs.position(b, a).expect("edge")]
                })
                .collect()
        })
        .collect();
    RotationSystem::new(rot)
}

/// Medial graph: one vertex per edge of `g`, joined when the edges are
/// consecutive around a face. Vertex ids follow [`RotationSystem::edges`].
pub fn medial(g: &RotationSystem) -> RotationSystem {
    let edges = g.edges();
    let id: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let eid = |a: usize, b: usize| id[&(a.min(b), a.max(b))];
    let rot = edges
        .iter()
        .map(|&(u, v)| vec![eid(v, g.prev(v, u)), eid(u, g.next(u, v)), eid(u, g.prev(u, v)), eid(v, g.next(v, u))])
        .collect();
    RotationSystem::new(rot).expect("medial of a simple 3-connected map is simple")
}

/// Whether the graph stays connected after deleting any two vertices.
pub fn is_3_connected(rs: &RotationSystem) -> bool {
    let n = rs.vertex_count();
    if n < 4 || rs.min_degree() < 3 {
        return false;
    }
    (0..n).all(|a| (a + 1..n).all(|b| rs.is_connected_without(&[a, b])))
}

/// Edge shared by faces `i` and `j`, if any.
fn shared_edge(p: &CombPolyhedron, i: usize, j: usize) -> Option<(usize, usize)> {
    let f = &p.faces()[i];
    (0..f.len()).map(|k| (f[k], f[(k + 1) % f.len()])).find(|&(a, b)| p.dart_face(b, a) == j)
}

/// Whether the faces `cycle` (consecutively adjacent, closing up) form a
/// prismatic circuit: the crossed edges have pairwise distinct endpoints.
fn is_prismatic(p: &CombPolyhedron, cycle: &[usize]) -> bool {
    let mut ends = Vec::with_capacity(2 * cycle.len());
    for k in 0..cycle.len() {
        match shared_edge(p, cycle[k], cycle[(k + 1) % cycle.len()]) {
            Some((a, b)) => ends.extend([a, b]),
            None => return false,
        }
    }
    ends.sort_unstable();
    ends.windows(2).all(|w| w[0] != w[1])
}

/// Searches for a prismatic `k`-circuit, `k` in {3, 4}: a cycle of `k` faces,
/// consecutively adjacent, whose crossed edges have distinct endpoints. Such a
/// curve separates the sphere with vertices on both sides; the cycles around
/// a single vertex or edge are excluded by the endpoint condition.
pub fn has_prismatic_circuit(p: &CombPolyhedron, k: usize) -> bool {
    find_prismatic_circuit(p, k).is_some()
}

pub fn find_prismatic_circuit(p: &CombPolyhedron, k: usize) -> Option<Vec<usize>> {
    assert!(k == 3 || k == 4, "only 3- and 4-circuits are supported");
    let nbrs: Vec<Vec<usize>> = (0..p.face_count()).map(|i| p.face_neighbors(i)).collect();
    let f = p.face_count();
    for a in 0..f {
        for &b in nbrs[a].iter().filter(|&&b| b > a) {
            if k == 3 {
                for &c in nbrs[b].iter().filter(|&&c| c > b) {
                    if nbrs[c].contains(&a) && is_prismatic(p, &[a, b, c]) {
                        return Some(vec![a, b, c]);
                    }
                }
            } else {
                for &d in nbrs[a].iter().filter(|&&d| d > b) {
                    for &c in nbrs[b].iter().filter(|&&c| c > a && c != d) {
                        if nbrs[c].contains(&d) && is_prismatic(p, &[a, b, c, d]) {
                            return Some(vec![a, b, c, d]);
                        }
                    }
                }
            }
        }
    }
    None
}

pub fn canonical_code(p: &CombPolyhedron) -> CanonicalCode {
    p.skeleton().canonical_code()
}

/// Two distinct faces with gonalities at least `min1` and `min2`.
pub fn find_large_face_pair(p: &CombPolyhedron, min1: usize, min2: usize) -> Option<(usize, usize)> {
    let faces = p.faces();
    (0..faces.len())
        .filter(|&i| faces[i].len() >= min1)
        .find_map(|i| (0..faces.len()).find(|&j| j != i && faces[j].len() >= min2).map(|j| (i, j)))
}

/// Faces `(f1, f2, f3)` with `f2` adjacent to both `f1 != f3`, meeting the
/// gonality thresholds in order.
pub fn find_adjacent_triple(p: &CombPolyhedron, min1: usize, min2: usize, min3: usize) -> Option<(usize, usize, usize)> {
    adjacent_triples(p).find(|&(a, b, c)| {
        let len = |i: usize| p.faces()[i].len();
        len(a) >= min1 && len(b) >= min2 && len(c) >= min3
    })
}

/// All ordered triples `(f1, f2, f3)` with `f2` adjacent to both `f1` and
/// `f3`, `f1 != f3`.
pub fn adjacent_triples(p: &CombPolyhedron) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
    (0..p.face_count()).flat_map(move |b| {
        let mut nb = p.face_neighbors(b);
        nb.sort_unstable();
        nb.dedup();
        let pairs: Vec<_> = nb.iter().flat_map(|&a| nb.iter().filter(move |&&c| c != a).map(move |&c| (a, b, c))).collect();
        pairs.into_iter()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{shapes, trace_faces};

    #[test]
    fn medial_of_tetrahedron_is_octahedron() {
        let m = medial(&shapes::tetrahedron());
        assert_eq!(m.vertex_count(), 6);
        assert!(m.is_regular(4));
        assert_eq!(trace_faces(&m).unwrap().len(), 8);
        assert_eq!(m.canonical_code(), shapes::octahedron().skeleton().canonical_code());
    }

    #[test]
    fn medial_of_cube_is_cuboctahedron() {
        let cube = shapes::cube();
        let m = medial(cube.skeleton());
        assert_eq!(m.vertex_count(), 12);
        // brute-force oracle: cuboctahedron has 8 triangles and 6 squares
        let p = CombPolyhedron::new(m).unwrap();
        assert_eq!(p.face_vector(), &[(3, 8), (4, 6)].into_iter().collect());
        // built independently: square faces of the cube become squares, vertices become triangles
        let direct = {
            let mut faces_sizes: Vec<usize> = cube.faces().iter().map(Vec::len).collect();
            faces_sizes.extend((0..8).map(|v| cube.skeleton().degree(v)));
            faces_sizes.sort_unstable();
            faces_sizes
        };
        let mut traced: Vec<usize> = p.faces().iter().map(Vec::len).collect();
        traced.sort_unstable();
        assert_eq!(traced, direct);
    }

    #[test]
    fn medial_is_self_dual_invariant() {
        for g in [shapes::pyramid(5), shapes::prism(5).skeleton().clone(), shapes::dodecahedron().skeleton().clone()] {
            let d = dual(&g).unwrap();
            assert_eq!(medial(&g).canonical_code(), medial(&d).canonical_code());
            let m = CombPolyhedron::new(medial(&g)).unwrap();
            assert_eq!(m.vertex_count(), g.edge_count());
        }
    }

    #[test]
    fn dual_examples() {
        let ico = dual(shapes::dodecahedron().skeleton()).unwrap();
        assert_eq!(ico.vertex_count(), 12);
        assert!(ico.is_regular(5));
        assert_eq!(trace_faces(&ico).unwrap().len(), 20);
        let cubic = dual(&shapes::pyramid(3)).unwrap();
        assert!(cubic.is_regular(3));
        let dd = dual(&ico).unwrap();
        assert_eq!(dd.canonical_code(), shapes::dodecahedron().skeleton().canonical_code());
    }

    #[test]
    fn connectivity() {
        assert!(is_3_connected(shapes::dodecahedron().skeleton()));
        assert!(is_3_connected(&shapes::tetrahedron()));
        assert!(!is_3_connected(&shapes::path(5)));
    }

    #[test]
    fn prismatic_circuits() {
        let d = shapes::dodecahedron();
        assert!(!has_prismatic_circuit(&d, 3));
        assert!(!has_prismatic_circuit(&d, 4));
        assert!(has_prismatic_circuit(&shapes::prism(3), 3));
        assert!(has_prismatic_circuit(&shapes::prism(4), 4));
        let belt = find_prismatic_circuit(&shapes::prism(4), 4).unwrap();
        assert!(belt.iter().all(|&f| shapes::prism(4).faces()[f].len() == 4));
        // top, side, bottom, opposite side
        assert!(has_prismatic_circuit(&shapes::prism(5), 4));
        assert!(!has_prismatic_circuit(&shapes::octahedron(), 3));
    }

    #[test]
    fn face_pattern_queries() {
        let d = shapes::dodecahedron();
        let (a, b, c) = find_adjacent_triple(&d, 5, 5, 5).unwrap();
        assert!(d.faces_adjacent(a, b) && d.faces_adjacent(b, c) && a != c);
        assert_eq!(find_large_face_pair(&shapes::octahedron(), 5, 5), None);
        assert!(find_large_face_pair(&shapes::antiprism(4), 4, 4).is_some());
    }
}
