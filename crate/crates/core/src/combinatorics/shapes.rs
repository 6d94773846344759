//! Small named maps used by tests, examples and the CLI.

use std::f64::consts::TAU;

use super::{medial, CombPolyhedron, RotationSystem};

/// Rotation system of a straight-line planar drawing; neighbors are ordered
/// clockwise around each point.
pub fn from_drawing(points: &[(f64, f64)], edges: &[(usize, usize)]) -> RotationSystem {
    let mut rot = vec![Vec::new(); points.len()];
    for &(u, v) in edges {
        rot[u].push(v);
        rot[v].push(u);
    }
    for (v, nbrs) in rot.iter_mut().enumerate() {
        let (x0, y0) = points[v];
        let angle = |u: &usize| {
            let (x, y) = points[*u];
            (y - y0).atan2(x - x0)
        };
        nbrs.sort_by(|a, b| angle(b).total_cmp(&angle(a)));
    }
    RotationSystem::new(rot).expect("drawing is a simple connected graph")
}

fn ring(count: usize, radius: f64, phase: f64) -> impl Iterator<Item = (f64, f64)> {
    (0..count).map(move |i| {
        let a = phase + TAU * i as f64 / count as f64;
        (radius * a.cos(), radius * a.sin())
    })
}

pub fn tetrahedron() -> RotationSystem {
    pyramid(3)
}

/// Apex 0 over a `k`-gon `1..=k`.
pub fn pyramid(k: usize) -> RotationSystem {
    let mut pts = vec![(0.0, 0.0)];
    pts.extend(ring(k, 1.0, 0.0));
    let mut edges = Vec::new();
    for i in 0..k {
        edges.push((0, 1 + i));
        edges.push((1 + i, 1 + (i + 1) % k));
    }
    from_drawing(&pts, &edges)
}

/// The `k`-gonal prism (cubic).
pub fn prism(k: usize) -> CombPolyhedron {
    let mut pts: Vec<_> = ring(k, 1.0, 0.0).collect();
    pts.extend(ring(k, 2.0, 0.0));
    let mut edges = Vec::new();
    for i in 0..k {
        edges.push((i, (i + 1) % k));
        edges.push((k + i, k + (i + 1) % k));
        edges.push((i, k + i));
    }
    CombPolyhedron::new(from_drawing(&pts, &edges)).expect("prism")
}

pub fn cube() -> CombPolyhedron {
    prism(4)
}

/// The `k`-gonal antiprism as a 4-regular map (medial of the `k`-pyramid).
pub fn antiprism(k: usize) -> CombPolyhedron {
    CombPolyhedron::new(medial(&pyramid(k))).expect("antiprism")
}

pub fn octahedron() -> CombPolyhedron {
    antiprism(3)
}

pub fn dodecahedron() -> CombPolyhedron {
    let mut pts: Vec<_> = ring(5, 1.0, 0.0).collect();
    pts.extend(ring(5, 2.0, 0.0));
    pts.extend(ring(5, 2.5, TAU / 10.0));
    pts.extend(ring(5, 4.0, TAU / 10.0));
    let mut edges = Vec::new();
    for i in 0..5 {
        let j = (i + 1) % 5;
        edges.push((i, j));
        edges.push((i, 5 + i));
        edges.push((5 + i, 10 + i));
        edges.push((10 + i, 5 + j));
        edges.push((10 + i, 15 + i));
        edges.push((15 + i, 15 + j));
    }
    CombPolyhedron::new(from_drawing(&pts, &edges)).expect("dodecahedron")
}

/// Complete graph on five vertices with neighbors in increasing order; not
/// planar under any rotation.
pub fn k5() -> RotationSystem {
    RotationSystem::new((0..5).map(|v| (0..5).filter(|&u| u != v).collect()).collect()).expect("k5")
}

pub fn path(n: usize) -> RotationSystem {
    RotationSystem::new(
        (0..n)
            .map(|v| {
                let mut r = Vec::new();
                if v > 0 {
                    r.push(v - 1);
                }
                if v + 1 < n {
                    r.push(v + 1);
                }
                r
            })
            .collect(),
    )
    .expect("path")
}
