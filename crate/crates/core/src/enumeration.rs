//! Generation of combinatorial candidates for right-angled polyhedra.
//!
//! Triangulations of the sphere are grown from the tetrahedron by vertex
//! splitting, the inverse of edge contraction; every triangulation on at least
//! five vertices has a contractible edge, so each level is complete when every
//! member of the previous level is expanded in every way.
//!
//! * Compact candidates are the cubic duals of triangulations with minimum
//!   degree 5, kept when they have no prismatic 3- or 4-circuits.
//! * Ideal candidates are medial graphs of 3-connected planar graphs with `V`
//!   edges. Such a graph has a planar triangulation on the same vertices as a
//!   spanning subgraph, so it is reached by deleting edges from one while
//!   3-connectivity holds. Since `medial(G) = medial(G*)`, only graphs with at
//!   most as many vertices as faces are generated.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::combinatorics::{
    dual, has_prismatic_circuit, is_3_connected, medial, CanonicalCode, Class, CombError, CombPolyhedron,
    RotationSystem,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("{klass} enumeration needs max_vertices ≥ {min}, got {got}")]
    BudgetTooSmall { klass: Class, min: usize, got: usize },
    #[error("compact polyhedra have an even number of vertices, got max_vertices = {0}")]
    OddCompactBudget(usize),
    #[error("vertex budget {0} exceeds the supported range")]
    BudgetTooLarge(usize),
    #[error("could not build a thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Comb(#[from] CombError),
}

/// What to enumerate and how much work to spend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub klass: Class,
    pub max_vertices: usize,
    /// Worker threads; 0 uses the global pool.
    pub parallelism: usize,
}

impl EnumerationBudget {
    pub fn new(klass: Class, max_vertices: usize, parallelism: usize) -> Result<Self, EnumerationError> {
        let min = match klass {
            Class::Ideal => 6,
            Class::Compact => 20,
        };
        if max_vertices < min {
            return Err(EnumerationError::BudgetTooSmall { klass, min, got: max_vertices });
        }
        if klass == Class::Compact && max_vertices % 2 == 1 {
            return Err(EnumerationError::OddCompactBudget(max_vertices));
        }
        if max_vertices > 200 {
            return Err(EnumerationError::BudgetTooLarge(max_vertices));
        }
        Ok(EnumerationBudget { klass, max_vertices, parallelism })
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T, EnumerationError> {
        if self.parallelism == 0 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.parallelism)
            .build()
            .map_err(|e| EnumerationError::ThreadPool(e.to_string()))?;
        Ok(pool.install(f))
    }
}

/// An enumerated combinatorial type in canonical labeling.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub code: CanonicalCode,
    pub polyhedron: CombPolyhedron,
}

/// Splits vertex `x` of a triangulation: the new vertex takes the neighbors
/// from `rot[x][j]` round to `rot[x][i]`, both wings stay adjacent to both.
fn split_vertex(t: &RotationSystem, x: usize, i: usize, j: usize) -> RotationSystem {
    let mut rot: Vec<Vec<usize>> = t.rotations().to_vec();
    let d = rot[x].len();
    let nx = rot[x].clone();
    let y = rot.len();
    let (ni, nj) = (nx[i], nx[j]);
    let arc = |from: usize, to: usize| {
        let mut v = Vec::new();
        let mut k = from;
        loop {
            v.push(nx[k]);
            if k == to {
                break;
            }
            k = (k + 1) % d;
        }
        v
    };
    let mut x_rot = arc(i, j);
    x_rot.push(y);
    let mut y_rot = arc(j, i);
    y_rot.push(x);
    // vertices strictly between the wings on y's side now see y instead of x
    for &w in &y_rot[1..y_rot.len() - 2] {
        for u in rot[w].iter_mut() {
            if *u == x {
                *u = y;
            }
        }
    }
    // y goes between x and the wing's neighbor on y's side
    let insert_beside = |r: &mut Vec<usize>, side: usize| {
        let dd = r.len();
        let p = r.iter().position(|&u| u == x).expect("wing adjacent to x");
        let at = if r[(p + dd - 1) % dd] == side { p } else { p + 1 };
        r.insert(at, y);
    };
    insert_beside(&mut rot[ni], nx[(i + d - 1) % d]);
    insert_beside(&mut rot[nj], nx[(j + 1) % d]);
    rot[x] = x_rot;
    rot.push(y_rot);
    RotationSystem::from_raw(rot)
}

fn shortfall(degree: usize) -> usize {
    5usize.saturating_sub(degree)
}

/// Sum over vertices of how far their degree falls short of 5.
fn degree_deficiency(t: &RotationSystem) -> usize {
    (0..t.vertex_count()).map(|v| shortfall(t.degree(v))).sum()
}

/// Canonical triangulations one vertex larger than `level`. With a bound,
/// splits whose result exceeds that degree deficiency are skipped before
/// they are built.
fn next_level(level: &[RotationSystem], max_deficiency: Option<usize>) -> Vec<RotationSystem> {
    let codes: BTreeSet<CanonicalCode> = level
        .par_iter()
        .flat_map_iter(|t| {
            let base = degree_deficiency(t);
            let mut out = Vec::new();
            for x in 0..t.vertex_count() {
                let d = t.degree(x);
                // (i, j) and (j, i) give the same map with x and y exchanged
                for i in 0..d {
                    for j in i + 1..d {
                        if let Some(limit) = max_deficiency {
                            let (ni, nj) = (t.neighbors(x)[i], t.neighbors(x)[j]);
                            let (di, dj) = (t.degree(ni), t.degree(nj));
                            let before = shortfall(d) + shortfall(di) + shortfall(dj);
                            let after = shortfall((j + d - i) % d + 2)
                                + shortfall((i + d - j) % d + 2)
                                + shortfall(di + 1)
                                + shortfall(dj + 1);
                            if base + after - before > limit {
                                continue;
                            }
                        }
                        out.push(split_vertex(t, x, i, j).canonical_code());
                    }
                }
            }
            out
        })
        .collect();
    codes.into_iter().map(|c| c.decode().expect("canonical code decodes")).collect()
}

fn tetrahedron() -> RotationSystem {
    RotationSystem::from_raw(vec![vec![1, 3, 2], vec![0, 2, 3], vec![0, 3, 1], vec![0, 1, 2]]).canonical_form()
}

/// All triangulations of the sphere on `n ≥ 4` vertices, once each up to
/// reflection-inclusive isomorphism, in canonical labeling and sorted by
/// canonical code.
pub fn enumerate_triangulations(n: usize) -> Vec<RotationSystem> {
    assert!(n >= 4, "triangulations need at least 4 vertices");
    let mut level = vec![tetrahedron()];
    for _ in 4..n {
        level = next_level(&level, None);
    }
    level
}

/// Triangulations on `n` vertices with minimum degree 5, i.e. duals of cubic
/// maps whose faces are all at least pentagons. Intermediate levels are
/// pruned by degree deficiency: contracting an edge raises the deficiency by
/// at most 2, so an ancestor `k` levels below the target has deficiency at
/// most `2k`.
pub fn enumerate_min_degree_5_triangulations(n: usize) -> Vec<RotationSystem> {
    assert!(n >= 4, "triangulations need at least 4 vertices");
    let mut level = vec![tetrahedron()];
    for m in 5..=n {
        let slack = 2 * (n - m);
        level = next_level(&level, Some(slack));
    }
    level
}

/// Polyhedral graphs with `edges` edges and at most as many vertices as
/// faces, as canonical maps. Every polyhedral graph is one of these or the
/// dual of one; when vertex and face counts agree, both members of a dual
/// pair are listed.
pub fn polyhedral_graphs_with_few_vertices(edges: usize) -> Vec<RotationSystem> {
    let mut found = BTreeSet::new();
    for n in 4..=(edges + 2) / 2 {
        if 3 * n - 6 < edges || 2 * edges < 3 * n {
            continue;
        }
        let deletions = 3 * n - 6 - edges;
        let graphs: BTreeSet<CanonicalCode> = enumerate_triangulations(n)
            .par_iter()
            .flat_map_iter(|t| {
                let mut out = BTreeSet::new();
                let list = t.edges();
                delete_edges(t.clone(), &list, 0, deletions, &mut out);
                out
            })
            .collect();
        found.extend(graphs);
    }
    found.into_iter().map(|c| c.decode().expect("canonical code decodes")).collect()
}

fn delete_edges(
    g: RotationSystem,
    list: &[(usize, usize)],
    from: usize,
    remaining: usize,
    out: &mut BTreeSet<CanonicalCode>,
) {
    if remaining == 0 {
        out.insert(g.canonical_code());
        return;
    }
    for k in from..list.len() {
        if list.len() - k < remaining {
            break;
        }
        let (u, v) = list[k];
        if g.degree(u) <= 3 || g.degree(v) <= 3 {
            continue;
        }
        let mut h = g.clone();
        h.remove_edge(u, v);
        // 3-connectivity is lost for good once lost, so prune here
        if is_3_connected(&h) {
            delete_edges(h, list, k + 1, remaining - 1, out);
        }
    }
}

fn into_candidates(maps: BTreeMap<CanonicalCode, RotationSystem>, klass: Class) -> Result<Vec<Candidate>, EnumerationError> {
    let mut out: Vec<Candidate> = maps
        .into_iter()
        .map(|(code, rs)| Ok(Candidate { code, polyhedron: CombPolyhedron::with_class(rs, klass)? }))
        .collect::<Result<_, CombError>>()?;
    out.sort_by(|a, b| (a.polyhedron.vertex_count(), &a.code).cmp(&(b.polyhedron.vertex_count(), &b.code)));
    Ok(out)
}

/// Ideal candidates with `6 ≤ V ≤ max_vertices`, sorted by `(V, code)`.
pub fn enumerate_ideal_candidates(budget: &EnumerationBudget) -> Result<Vec<Candidate>, EnumerationError> {
    if budget.klass != Class::Ideal {
        return Err(CombError::WrongClass { expected: Class::Ideal }.into());
    }
    let maps = budget.run(|| {
        let mut maps = BTreeMap::new();
        for e in 6..=budget.max_vertices {
            let media: Vec<RotationSystem> =
                polyhedral_graphs_with_few_vertices(e).par_iter().map(|g| medial(g).canonical_form()).collect();
            for m in media {
                maps.insert(m.canonical_code(), m);
            }
        }
        maps
    })?;
    into_candidates(maps, Class::Ideal)
}

/// Compact candidates with `20 ≤ V ≤ max_vertices`, sorted by `(V, code)`.
pub fn enumerate_compact_candidates(budget: &EnumerationBudget) -> Result<Vec<Candidate>, EnumerationError> {
    if budget.klass != Class::Compact {
        return Err(CombError::WrongClass { expected: Class::Compact }.into());
    }
    let maps = budget.run(|| -> Result<_, EnumerationError> {
        let mut maps = BTreeMap::new();
        for n in 12..=budget.max_vertices / 2 + 2 {
            let kept: Vec<Result<Option<RotationSystem>, CombError>> = enumerate_min_degree_5_triangulations(n)
                .par_iter()
                .map(|t| {
                    let cubic = dual(t)?.canonical_form();
                    let p = CombPolyhedron::with_class(cubic, Class::Compact)?;
                    let admissible = !has_prismatic_circuit(&p, 3) && !has_prismatic_circuit(&p, 4);
                    Ok(admissible.then(|| p.skeleton().clone()))
                })
                .collect();
            for rs in kept {
                if let Some(rs) = rs? {
                    maps.insert(rs.canonical_code(), rs);
                }
            }
        }
        Ok(maps)
    })??;
    into_candidates(maps, Class::Compact)
}

/// Candidates of the budget's class.
pub fn enumerate_candidates(budget: &EnumerationBudget) -> Result<Vec<Candidate>, EnumerationError> {
    match budget.klass {
        Class::Ideal => enumerate_ideal_candidates(budget),
        Class::Compact => enumerate_compact_candidates(budget),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{check_compact_identity, check_ideal_identity, shapes, trace_faces};

    #[test]
    fn triangulation_counts() {
        // sphere triangulations by vertex count, 4..=11
        let known = [1, 1, 2, 5, 14, 50, 233, 1249];
        for (k, &count) in known.iter().enumerate() {
            let ts = enumerate_triangulations(4 + k);
            assert_eq!(ts.len(), count, "n = {}", 4 + k);
            for t in &ts {
                assert_eq!(trace_faces(t).unwrap().len(), 2 * (4 + k) - 4);
                assert!(trace_faces(t).unwrap().iter().all(|f| f.len() == 3));
            }
        }
    }

    #[test]
    fn splits_stay_planar() {
        for t in [shapes::octahedron().skeleton().clone(), dual(shapes::dodecahedron().skeleton()).unwrap()] {
        for x in 0..t.vertex_count() {
            for i in 0..t.degree(x) {
                for j in 0..t.degree(x) {
                    if i != j {
                        let s = split_vertex(&t, x, i, j);
                        RotationSystem::new(s.rotations().to_vec()).unwrap();
                        let faces = trace_faces(&s).unwrap();
                        assert!(faces.iter().all(|f| f.len() == 3), "split ({x}, {i}, {j})");
                    }
                }
            }
        }
        }
    }

    #[test]
    fn min_degree_5_counts() {
        let counts: Vec<usize> = (12..=16).map(|n| enumerate_min_degree_5_triangulations(n).len()).collect();
        assert_eq!(counts, vec![1, 0, 1, 1, 3]);
    }

    #[test]
    fn polyhedral_graph_counts() {
        // 3-connected planar graphs by edge count, 6..=12
        let totals = [1, 0, 1, 2, 2, 4, 12];
        for (k, &total) in totals.iter().enumerate() {
            let graphs = polyhedral_graphs_with_few_vertices(6 + k);
            let counted: usize = graphs
                .iter()
                .map(|g| {
                    let faces = g.edge_count() + 2 - g.vertex_count();
                    assert!(is_3_connected(g));
                    if g.vertex_count() < faces {
                        2
                    } else {
                        1
                    }
                })
                .sum();
            assert_eq!(counted, total, "E = {}", 6 + k);
            let media: BTreeSet<CanonicalCode> = graphs.iter().map(|g| medial(g).canonical_code()).collect();
            assert_eq!(media.len(), [1, 0, 1, 1, 2, 2, 9][k]);
        }
    }

    #[test]
    fn budgets() {
        assert!(EnumerationBudget::new(Class::Ideal, 5, 1).is_err());
        assert!(EnumerationBudget::new(Class::Compact, 18, 1).is_err());
        assert!(matches!(EnumerationBudget::new(Class::Compact, 21, 1), Err(EnumerationError::OddCompactBudget(21))));
        let b = EnumerationBudget::new(Class::Ideal, 8, 0).unwrap();
        assert!(enumerate_compact_candidates(&b).is_err());
    }

    #[test]
    fn small_ideal_census() {
        let b = EnumerationBudget::new(Class::Ideal, 10, 2).unwrap();
        let c = enumerate_ideal_candidates(&b).unwrap();
        let per_v: Vec<usize> = (6..=10).map(|v| c.iter().filter(|x| x.polyhedron.vertex_count() == v).count()).collect();
        assert_eq!(per_v, vec![1, 0, 1, 1, 2]);
        assert_eq!(c[0].code, shapes::octahedron().skeleton().canonical_code());
        for x in &c {
            assert!(check_ideal_identity(&x.polyhedron).unwrap());
            assert_eq!(x.polyhedron.skeleton().canonical_code(), x.code);
        }
    }

    #[test]
    fn small_compact_census() {
        let b = EnumerationBudget::new(Class::Compact, 24, 0).unwrap();
        let c = enumerate_compact_candidates(&b).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].code, shapes::dodecahedron().skeleton().canonical_code());
        for x in &c {
            assert!(check_compact_identity(&x.polyhedron).unwrap());
            assert!(x.polyhedron.faces().iter().all(|f| f.len() >= 5));
        }
    }
}
