//! Volume bounds for right-angled polyhedra in terms of the vertex count and
//! face gonalities, and a dispatcher that picks the best certified upper
//! bound for a given polyhedron.
//!
//! Ideal polyhedra are measured in units of `v8`, the regular ideal octahedron;
//! compact ones in units of `5 v3 / 8`, with `v3` the regular ideal
//! tetrahedron.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{adjacent_triples, Class, CombPolyhedron, FaceVector};
use crate::lobachevsky::{v3, v8};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("vertex count {v} is outside the range of this bound ({requirement})")]
    BadV { v: usize, requirement: &'static str },
    #[error("hypothesis not met: {0}")]
    BadHypothesis(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `(V - 2) v8 / 4`.
    IdealLower,
    /// `(V - 4) v8 / 2`.
    IdealUpper,
    /// `(V - 5) v8 / 2` for `V ≥ 9`.
    IdealUpperImproved,
    /// `(V - n1/2 - n2/2) v8 / 2` from two faces with at least 4 sides.
    IdealTwoFace,
    /// `(V + 1 - n1/2 - n2/2 - n3/2) v8 / 2` from a face adjacent to two others.
    IdealAdjacentTriple,
    /// `(V - 8) v8 / 32`.
    CompactLower,
    /// `(V - 10) 5 v3 / 8`, strict.
    CompactUpper,
    /// `(V - 14) 5 v3 / 8` for `V ≥ 24`.
    CompactUpperImproved,
    /// `(V - n1 - n2) 5 v3 / 8` from two faces with at least 6 sides.
    CompactTwoFace,
    /// `(V - n1 - n2 - n3 + 4) 5 v3 / 8` from a face adjacent to two others.
    CompactAdjacentTriple,
}

impl BoundKind {
    pub fn is_lower(self) -> bool {
        matches!(self, BoundKind::IdealLower | BoundKind::CompactLower)
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

/// When a bound is known to be attained.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "when")]
pub enum Attainment {
    /// Equality holds exactly in the described case.
    Attained(String),
    /// The inequality is strict.
    Never,
    /// Whether the bound is attained is not known.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub value: f64,
    /// `vol < value` rather than `vol ≤ value`.
    pub strict: bool,
    /// What was checked to make the bound applicable, including the faces
    /// that certify it when it came from a polyhedron.
    pub hypothesis: String,
    pub attainment: Attainment,
}

impl BoundValue {
    fn new(kind: BoundKind, value: f64, hypothesis: impl Into<String>, attainment: Attainment) -> Self {
        BoundValue { kind, value, strict: kind == BoundKind::CompactUpper, hypothesis: hypothesis.into(), attainment }
    }

    /// Whether `volume` respects the bound, allowing `tol` on the equality
    /// side of non-strict bounds.
    pub fn admits(&self, volume: f64, tol: f64) -> bool {
        match (self.kind.is_lower(), self.strict) {
            (true, _) => volume >= self.value - tol,
            (false, true) => volume < self.value,
            (false, false) => volume <= self.value + tol,
        }
    }
}

fn octa_units(x: f64) -> f64 {
    x * v8() / 2.0
}

fn tetra_units(x: f64) -> f64 {
    x * 5.0 * v3() / 8.0
}

/// Two-sided bounds valid for every ideal polyhedron with `V ≥ 6`.
pub fn ideal_bounds_atkinson(v: usize) -> Result<(BoundValue, BoundValue), BoundError> {
    if v < 6 {
        return Err(BoundError::BadV { v, requirement: "V ≥ 6" });
    }
    let octahedron = || Attainment::Attained("the regular ideal octahedron (V = 6)".into());
    let lower = BoundValue::new(BoundKind::IdealLower, (v as f64 - 2.0) * v8() / 4.0, "ideal, V ≥ 6", octahedron());
    let upper = BoundValue::new(BoundKind::IdealUpper, octa_units(v as f64 - 4.0), "ideal, V ≥ 6", octahedron());
    Ok((lower, upper))
}

/// `(V - 5) v8 / 2`, valid once the two smallest ideal polyhedra are excluded.
pub fn ideal_upper_improved(v: usize) -> Result<BoundValue, BoundError> {
    if v < 9 {
        return Err(BoundError::BadV { v, requirement: "V ≥ 9" });
    }
    Ok(BoundValue::new(
        BoundKind::IdealUpperImproved,
        octa_units(v as f64 - 5.0),
        "ideal, V ≥ 9",
        Attainment::Attained("exactly when V = 9".into()),
    ))
}

/// Bound from two distinct faces with `n1, n2 ≥ 4` sides, `V > 6`.
pub fn ideal_two_face_bound(v: usize, n1: usize, n2: usize) -> Result<BoundValue, BoundError> {
    if v <= 6 {
        return Err(BoundError::BadHypothesis(format!("needs V > 6, got {v}")));
    }
    if n1 < 4 || n2 < 4 {
        return Err(BoundError::BadHypothesis(format!("needs two faces with at least 4 sides, got {n1} and {n2}")));
    }
    Ok(BoundValue::new(
        BoundKind::IdealTwoFace,
        octa_units(v as f64 - n1 as f64 / 2.0 - n2 as f64 / 2.0),
        format!("ideal, V = {v} > 6, faces with {n1} and {n2} sides"),
        Attainment::Unknown,
    ))
}

/// Bound from faces `F1, F2, F3` with `F2` adjacent to both others.
pub fn ideal_adjacent_triple_bound(v: usize, n1: usize, n2: usize, n3: usize) -> Result<BoundValue, BoundError> {
    if v < 6 {
        return Err(BoundError::BadV { v, requirement: "V ≥ 6" });
    }
    if n1 < 3 || n2 < 3 || n3 < 3 {
        return Err(BoundError::BadHypothesis(format!("faces need at least 3 sides, got ({n1}, {n2}, {n3})")));
    }
    Ok(BoundValue::new(
        BoundKind::IdealAdjacentTriple,
        octa_units(v as f64 + 1.0 - (n1 + n2 + n3) as f64 / 2.0),
        format!("ideal, faces with ({n1}, {n2}, {n3}) sides, the middle one adjacent to both others"),
        Attainment::Unknown,
    ))
}

fn check_compact_v(v: usize, min: usize) -> Result<(), BoundError> {
    if v < min || v % 2 == 1 {
        return Err(BoundError::BadV { v, requirement: if min == 24 { "V ≥ 24 and even" } else { "V ≥ 20 and even" } });
    }
    Ok(())
}

/// Two-sided bounds for compact polyhedra; the upper one is strict.
pub fn compact_bounds_atkinson(v: usize) -> Result<(BoundValue, BoundValue), BoundError> {
    check_compact_v(v, 20)?;
    let lower = BoundValue::new(
        BoundKind::CompactLower,
        (v as f64 - 8.0) * v8() / 32.0,
        "compact, V ≥ 20 even",
        Attainment::Unknown,
    );
    let upper = BoundValue::new(
        BoundKind::CompactUpper,
        tetra_units(v as f64 - 10.0),
        "compact, V ≥ 20 even",
        Attainment::Never,
    );
    Ok((lower, upper))
}

/// `(V - 14) 5 v3 / 8`, valid once the dodecahedron is excluded.
pub fn compact_upper_improved(v: usize) -> Result<BoundValue, BoundError> {
    check_compact_v(v, 24)?;
    Ok(BoundValue::new(
        BoundKind::CompactUpperImproved,
        tetra_units(v as f64 - 14.0),
        "compact, V ≥ 24 even",
        Attainment::Unknown,
    ))
}

/// Bound from two distinct faces with `n1, n2 ≥ 6` sides.
pub fn compact_two_face_bound(v: usize, n1: usize, n2: usize) -> Result<BoundValue, BoundError> {
    check_compact_v(v, 20)?;
    if n1 < 6 || n2 < 6 {
        return Err(BoundError::BadHypothesis(format!("needs two faces with at least 6 sides, got {n1} and {n2}")));
    }
    Ok(BoundValue::new(
        BoundKind::CompactTwoFace,
        tetra_units(v as f64 - (n1 + n2) as f64),
        format!("compact, faces with {n1} and {n2} sides"),
        Attainment::Unknown,
    ))
}

/// Bound from faces `F1, F2, F3` with `F2` adjacent to both others.
pub fn compact_adjacent_triple_bound(v: usize, n1: usize, n2: usize, n3: usize) -> Result<BoundValue, BoundError> {
    check_compact_v(v, 20)?;
    if n1 < 5 || n2 < 5 || n3 < 5 {
        return Err(BoundError::BadHypothesis(format!("faces need at least 5 sides, got ({n1}, {n2}, {n3})")));
    }
    Ok(BoundValue::new(
        BoundKind::CompactAdjacentTriple,
        tetra_units(v as f64 + 4.0 - (n1 + n2 + n3) as f64),
        format!("compact, faces with ({n1}, {n2}, {n3}) sides, the middle one adjacent to both others"),
        Attainment::Unknown,
    ))
}

/// Improved bounds that follow from the face vector alone, through the
/// case analysis behind the improved upper bounds: a large face, two faces that
/// are both large, or a small face-size spectrum at large `V`.
fn class_case_bounds(klass: Class, v: usize, fv: &FaceVector) -> Vec<BoundValue> {
    let count_at_least = |k: usize| fv.range(k..).map(|(_, c)| c).sum::<usize>();
    let count = |k: usize| fv.get(&k).copied().unwrap_or(0);
    let max_face = fv.keys().next_back().copied().unwrap_or(0);
    let mut out = Vec::new();
    match klass {
        Class::Ideal => {
            let value = octa_units(v as f64 - 5.0);
            let mut push = |why: String| {
                out.push(BoundValue::new(BoundKind::IdealUpperImproved, value, why, Attainment::Unknown));
            };
            if count_at_least(5) >= 2 {
                push("ideal, two faces with at least 5 sides".into());
            }
            if max_face >= 6 {
                push(format!("ideal, a face with {max_face} ≥ 6 sides"));
            }
            if v >= 15 && max_face <= 4 {
                push(format!("ideal, V = {v} ≥ 15, only triangles and quadrilaterals"));
            }
            if v >= 16 && count(5) == 1 && count_at_least(6) == 0 {
                push(format!("ideal, V = {v} ≥ 16, one pentagon, all other faces at most quadrilaterals"));
            }
        }
        Class::Compact => {
            let value = tetra_units(v as f64 - 14.0);
            let mut push = |why: String| {
                out.push(BoundValue::new(BoundKind::CompactUpperImproved, value, why, Attainment::Unknown));
            };
            if count_at_least(7) >= 2 {
                push("compact, two faces with at least 7 sides".into());
            }
            if max_face >= 8 {
                push(format!("compact, a face with {max_face} ≥ 8 sides"));
            }
            if v >= 46 && max_face <= 6 {
                push(format!("compact, V = {v} ≥ 46, only pentagons and hexagons"));
            }
            if v >= 48 && count(7) == 1 && count_at_least(8) == 0 {
                push(format!("compact, V = {v} ≥ 48, one heptagon, all other faces pentagons or hexagons"));
            }
        }
    }
    out
}

/// Every bound that the vertex count and face vector certify on their own
/// (no adjacency information): the two-sided bounds, the improved upper bound
/// where its range applies, the two-face bound for the two largest faces, and
/// the class cases of the improved bound.
pub fn bounds_from_face_vector(klass: Class, v: usize, fv: &FaceVector) -> Result<Vec<BoundValue>, BoundError> {
    let mut sizes: Vec<usize> = fv.iter().rev().flat_map(|(&k, &c)| std::iter::repeat_n(k, c)).collect();
    sizes.truncate(2);
    let mut out = Vec::new();
    match klass {
        Class::Ideal => {
            let (lo, hi) = ideal_bounds_atkinson(v)?;
            out.extend([lo, hi]);
            out.extend(ideal_upper_improved(v).ok());
            if let [a, b] = sizes[..] {
                out.extend(ideal_two_face_bound(v, a, b).ok());
            }
        }
        Class::Compact => {
            let (lo, hi) = compact_bounds_atkinson(v)?;
            out.extend([lo, hi]);
            out.extend(compact_upper_improved(v).ok());
            if let [a, b] = sizes[..] {
                out.extend(compact_two_face_bound(v, a, b).ok());
            }
        }
    }
    out.extend(class_case_bounds(klass, v, fv));
    Ok(out)
}

/// Every bound certified on `p`: the face-vector bounds plus the best
/// adjacent-triple bound, whose witnessing faces are named in the
/// hypothesis.
pub fn applicable_bounds(p: &CombPolyhedron) -> Result<Vec<BoundValue>, BoundError> {
    let v = p.vertex_count();
    let mut out = bounds_from_face_vector(p.klass(), v, p.face_vector())?;
    let faces = p.faces();
    // the two largest faces, named
    let mut order: Vec<usize> = (0..faces.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(faces[i].len()), i));
    if let [a, b, ..] = order[..] {
        for bound in out.iter_mut().filter(|b| matches!(b.kind, BoundKind::IdealTwoFace | BoundKind::CompactTwoFace)) {
            bound.hypothesis = format!("{}; faces {a} and {b}", bound.hypothesis);
        }
    }
    let best_triple = adjacent_triples(p).max_by_key(|&(a, b, c)| (faces[a].len() + faces[b].len() + faces[c].len(), std::cmp::Reverse((b, a, c))));
    if let Some((a, b, c)) = best_triple {
        let (n1, n2, n3) = (faces[a].len(), faces[b].len(), faces[c].len());
        let bound = match p.klass() {
            Class::Ideal => ideal_adjacent_triple_bound(v, n1, n2, n3),
            Class::Compact => compact_adjacent_triple_bound(v, n1, n2, n3),
        };
        if let Ok(mut bound) = bound {
            bound.hypothesis = format!("{}; faces {a}, {b}, {c}", bound.hypothesis);
            out.push(bound);
        }
    }
    Ok(out)
}

/// Smallest certified upper bound for `p`; ties keep the first listed, so the
/// two-sided bound wins only when nothing sharper applies. `None` when the
/// vertex count is outside every bound's range.
pub fn best_upper_bound(p: &CombPolyhedron) -> Option<BoundValue> {
    let mut best: Option<BoundValue> = None;
    for b in applicable_bounds(p).ok()?.into_iter().filter(|b| !b.kind.is_lower()) {
        if best.as_ref().is_none_or(|x| b.value < x.value - 1e-12) {
            best = Some(b);
        }
    }
    best
}
