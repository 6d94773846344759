//! Polyhedra as spherical maps: rotation systems, traced faces, class
//! identities, admissibility prefilters and canonical codes.

mod canon;
pub mod exchange;
mod map;
mod ops;
pub mod shapes;

pub use canon::CanonicalCode;
pub use map::{
    check_compact_identity, check_ideal_identity, compact_identity_holds, face_vector, ideal_identity_holds,
    trace_faces, Class, CombError, CombPolyhedron, Face, FaceVector, RotationSystem,
};
pub use ops::{
    adjacent_triples, canonical_code, dual, find_adjacent_triple, find_large_face_pair, find_prismatic_circuit,
    has_prismatic_circuit, is_3_connected, medial,
};
