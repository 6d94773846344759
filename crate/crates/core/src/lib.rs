//! Right-angled hyperbolic polyhedra: enumeration of combinatorial types,
//! numerical realization in the hyperboloid model, exact volumes through the
//! Lobachevsky function, and the vertex-count volume bounds.

pub mod combinatorics;
pub mod lobachevsky;
pub mod enumeration;
pub mod bounds;
pub mod realization;
pub mod volume;
pub mod gluing;
pub mod pipeline;
