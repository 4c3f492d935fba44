//! Exact arithmetic for GKM graphs: axioms, connection paths, extension of
//! labelings to torus graphs, and graph cohomology over `Z` and `Q`.

pub mod catalog;
pub mod cohomology;
pub mod extension;
pub mod graph;
pub mod lattice;
pub mod paths;

pub use graph::{GkmGraph, GraphError, LabelMode, LabelVector, OrientedEdge};
pub use lattice::{Int, IntMatrix};
