//! Graph-decoration engine: approximate Kőnig edge colorings of
//! odd-cycle-free graphs, approximate balanced orientations of even-degree
//! graphs, and approximate Schreier decorations of 2k-regular graphs, on
//! finite bounded-degree graphs carrying vertex probability measures.
//!
//! Every algorithm reports the set of vertices at which its output is
//! locally correct and the measure that set carries; the point of the crate
//! is to drive that mass above `1 - epsilon` constructively and to verify
//! the quantitative guarantees by exact counting.

pub mod generate;
pub mod graph;
pub mod io;
pub mod koenig;
pub mod measure;
pub mod oracle;
pub mod orient;
pub mod schreier;

pub use graph::{
    corr_of_coloring, corr_of_decoration, corr_of_orientation, Color, CorrReport, DartId, EdgeId,
    Graph, GraphError, Orientation, PartialEdgeColoring, VertexId,
};
pub use measure::{
    cocycle_ratio, edge_measure_from, make_quasi_invariant, EdgeMeasure, MeasureError,
    MeasurePreset, VertexMeasure,
};
