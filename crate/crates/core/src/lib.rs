//! Expander families, graph coverings, Markov spectra and negative kernels
//! on finite graphs.

pub mod constructions;
pub mod coverings;
pub mod error;
pub mod family;
pub mod graph;
pub mod groups;
pub mod kernels;
pub mod spectra;

pub use error::{Error, Result};
pub use graph::{generate, Graph, GraphKind, Vertex, VertexSet};
