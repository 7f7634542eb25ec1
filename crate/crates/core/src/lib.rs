//! Exact evaluation of Reshetikhin–Turaev invariants of graph manifolds,
//! validation of modular data, and complexity-dichotomy classifiers.
//!
//! Scalars are exact elements of cyclotomic fields ([`CycNum`]). Three
//! independent routes evaluate the invariant of the graph manifold `M_G`:
//! the graph-partition formula, the half-edge state sum, and, for pointed
//! data, surgery Gauss sums over a metric group.

pub mod abelian_gauss;
pub mod cocycle;
pub mod cyclotomic;
pub mod error;
pub mod formats;
pub mod graph_manifolds;
pub mod graph_partition;
pub mod modular_data;
pub mod validation;

pub use cyclotomic::CycNum;
pub use error::{Budget, Error, Result};
