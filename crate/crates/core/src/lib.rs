pub mod complex;
pub mod diagram;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod measure;
pub mod range;
pub mod reeb;
pub mod smoothing;

mod unionfind;

pub use complex::{ScalarField, SimplicialComplex, VectorField};
pub use error::{Error, Result};
pub use reeb::{is_isomorphic, reeb_graph, slab_oracle, ReebGraph};
