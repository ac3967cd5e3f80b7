//! Geometry and intrinsic-evaluation probes for layerwise contextualized
//! embeddings.
//!
//! Embeddings arrive as LEDF dumps ([`ledf`]): one matrix per layer, with
//! layer 0 the embedding-layer output. On top of them the crate measures
//! anisotropy ([`geometry`]), word- and sentence-level semantic quality
//! ([`eval`]), and writes per-layer report tables ([`report`]).
//!
//! ```
//! use geoprobe::geometry::self_similarity;
//! use geoprobe::Matrix;
//!
//! let m = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
//! assert_eq!(self_similarity(&m).unwrap(), 0.0);
//! ```

pub mod error;
pub mod eval;
pub mod geometry;
pub mod ledf;
pub mod matrix;
pub mod metrics;
pub mod report;

pub use error::{Error, Result};
pub use ledf::{read_dump, write_dump, EmbeddingDump, ItemKind, ItemRecord};
pub use matrix::Matrix;
