//! Linear block codes over prime fields and their trellis representations.
//!
//! The crate builds minimal conventional trellises from parity-check matrices,
//! turns them into tail-biting trellises by embedding, reduces state-complexity
//! peaks, and searches over sequences of embeddings for small tail-biting
//! trellises.

pub mod bcjr;
pub mod codes;
pub mod embedding;
pub mod error;
pub mod galois;
pub mod peakreduce;
pub mod search;
pub mod trellis;

pub use bcjr::{bcjr, ParityCheckMatrix};
pub use embedding::{embed, EmbeddingResult, EmbeddingSpec};
pub use error::{Error, Result};
pub use galois::{Field, Matrix, Subspace, Vector, DEFAULT_ENUMERATION_CAP};
pub use search::{minimize_tbt, replay, SearchConfig, SearchOutcome};
pub use trellis::{Edge, MergeWitness, Shape, StateComplexityProfile, Trellis};
