//! Exact computation with partition-indexed tensor ranks over prime fields and
//! the rationals.
//!
//! Coordinates are 0-based inside the library and 1-based in every text and
//! file format.

pub mod bounds;
pub mod decomp;
pub mod error;
pub mod exactlin;
pub mod fragment;
pub mod json;
pub mod meetrank;
pub mod oracle;
pub mod partitions;
pub mod sample;
pub mod tensor;

pub use decomp::{Decomposition, Rank1Term, SplitForm};
pub use error::{Error, Result};
pub use exactlin::{Field, FuncTable, Scalar};
pub use partitions::{Partition, PartitionFamily, Subset};
pub use tensor::{Shape, Tensor};
