//! Cluster X-, A- and D-spaces: exact mutations and their decompositions,
//! K₂ bookkeeping, quantum tori and q-exponentials, the non-compact quantum
//! dilogarithm, and the unitary intertwiners realising quantum mutations.
//!
//! Indices are 0-based everywhere in the API; generator names printed for
//! humans (`X1`, `B2`, …) are 1-based.

pub mod error;
pub mod cluster;
pub mod feed;
pub mod intertwiner;
pub mod k2;
pub mod lattice;
pub mod linalg;
pub mod qdilog;
pub mod suites;
pub mod surface;
pub mod quantum;
pub mod symbolic;

pub use error::{Error, Result};
pub use feed::Feed;
