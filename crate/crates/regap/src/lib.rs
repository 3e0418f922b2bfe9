//! Regular graph pattern (ReGaP) matching over attributed directed graphs.
//!
//! A pattern is compiled to CNF (`expand` + `encode`) and handed to the
//! built-in CDCL solver in `sat`. `preprocess` shrinks the target graph
//! first, and `oracle` is a slow rule-based matcher used to cross-check
//! the encoding on small instances.

pub mod bench;
pub mod constraints;
pub mod encode;
pub mod error;
pub mod expand;
pub mod gen;
pub mod graph;
pub mod matcher;
pub mod oracle;
pub mod par;
pub mod preprocess;
pub mod sat;
pub mod witness;

pub use error::{Error, Result};
