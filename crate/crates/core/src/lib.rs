//! Atom-bond-connectivity index of trees: evaluation, exhaustive and structured
//! search for minimal trees, improvement moves, and numeric certification of
//! the inequalities behind the structure of minimal trees.

pub mod branch;
pub mod enumerate;
pub mod error;
pub mod extremal;
pub mod graph;
pub mod io;
pub mod lemmas;
pub mod transforms;

pub use error::{AbcError, Result};
