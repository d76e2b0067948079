//! Steiner triple systems with classical parameters and prescribed rank:
//! linear-algebra kernel, code geometry, component enumeration, composition,
//! counting formulas, and isomorphism tools.

pub mod components;
pub mod composer;
pub mod counting;
pub mod designs;
pub mod enumerator;
pub mod error;
pub mod field;
pub mod geometry;
pub mod iso;

pub use error::{Error, Result};
