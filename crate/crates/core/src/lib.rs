//! Union-closed set families over a small ground set: value types, closure
//! and abundance predicates, structural decompositions, isomorph-free
//! enumeration, and an exhaustive verification driver.

pub mod decomposition;
pub mod enumeration;
pub mod family;
pub mod format;
pub mod mask;

pub use family::{FamilyError, FrequencyProfile, LevelProfile, SetFamily};
pub use mask::{Permutation, SubsetMask};
pub mod verifier;
