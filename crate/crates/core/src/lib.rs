//! Exterior-space machinery on finite combinatorial models.
//!
//! The crate works with finite T₀ spaces (face posets of cubical grids or
//! explicit posets), decreasing towers of open sets standing in for an
//! externology, and multivalued maps on top cells standing in for a flow.
//! From these it builds limit and end spaces, the completion that glues ends
//! onto the limit, and checkers relating completeness to the dynamics
//! (critical points, ω-limits, attractors).

pub mod completion;
pub mod dynamics;
pub mod error;
pub mod externology;
pub mod flow;
pub mod gallery;
pub mod ode;
pub mod space;

pub use error::{Error, Result};
pub use space::{build_grid_space, Atom, AtomId, AtomSet, Boundary, CellId, FiniteSpace, HullMode, Partition};
