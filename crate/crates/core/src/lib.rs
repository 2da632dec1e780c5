//! Diagrams of gradient-like Morse-Smale systems on closed 4-manifolds.
//!
//! A [`Diagram`] cuts the 4-manifold's handle picture into 3-sphere pieces
//! holding framed tangles, glued along pairs of 2-sphere walls, with
//! spanning surfaces for the 3-handles and a sink count for the 4-handles.
//! On top of that the crate provides Kirby calculus, reduction to Kirby
//! diagrams, algebraic invariants, equivalence and conjugacy search, a text
//! format and an SVG renderer.

pub mod calculus;
pub mod catalog;
pub mod diagram;
pub mod equivalence;
pub mod id;
pub mod invariants;
pub mod io;
pub mod random;
pub mod reduction;
pub mod tangle;

pub use calculus::{KirbyMove, MoveError, Verdict};
pub use diagram::{Diagram, Kind};
pub use id::Id;
