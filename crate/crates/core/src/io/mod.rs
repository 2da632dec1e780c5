//! Text formats and rendering.

pub mod moves;
pub mod msd;
pub mod render;

pub use msd::{parse, serialize, ParseError};
pub use render::render_svg;
