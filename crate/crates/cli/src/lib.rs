//! Pieces of the `ammdrpg` binary that are worth testing on their own:
//! SVG rendering and the benchmark sweep.

pub mod bench;
pub mod render;
