//! Target height estimation from acoustic shadows seen at two altitudes by a
//! forward-looking sonar, with a ray-cast frame simulator and a pose-based
//! seafloor mosaic.
//!
//! Pipeline: [`simulator`] renders polar frames, [`segmentation`] extracts
//! highlight and shadow regions and measures `(R, L)`, [`estimation`] pairs
//! the two frames and solves for height, [`mosaic`] places the results on the
//! floor. [`io`] reads and writes every artifact and [`commands`] is the CLI.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod estimation;
pub mod frame;
pub mod geometry;
pub mod io;
pub mod mosaic;
pub mod overlay;
pub mod segmentation;
pub mod simulator;
pub mod table3;
