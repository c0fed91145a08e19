// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod homology;
pub mod interleaving;
pub mod io;
pub mod metric;
pub mod nerve;
pub mod sampling;
pub mod pipeline;
pub mod render;

pub use error::{Error, Result};
pub use geometry::{LandmarkSet, Point, PointSet, Primitive};
pub use homology::{betti_numbers, image_rank, infer_homology, Assumptions, BettiReport};
pub use nerve::{build_nerve, build_two_scale, SimplicialComplex, TwoScaleFiltration};
