//! Odd Khovanov homology of links from planar diagrams.

pub mod algebra;
pub mod complex;
pub mod cube;
pub mod error;
pub mod evenkh;
pub mod homology;
pub mod linkdiag;
pub mod pipeline;
pub mod signs;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
