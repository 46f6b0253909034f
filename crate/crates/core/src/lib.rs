pub mod bose;
pub mod classical;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lanczos;
pub mod mps;
pub mod quad;
pub mod special;
pub mod spin;
pub mod types;

pub use error::{Error, Result};
pub use types::{axis_labels, Direction3, ExpectationPoint, ModelTag, SeededRng, SpinParams};
