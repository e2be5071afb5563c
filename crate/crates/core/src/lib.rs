pub mod beam;
pub mod bvdfit;
pub mod circuit;
pub mod dataio;
mod error;
pub mod friction;
pub mod materials;

pub use error::{Error, Result};
