pub mod cctree;
pub mod container;
pub mod error;
pub mod evasive;
pub mod experiments;
pub mod field;
pub mod geom;
pub mod hyper;
pub mod poly;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
