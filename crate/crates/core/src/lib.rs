//! KHK and pseudo-KHK discretizations of planar polynomial vector fields,
//! with exact verification of their integrability properties.

pub mod analysis;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod fibration;
pub mod field;
pub mod khk;
pub mod moebius;
pub mod numeric;
pub mod orbit;
pub mod pseudo;
pub mod sample;
pub mod verify;

pub use error::{Error, Result};
