//! Forward direct scattering for the KdV equation with step-like initial data
//! that tends to two different one-gap periodic backgrounds as `x → ±∞`.

pub mod background;
pub mod error;
pub mod jost;
pub mod mat;
pub mod ode;
pub mod quad;
pub mod reflection;
pub mod scattering;
pub mod scenario;
pub mod special;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
