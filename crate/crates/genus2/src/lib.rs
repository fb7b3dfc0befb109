//! Numerics for the SU(2) character variety of the closed genus-two surface.
//!
//! Quaternions are written `a + b i + c j + d k`; `SU(2)` is the unit sphere in
//! the quaternions and `su(2)` its purely imaginary part.

pub mod config;
pub mod cover;
pub mod cp3ref;
pub mod error;
pub mod export;
pub mod lagr;
pub mod pillow;
pub mod quat;
pub mod repvar;
pub mod sample;
pub mod suite;

pub use config::{RunConfig, Tolerances};
pub use error::{Error, Result};
pub use quat::{ImVec, Quat, S2Point, UnitQuat};
pub use repvar::{FourTuple, OrbitType, SixTuple, SurfaceRep};
