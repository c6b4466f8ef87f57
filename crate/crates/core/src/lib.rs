//! Cartan frames of null curves in Minkowski 3-space, null similar curves
//! under variable transformations of the curve parameter, and the executable
//! checks that relate them (normal, binormal and curvature-ratio criteria,
//! Bertrand pairs, closure of geodesic, torsion-free and helix families).

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curve;
pub mod error;
pub mod families;
pub mod frame;
pub mod grid;
pub mod lorentz;
pub mod ode;
pub mod phi;
pub mod profile;
pub mod quad;
pub mod similarity;
pub mod stencil;

pub use curve::{NullCurve, ScalarFn};
pub use error::{Error, Result};
pub use frame::{FrameSample, FramedCurve};
pub use grid::ParameterGrid;
pub use lorentz::Vec3;
