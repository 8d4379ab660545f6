//! Diameter of the intersection of two closed geodesic balls whose centres
//! separate along a geodesic, computed and checked on Riemannian model
//! manifolds.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exec;
pub mod geodesic;
pub mod io;
pub mod lens;
pub mod manifold;
mod ode;
pub mod radii;
pub mod sets;
pub mod suite;

pub use error::{GeoError, Result};
pub use exec::Execution;
pub use manifold::{ManifoldModel, ManifoldPoint, ModelKind, TangentVector};
