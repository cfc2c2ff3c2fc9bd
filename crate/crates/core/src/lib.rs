//! Closed curves on the unit sphere whose geodesic curvature lies in an
//! interval `(κ₁, κ₂)`: frame integration, translations and bands, component
//! classification, explicit homotopies, grafting and good bands.

pub mod band_geometry;
pub mod classification;
pub mod curve_model;
pub mod error;
pub mod good_bands;
pub mod grafting;
pub mod homotopy_engine;
pub mod io;
mod lp;
pub mod sphere_core;
pub mod tolerance;

pub use curve_model::{AdmissibleCurve, ControlPair, CurvatureBounds, LiftParity};
pub use error::{Error, Result};
pub use sphere_core::{Rotation3, SphericalSimplex, UnitQuaternion, UnitVector3, Vec2, Vec3};
pub use tolerance::ToleranceProfile;
