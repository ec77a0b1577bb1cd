//! Exact combinatorics of pointed translation surfaces presented as glued
//! unions of rational rectangles.
//!
//! Everything is generic over an exact [`Scalar`] field; the `Rat*` aliases
//! below fix it to arbitrary-precision rationals, which is what the command
//! line tool and most callers want.

pub mod disks;
pub mod geom;
pub mod io;
pub mod lattice;
pub mod morphism;
pub mod samples;
pub mod scalar;
pub mod surface;
pub mod transform;
pub mod unionfind;

pub use geom::{Point, Rect, RectiLoop};
pub use scalar::Scalar;
pub use surface::{Classification, SubUnion, Surface, SurfacePoint};

pub type Rational = num_rational::BigRational;
pub type RatPoint = Point<Rational>;
pub type RatRect = Rect<Rational>;
pub type RatLoop = RectiLoop<Rational>;
pub type RatSurface = Surface<Rational>;
pub type RatSurfacePoint = SurfacePoint<Rational>;
pub type RatSubUnion = SubUnion<Rational>;
