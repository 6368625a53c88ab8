//! NURBS geometry: knot vectors, curves, surfaces and the ruled cutout patch.

mod curve;
mod knots;
mod surface;

pub use curve::{conic_arc, join_c0, ControlPoint, NurbsCurve};
pub use knots::KnotVector;
pub use surface::{
    build_connectivity, ruled_surface, ElementConnectivity, NurbsSurface, ParamPoint,
    RationalBasis, SurfaceEval,
};
