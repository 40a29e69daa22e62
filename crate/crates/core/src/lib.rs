//! Self-linking numbers of framed closed space curves.
//!
//! The self-linking number of a framed knot is computed two independent ways:
//!
//! * analytically, as the Gauss writhe double integral plus the twist of the
//!   framing ([`quadrature::writhe_integral`] + [`framing::twist_integral`]);
//! * combinatorially, as the linking number of the curve with its pushoff,
//!   read off the signed crossings of a generic planar projection
//!   ([`diagram::combinatorial_linking`]).
//!
//! [`invariant`] assembles the two and runs the invariance harnesses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagram;
pub mod error;
pub mod framing;
pub mod geometry;
pub mod invariant;
pub mod quadrature;

pub use error::{Error, Result};

pub use framing::{Framing, FramingRule, FramingSpec, LiftClass};
pub use geometry::{Curve, CurveKind, CurveSpec, FrameTriple, Vec3};
pub use invariant::{Epsilon, IsotopyFamily, SelfLinkConfig, SelfLinkReport};
pub use quadrature::{IntegralResult, QuadratureConfig};


/// Upper bound on the number of points used for the O(n) validation scans.
pub const SCAN_POINTS: usize = 1024;
