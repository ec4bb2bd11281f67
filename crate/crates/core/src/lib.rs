//! Jones polynomials of open and closed polygonal curves in space.
//!
//! A curve is projected along one or more directions; each projection gives a
//! diagram whose Kauffman bracket is computed either by a full state sum or
//! by splitting the diagram in two and gluing partial state sums. Averaging
//! over many directions gives the expected Jones polynomial, which is defined
//! for open curves as well.

pub mod bracket;
pub mod diagram;
pub mod expected;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod laurent;
pub mod par;
pub mod reidemeister;
pub mod run;
mod tangle;

pub use bracket::{evaluate, jones_of_diagram, Engine, EngineOptions};
pub use diagram::{build_diagram, crossing_count, writhe, Crossing, Diagram};
pub use geometry::{project, Curve3D, Direction};
pub use laurent::{LaurentPoly, QuarterPoly};
pub use par::Parallelism;
pub use reidemeister::{simplify, simplify_with, Move};
pub use expected::{expected_jones, DirectionSource, ExpectedJonesResult, ExpectedOptions};
