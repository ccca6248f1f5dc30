//! Exact construction, verification and analysis of one-layer, double-sided
//! wrappings of a `1 × b` envelope by equal squares.
//!
//! All coordinates live in a single real quadratic field `Q(√d)` fixed by `b`;
//! no predicate is ever decided in floating point. Floats appear only in the
//! Monte Carlo cross-check and in rendering.
//!
//! ```
//! use wrapkit::field::rat_int;
//! use wrapkit::{construct_wrapping, decide_wrappable, verify_wrapping, QuadExt};
//!
//! let b = QuadExt::new(rat_int(2), rat_int(1), &3.into()); // 2 + √3
//! let params = decide_wrappable(&b).unwrap().expect("wrappable");
//! let spec = construct_wrapping(&params).unwrap();
//! assert_eq!(spec.squares.len(), 8);
//! assert!(verify_wrapping(&spec).is_valid);
//! ```

pub mod characterize;
pub mod construct;
pub mod field;
pub mod geometry;
pub mod quotient;
pub mod tiling;
pub mod verify;

pub use characterize::{b_from_params, decide_wrappable, params_from_strip_data, RootSign, WrapParams};
pub use construct::{construct_wrapping, ConstructionParams, WrappingSpec};
pub use field::{QuadExt, Rational};
pub use geometry::{ConvexPolygon, Point2, SquareShape};
pub use quotient::{GroupElement, Lattice};
pub use verify::{fold_wrapping, monte_carlo_check, verify_wrapping, VerificationReport};
