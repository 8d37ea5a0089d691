//! Mode-generic scalars, vectors and matrices, plus the span and elimination
//! machinery the game, oracle and adversary modules are built on.

mod elimination;
mod matrix;
mod scalar;
mod span;
mod vector;

pub use elimination::{kernel_basis, orthogonal_complement_vector, RankTracker, Rref};
pub use matrix::Matrix;
pub use scalar::{convert, parse_rational, powi, Mode, Rational, Scalar, FLOAT_TOLERANCE};
pub use span::{extend_span, project_onto_span, span_distance_sq, SpanBasis};
pub use vector::Vector;
