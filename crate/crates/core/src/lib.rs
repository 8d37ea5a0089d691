//! First-order query model for two-player zero-sum matrix games.
//!
//! A learner queries a pair of mixed strategies `(p, q)` and sees the loss
//! vectors `(M q, -M^T p)`. This crate holds the exact numerics, the game
//! types, an exact equilibrium solver, the query protocol, a set of learners,
//! the adaptive adversaries used for lower bounds, and exact one-query
//! recovery of matrices with entries from a finite alphabet.

pub mod adversary;
pub mod error;
pub mod game;
pub mod learners;
pub mod numerics;
pub mod oracle;
pub mod recovery;
pub mod simplex;

pub use error::{Error, Result};
pub use game::{gap, is_eps_equilibrium, GameMatrix, GapReport, MixedStrategy};
pub use numerics::{Mode, Rational, Scalar, Vector};
pub use oracle::{open_fixed_session, QueryRecord, Responder, Session, Transcript};
