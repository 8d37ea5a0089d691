//! The first-order interaction protocol.
//!
//! A learner submits `(p, q)` and observes `(M q, -M^T p)`. Learners only ever
//! hold a [`Session`], never the matrix behind it.

use crate::error::{Error, Result};
use crate::game::{GameMatrix, MixedStrategy};
use crate::numerics::{Scalar, Vector};

/// One answered query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord<S> {
    /// 1-based round index.
    pub t: usize,
    pub p: MixedStrategy<S>,
    pub q: MixedStrategy<S>,
    /// `M q`.
    pub loss_p: Vector<S>,
    /// `-M^T p`.
    pub loss_q: Vector<S>,
}

/// Ordered record of a session, plus the learner's final recommendation.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript<S> {
    pub k: usize,
    pub oracle: &'static str,
    pub rounds: Vec<QueryRecord<S>>,
    pub recommendation: Option<(MixedStrategy<S>, MixedStrategy<S>)>,
}

impl<S: Scalar> Transcript<S> {
    pub fn new(k: usize, oracle: &'static str) -> Self {
        Transcript {
            k,
            oracle,
            rounds: Vec::new(),
            recommendation: None,
        }
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Averages of the queried strategies, `(p̂_T, q̂_T)`.
    pub fn average_plays(&self) -> Result<(MixedStrategy<S>, MixedStrategy<S>)> {
        Ok((
            MixedStrategy::average(self.rounds.iter().map(|r| &r.p))?,
            MixedStrategy::average(self.rounds.iter().map(|r| &r.q))?,
        ))
    }
}

/// Something that answers first-order queries: a fixed matrix or an adaptive
/// adversary.
pub trait Responder<S: Scalar> {
    fn k(&self) -> usize;

    fn kind(&self) -> &'static str;

    /// Returns `(loss_p, loss_q) = (M q, -M^T p)` for the matrix the responder
    /// commits to this round.
    fn respond(
        &mut self,
        p: &MixedStrategy<S>,
        q: &MixedStrategy<S>,
    ) -> Result<(Vector<S>, Vector<S>)>;
}

impl<S: Scalar> Responder<S> for GameMatrix<S> {
    fn k(&self) -> usize {
        GameMatrix::k(self)
    }

    fn kind(&self) -> &'static str {
        "fixed"
    }

    fn respond(
        &mut self,
        p: &MixedStrategy<S>,
        q: &MixedStrategy<S>,
    ) -> Result<(Vector<S>, Vector<S>)> {
        Ok((
            self.row_losses(q.weights()),
            self.col_payoffs(p.weights()).neg(),
        ))
    }
}

/// Single-owner query session.
#[derive(Debug)]
pub struct Session<S: Scalar, R> {
    responder: R,
    transcript: Transcript<S>,
    closed: bool,
}

/// A session answered by a fixed hidden matrix.
pub type FixedSession<S> = Session<S, GameMatrix<S>>;

/// Opens a session answered by the fixed matrix `m`.
pub fn open_fixed_session<S: Scalar>(m: GameMatrix<S>) -> FixedSession<S> {
    Session::new(m)
}

impl<S: Scalar, R: Responder<S>> Session<S, R> {
    pub fn new(responder: R) -> Self {
        let transcript = Transcript::new(responder.k(), responder.kind());
        Session {
            responder,
            transcript,
            closed: false,
        }
    }

    pub fn k(&self) -> usize {
        self.transcript.k
    }

    pub fn queries_used(&self) -> usize {
        self.transcript.rounds.len()
    }

    pub fn rounds(&self) -> &[QueryRecord<S>] {
        &self.transcript.rounds
    }

    pub fn query(&mut self, p: &MixedStrategy<S>, q: &MixedStrategy<S>) -> Result<QueryRecord<S>> {
        if self.closed {
            return Err(Error::SessionClosed);
        }
        // Re-validate: strategies may have been built from raw weights.
        let p = MixedStrategy::new(p.weights().clone())?;
        let q = MixedStrategy::new(q.weights().clone())?;
        p.weights().check_dim(self.k())?;
        q.weights().check_dim(self.k())?;
        let (loss_p, loss_q) = self.responder.respond(&p, &q)?;
        let record = QueryRecord {
            t: self.transcript.rounds.len() + 1,
            p,
            q,
            loss_p,
            loss_q,
        };
        self.transcript.rounds.push(record.clone());
        Ok(record)
    }

    /// Records the recommendation and closes the session.
    pub fn finalize(&mut self, p: MixedStrategy<S>, q: MixedStrategy<S>) -> Result<Transcript<S>> {
        if self.closed {
            return Err(Error::SessionClosed);
        }
        p.weights().check_dim(self.k())?;
        q.weights().check_dim(self.k())?;
        self.closed = true;
        self.transcript.recommendation = Some((p, q));
        Ok(self.transcript.clone())
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn transcript(&self) -> &Transcript<S> {
        &self.transcript
    }

    /// Gives back the responder (e.g. the adversary, for grading) and the
    /// transcript.
    pub fn into_parts(self) -> (R, Transcript<S>) {
        (self.responder, self.transcript)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn sample() -> GameMatrix<Rational> {
        GameMatrix::from_rows(vec![vec![r(1, 2), r(-1, 2)], vec![r(1, 4), r(1, 1)]]).unwrap()
    }

    #[test]
    fn basis_query_losses() {
        let mut s = open_fixed_session(sample());
        let rec = s
            .query(&MixedStrategy::pure(2, 0), &MixedStrategy::pure(2, 1))
            .unwrap();
        assert_eq!(rec.t, 1);
        assert_eq!(rec.loss_p, Vector::from_ratios(&[(-1, 2), (1, 1)]));
        assert_eq!(rec.loss_q, Vector::from_ratios(&[(-1, 2), (1, 2)]));
    }

    #[test]
    fn uniform_pennies_losses() {
        let m = GameMatrix::<Rational>::from_ints(&[&[1, -1], &[-1, 1]]).unwrap();
        let mut s = open_fixed_session(m);
        let u = MixedStrategy::uniform(2);
        let rec = s.query(&u, &u).unwrap();
        assert!(rec.loss_p.is_zero() && rec.loss_q.is_zero());
    }

    #[test]
    fn finalize_semantics() {
        let mut s = open_fixed_session(sample());
        let u = MixedStrategy::uniform(2);
        let t = s.finalize(u.clone(), u.clone()).unwrap();
        assert_eq!(t.len(), 0);
        assert_eq!(t.recommendation, Some((u.clone(), u.clone())));
        assert_eq!(s.finalize(u.clone(), u.clone()), Err(Error::SessionClosed));
        assert_eq!(s.query(&u, &u), Err(Error::SessionClosed));
    }

    #[test]
    fn rejects_bad_strategy() {
        let mut s = open_fixed_session(sample());
        let u = MixedStrategy::uniform(3);
        assert!(s.query(&u, &u).is_err());
    }
}
