//! Equilibrium-finding strategies in the first-order query model.
//!
//! Every learner drives a [`Session`], finalizes it with its recommendation and
//! returns the resulting transcript.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{GameMatrix, MixedStrategy};
use crate::numerics::{Matrix, Scalar, Vector};
use crate::oracle::{Responder, Session, Transcript};
use crate::recovery::full_recovery;
use crate::simplex::solve_exact;

/// Default step size of optimistic exponential weights for losses in `[-1, 1]`.
pub const DEFAULT_ETA: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LearnerKind {
    Uniform,
    TwoQuery,
    BasisRecovery,
    FictitiousPlay,
    OptimisticMwu,
    /// Independent random queries and an independent random recommendation.
    RandomQuery,
    /// Basis queries up to the horizon, then the equilibrium of the partially
    /// observed matrix (unknown entries read as zero).
    TruncatedBasis,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 7] = [
        LearnerKind::Uniform,
        LearnerKind::TwoQuery,
        LearnerKind::BasisRecovery,
        LearnerKind::FictitiousPlay,
        LearnerKind::OptimisticMwu,
        LearnerKind::RandomQuery,
        LearnerKind::TruncatedBasis,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::Uniform => "uniform",
            LearnerKind::TwoQuery => "two_query",
            LearnerKind::BasisRecovery => "basis_recovery",
            LearnerKind::FictitiousPlay => "fictitious_play",
            LearnerKind::OptimisticMwu => "optimistic_mwu",
            LearnerKind::RandomQuery => "random_query",
            LearnerKind::TruncatedBasis => "truncated_basis",
        }
    }

    /// Fewest queries the kind needs on a `K`-action game with horizon `t`.
    pub fn min_horizon(self, k: usize) -> usize {
        match self {
            LearnerKind::Uniform | LearnerKind::TruncatedBasis | LearnerKind::RandomQuery => 0,
            LearnerKind::TwoQuery => 2,
            LearnerKind::BasisRecovery => k,
            LearnerKind::FictitiousPlay | LearnerKind::OptimisticMwu => 1,
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        let alias = match norm.as_str() {
            "omwu" | "mwu" | "optimistic" => "optimistic_mwu",
            "fp" | "fictitious" => "fictitious_play",
            "basis" => "basis_recovery",
            "two" | "twoquery" => "two_query",
            "random" => "random_query",
            "truncated" => "truncated_basis",
            other => other,
        };
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == alias)
            .ok_or_else(|| Error::Parse(format!("unknown learner `{s}`")))
    }
}

/// Learner selection and parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    pub horizon: usize,
    pub eta: f64,
    pub seed: u64,
}

impl LearnerConfig {
    pub fn new(kind: LearnerKind, horizon: usize) -> Self {
        LearnerConfig {
            kind,
            horizon,
            eta: DEFAULT_ETA,
            seed: 0,
        }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        let need = self.kind.min_horizon(k);
        if self.horizon < need {
            return Err(Error::InvalidArgument(format!(
                "{} needs horizon >= {need}, got {}",
                self.kind, self.horizon
            )));
        }
        Ok(())
    }
}

/// Runs the configured learner to completion.
pub fn run_learner<S: Scalar, R: Responder<S>>(
    config: &LearnerConfig,
    session: &mut Session<S, R>,
) -> Result<Transcript<S>> {
    config.validate(session.k())?;
    match config.kind {
        LearnerKind::Uniform => uniform_learner(session),
        LearnerKind::TwoQuery => two_query_learner(session),
        LearnerKind::BasisRecovery => basis_recovery_learner(session, config.horizon),
        LearnerKind::FictitiousPlay => fictitious_play_learner(session, config.horizon),
        LearnerKind::OptimisticMwu => optimistic_mwu_learner(session, config.horizon, config.eta),
        LearnerKind::RandomQuery => random_query_learner(session, config.horizon, config.seed),
        LearnerKind::TruncatedBasis => truncated_basis_learner(session, config.horizon),
    }
}

/// Zero queries; recommends the uniform pair.
pub fn uniform_learner<S: Scalar, R: Responder<S>>(
    session: &mut Session<S, R>,
) -> Result<Transcript<S>> {
    let u = MixedStrategy::uniform(session.k());
    session.finalize(u.clone(), u)
}

/// Two queries: find the column player's best response `j*` to `e_1`, then the
/// row player's best response `i*` to `e_{j*}`; recommend
/// `((e_1 + e_{i*}) / 2, e_{j*})`.
pub fn two_query_learner<S: Scalar, R: Responder<S>>(
    session: &mut Session<S, R>,
) -> Result<Transcript<S>> {
    let k = session.k();
    let uniform = MixedStrategy::uniform(k);
    let first = session.query(&MixedStrategy::pure(k, 0), &uniform)?;
    let (j_star, _) = first.loss_q.neg().argmax().expect("K >= 1");
    let second = session.query(&uniform, &MixedStrategy::pure(k, j_star))?;
    let (i_star, _) = second.loss_p.argmin().expect("K >= 1");
    let half = S::ratio(1, 2);
    let mut p = Vector::zeros(k);
    p[0] = half.clone();
    p[i_star] = p[i_star].clone() + half;
    session.finalize(MixedStrategy::new(p)?, MixedStrategy::pure(k, j_star))
}

/// `K` basis queries recover the matrix; recommends its exact equilibrium.
pub fn basis_recovery_learner<S: Scalar, R: Responder<S>>(
    session: &mut Session<S, R>,
    horizon: usize,
) -> Result<Transcript<S>> {
    let k = session.k();
    if horizon < k {
        return Err(Error::InvalidArgument(format!(
            "basis recovery needs horizon >= K = {k}, got {horizon}"
        )));
    }
    if !S::is_exact() {
        return Err(Error::ExactOnly("basis_recovery_learner"));
    }
    let m = full_recovery(session)?;
    let sol = solve_exact(&m)?;
    session.finalize(sol.p_star, sol.q_star)
}

/// Basis queries `(e_t, e_t)` for `t < min(budget, K)`; rows and columns never
/// observed are filled with zeros before solving.
pub fn truncated_basis_learner<S: Scalar, R: Responder<S>>(
    session: &mut Session<S, R>,
    budget: usize,
) -> Result<Transcript<S>> {
    if !S::is_exact() {
        return Err(Error::ExactOnly("truncated_basis_learner"));
    }
    let k = session.k();
    let mut guess = Matrix::<S>::zeros(k, k);
    for t in 0..budget.min(k) {
        let e = MixedStrategy::pure(k, t);
        let rec = session.query(&e, &e)?;
        for j in 0..k {
            guess.set(t, j, -rec.loss_q[j].clone());
            guess.set(j, t, rec.loss_p[j].clone());
        }
    }
    let bound = S::max_of(S::one(), guess.max_abs());
    let m = GameMatrix::with_bounds(guess, -bound.clone(), bound)?;
    let sol = solve_exact(&m)?;
    session.finalize(sol.p_star, sol.q_star)
}

/// Both players best-respond (lowest index on ties) to the opponent's
/// empirical average, starting from `(e_1, e_1)`; recommends the average
/// plays.
pub fn fictitious_play_learner<S: Scalar, R: Responder<S>>(
    session: &mut Session<S, R>,
    horizon: usize,
) -> Result<Transcript<S>> {
    if horizon == 0 {
        return Err(Error::InvalidArgument(
            "fictitious play needs T >= 1".into(),
        ));
    }
    let k = session.k();
    let mut p = MixedStrategy::pure(k, 0);
    let mut q = MixedStrategy::pure(k, 0);
    // Sums are proportional to the losses against the opponent's average.
    let mut sum_p = Vector::<S>::zeros(k);
    let mut sum_q = Vector::<S>::zeros(k);
    for _ in 0..horizon {
        let rec = session.query(&p, &q)?;
        sum_p = sum_p.add(&rec.loss_p);
        sum_q = sum_q.add(&rec.loss_q);
        p = MixedStrategy::pure(k, sum_p.argmin().expect("K >= 1").0);
        q = MixedStrategy::pure(k, sum_q.argmin().expect("K >= 1").0);
    }
    let (p_hat, q_hat) = session.transcript().average_plays()?;
    session.finalize(p_hat, q_hat)
}

/// Optimistic exponential weights for one player: the next strategy is
/// proportional to `exp(-eta * (cumulative loss + last loss))`.
#[derive(Debug, Clone)]
pub struct OptimisticWeights {
    eta: f64,
    cumulative: Vec<f64>,
    last: Vec<f64>,
}

impl OptimisticWeights {
    pub fn new(k: usize, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "eta must be positive, got {eta}"
            )));
        }
        Ok(OptimisticWeights {
            eta,
            cumulative: vec![0.0; k],
            last: vec![0.0; k],
        })
    }

    pub fn observe(&mut self, loss: &[f64]) {
        for ((c, l), x) in self.cumulative.iter_mut().zip(&mut self.last).zip(loss) {
            *c += x;
            *l = *x;
        }
    }

    /// Current strategy as floats, computed in the log domain.
    pub fn probabilities(&self) -> Vec<f64> {
        let logits: Vec<f64> = self
            .cumulative
            .iter()
            .zip(&self.last)
            .map(|(c, l)| -self.eta * (c + l))
            .collect();
        let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logits.iter().map(|x| (x - top).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    /// Current strategy in the session's scalar mode (exactly normalized in
    /// rational mode).
    pub fn strategy<S: Scalar>(&self) -> Result<MixedStrategy<S>> {
        let weights: Vector<S> = self
            .probabilities()
            .into_iter()
            .map(|x| S::from_f64(x).expect("finite weight"))
            .collect();
        MixedStrategy::from_unnormalized(weights)
    }
}

/// Both players run [`OptimisticWeights`] for `horizon` rounds; recommends the
/// average plays.
pub fn optimistic_mwu_learner<S: Scalar, R: Responder<S>>(
    session: &mut Session<S, R>,
    horizon: usize,
    eta: f64,
) -> Result<Transcript<S>> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("optimistic MWU needs T >= 1".into()));
    }
    let k = session.k();
    let mut row = OptimisticWeights::new(k, eta)?;
    let mut col = OptimisticWeights::new(k, eta)?;
    for _ in 0..horizon {
        let p = row.strategy::<S>()?;
        let q = col.strategy::<S>()?;
        let rec = session.query(&p, &q)?;
        row.observe(&rec.loss_p.iter().map(Scalar::to_f64).collect::<Vec<_>>());
        col.observe(&rec.loss_q.iter().map(Scalar::to_f64).collect::<Vec<_>>());
    }
    let (p_hat, q_hat) = session.transcript().average_plays()?;
    session.finalize(p_hat, q_hat)
}

/// A random strategy with integer weights in `1..=16`, exact in every mode.
pub fn random_strategy<S: Scalar, G: Rng>(k: usize, rng: &mut G) -> MixedStrategy<S> {
    let w: Vector<S> = (0..k).map(|_| S::from_int(rng.gen_range(1..=16))).collect();
    MixedStrategy::from_unnormalized(w).expect("positive weights")
}

/// `horizon` independent random queries, then an independent random
/// recommendation.
pub fn random_query_learner<S: Scalar, R: Responder<S>>(
    session: &mut Session<S, R>,
    horizon: usize,
    seed: u64,
) -> Result<Transcript<S>> {
    let k = session.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..horizon {
        let p = random_strategy(k, &mut rng);
        let q = random_strategy(k, &mut rng);
        session.query(&p, &q)?;
    }
    let p = random_strategy(k, &mut rng);
    let q = random_strategy(k, &mut rng);
    session.finalize(p, q)
}

/// Sum of both players' external regrets over the transcript, computed from
/// observed losses alone. Upper-bounds `T * g(M, p̂_T, q̂_T)`.
pub fn gap_certificate<S: Scalar>(transcript: &Transcript<S>) -> Result<S> {
    if transcript.is_empty() {
        return Err(Error::InvalidArgument(
            "certificate of an empty transcript".into(),
        ));
    }
    Ok(transcript.rounds.iter().fold(S::zero(), |acc, r| {
        let row_regret = r.p.weights().dot(&r.loss_p) - r.loss_p.argmin().expect("K >= 1").1;
        let col_regret = r.q.weights().dot(&r.loss_q) - r.loss_q.argmin().expect("K >= 1").1;
        acc + row_regret + col_regret
    }))
}
