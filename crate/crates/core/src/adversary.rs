//! Adaptive adversaries that answer queries so that the all-ones vector stays
//! away from the span of the column player's observed losses, plus the tools
//! used to grade a learner against them.
//!
//! Both constructions start at `M_0 = I_K / 2`. When a query `p` leaves the
//! span of earlier row queries, with residual `p̄`, the adversary moves to
//! `M + p̄ u^T / ‖p̄‖²` where `u` is orthogonal to all column queries so far
//! (including the current one), to every earlier column loss, to `1` and to
//! `M^T p`. Earlier answers are unchanged and the new column loss gains the
//! component `u`, which is orthogonal to everything the learner has seen.
//!
//! All arithmetic is exact: in the approximate case the step size is a power
//! of two chosen against a power-of-four stand-in `ᾱ <= α` for the step
//! parameter, so no square roots are needed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{gap, GameMatrix, MixedStrategy};
use crate::numerics::{
    extend_span, kernel_basis, orthogonal_complement_vector, project_onto_span, span_distance_sq,
    RankTracker, Rational, Scalar, SpanBasis, Vector,
};
use crate::oracle::{QueryRecord, Responder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryCase {
    /// Keeps `M_t` strictly inside `(-1, 1)` with a halving margin; horizon
    /// up to `K/2 - 1`.
    Exact,
    /// Keeps `M_t` within `r/2` of `M_0` for `r = 1/(16 K^2)` over a fixed
    /// horizon `T <= (K - 3)/2`.
    Approx { horizon: usize },
}

/// Per-round diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace {
    pub t: usize,
    /// Whether the row query left the span of earlier ones (and `M` moved).
    pub moved: bool,
    /// `‖u_t‖²`, zero when the adversary did not move.
    pub u_norm_sq: Rational,
    /// Exact case: the margin used for this step. Approximate case: `ᾱ`.
    pub step_parameter: Rational,
    /// `dist²(1, span of column losses)` after the round.
    pub dist_sq: Rational,
    /// Ratio of the potential after the round to the potential before.
    pub decay: Rational,
    /// `‖M_t - M_0‖_{1,∞}` after the round.
    pub drift: Rational,
}

/// Mutable state of an adaptive adversary.
#[derive(Debug, Clone)]
pub struct AdversaryState {
    k: usize,
    case: AdversaryCase,
    current: GameMatrix<Rational>,
    center: GameMatrix<Rational>,
    ball_radius: Rational,
    inner_radius: Rational,
    margin: Rational,
    alpha: Option<Rational>,
    alpha_bar: Option<Rational>,
    p_span: SpanBasis<Rational>,
    p_queries: Vec<Vector<Rational>>,
    q_queries: Vec<Vector<Rational>>,
    losses_q: Vec<Vector<Rational>>,
    lossq_span: SpanBasis<Rational>,
    history: Vec<QueryRecord<Rational>>,
    snapshots: Vec<GameMatrix<Rational>>,
    trace: Vec<RoundTrace>,
}

fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// Exact-case adversary on `K >= 3` actions, starting at `I_K / 2` with
/// margin `1/2`.
pub fn new_exact_adversary(k: usize) -> Result<AdversaryState> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "exact adversary needs K >= 3, got {k}"
        )));
    }
    AdversaryState::start(k, AdversaryCase::Exact, r(1, 2), r(1, 2), None, None)
}

/// Approximate-case adversary over the ball of radius `1/(16 K^2)` around
/// `I_K / 2`, for horizon `1 <= T <= (K - 3)/2`.
pub fn new_approx_adversary(k: usize, horizon: usize) -> Result<AdversaryState> {
    if k < 5 {
        return Err(Error::InvalidArgument(format!(
            "approximate adversary needs K >= 5, got {k}"
        )));
    }
    if horizon == 0 || 2 * horizon + 3 > k {
        return Err(Error::InvalidArgument(format!(
            "horizon must satisfy 1 <= T <= (K-3)/2, got T = {horizon}, K = {k}"
        )));
    }
    let radius = approx_radius(k);
    let alpha = approx_alpha(k, horizon);
    let alpha_bar = power_of_four_below(&alpha);
    AdversaryState::start(
        k,
        AdversaryCase::Approx { horizon },
        radius.clone(),
        radius / Rational::from_int(2),
        Some(alpha),
        Some(alpha_bar),
    )
}

/// `r = 1 / (16 K^2)`.
pub fn approx_radius(k: usize) -> Rational {
    let k = k as i64;
    r(1, 16 * k * k)
}

/// `α = (r/2)² / (K T²)`.
pub fn approx_alpha(k: usize, horizon: usize) -> Rational {
    let half = approx_radius(k) / Rational::from_int(2);
    half.clone() * half / Rational::from_int((k * horizon * horizon) as i64)
}

/// Largest `4^{-n}` (`n >= 0`) not exceeding `x`, for `0 < x`.
pub fn power_of_four_below(x: &Rational) -> Rational {
    assert!(*x > Rational::zero());
    let four = Rational::from_int(4);
    let mut p = Rational::one();
    while p > *x {
        p /= four.clone();
    }
    p
}

/// Smallest `2^m` (`m` any integer) with `4^m >= x`, for `0 < x`.
fn power_of_two_sqrt_above(x: &Rational) -> Rational {
    let two = Rational::from_int(2);
    let mut s = Rational::one();
    if s.clone() * s.clone() >= *x {
        loop {
            let half = s.clone() / two.clone();
            if half.clone() * half.clone() >= *x {
                s = half;
            } else {
                return s;
            }
        }
    }
    while s.clone() * s.clone() < *x {
        s *= two.clone();
    }
    s
}

impl AdversaryState {
    fn start(
        k: usize,
        case: AdversaryCase,
        ball_radius: Rational,
        inner_radius: Rational,
        alpha: Option<Rational>,
        alpha_bar: Option<Rational>,
    ) -> Result<Self> {
        let center = GameMatrix::scaled_identity(k, r(1, 2))?;
        Ok(AdversaryState {
            k,
            case,
            current: center.clone(),
            snapshots: vec![center.clone()],
            center,
            margin: r(1, 2),
            ball_radius,
            inner_radius,
            alpha,
            alpha_bar,
            p_span: SpanBasis::empty(k),
            p_queries: Vec::new(),
            q_queries: Vec::new(),
            losses_q: Vec::new(),
            lossq_span: SpanBasis::empty(k),
            history: Vec::new(),
            trace: Vec::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn case(&self) -> AdversaryCase {
        self.case
    }

    /// Rounds answered so far.
    pub fn t(&self) -> usize {
        self.history.len()
    }

    /// Largest number of rounds this adversary can answer.
    pub fn max_rounds(&self) -> usize {
        match self.case {
            AdversaryCase::Exact => (self.k - 2) / 2,
            AdversaryCase::Approx { horizon } => horizon,
        }
    }

    /// The current candidate `M_t`.
    pub fn current(&self) -> &GameMatrix<Rational> {
        &self.current
    }

    /// `M_0 = I_K / 2`.
    pub fn center(&self) -> &GameMatrix<Rational> {
        &self.center
    }

    /// Radius (in `‖·‖_{1,∞}`) of the declared ball around `M_0`.
    pub fn ball_radius(&self) -> &Rational {
        &self.ball_radius
    }

    /// Radius of a ball around `M_t` certified to stay inside the declared
    /// ball and the entry bounds.
    pub fn inner_radius(&self) -> &Rational {
        &self.inner_radius
    }

    pub fn margin(&self) -> &Rational {
        &self.margin
    }

    pub fn alpha(&self) -> Option<&Rational> {
        self.alpha.as_ref()
    }

    pub fn alpha_bar(&self) -> Option<&Rational> {
        self.alpha_bar.as_ref()
    }

    pub fn p_span(&self) -> &SpanBasis<Rational> {
        &self.p_span
    }

    pub fn lossq_span(&self) -> &SpanBasis<Rational> {
        &self.lossq_span
    }

    pub fn q_queries(&self) -> &[Vector<Rational>] {
        &self.q_queries
    }

    pub fn p_queries(&self) -> &[Vector<Rational>] {
        &self.p_queries
    }

    pub fn history(&self) -> &[QueryRecord<Rational>] {
        &self.history
    }

    /// `M_0, M_1, ..., M_t`.
    pub fn snapshots(&self) -> &[GameMatrix<Rational>] {
        &self.snapshots
    }

    pub fn trace(&self) -> &[RoundTrace] {
        &self.trace
    }

    /// `‖M_t - M_0‖_{1,∞}`.
    pub fn drift(&self) -> Rational {
        self.current.matrix().sub(self.center.matrix()).max_abs()
    }

    fn check_budget(&self, case: AdversaryCase) -> Result<()> {
        if self.case != case {
            return Err(Error::InvalidArgument(
                "respond called for the wrong adversary case".into(),
            ));
        }
        let round = self.t() + 1;
        if round > self.max_rounds() {
            return Err(Error::BudgetExceeded {
                round,
                horizon: self.max_rounds(),
            });
        }
        Ok(())
    }

    /// The direction `u` before scaling: orthogonal to `q_{1:t+1}`,
    /// `ℓ^{(q)}_{1:t}`, `1` and `M_t^T p`.
    fn raw_direction(
        &self,
        p: &Vector<Rational>,
        q: &Vector<Rational>,
    ) -> Result<Vector<Rational>> {
        let mut constraints: Vec<Vector<Rational>> = self.q_queries.clone();
        constraints.push(q.clone());
        constraints.extend(self.losses_q.iter().cloned());
        constraints.push(Vector::ones(self.k));
        constraints.push(self.current.col_payoffs(p));
        // Rescaling rows leaves the kernel alone and keeps elimination cheap.
        let constraints: Vec<_> = constraints.iter().map(primitive).collect();
        Ok(primitive(&orthogonal_complement_vector(
            &constraints,
            self.k,
        )?))
    }

    /// Exact-case answer.
    ///
    /// If `p` is in the span of earlier row queries the matrix is kept.
    /// Otherwise `u` is scaled to `‖u‖_∞ = margin ‖p̄‖² / (4 ‖p̄‖_∞)`, so the
    /// step moves no entry by more than `margin / 4`, and the margin halves.
    pub fn exact_respond(
        &mut self,
        p: &MixedStrategy<Rational>,
        q: &MixedStrategy<Rational>,
    ) -> Result<QueryRecord<Rational>> {
        self.check_budget(AdversaryCase::Exact)?;
        let (p, q) = (p.weights(), q.weights());
        p.check_dim(self.k)?;
        q.check_dim(self.k)?;
        let (_, p_bar) = project_onto_span(p, &self.p_span)?;
        let step_parameter = self.margin.clone();
        let mut u_norm_sq = Rational::zero();
        if !p_bar.is_zero() {
            let w = self.raw_direction(p, q)?;
            let target =
                self.margin.clone() * p_bar.norm_sq() / (Rational::from_int(4) * p_bar.norm_inf());
            let u = w.scale(&(target / w.norm_inf()));
            u_norm_sq = u.norm_sq();
            self.move_along(&p_bar, &u)?;
            self.margin /= Rational::from_int(2);
            self.inner_radius = self.margin.clone();
        }
        self.record(p, q, u_norm_sq, step_parameter, !p_bar.is_zero())
    }

    /// Approximate-case answer.
    ///
    /// `‖u‖²` is the smallest value of the form `4^m ‖w‖²` that is at least
    /// `ᾱ ‖M_t^T p̄‖²`, hence below `4 ᾱ ‖M_t^T p̄‖²`. That keeps every step
    /// within `r / (2T)` in `‖·‖_{1,∞}` and shrinks the potential
    /// `dist²(v1, span)` by at most the factor `ᾱ / 2` per round.
    pub fn approx_respond(
        &mut self,
        p: &MixedStrategy<Rational>,
        q: &MixedStrategy<Rational>,
    ) -> Result<QueryRecord<Rational>> {
        let AdversaryCase::Approx { horizon } = self.case else {
            return Err(Error::InvalidArgument(
                "approx_respond on an exact-case adversary".into(),
            ));
        };
        self.check_budget(self.case)?;
        let (p, q) = (p.weights(), q.weights());
        p.check_dim(self.k)?;
        q.check_dim(self.k)?;
        let alpha_bar = self
            .alpha_bar
            .clone()
            .expect("approximate case sets alpha_bar");
        let (_, p_bar) = project_onto_span(p, &self.p_span)?;
        let mut u_norm_sq = Rational::zero();
        if !p_bar.is_zero() {
            let w = self.raw_direction(p, q)?;
            let image = self.current.col_payoffs(&p_bar).norm_sq();
            if image.is_zero() {
                return Err(Error::Invariant("M_t^T p̄ vanished inside the ball".into()));
            }
            let s = power_of_two_sqrt_above(&(alpha_bar.clone() * image / w.norm_sq()));
            let u = w.scale(&s);
            let step = p_bar.norm_inf() * u.norm_inf() / p_bar.norm_sq();
            let cap = self.ball_radius.clone() / Rational::from_int(2 * horizon as i64);
            if step > cap {
                return Err(Error::Invariant(format!(
                    "step {} exceeds r/(2T) = {}",
                    step.to_canonical(),
                    cap.to_canonical()
                )));
            }
            u_norm_sq = u.norm_sq();
            self.move_along(&p_bar, &u)?;
        }
        self.record(p, q, u_norm_sq, alpha_bar, !p_bar.is_zero())
    }

    fn move_along(&mut self, p_bar: &Vector<Rational>, u: &Vector<Rational>) -> Result<()> {
        let c = Rational::one() / p_bar.norm_sq();
        let next = self.current.matrix().add_outer(&c, p_bar, u);
        self.current = self.current.with_matrix(next)?;
        Ok(())
    }

    fn record(
        &mut self,
        p: &Vector<Rational>,
        q: &Vector<Rational>,
        u_norm_sq: Rational,
        step_parameter: Rational,
        moved: bool,
    ) -> Result<QueryRecord<Rational>> {
        let before = span_distance_sq(&Vector::ones(self.k), &self.lossq_span)?;
        let loss_p = self.current.row_losses(q);
        let loss_q = self.current.col_payoffs(p).neg();
        self.p_span = extend_span(&self.p_span, p)?;
        self.lossq_span = extend_span(&self.lossq_span, &loss_q)?;
        self.p_queries.push(p.clone());
        self.q_queries.push(q.clone());
        self.losses_q.push(loss_q.clone());
        let after = span_distance_sq(&Vector::ones(self.k), &self.lossq_span)?;
        let record = QueryRecord {
            t: self.history.len() + 1,
            p: MixedStrategy::new(p.clone())?,
            q: MixedStrategy::new(q.clone())?,
            loss_p,
            loss_q,
        };
        self.history.push(record.clone());
        self.snapshots.push(self.current.clone());
        self.trace.push(RoundTrace {
            t: record.t,
            moved,
            u_norm_sq,
            step_parameter,
            decay: after.clone() / before,
            dist_sq: after,
            drift: self.drift(),
        });
        Ok(record)
    }

    /// `dist²(v 1, span of column losses)`.
    pub fn distance_potential(&self, v: &Rational) -> Result<Rational> {
        if *v < Rational::zero() {
            return Err(Error::InvalidArgument("v must be nonnegative".into()));
        }
        span_distance_sq(&Vector::filled(self.k, v.clone()), &self.lossq_span)
    }
}

impl Responder<Rational> for AdversaryState {
    fn k(&self) -> usize {
        self.k
    }

    fn kind(&self) -> &'static str {
        match self.case {
            AdversaryCase::Exact => "exact_adversary",
            AdversaryCase::Approx { .. } => "approx_adversary",
        }
    }

    fn respond(
        &mut self,
        p: &MixedStrategy<Rational>,
        q: &MixedStrategy<Rational>,
    ) -> Result<(Vector<Rational>, Vector<Rational>)> {
        let rec = match self.case {
            AdversaryCase::Exact => self.exact_respond(p, q)?,
            AdversaryCase::Approx { .. } => self.approx_respond(p, q)?,
        };
        Ok((rec.loss_p, rec.loss_q))
    }
}

/// Positive multiple of `v` with coprime integer entries (`v` itself if zero).
pub fn primitive(v: &Vector<Rational>) -> Vector<Rational> {
    if v.is_zero() {
        return v.clone();
    }
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd))
        .collect()
}

/// Whether `m` reproduces every recorded loss exactly.
pub fn replays<S: Scalar>(m: &GameMatrix<S>, history: &[QueryRecord<S>]) -> bool {
    history.iter().all(|rec| {
        m.row_losses(rec.q.weights()) == rec.loss_p
            && m.col_payoffs(rec.p.weights()).neg() == rec.loss_q
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionKind {
    /// The adversary's own `M_T`.
    Center,
    /// `M_T ± c p̄ u^T` with `u` orthogonal to every column query.
    RowSide,
    /// `M_T ± c u q̄^T` with `u` orthogonal to every row query.
    ColumnSide,
}

/// A matrix consistent with the whole transcript that exposes the
/// recommendation.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub witness: GameMatrix<Rational>,
    pub gap: Rational,
    pub direction_kind: DirectionKind,
    /// Coefficient `c` of the rank-one perturbation (zero for `Center`).
    pub scale: Rational,
}

/// Searches the rank-one perturbations of `M_T` that leave every recorded
/// answer unchanged and have `‖·‖_{1,∞}` equal to the inner radius, and returns
/// the candidate (including `M_T` itself) on which the recommendation has the
/// largest gap. Ties keep the earliest candidate.
pub fn witness_search(
    state: &AdversaryState,
    p_rec: &MixedStrategy<Rational>,
    q_rec: &MixedStrategy<Rational>,
) -> Result<WitnessReport> {
    let k = state.k;
    p_rec.weights().check_dim(k)?;
    q_rec.weights().check_dim(k)?;
    if !replays(&state.current, &state.history) {
        return Err(Error::Invariant("M_T breaks replay".into()));
    }
    let q_span = SpanBasis::spanning(k, &state.q_queries)?;
    let (_, p_bar) = project_onto_span(p_rec.weights(), &state.p_span)?;
    let (_, q_bar) = project_onto_span(q_rec.weights(), &q_span)?;
    let p_bar = primitive(&p_bar);
    let q_bar = primitive(&q_bar);
    let q_kernel = primitive_kernel(&state.q_queries, k)?;
    let p_kernel = primitive_kernel(&state.p_queries, k)?;

    // Candidate `M_T + c x y^T`, described by (kind, x, y); None is M_T.
    let mut directions: Vec<(DirectionKind, &Vector<Rational>, &Vector<Rational>)> = Vec::new();
    if !p_bar.is_zero() {
        for u in &q_kernel {
            directions.push((DirectionKind::RowSide, &p_bar, u));
        }
    }
    if !q_bar.is_zero() {
        for u in &p_kernel {
            directions.push((DirectionKind::ColumnSide, u, &q_bar));
        }
    }

    let base_cols = state.current.col_payoffs(p_rec.weights());
    let base_rows = state.current.row_losses(q_rec.weights());
    let gap_of = |cols: &Vector<Rational>, rows: &Vector<Rational>| {
        cols.argmax().expect("K >= 1").1 - rows.argmin().expect("K >= 1").1
    };
    let mut best = (
        gap_of(&base_cols, &base_rows),
        None::<(DirectionKind, Rational, usize)>,
    );
    for (idx, (kind, x, y)) in directions.iter().enumerate() {
        // M + c x y^T keeps M^T p_s and M q_s iff x ⊥ p_s and y ⊥ q_s.
        let consistent = state
            .history
            .iter()
            .all(|rec| x.dot(rec.p.weights()).is_zero() && y.dot(rec.q.weights()).is_zero());
        if !consistent {
            return Err(Error::Invariant(format!(
                "{kind:?} direction breaks replay"
            )));
        }
        let c = state.inner_radius.clone() / (x.norm_inf() * y.norm_inf());
        for c in [c.clone(), -c] {
            let cols = base_cols.axpy(&(c.clone() * x.dot(p_rec.weights())), y);
            let rows = base_rows.axpy(&(c.clone() * y.dot(q_rec.weights())), x);
            let g = gap_of(&cols, &rows);
            if g > best.0 {
                best = (g, Some((*kind, c, idx)));
            }
        }
    }

    let (witness, direction_kind, scale) = match best.1 {
        None => (
            state.current.clone(),
            DirectionKind::Center,
            Rational::zero(),
        ),
        Some((kind, c, idx)) => {
            let (_, x, y) = directions[idx];
            let m = state.current.matrix().add_outer(&c, x, y);
            (state.current.with_matrix(m)?, kind, c)
        }
    };
    let offset = witness.matrix().sub(state.center.matrix()).max_abs();
    if offset > state.ball_radius {
        return Err(Error::Invariant(format!(
            "{direction_kind:?} witness leaves the declared ball"
        )));
    }
    let report = gap(&witness, p_rec, q_rec)?;
    debug_assert_eq!(report.gap, best.0);
    Ok(WitnessReport {
        witness,
        gap: report.gap,
        direction_kind,
        scale,
    })
}

fn primitive_kernel(rows: &[Vector<Rational>], k: usize) -> Result<Vec<Vector<Rational>>> {
    let rows: Vec<_> = rows.iter().map(primitive).collect();
    Ok(kernel_basis(&rows, k)?.iter().map(primitive).collect())
}

/// Rank bookkeeping for one round of [`constraint_rank_analyzer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankStep {
    pub new_constraints: usize,
    pub nullspace_dim: usize,
}

/// Treats the entries of `M` as `K²` unknowns and adds, per query `(p, q)`,
/// the `2K` linear constraints fixing `M^T p` and `M q`. Reports the rank
/// increase and the remaining null-space dimension after each round.
pub fn constraint_rank_analyzer<S: Scalar>(
    queries: &[(Vector<S>, Vector<S>)],
    k: usize,
) -> Result<Vec<RankStep>> {
    let mut tracker = RankTracker::<S>::new(k * k);
    let mut steps = Vec::with_capacity(queries.len());
    for (p, q) in queries {
        p.check_dim(k)?;
        q.check_dim(k)?;
        let before = tracker.rank();
        // (M^T p)_j = sum_i p_i M_ij
        for j in 0..k {
            let mut row = Vector::zeros(k * k);
            for i in 0..k {
                row[i * k + j] = p[i].clone();
            }
            tracker.insert(&row)?;
        }
        // (M q)_i = sum_j M_ij q_j
        for i in 0..k {
            let mut row = Vector::zeros(k * k);
            for j in 0..k {
                row[i * k + j] = q[j].clone();
            }
            tracker.insert(&row)?;
        }
        steps.push(RankStep {
            new_constraints: tracker.rank() - before,
            nullspace_dim: tracker.nullity(),
        });
    }
    Ok(steps)
}
