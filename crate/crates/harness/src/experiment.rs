//! Running learners against fixed games or adversaries and grading them.

use anyhow::{bail, Context};
use mql_core::adversary::{
    new_approx_adversary, new_exact_adversary, witness_search, AdversaryState,
};
use mql_core::learners::{gap_certificate, run_learner, LearnerConfig};
use mql_core::numerics::{Matrix, Rational, Scalar};
use mql_core::{gap, GameMatrix, Mode, Session, Transcript};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExperimentConfig, OracleSetup};
use crate::io;

/// Slack allowed on the regret certificate in float mode.
pub const FLOAT_CERTIFICATE_SLACK: f64 = 1e-8;

/// Denominator of random game entries.
const RANDOM_DENOMINATOR: i64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: usize,
    /// Exact canonical string.
    pub gap: String,
}

/// One adversary round, all values as canonical strings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: usize,
    pub moved: bool,
    pub u_norm_sq: String,
    pub step_parameter: String,
    pub dist_sq: String,
    pub decay: String,
    pub drift: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub repetition: usize,
    pub seed: u64,
    pub oracle: String,
    pub learner: String,
    pub k: usize,
    pub mode: String,
    pub horizon: usize,
    pub queries_used: usize,
    /// Gap of the recommendation: on the hidden matrix, or on the best
    /// witness for adversaries.
    pub gap: String,
    pub witness_kind: Option<String>,
    pub certificate: Option<String>,
    /// Whether `T g(M, p̂_T, q̂_T) <= certificate`.
    pub certificate_holds: Option<bool>,
    #[serde(skip)]
    pub trajectory: Vec<TrajectoryPoint>,
    #[serde(skip)]
    pub adversary_trace: Vec<TraceRow>,
    /// JSON-lines transcript.
    #[serde(skip)]
    pub transcript: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub runs: usize,
    pub oracle: String,
    pub learner: String,
    pub mode: String,
    pub mean_gap: f64,
    pub max_gap: f64,
    pub min_gap: f64,
    pub total_queries: usize,
    pub certificates_hold: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub runs: Vec<RunRecord>,
    pub summary: Summary,
}

/// A random game with entries `n/64` in `[-1, 1]`.
pub fn random_game<G: Rng>(k: usize, rng: &mut G) -> GameMatrix<Rational> {
    let d = RANDOM_DENOMINATOR;
    let rows = (0..k)
        .map(|_| {
            (0..k)
                .map(|_| Rational::ratio(rng.gen_range(-d..=d), d))
                .collect()
        })
        .collect();
    GameMatrix::new(Matrix::from_rows(rows).expect("square")).expect("in bounds")
}

/// Per-repetition seed.
pub fn repetition_seed(base: u64, repetition: usize) -> u64 {
    base.wrapping_add(repetition as u64)
}

/// `g(M_T, p̂_t, q̂_t)` for every prefix, from the observed losses alone. The
/// sums of `-loss_q` and `loss_p` are `M^T` and `M` applied to the summed
/// plays for any matrix that replays the transcript.
pub fn averaged_gap_trajectory<S: Scalar>(t: &Transcript<S>) -> Vec<S> {
    let k = t.k;
    let mut cols = mql_core::Vector::<S>::zeros(k);
    let mut rows = mql_core::Vector::<S>::zeros(k);
    let mut out = Vec::with_capacity(t.len());
    for (n, r) in t.rounds.iter().enumerate() {
        cols = cols.sub(&r.loss_q);
        rows = rows.add(&r.loss_p);
        let g = cols.argmax().expect("K >= 1").1 - rows.argmin().expect("K >= 1").1;
        out.push(g / S::from_int(n as i64 + 1));
    }
    out
}

/// Certificate and whether it bounds `T` times the gap of the averaged plays.
fn certificate_check<S: Scalar>(t: &Transcript<S>) -> anyhow::Result<Option<(S, bool)>> {
    if t.is_empty() {
        return Ok(None);
    }
    let cert = gap_certificate(t)?;
    let last = averaged_gap_trajectory(t).pop().expect("nonempty");
    let lhs = last * S::from_int(t.len() as i64);
    let holds = if S::is_exact() {
        lhs <= cert
    } else {
        lhs.to_f64() <= cert.to_f64() + FLOAT_CERTIFICATE_SLACK
    };
    Ok(Some((cert, holds)))
}

fn transcript_text<S: Scalar>(t: &Transcript<S>) -> anyhow::Result<String> {
    let mut buf = Vec::new();
    io::write_transcript(&mut buf, t)?;
    Ok(String::from_utf8(buf)?)
}

struct Graded<S> {
    transcript: Transcript<S>,
    gap: S,
    witness_kind: Option<String>,
    trace: Vec<TraceRow>,
}

fn record<S: Scalar>(
    config: &ExperimentConfig,
    repetition: usize,
    seed: u64,
    learner: &LearnerConfig,
    graded: Graded<S>,
) -> anyhow::Result<RunRecord> {
    let t = &graded.transcript;
    let cert = certificate_check(t)?;
    Ok(RunRecord {
        repetition,
        seed,
        oracle: config.oracle.name().to_string(),
        learner: learner.kind.to_string(),
        k: t.k,
        mode: S::MODE.to_string(),
        horizon: learner.horizon,
        queries_used: t.len(),
        gap: graded.gap.to_canonical(),
        witness_kind: graded.witness_kind,
        certificate: cert.as_ref().map(|(c, _)| c.to_canonical()),
        certificate_holds: cert.map(|(_, h)| h),
        trajectory: averaged_gap_trajectory(t)
            .iter()
            .enumerate()
            .map(|(i, g)| TrajectoryPoint {
                t: i + 1,
                gap: g.to_canonical(),
            })
            .collect(),
        adversary_trace: graded.trace,
        transcript: transcript_text(t)?,
    })
}

fn grade_fixed<S: Scalar>(m: GameMatrix<S>, learner: &LearnerConfig) -> anyhow::Result<Graded<S>> {
    let mut session = Session::new(m.clone());
    let transcript = run_learner(learner, &mut session)?;
    let (p, q) = transcript
        .recommendation
        .clone()
        .expect("learners finalize");
    Ok(Graded {
        gap: gap(&m, &p, &q)?.gap,
        transcript,
        witness_kind: None,
        trace: Vec::new(),
    })
}

fn trace_rows(state: &AdversaryState) -> Vec<TraceRow> {
    state
        .trace()
        .iter()
        .map(|r| TraceRow {
            t: r.t,
            moved: r.moved,
            u_norm_sq: r.u_norm_sq.to_canonical(),
            step_parameter: r.step_parameter.to_canonical(),
            dist_sq: r.dist_sq.to_canonical(),
            decay: r.decay.to_canonical(),
            drift: r.drift.to_canonical(),
        })
        .collect()
}

/// Runs `learner` against `state` and grades the recommendation by
/// [`witness_search`]. Returns the final adversary too.
pub fn run_against_adversary(
    state: AdversaryState,
    learner: &LearnerConfig,
) -> anyhow::Result<(
    AdversaryState,
    Transcript<Rational>,
    mql_core::adversary::WitnessReport,
)> {
    let mut session = Session::new(state);
    let transcript = run_learner(learner, &mut session)
        .with_context(|| format!("{} against the adversary", learner.kind))?;
    let (state, _) = session.into_parts();
    let (p, q) = transcript
        .recommendation
        .clone()
        .expect("learners finalize");
    let report = witness_search(&state, &p, &q)?;
    Ok((state, transcript, report))
}

fn run_one(config: &ExperimentConfig, repetition: usize) -> anyhow::Result<RunRecord> {
    let seed = repetition_seed(config.learner.seed, repetition);
    let mut learner = config.learner.clone();
    learner.seed = seed;
    let exact = config.mode == Mode::ExactRational;
    match &config.oracle {
        OracleSetup::Fixed { matrix } => {
            let m: GameMatrix<Rational> = io::read_matrix(matrix)?;
            check_k(config, m.k())?;
            fixed_record(config, repetition, seed, &learner, m, exact)
        }
        OracleSetup::Random => {
            let k = config.k.expect("validated");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_game(k, &mut rng);
            fixed_record(config, repetition, seed, &learner, m, exact)
        }
        OracleSetup::ExactAdversary | OracleSetup::ApproxAdversary { .. } => {
            let k = config.k.expect("validated");
            let state = match config.oracle {
                OracleSetup::ApproxAdversary { horizon } => new_approx_adversary(k, horizon)?,
                _ => new_exact_adversary(k)?,
            };
            let (state, transcript, report) = run_against_adversary(state, &learner)?;
            let graded = Graded {
                transcript,
                gap: report.gap,
                witness_kind: Some(format!("{:?}", report.direction_kind)),
                trace: trace_rows(&state),
            };
            record(config, repetition, seed, &learner, graded)
        }
    }
}

fn fixed_record(
    config: &ExperimentConfig,
    repetition: usize,
    seed: u64,
    learner: &LearnerConfig,
    m: GameMatrix<Rational>,
    exact: bool,
) -> anyhow::Result<RunRecord> {
    learner.validate(m.k())?;
    if exact {
        record(config, repetition, seed, learner, grade_fixed(m, learner)?)
    } else {
        let m: GameMatrix<f64> = m.map_mode()?;
        record(config, repetition, seed, learner, grade_fixed(m, learner)?)
    }
}

fn check_k(config: &ExperimentConfig, k: usize) -> anyhow::Result<()> {
    match config.k {
        Some(want) if want != k => bail!("config says k = {want} but the matrix is {k}x{k}"),
        _ => Ok(()),
    }
}

/// Executes every repetition, in order.
pub fn run_experiment(config: &ExperimentConfig) -> anyhow::Result<ExperimentResult> {
    config.validate()?;
    let runs = (0..config.repetitions)
        .map(|r| run_one(config, r).with_context(|| format!("repetition {r}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let gaps: Vec<f64> = runs
        .iter()
        .map(|r| Rational::parse_canonical(&r.gap).map(|g| g.to_f64()))
        .collect::<Result<_, _>>()?;
    let summary = Summary {
        runs: runs.len(),
        oracle: config.oracle.name().to_string(),
        learner: config.learner.kind.to_string(),
        mode: config.mode.to_string(),
        mean_gap: gaps.iter().sum::<f64>() / gaps.len() as f64,
        max_gap: gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        min_gap: gaps.iter().cloned().fold(f64::INFINITY, f64::min),
        total_queries: runs.iter().map(|r| r.queries_used).sum(),
        certificates_hold: runs.iter().all(|r| r.certificate_holds != Some(false)),
    };
    Ok(ExperimentResult { runs, summary })
}
