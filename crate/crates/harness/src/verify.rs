//! The acceptance checks. Each criterion runs a fixed, seeded workload and
//! reports its individual checks; `mql verify` and the `acceptance` test
//! target both call into here.

use std::fmt;
use std::time::{Duration, Instant};

use mql_core::adversary::{
    constraint_rank_analyzer, new_approx_adversary, new_exact_adversary, witness_search,
    AdversaryState,
};
use mql_core::game::min_support;
use mql_core::learners::{
    random_strategy, two_query_learner, uniform_learner, LearnerConfig, LearnerKind,
};
use mql_core::numerics::{powi, Matrix, Rational, Scalar, Vector};
use mql_core::recovery::{full_recovery, one_query_recovery, Alphabet};
use mql_core::simplex::solve_exact;
use mql_core::{gap, open_fixed_session, GameMatrix, MixedStrategy, Session, Transcript};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    invert_query_grid_violations, lower_bound_guard, lower_eps_exact, power_of_two_exponent,
    theoretical_bounds, DEFAULT_C,
};
use crate::experiment::{run_against_adversary, FLOAT_CERTIFICATE_SLACK};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.within_limit()
    }

    pub fn within_limit(&self) -> bool {
        self.limit.is_none_or(|l| self.elapsed < l)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {} [{status}] {} ({:.1}s",
            self.id,
            self.title,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(l) = self.limit {
            write!(f, ", limit {}s", l.as_secs())?;
        }
        write!(f, ")")?;
        let failed = self.failures();
        if failed.is_empty() {
            write!(f, ": {} checks", self.checks.len())
        } else {
            let names: Vec<String> = failed
                .iter()
                .map(|c| format!("{} ({})", c.name, c.detail))
                .collect();
            write!(f, ": failed {}", names.join("; "))
        }
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn add(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

fn timed(
    id: u8,
    title: &'static str,
    limit: Option<u64>,
    body: impl FnOnce(&mut Checks),
) -> CriterionReport {
    let start = Instant::now();
    let mut checks = Checks::new();
    body(&mut checks);
    CriterionReport {
        id,
        title,
        checks: checks.0,
        elapsed: start.elapsed(),
        limit: limit.map(Duration::from_secs),
    }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// Random game with entries `n/64` in `[lo, hi]`.
fn random_game<G: Rng>(k: usize, lo: i64, hi: i64, rng: &mut G) -> GameMatrix<Rational> {
    let d = 64;
    let rows = (0..k)
        .map(|_| {
            (0..k)
                .map(|_| r(rng.gen_range(lo * d..=hi * d), d))
                .collect()
        })
        .collect();
    GameMatrix::with_bounds(Matrix::from_rows(rows).unwrap(), r(lo, 1), r(hi, 1)).unwrap()
}

fn sign_matrices() -> impl Iterator<Item = GameMatrix<Rational>> {
    (0u32..512).map(|mask| {
        let rows = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        if mask >> (3 * i + j) & 1 == 1 {
                            r(1, 1)
                        } else {
                            r(-1, 1)
                        }
                    })
                    .collect()
            })
            .collect();
        GameMatrix::from_rows(rows).unwrap()
    })
}

/// Gap is nonnegative and vanishes exactly at the equilibrium value.
fn equilibrium_consistency<G: Rng>(m: &GameMatrix<Rational>, rng: &mut G) -> Result<(), String> {
    let sol = solve_exact(m).map_err(|e| e.to_string())?;
    let upper = m.col_payoffs(sol.p_star.weights()).argmax().unwrap().1;
    let lower = m.row_losses(sol.q_star.weights()).argmin().unwrap().1;
    if upper != sol.value || lower != sol.value {
        return Err("dual certificate mismatch".into());
    }
    let k = m.k();
    let mut pairs = vec![(sol.p_star.clone(), sol.q_star.clone())];
    for _ in 0..2 {
        let p = random_strategy(k, rng);
        let q = random_strategy(k, rng);
        pairs.push((sol.p_star.clone(), q.clone()));
        pairs.push((p.clone(), sol.q_star.clone()));
        pairs.push((p, q));
    }
    pairs.push((MixedStrategy::pure(k, 0), MixedStrategy::pure(k, k - 1)));
    for (p, q) in pairs {
        let g = gap(m, &p, &q).map_err(|e| e.to_string())?;
        if g.gap < Rational::zero() {
            return Err(format!("negative gap {}", g.gap));
        }
        let at_value =
            g.col_payoffs[g.best_column] == sol.value && g.row_losses[g.best_row] == sol.value;
        if g.gap.is_zero() != at_value {
            return Err(format!(
                "gap {} disagrees with the equilibrium value",
                g.gap
            ));
        }
    }
    if !gap(m, &sol.p_star, &sol.q_star).unwrap().gap.is_zero() {
        return Err("equilibrium has positive gap".into());
    }
    Ok(())
}

pub fn criterion_1() -> CriterionReport {
    timed(1, "gap and equilibrium oracle", Some(30), |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let bad: Vec<String> = sign_matrices()
            .enumerate()
            .filter_map(|(i, m)| {
                equilibrium_consistency(&m, &mut rng)
                    .err()
                    .map(|e| format!("#{i}: {e}"))
            })
            .collect();
        c.add("sign matrices 3x3 (512)", bad.is_empty(), bad.join(", "));
        let mut bad = Vec::new();
        for n in 0..10_000 {
            let k = rng.gen_range(1..=5);
            let m = random_game(k, -1, 1, &mut rng);
            if let Err(e) = equilibrium_consistency(&m, &mut rng) {
                bad.push(format!("#{n}: {e}"));
            }
        }
        c.add(
            "random rational K<=5 (10^4)",
            bad.is_empty(),
            bad.join(", "),
        );
    })
}

fn uniform_gap(m: &GameMatrix<Rational>) -> (Rational, usize) {
    let mut s = open_fixed_session(m.clone());
    let t = uniform_learner(&mut s).unwrap();
    let n = t.len();
    let (p, q) = t.recommendation.unwrap();
    (gap(m, &p, &q).unwrap().gap, n)
}

pub fn criterion_2() -> CriterionReport {
    timed(2, "uniform play", None, |c| {
        let bound3 = r(4, 3);
        let worst = sign_matrices()
            .map(|m| uniform_gap(&m))
            .fold((Rational::zero(), 0), |a, b| if b.0 > a.0 { b } else { a });
        c.add(
            "sign matrices 3x3 gap <= 4/3",
            worst.0 <= bound3 && worst.1 == 0,
            format!("max gap {}", worst.0),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        let bound8 = r(7, 4);
        let over = (0..1000)
            .filter(|_| uniform_gap(&random_game(8, -1, 1, &mut rng)).0 > bound8)
            .count();
        c.add(
            "random K=8 gap <= 7/4 (10^3)",
            over == 0,
            format!("{over} violations"),
        );
        let tight = GameMatrix::<Rational>::from_ints(&[&[1, -1], &[1, -1]]).unwrap();
        let g = uniform_gap(&tight).0;
        c.add(
            "tight witness K=2 gap = 1",
            g == Rational::one(),
            format!("gap {g}"),
        );
    })
}

pub fn criterion_3() -> CriterionReport {
    timed(3, "two-query strategy", None, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        for (lo, bound) in [(0i64, r(1, 1)), (-1, r(2, 1))] {
            let mut worst = Rational::zero();
            let mut wrong_budget = 0;
            for _ in 0..1000 {
                let m = random_game(8, lo, 1, &mut rng);
                let mut s = open_fixed_session(m.clone());
                let t = two_query_learner(&mut s).unwrap();
                wrong_budget += usize::from(t.len() != 2);
                let (p, q) = t.recommendation.unwrap();
                worst = Scalar::max_of(worst, gap(&m, &p, &q).unwrap().gap);
            }
            c.add(
                format!("entries in [{lo}, 1]: gap <= {bound}, 2 queries"),
                worst <= bound && wrong_budget == 0,
                format!("max gap {}, {wrong_budget} runs off budget", worst),
            );
        }
    })
}

/// `T g(M, p̂, q̂)` and the certificate for a float-mode run.
fn float_run(m: &GameMatrix<f64>, kind: LearnerKind, horizon: usize) -> (f64, f64, f64) {
    let mut s = Session::new(m.clone());
    let cfg = LearnerConfig::new(kind, horizon);
    let t: Transcript<f64> = mql_core::learners::run_learner(&cfg, &mut s).unwrap();
    let (p, q) = t.average_plays().unwrap();
    let g = gap(m, &p, &q).unwrap().gap;
    let cert = mql_core::learners::gap_certificate(&t).unwrap();
    (g, horizon as f64 * g, cert)
}

pub fn criterion_4() -> CriterionReport {
    timed(4, "online-to-batch certificate", Some(120), |c| {
        for kind in [LearnerKind::OptimisticMwu, LearnerKind::FictitiousPlay] {
            let mut cert_bad = Vec::new();
            let mut trend_bad = Vec::new();
            for seed in 0..20u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(4000 + seed);
                let m: GameMatrix<f64> = random_game(16, -1, 1, &mut rng).map_mode().unwrap();
                let mut gaps = Vec::new();
                for horizon in [64, 512] {
                    let (g, lhs, cert) = float_run(&m, kind, horizon);
                    if lhs > cert + FLOAT_CERTIFICATE_SLACK {
                        cert_bad.push(format!("seed {seed} T={horizon}: {lhs} > {cert}"));
                    }
                    gaps.push(g);
                }
                if !(gaps[1] < gaps[0]) {
                    trend_bad.push(format!("seed {seed}: {} -> {}", gaps[0], gaps[1]));
                }
            }
            c.add(
                format!("{kind}: T g <= certificate"),
                cert_bad.is_empty(),
                cert_bad.join(", "),
            );
            c.add(
                format!("{kind}: gap(512) < gap(64)"),
                trend_bad.is_empty(),
                trend_bad.join(", "),
            );
        }
    })
}

/// `M_t^T p_s = M_s^T p_s` and `M_t q_s = M_s q_s` for all `s <= t`.
fn adapted(state: &AdversaryState) -> bool {
    let snaps = state.snapshots();
    state.history().iter().enumerate().all(|(s, rec)| {
        let m_s = &snaps[s + 1];
        let cols = m_s.col_payoffs(rec.p.weights());
        let rows = m_s.row_losses(rec.q.weights());
        snaps[s + 1..].iter().all(|m_t| {
            m_t.col_payoffs(rec.p.weights()) == cols && m_t.row_losses(rec.q.weights()) == rows
        })
    })
}

pub fn criterion_5() -> CriterionReport {
    timed(5, "exact adversary", Some(60), |c| {
        let (k, horizon) = (16, 7);
        let mut learners = vec![
            LearnerConfig::new(LearnerKind::RandomQuery, horizon),
            LearnerConfig::new(LearnerKind::TruncatedBasis, horizon),
            LearnerConfig::new(LearnerKind::OptimisticMwu, horizon),
        ];
        learners[0].seed = 505;
        for cfg in learners {
            let name = cfg.kind.to_string();
            let state = new_exact_adversary(k).unwrap();
            let (state, t, w) = match run_against_adversary(state, &cfg) {
                Ok(x) => x,
                Err(e) => {
                    c.add(format!("{name}: run"), false, e.to_string());
                    continue;
                }
            };
            c.add(
                format!("{name}: {} rounds", horizon),
                t.len() == horizon,
                format!("{}", t.len()),
            );
            c.add(format!("{name}: adaptedness"), adapted(&state), "");
            let one = Rational::one();
            let interior = state.snapshots().iter().all(|m| {
                m.matrix()
                    .entries()
                    .all(|(_, _, x)| -one.clone() < *x && *x < one)
            });
            c.add(format!("{name}: entries in (-1, 1)"), interior, "");
            let positive = state.trace().iter().all(|tr| tr.dist_sq > Rational::zero());
            c.add(format!("{name}: dist^2(1, span) > 0"), positive, "");
            c.add(
                format!("{name}: witness gap > 0"),
                w.gap > Rational::zero(),
                format!("{} via {:?}", w.gap.to_f64(), w.direction_kind),
            );
        }
    })
}

pub fn criterion_6() -> CriterionReport {
    timed(6, "approximate adversary", Some(120), |c| {
        let (k, horizon) = (8, 2);
        let radius = r(1, 1024);
        // K (r^2 / (8 K T^2))^{T+1} = 2^-81
        let terminal_floor = Rational::from_int(k as i64)
            * powi(
                &(radius.clone() * radius.clone()
                    / Rational::from_int((8 * k * horizon * horizon) as i64)),
                horizon as i32 + 1,
            );
        c.add(
            "terminal bound is 2^-81",
            power_of_two_exponent(&terminal_floor) == Some(-81),
            terminal_floor.to_canonical(),
        );
        let eps_lb = lower_eps_exact(k, horizon).expect("2K = 16");
        let witness_floor = Rational::from_int(2) * eps_lb / Rational::from_int(4);

        let mut learners = vec![
            LearnerConfig::new(LearnerKind::RandomQuery, horizon),
            LearnerConfig::new(LearnerKind::OptimisticMwu, horizon),
            LearnerConfig::new(LearnerKind::TruncatedBasis, horizon),
            LearnerConfig::new(LearnerKind::FictitiousPlay, horizon),
            LearnerConfig::new(LearnerKind::TwoQuery, horizon),
        ];
        learners[0].seed = 606;
        for cfg in learners {
            let name = cfg.kind.to_string();
            let state = new_approx_adversary(k, horizon).unwrap();
            let (state, _t, w) = match run_against_adversary(state, &cfg) {
                Ok(x) => x,
                Err(e) => {
                    c.add(format!("{name}: run"), false, e.to_string());
                    continue;
                }
            };
            let alpha_bar = state.alpha_bar().unwrap().clone();
            let decay_ok = state
                .trace()
                .iter()
                .all(|tr| tr.decay >= alpha_bar.clone() / Rational::from_int(2));
            c.add(format!("{name}: decay >= alpha_bar/2"), decay_ok, "");
            let terminal = state.distance_potential(&Rational::one()).unwrap();
            c.add(
                format!("{name}: dist^2 >= 2^-81"),
                terminal >= terminal_floor,
                format!("log2 dist^2 = {:.2}", terminal.to_f64().log2()),
            );
            let half_r = radius.clone() / Rational::from_int(2);
            let drift_ok = state.trace().iter().all(|tr| tr.drift <= half_r);
            c.add(
                format!("{name}: drift <= r/2"),
                drift_ok && adapted(&state),
                "",
            );
            c.add(
                format!("{name}: witness gap >= 2 eps_lb / 4"),
                w.gap >= witness_floor,
                format!("log2 gap = {:.2}", w.gap.to_f64().log2()),
            );
            // Hardest recommendation: an exact equilibrium of M_T itself.
            let sol = solve_exact(state.current()).unwrap();
            let w = witness_search(&state, &sol.p_star, &sol.q_star).unwrap();
            c.add(
                format!("{name}: equilibrium of M_T exposed"),
                w.gap >= witness_floor,
                format!("log2 gap = {:.2}", w.gap.to_f64().log2()),
            );
        }
    })
}

pub fn criterion_7() -> CriterionReport {
    timed(7, "matrix recovery", Some(60), |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(707);
        let alphabets = [
            Alphabet::new(1, vec![0, 1]).unwrap(),
            Alphabet::new(1, vec![-1, 0, 1]).unwrap(),
            Alphabet::range(4, -4, 4).unwrap(),
        ];
        for a in &alphabets {
            let values = a.values();
            let mut bad = 0;
            for _ in 0..1000 {
                let k = rng.gen_range(1..=16);
                let rows = (0..k)
                    .map(|_| {
                        (0..k)
                            .map(|_| values.choose(&mut rng).unwrap().clone())
                            .collect()
                    })
                    .collect();
                let m = GameMatrix::from_rows(rows).unwrap();
                let mut s = open_fixed_session(m.clone());
                let ok = matches!(one_query_recovery(&mut s, a), Ok(d) if d.matrix() == m.matrix())
                    && s.queries_used() == 1;
                bad += usize::from(!ok);
            }
            c.add(
                format!(
                    "one-query round trip, alphabet {:?}/{}",
                    a.numerators(),
                    a.denominator()
                ),
                bad == 0,
                format!("{bad} failures"),
            );
        }
        let mut bad = 0;
        for k in 1..=8 {
            for _ in 0..10 {
                let m = random_game(k, -1, 1, &mut rng);
                let mut s = open_fixed_session(m.clone());
                let ok = matches!(full_recovery(&mut s), Ok(d) if d.matrix() == m.matrix())
                    && s.queries_used() == k;
                bad += usize::from(!ok);
            }
        }
        c.add(
            "full recovery in exactly K queries",
            bad == 0,
            format!("{bad} failures"),
        );
        let mut bad = Vec::new();
        for k in 1..=6 {
            for trial in 0..20 {
                let mut order: Vec<usize> = (0..k).collect();
                order.shuffle(&mut rng);
                let queries: Vec<(Vector<Rational>, Vector<Rational>)> = (0..k)
                    .map(|t| {
                        if trial % 2 == 0 {
                            let e = Vector::basis(k, order[t]);
                            (e.clone(), e)
                        } else {
                            (
                                random_strategy(k, &mut rng).weights().clone(),
                                random_strategy(k, &mut rng).weights().clone(),
                            )
                        }
                    })
                    .collect();
                let steps = constraint_rank_analyzer(&queries, k).unwrap();
                for (i, s) in steps.iter().enumerate() {
                    let t = i + 1;
                    if s.nullspace_dim < (k - t) * (k - t) || s.new_constraints > 2 * (k - t) + 1 {
                        bad.push(format!("K={k} t={t}: {s:?}"));
                    }
                }
            }
        }
        c.add(
            "null space >= (K-t)^2, new <= 2(K-t)+1",
            bad.is_empty(),
            bad.join(", "),
        );
    })
}

pub fn criterion_8() -> CriterionReport {
    timed(8, "support and value in the ball", None, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(808);
        for k in [2usize, 4, 8] {
            let kk = k as i64;
            let radius = r(1, 16 * kk * kk);
            let mut bad = 0;
            for _ in 0..100 {
                let mut m = Matrix::identity(k).scale(&r(1, 2));
                for i in 0..k {
                    for j in 0..k {
                        let d = radius.clone() * r(rng.gen_range(-64..=64), 64);
                        m.set(i, j, m.get(i, j).clone() + d);
                    }
                }
                let sol = solve_exact(&GameMatrix::new(m).unwrap()).unwrap();
                let ok = min_support(&sol.p_star, &sol.q_star) >= r(1, 2 * kk)
                    && sol.value >= r(1, 4 * kk);
                bad += usize::from(!ok);
            }
            c.add(
                format!("K={k}: support >= 1/(2K), value >= 1/(4K)"),
                bad == 0,
                format!("{bad} failures"),
            );
        }
    })
}

pub fn criterion_9() -> CriterionReport {
    timed(9, "bound formulas", None, |c| {
        let exact = lower_eps_exact(8, 2).unwrap();
        c.add(
            "lower_eps(8, 2) = 2^-64",
            power_of_two_exponent(&exact) == Some(-64),
            exact.to_canonical(),
        );
        let bad = invert_query_grid_violations();
        let detail: Vec<String> = bad
            .iter()
            .map(|(a, b, x, v)| format!("a={a} b={b} x={x}: bound {v:.3} > x"))
            .collect();
        c.add(
            "invert_query_bound implication on the grid",
            bad.is_empty(),
            detail.join(", "),
        );
        let mut bad = Vec::new();
        for k in 5..=64 {
            let guard = lower_bound_guard(k);
            for j in 0..=60 {
                let eps = guard * 2f64.powi(-j);
                let b = theoretical_bounds(k, eps, DEFAULT_C).unwrap();
                if b.lower_t > b.upper_t {
                    bad.push(format!("K={k} eps={eps:e}"));
                }
            }
        }
        c.add(
            "lower_T <= upper_T on the guard region",
            bad.is_empty(),
            bad.join(", "),
        );
    })
}

pub const CRITERIA: [fn() -> CriterionReport; 9] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
];

/// Runs one criterion by number (1-based).
pub fn run_criterion(id: usize) -> Option<CriterionReport> {
    CRITERIA.get(id.checked_sub(1)?).map(|f| f())
}
