mod common;

use common::*;
use mql_core::learners::{gap_certificate, run_learner, LearnerConfig, LearnerKind};
use mql_core::numerics::{Matrix, Rational, Scalar};
use mql_core::{gap, open_fixed_session, GameMatrix, MixedStrategy};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn queries(
    k: usize,
) -> impl Strategy<Value = Vec<(MixedStrategy<Rational>, MixedStrategy<Rational>)>> {
    prop::collection::vec((strategy(k), strategy(k)), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fixed_sessions_are_consistent(
        (m, qs) in (1usize..=6).prop_flat_map(|k| (game(k), queries(k)))
    ) {
        let mut s = open_fixed_session(m.clone());
        let mut replay = open_fixed_session(m.clone());
        for (t, (p, q)) in qs.iter().enumerate() {
            let rec = s.query(p, q).unwrap();
            prop_assert_eq!(rec.t, t + 1);
            // <p, Mq> = -<q, -M^T p>
            prop_assert_eq!(p.weights().dot(&rec.loss_p), -q.weights().dot(&rec.loss_q));
            let again = replay.query(p, q).unwrap();
            prop_assert_eq!(&again, &rec);

            // sum_i q_i e_i p^T and sum_j p_j q e_j^T are both q p^T.
            let k = m.k();
            let mut left = Matrix::<Rational>::zeros(k, k);
            let mut right = Matrix::<Rational>::zeros(k, k);
            for i in 0..k {
                let mut row_block = Matrix::zeros(k, k);
                for j in 0..k {
                    row_block.set(i, j, p.weights()[j].clone());
                }
                left = left.add(&row_block.scale(&q.weights()[i]));
            }
            for j in 0..k {
                let mut col_block = Matrix::zeros(k, k);
                for i in 0..k {
                    col_block.set(i, j, q.weights()[i].clone());
                }
                right = right.add(&col_block.scale(&p.weights()[j]));
            }
            prop_assert!(left.sub(&right).max_abs().is_zero());
        }
    }

    #[test]
    fn certificate_bounds_averaged_gap(
        m in (2usize..=5).prop_flat_map(game),
        kind_idx in 0usize..LearnerKind::ALL.len(),
        horizon in 1usize..=12,
        seed in any::<u64>(),
    ) {
        let kind = LearnerKind::ALL[kind_idx];
        let k = m.k();
        let mut cfg = LearnerConfig::new(kind, horizon.max(kind.min_horizon(k)));
        cfg.seed = seed;
        let mut s = open_fixed_session(m.clone());
        let t = run_learner(&cfg, &mut s).unwrap();
        let expected = match kind {
            LearnerKind::Uniform => 0,
            LearnerKind::TwoQuery => 2,
            LearnerKind::BasisRecovery => k,
            LearnerKind::TruncatedBasis => cfg.horizon.min(k),
            _ => cfg.horizon,
        };
        prop_assert_eq!(t.len(), expected);
        prop_assert!(t.recommendation.is_some());
        if t.is_empty() {
            return Ok(());
        }
        let cert = gap_certificate(&t).unwrap();
        prop_assert!(cert >= Rational::zero());
        let (p_hat, q_hat) = t.average_plays().unwrap();
        let g = gap(&m, &p_hat, &q_hat).unwrap().gap;
        prop_assert!(Rational::from_int(t.len() as i64) * g <= cert);
        if kind == LearnerKind::BasisRecovery {
            let (p, q) = t.recommendation.as_ref().unwrap();
            prop_assert!(gap(&m, p, q).unwrap().gap.is_zero());
        }
    }
}

#[test]
fn two_query_ranges() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (lo, bound) in [(0i64, r(1, 1)), (-1, r(2, 1))] {
        for _ in 0..200 {
            let m = random_game(8, lo, 1, 8, &mut rng);
            let mut s = open_fixed_session(m.clone());
            let t = mql_core::learners::two_query_learner(&mut s).unwrap();
            assert_eq!(t.len(), 2);
            let (p, q) = t.recommendation.unwrap();
            assert!(gap(&m, &p, &q).unwrap().gap <= bound);
        }
    }
}

#[test]
fn basis_recovery_reconstructs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 1..=8 {
        for _ in 0..12 {
            let m = random_game(k, -1, 1, 7, &mut rng);
            let mut s = open_fixed_session(m.clone());
            let rec = mql_core::recovery::full_recovery(&mut s).unwrap();
            assert_eq!(s.queries_used(), k);
            assert_eq!(rec.matrix(), m.matrix());
        }
    }
}

#[test]
fn constant_matrix_learners_have_zero_gap() {
    let m = GameMatrix::<Rational>::new(
        Matrix::identity(4)
            .scale(&r(0, 1))
            .add(&Matrix::from_rows(vec![vec![r(1, 3); 4]; 4]).unwrap()),
    )
    .unwrap();
    for kind in LearnerKind::ALL {
        let cfg = LearnerConfig::new(kind, kind.min_horizon(4).max(3));
        let mut s = open_fixed_session(m.clone());
        let t = run_learner(&cfg, &mut s).unwrap();
        let (p, q) = t.recommendation.unwrap();
        assert!(gap(&m, &p, &q).unwrap().gap.is_zero(), "{kind}");
    }
}
