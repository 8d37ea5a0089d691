mod common;

use common::*;
use mql_core::game::{min_support, support_bound};
use mql_core::numerics::{Matrix, Rational, Scalar};
use mql_core::simplex::solve_exact;
use mql_core::{gap, is_eps_equilibrium, GameMatrix, MixedStrategy};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(
    max_k: usize,
) -> impl Strategy<
    Value = (
        GameMatrix<Rational>,
        MixedStrategy<Rational>,
        MixedStrategy<Rational>,
    ),
> {
    (1..=max_k).prop_flat_map(|k| (game(k), strategy(k), strategy(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn gap_is_nonnegative((m, p, q) in instance(8)) {
        let g = gap(&m, &p, &q).unwrap();
        prop_assert!(g.gap >= Rational::zero());
        prop_assert_eq!(
            g.gap.clone(),
            g.col_payoffs[g.best_column].clone() - g.row_losses[g.best_row].clone()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn zero_gap_iff_equilibrium((m, p, q) in instance(4)) {
        let sol = solve_exact(&m).unwrap();
        prop_assert!(gap(&m, &sol.p_star, &sol.q_star).unwrap().gap.is_zero());
        let upper = m.col_payoffs(sol.p_star.weights()).argmax().unwrap().1;
        let lower = m.row_losses(sol.q_star.weights()).argmin().unwrap().1;
        prop_assert_eq!(&upper, &sol.value);
        prop_assert_eq!(&lower, &sol.value);

        let g = gap(&m, &p, &q).unwrap();
        let at_value = g.col_payoffs[g.best_column] == sol.value
            && g.row_losses[g.best_row] == sol.value;
        prop_assert_eq!(g.gap.is_zero(), at_value);
        prop_assert_eq!(is_eps_equilibrium(&m, &p, &q, &Rational::zero()).unwrap(), g.gap.is_zero());
    }

    #[test]
    fn positive_scaling_keeps_indices((m, p, q) in instance(6), c in 1i64..=8, d in 1i64..=8) {
        let s = r(c, d);
        let bound = s.clone();
        let scaled = GameMatrix::with_bounds(m.matrix().scale(&s), -bound.clone(), bound).unwrap();
        let a = gap(&m, &p, &q).unwrap();
        let b = gap(&scaled, &p, &q).unwrap();
        prop_assert_eq!(a.best_column, b.best_column);
        prop_assert_eq!(a.best_row, b.best_row);
        prop_assert_eq!(a.gap * s, b.gap);
    }
}

fn sample_ball<G: Rng>(k: usize, rng: &mut G) -> GameMatrix<Rational> {
    let radius = r(1, 16 * (k * k) as i64);
    let den = 8;
    let mut m = Matrix::identity(k).scale(&r(1, 2));
    for i in 0..k {
        for j in 0..k {
            let d = radius.clone() * r(rng.gen_range(-den..=den), den);
            m.set(i, j, m.get(i, j).clone() + d);
        }
    }
    GameMatrix::new(m).unwrap()
}

#[test]
fn ball_equilibria_are_fully_mixed_with_positive_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &k in &[2usize, 4, 8] {
        let kk = k as i64;
        for _ in 0..100 {
            let m = sample_ball(k, &mut rng);
            let sol = solve_exact(&m).unwrap();
            assert!(min_support(&sol.p_star, &sol.q_star) >= r(1, 2 * kk));
            assert!(sol.value >= r(1, 4 * kk));
        }
        let rad = r(1, 16 * kk * kk);
        assert!(support_bound(&r(1, 2), &rad, &rad, k).unwrap() >= r(1, 2 * kk));
    }
}

#[test]
fn uniform_play_on_sign_matrices() {
    let mut worst = Rational::zero();
    for mask in 0u32..512 {
        let rows: Vec<Vec<Rational>> = (0..3)
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
        let m = GameMatrix::from_rows(rows).unwrap();
        let u = MixedStrategy::uniform(3);
        let g = gap(&m, &u, &u).unwrap().gap;
        assert!(g <= r(4, 3));
        worst = Scalar::max_of(worst, g);
    }
    assert_eq!(worst, r(4, 3));
}
