#![allow(dead_code)]

use mql_core::numerics::{Matrix, Rational, Scalar, Vector};
use mql_core::{GameMatrix, MixedStrategy};
use proptest::prelude::*;
use rand::Rng;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// Rational in [-1, 1] with denominator up to 8.
pub fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=8).prop_flat_map(|d| (-d..=d).prop_map(move |n| Rational::ratio(n, d)))
}

/// Rational in [-4, 4] with denominator up to 8.
pub fn wide_rational() -> impl Strategy<Value = Rational> {
    (1i64..=8).prop_flat_map(|d| (-4 * d..=4 * d).prop_map(move |n| Rational::ratio(n, d)))
}

pub fn vector(k: usize) -> impl Strategy<Value = Vector<Rational>> {
    prop::collection::vec(wide_rational(), k).prop_map(Vector::new)
}

pub fn game(k: usize) -> impl Strategy<Value = GameMatrix<Rational>> {
    prop::collection::vec(unit_rational(), k * k).prop_map(move |xs| {
        let rows = xs.chunks(k).map(|c| c.to_vec()).collect();
        GameMatrix::from_rows(rows).unwrap()
    })
}

pub fn strategy(k: usize) -> impl Strategy<Value = MixedStrategy<Rational>> {
    prop::collection::vec(0i64..=6, k).prop_map(move |mut w| {
        if w.iter().all(|&x| x == 0) {
            w[0] = 1;
        }
        MixedStrategy::from_unnormalized(Vector::from_ints(&w)).unwrap()
    })
}

pub fn random_game<G: Rng>(
    k: usize,
    lo: i64,
    hi: i64,
    den: i64,
    rng: &mut G,
) -> GameMatrix<Rational> {
    let rows: Vec<Vec<Rational>> = (0..k)
        .map(|_| {
            (0..k)
                .map(|_| r(rng.gen_range(lo * den..=hi * den), den))
                .collect()
        })
        .collect();
    GameMatrix::with_bounds(Matrix::from_rows(rows).unwrap(), r(lo, 1), r(hi, 1)).unwrap()
}

pub fn random_strategy<G: Rng>(k: usize, rng: &mut G) -> MixedStrategy<Rational> {
    mql_core::learners::random_strategy(k, rng)
}
