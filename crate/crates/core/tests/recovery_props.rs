mod common;

use std::collections::HashSet;

use common::*;
use mql_core::adversary::constraint_rank_analyzer;
use mql_core::numerics::{Matrix, Rational, Vector};
use mql_core::recovery::{
    decode_matrix, encode_probe, full_recovery, one_query_recovery, probe_observation, Alphabet,
};
use mql_core::{open_fixed_session, Error, GameMatrix};
use proptest::prelude::*;

fn alphabets() -> Vec<Alphabet> {
    vec![
        Alphabet::new(1, vec![0, 1]).unwrap(),
        Alphabet::new(1, vec![-1, 0, 1]).unwrap(),
        Alphabet::range(4, -4, 4).unwrap(),
    ]
}

fn alphabet_game(alphabet: Alphabet) -> impl Strategy<Value = (Alphabet, GameMatrix<Rational>)> {
    (1usize..=16).prop_flat_map(move |k| {
        let alphabet = alphabet.clone();
        let values = alphabet.values();
        prop::collection::vec(prop::sample::select(values), k * k).prop_map(move |xs| {
            let rows = xs.chunks(k).map(|c| c.to_vec()).collect();
            (alphabet.clone(), GameMatrix::from_rows(rows).unwrap())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn round_trip_binary((a, m) in alphabet_game(alphabets()[0].clone())) {
        round_trip(&a, &m)?;
    }

    #[test]
    fn round_trip_signs((a, m) in alphabet_game(alphabets()[1].clone())) {
        round_trip(&a, &m)?;
    }

    #[test]
    fn round_trip_quarters((a, m) in alphabet_game(alphabets()[2].clone())) {
        round_trip(&a, &m)?;
    }
}

fn round_trip(a: &Alphabet, m: &GameMatrix<Rational>) -> Result<(), TestCaseError> {
    let mut s = open_fixed_session(m.clone());
    let decoded = one_query_recovery(&mut s, a).unwrap();
    prop_assert_eq!(s.queries_used(), 1);
    prop_assert_eq!(decoded.matrix(), m.matrix());
    Ok(())
}

#[test]
fn probe_is_injective_on_binary_two_by_two() {
    let a = Alphabet::new(1, vec![0, 1]).unwrap();
    let probe = encode_probe(&a, 2).unwrap();
    let mut seen = HashSet::new();
    for mask in 0u32..16 {
        let m = GameMatrix::<Rational>::from_ints(&[
            &[(mask & 1) as i64, (mask >> 1 & 1) as i64],
            &[(mask >> 2 & 1) as i64, (mask >> 3 & 1) as i64],
        ])
        .unwrap();
        let obs = probe_observation(&m, &probe);
        assert!(seen.insert(obs.to_canonical()));
    }
    assert_eq!(seen.len(), 16);
}

#[test]
fn wrong_alphabet_is_detected() {
    let a = Alphabet::new(1, vec![0, 1]).unwrap();
    let probe = encode_probe(&a, 2).unwrap();
    let m = GameMatrix::<Rational>::from_rows(vec![vec![r(1, 3), r(0, 1)], vec![r(0, 1), r(1, 1)]])
        .unwrap();
    let obs = probe_observation(&m, &probe);
    assert!(matches!(
        decode_matrix(&a, 2, &obs),
        Err(Error::InconsistentObservation(_))
    ));
}

#[test]
fn fewer_than_k_basis_queries_leave_freedom() {
    for k in 1..=6 {
        let queries: Vec<(Vector<Rational>, Vector<Rational>)> = (0..k)
            .map(|t| (Vector::basis(k, t), Vector::basis(k, t)))
            .collect();
        let steps = constraint_rank_analyzer(&queries, k).unwrap();
        for (t, step) in steps.iter().enumerate() {
            let left = k - t - 1;
            assert_eq!(step.nullspace_dim, left * left);
        }
        assert_eq!(steps.last().unwrap().nullspace_dim, 0);
    }
    let m = GameMatrix::<Rational>::new(Matrix::identity(5)).unwrap();
    let mut s = open_fixed_session(m.clone());
    assert_eq!(full_recovery(&mut s).unwrap(), m);
    assert_eq!(s.queries_used(), 5);
}
