//! Exact equilibrium oracle: the zero-sum LP solved by a dense tableau simplex
//! with Bland's rule.

use crate::error::{Error, Result};
use crate::game::{GameMatrix, MixedStrategy};
use crate::numerics::{Scalar, Vector};

/// Largest game accepted by [`solve_exact`].
pub const MAX_EXACT_K: usize = 64;

/// An exact Nash equilibrium with its value.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSolution<S> {
    pub p_star: MixedStrategy<S>,
    pub q_star: MixedStrategy<S>,
    pub value: S,
}

/// Solves `min_p max_q p^T M q` exactly.
///
/// After shifting every entry to at least one, the row player's problem is
/// `max 1^T x  s.t.  M'^T x <= 1, x >= 0` with `p = x / 1^T x`; the column
/// player's strategy is read off the dual prices of the slack columns. The
/// returned pair is certified: `max_j (M^T p)_j = value = min_i (M q)_i`.
pub fn solve_exact<S: Scalar>(m: &GameMatrix<S>) -> Result<EquilibriumSolution<S>> {
    if !S::is_exact() {
        return Err(Error::ExactOnly("solve_exact"));
    }
    let k = m.k();
    if k > MAX_EXACT_K {
        return Err(Error::TooLarge {
            k,
            limit: MAX_EXACT_K,
        });
    }
    let min_entry = m
        .matrix()
        .entries()
        .map(|(_, _, x)| x.clone())
        .reduce(|a, b| if b < a { b } else { a })
        .expect("K >= 1");
    let shift = S::one() - min_entry;

    // Constraint row j: sum_i (M_ij + shift) x_i + s_j = 1.
    let width = 2 * k;
    let mut tab: Vec<Vec<S>> = (0..k)
        .map(|j| {
            let mut row = Vec::with_capacity(width + 1);
            row.extend((0..k).map(|i| m.get(i, j).clone() + shift.clone()));
            row.extend((0..k).map(|s| if s == j { S::one() } else { S::zero() }));
            row.push(S::one());
            row
        })
        .collect();
    let mut reduced: Vec<S> = (0..width)
        .map(|c| if c < k { S::one() } else { S::zero() })
        .collect();
    let mut basis: Vec<usize> = (k..width).collect();

    while let Some(enter) = (0..width).find(|&c| reduced[c] > S::zero()) {
        let mut leave: Option<(usize, S)> = None;
        for (r, row) in tab.iter().enumerate() {
            if row[enter] <= S::zero() {
                continue;
            }
            let ratio = row[width].clone() / row[enter].clone();
            let better = match &leave {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // Bounded: every column of M' is positive, so every x_i is capped.
        let (pr, _) = leave.ok_or_else(|| Error::Invariant("unbounded game LP".into()))?;
        pivot(&mut tab, &mut reduced, pr, enter);
        basis[pr] = enter;
    }

    let mut x = Vector::<S>::zeros(k);
    for (r, &b) in basis.iter().enumerate() {
        if b < k {
            x[b] = tab[r][width].clone();
        }
    }
    let y: Vector<S> = (0..k).map(|j| -reduced[k + j].clone()).collect();
    let p_star = MixedStrategy::from_unnormalized(x)?;
    let q_star = MixedStrategy::from_unnormalized(y)?;

    let upper = m.col_payoffs(p_star.weights()).argmax().expect("K >= 1").1;
    let lower = m.row_losses(q_star.weights()).argmin().expect("K >= 1").1;
    if upper != lower {
        return Err(Error::Invariant(format!(
            "dual certificate mismatch: {} vs {}",
            upper.to_canonical(),
            lower.to_canonical()
        )));
    }
    Ok(EquilibriumSolution {
        p_star,
        q_star,
        value: upper,
    })
}

fn pivot<S: Scalar>(tab: &mut [Vec<S>], reduced: &mut [S], pr: usize, pc: usize) {
    let inv = S::one() / tab[pr][pc].clone();
    for x in tab[pr].iter_mut() {
        *x = x.clone() * inv.clone();
    }
    let pivot_row = tab[pr].clone();
    for (r, row) in tab.iter_mut().enumerate() {
        if r == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (x, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *x = x.clone() - f.clone() * pv.clone();
            }
        }
    }
    let f = reduced[pc].clone();
    if !f.is_zero() {
        for (x, pv) in reduced.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *x = x.clone() - f.clone() * pv.clone();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::gap;
    use crate::numerics::{Matrix, Rational};
    use num_traits::Zero;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn matching_pennies() {
        let m = GameMatrix::<Rational>::from_ints(&[&[1, -1], &[-1, 1]]).unwrap();
        let s = solve_exact(&m).unwrap();
        assert_eq!(s.p_star, MixedStrategy::uniform(2));
        assert_eq!(s.q_star, MixedStrategy::uniform(2));
        assert!(s.value.is_zero());
    }

    #[test]
    fn rock_paper_scissors() {
        let m =
            GameMatrix::<Rational>::from_ints(&[&[0, 1, -1], &[-1, 0, 1], &[1, -1, 0]]).unwrap();
        let s = solve_exact(&m).unwrap();
        assert_eq!(s.p_star, MixedStrategy::uniform(3));
        assert_eq!(s.q_star, MixedStrategy::uniform(3));
        assert!(s.value.is_zero());
    }

    #[test]
    fn identity_two() {
        let m = GameMatrix::<Rational>::new(Matrix::identity(2)).unwrap();
        let s = solve_exact(&m).unwrap();
        assert_eq!(s.p_star, MixedStrategy::uniform(2));
        assert_eq!(s.q_star, MixedStrategy::uniform(2));
        assert_eq!(s.value, r(1, 2));
        assert!(gap(&m, &s.p_star, &s.q_star).unwrap().gap.is_zero());
    }

    #[test]
    fn saddle_point_game() {
        // Pure saddle at (row 1, col 0): value 1/2.
        let m = GameMatrix::<Rational>::from_rows(vec![
            vec![r(1, 1), r(1, 1)],
            vec![r(1, 2), r(-1, 4)],
        ])
        .unwrap();
        let s = solve_exact(&m).unwrap();
        assert_eq!(s.value, r(1, 2));
        assert!(gap(&m, &s.p_star, &s.q_star).unwrap().gap.is_zero());
    }

    #[test]
    fn float_mode_refused() {
        let m = GameMatrix::<f64>::from_ints(&[&[1]]).unwrap();
        assert_eq!(solve_exact(&m), Err(Error::ExactOnly("solve_exact")));
    }

    #[test]
    fn size_limit() {
        let m = GameMatrix::<Rational>::new(Matrix::identity(65)).unwrap();
        assert!(matches!(solve_exact(&m), Err(Error::TooLarge { .. })));
    }
}
