//! Game matrices, mixed strategies and the suboptimality gap.
//!
//! Convention: the row player picks `p` and suffers loss `M q`; the column
//! player picks `q` and suffers loss `-M^T p`. The value is
//! `min_p max_q p^T M q`.

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Scalar, Vector, FLOAT_TOLERANCE};

/// Square payoff matrix whose entries lie in a declared closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GameMatrix<S> {
    matrix: Matrix<S>,
    lo: S,
    hi: S,
}

impl<S: Scalar> GameMatrix<S> {
    /// Checks squareness and the default bounds `[-1, 1]`.
    pub fn new(matrix: Matrix<S>) -> Result<Self> {
        Self::with_bounds(matrix, -S::one(), S::one())
    }

    /// Out-of-bounds entries are rejected, never clamped.
    pub fn with_bounds(matrix: Matrix<S>, lo: S, hi: S) -> Result<Self> {
        if matrix.rows() != matrix.cols() || matrix.rows() == 0 {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if lo > hi {
            return Err(Error::InvalidBounds {
                lo: lo.to_canonical(),
                hi: hi.to_canonical(),
            });
        }
        if let Some((row, col, x)) = matrix.entries().find(|(_, _, x)| **x < lo || **x > hi) {
            return Err(Error::OutOfBounds {
                row,
                col,
                value: x.to_canonical(),
                lo: lo.to_canonical(),
                hi: hi.to_canonical(),
            });
        }
        Ok(GameMatrix { matrix, lo, hi })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::new(Matrix::from_ints(rows)?)
    }

    /// `s * I_K`.
    pub fn scaled_identity(k: usize, s: S) -> Result<Self> {
        Self::new(Matrix::identity(k).scale(&s))
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn bounds(&self) -> (&S, &S) {
        (&self.lo, &self.hi)
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        self.matrix.get(i, j)
    }

    /// Row player's loss vector `M q`.
    pub fn row_losses(&self, q: &Vector<S>) -> Vector<S> {
        self.matrix.mul_vec(q)
    }

    /// Column player's payoff vector `M^T p`.
    pub fn col_payoffs(&self, p: &Vector<S>) -> Vector<S> {
        self.matrix.tr_mul_vec(p)
    }

    /// Replaces the matrix, keeping the declared bounds.
    pub fn with_matrix(&self, matrix: Matrix<S>) -> Result<Self> {
        Self::with_bounds(matrix, self.lo.clone(), self.hi.clone())
    }

    pub fn map_mode<T: Scalar>(&self) -> Result<GameMatrix<T>> {
        GameMatrix::with_bounds(
            self.matrix.map_mode(),
            crate::numerics::convert(&self.lo),
            crate::numerics::convert(&self.hi),
        )
    }
}

/// A probability vector over `K` actions.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy<S>(Vector<S>);

impl<S: Scalar> MixedStrategy<S> {
    /// Validates nonnegativity and unit sum (exact in rational mode, within
    /// `1e-9` in float mode).
    pub fn new(weights: Vector<S>) -> Result<Self> {
        if weights.dim() == 0 {
            return Err(Error::InvalidStrategy("empty strategy".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| **w < S::zero()) {
            return Err(Error::InvalidStrategy(format!(
                "negative weight {} at {i}",
                w.to_canonical()
            )));
        }
        let excess = weights.sum() - S::one();
        let ok = if S::is_exact() {
            excess.is_zero()
        } else {
            excess.to_f64().abs() <= FLOAT_TOLERANCE
        };
        if !ok {
            return Err(Error::InvalidStrategy(format!(
                "weights sum to {}",
                weights.sum().to_canonical()
            )));
        }
        Ok(MixedStrategy(weights))
    }

    /// Normalizes nonnegative weights with a positive total.
    pub fn from_unnormalized(weights: Vector<S>) -> Result<Self> {
        let total = weights.sum();
        if total <= S::zero() {
            return Err(Error::InvalidStrategy("weights have no mass".into()));
        }
        Self::new(weights.scale(&(S::one() / total)))
    }

    pub fn uniform(k: usize) -> Self {
        MixedStrategy(Vector::filled(k, S::one() / S::from_int(k as i64)))
    }

    /// Pure strategy on action `i` (0-based).
    pub fn pure(k: usize, i: usize) -> Self {
        MixedStrategy(Vector::basis(k, i))
    }

    /// Entrywise average of strategies.
    pub fn average<'a>(items: impl IntoIterator<Item = &'a MixedStrategy<S>>) -> Result<Self> {
        let mut iter = items.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidStrategy("average of nothing".into()))?;
        let mut acc = first.0.clone();
        let mut n = 1i64;
        for s in iter {
            acc = acc.add(&s.0);
            n += 1;
        }
        Self::new(acc.scale(&(S::one() / S::from_int(n))))
    }

    pub fn k(&self) -> usize {
        self.0.dim()
    }

    pub fn weights(&self) -> &Vector<S> {
        &self.0
    }

    pub fn map_mode<T: Scalar>(&self) -> Result<MixedStrategy<T>> {
        MixedStrategy::from_unnormalized(self.0.map_mode())
    }
}

/// Breakdown of `g(M, p, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport<S> {
    pub gap: S,
    pub best_column: usize,
    pub best_row: usize,
    pub col_payoffs: Vector<S>,
    pub row_losses: Vector<S>,
}

/// `max_j (M^T p)_j - min_i (M q)_i`, ties broken by lowest index.
pub fn gap<S: Scalar>(
    m: &GameMatrix<S>,
    p: &MixedStrategy<S>,
    q: &MixedStrategy<S>,
) -> Result<GapReport<S>> {
    p.weights().check_dim(m.k())?;
    q.weights().check_dim(m.k())?;
    let col_payoffs = m.col_payoffs(p.weights());
    let row_losses = m.row_losses(q.weights());
    let (best_column, hi) = col_payoffs.argmax().expect("K >= 1");
    let (best_row, lo) = row_losses.argmin().expect("K >= 1");
    Ok(GapReport {
        gap: hi - lo,
        best_column,
        best_row,
        col_payoffs,
        row_losses,
    })
}

/// `g(M, p, q) <= 2 eps`.
pub fn is_eps_equilibrium<S: Scalar>(
    m: &GameMatrix<S>,
    p: &MixedStrategy<S>,
    q: &MixedStrategy<S>,
    eps: &S,
) -> Result<bool> {
    if *eps < S::zero() {
        return Err(Error::NegativeEpsilon);
    }
    let g = gap(m, p, q)?.gap;
    Ok(g <= S::from_int(2) * eps.clone())
}

/// Lower bound on every coordinate of an `eps`-equilibrium of a matrix within
/// `alpha` (entrywise) of `s I_K`: `1/K - 2 (alpha + eps)(K - 1) / s`.
pub fn support_bound<S: Scalar>(s: &S, alpha: &S, eps: &S, k: usize) -> Result<S> {
    if *s <= S::zero() {
        return Err(Error::InvalidArgument("s must be positive".into()));
    }
    if *alpha < S::zero() || *eps < S::zero() {
        return Err(Error::InvalidArgument(
            "alpha and eps must be nonnegative".into(),
        ));
    }
    let k = S::from_int(k as i64);
    Ok(S::one() / k.clone()
        - S::from_int(2) * (alpha.clone() + eps.clone()) * (k - S::one()) / s.clone())
}

/// Smallest weight across both strategies.
pub fn min_support<S: Scalar>(p: &MixedStrategy<S>, q: &MixedStrategy<S>) -> S {
    p.weights()
        .iter()
        .chain(q.weights().iter())
        .cloned()
        .reduce(|a, b| if b < a { b } else { a })
        .expect("nonempty strategies")
}
