//! Identifying the game matrix from first-order feedback.
//!
//! Over a finite alphabet `{a_1/r, ..., a_n/r}` a single query with the
//! geometric probe `p_i ∝ b^{-i}` reveals every column of `M` as the digits of
//! a base-`b` expansion. Without such structure, `K` basis queries are needed.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::game::{GameMatrix, MixedStrategy};
use crate::numerics::{Matrix, Rational, Scalar, Vector};
use crate::oracle::{Responder, Session};

/// A finite set of rationals sharing the denominator `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    denominator: i64,
    numerators: Vec<i64>,
}

impl Alphabet {
    /// Sorts and deduplicates the numerators; needs at least two distinct
    /// values and a positive denominator.
    pub fn new(denominator: i64, numerators: Vec<i64>) -> Result<Self> {
        if denominator <= 0 {
            return Err(Error::InvalidAlphabet(format!(
                "denominator must be positive, got {denominator}"
            )));
        }
        let mut numerators = numerators;
        numerators.sort_unstable();
        numerators.dedup();
        if numerators.len() < 2 {
            return Err(Error::InvalidAlphabet(
                "need at least two distinct values".into(),
            ));
        }
        Ok(Alphabet {
            denominator,
            numerators,
        })
    }

    /// `{lo, lo+1, ..., hi} / r`.
    pub fn range(denominator: i64, lo: i64, hi: i64) -> Result<Self> {
        Self::new(denominator, (lo..=hi).collect())
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn min_numerator(&self) -> i64 {
        self.numerators[0]
    }

    pub fn max_numerator(&self) -> i64 {
        *self.numerators.last().expect("n >= 2")
    }

    /// Base of the positional probe: the numerator spread plus one, so that
    /// every digit `a - a_min` is at most `b - 1`.
    pub fn base(&self) -> i64 {
        self.max_numerator() - self.min_numerator() + 1
    }

    pub fn values(&self) -> Vec<Rational> {
        self.numerators
            .iter()
            .map(|&a| Rational::ratio(a, self.denominator))
            .collect()
    }

    /// Checks that every value lies within `[lo, hi]`.
    pub fn check_within(&self, lo: &Rational, hi: &Rational) -> Result<()> {
        for v in self.values() {
            if v < *lo || v > *hi {
                return Err(Error::InvalidAlphabet(format!(
                    "value {} outside [{}, {}]",
                    v.to_canonical(),
                    lo.to_canonical(),
                    hi.to_canonical()
                )));
            }
        }
        Ok(())
    }

    pub fn contains_numerator(&self, a: i64) -> bool {
        self.numerators.binary_search(&a).is_ok()
    }
}

fn geometric_weights(base: i64, k: usize) -> (Vector<Rational>, Rational) {
    let b = Rational::from_int(base);
    let mut w = Vec::with_capacity(k);
    let mut x = Rational::from_int(1);
    for _ in 0..k {
        x /= b.clone();
        w.push(x.clone());
    }
    let w = Vector::new(w);
    let total = w.sum();
    (w, total)
}

/// The probe `p_i = b^{-i} / sum_k b^{-k}`.
pub fn encode_probe(alphabet: &Alphabet, k: usize) -> Result<MixedStrategy<Rational>> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let (w, total) = geometric_weights(alphabet.base(), k);
    MixedStrategy::new(w.scale(&(Rational::from_int(1) / total)))
}

/// Reads `M` back from `observed = M^T p` for the probe `p`.
pub fn decode_matrix(
    alphabet: &Alphabet,
    k: usize,
    observed: &Vector<Rational>,
) -> Result<GameMatrix<Rational>> {
    observed.check_dim(k)?;
    let (_, total) = geometric_weights(alphabet.base(), k);
    let base = Rational::from_int(alphabet.base());
    let r = Rational::from_int(alphabet.denominator());
    let a_min = alphabet.min_numerator();
    let mut m = Matrix::<Rational>::zeros(k, k);
    for j in 0..k {
        // sum_i b^{-i} (a_ij - a_min), an exact K-digit base-b fraction.
        let mut x = (observed[j].clone() * total.clone()
            - Rational::from_int(a_min) * total.clone() / r.clone())
            * r.clone();
        for i in 0..k {
            x *= base.clone();
            let digit = x.floor();
            x -= digit.clone();
            let d = digit_value(&digit).filter(|d| *d >= 0 && *d < alphabet.base());
            let a = d
                .map(|d| d + a_min)
                .filter(|a| alphabet.contains_numerator(*a));
            let Some(a) = a else {
                return Err(Error::InconsistentObservation(format!(
                    "column {j}, digit {i} = {} is not an alphabet digit",
                    digit.to_canonical()
                )));
            };
            m.set(i, j, Rational::ratio(a, alphabet.denominator()));
        }
        if !x.is_zero() {
            return Err(Error::InconsistentObservation(format!(
                "column {j} has a remainder after {k} digits"
            )));
        }
    }
    let (lo, hi) = min_max(&alphabet.values());
    GameMatrix::with_bounds(m, lo, hi)
}

fn digit_value(d: &Rational) -> Option<i64> {
    let n: &BigInt = d.numer();
    n.to_i64()
}

fn min_max(vals: &[Rational]) -> (Rational, Rational) {
    let lo = vals.iter().min().expect("n >= 2").clone();
    let hi = vals.iter().max().expect("n >= 2").clone();
    (lo, hi)
}

/// What the probe query reveals: `M^T p`.
pub fn probe_observation(
    m: &GameMatrix<Rational>,
    probe: &MixedStrategy<Rational>,
) -> Vector<Rational> {
    m.col_payoffs(probe.weights())
}

/// One query with the probe (and a uniform `q`), then decode.
pub fn one_query_recovery<R: Responder<Rational>>(
    session: &mut Session<Rational, R>,
    alphabet: &Alphabet,
) -> Result<GameMatrix<Rational>> {
    let k = session.k();
    let probe = encode_probe(alphabet, k)?;
    let rec = session.query(&probe, &MixedStrategy::uniform(k))?;
    decode_matrix(alphabet, k, &rec.loss_q.neg())
}

/// `K` basis queries `(e_t, e_t)`: row `t` is `-loss_q`, column `t` is
/// `loss_p`. Rows and columns must agree entrywise (exactly in rational mode).
pub fn full_recovery<S: Scalar, R: Responder<S>>(
    session: &mut Session<S, R>,
) -> Result<GameMatrix<S>> {
    let k = session.k();
    let mut rows = Vec::with_capacity(k);
    let mut cols = Vec::with_capacity(k);
    for t in 0..k {
        let e = MixedStrategy::pure(k, t);
        let rec = session.query(&e, &e)?;
        rows.push(rec.loss_q.neg());
        cols.push(rec.loss_p);
    }
    let mut m = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let (a, b) = (&rows[i][j], &cols[j][i]);
            let agree = if S::is_exact() {
                a == b
            } else {
                (a.clone() - b.clone()).is_negligible(&S::max_of(S::one(), a.abs()))
            };
            if !agree {
                return Err(Error::Inconsistent(format!(
                    "entry ({i}, {j}): row read {} but column read {}",
                    a.to_canonical(),
                    b.to_canonical()
                )));
            }
            m.set(i, j, a.clone());
        }
    }
    let bound = S::max_of(S::one(), m.max_abs());
    GameMatrix::with_bounds(m, -bound.clone(), bound)
}
