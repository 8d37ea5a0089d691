use std::ops::{Deref, Index, IndexMut};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Dense vector of scalars sharing one numeric mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<S>(Vec<S>);

impl<S: Scalar> Vector<S> {
    pub fn new(entries: Vec<S>) -> Self {
        Vector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![S::zero(); dim])
    }

    pub fn ones(dim: usize) -> Self {
        Vector(vec![S::one(); dim])
    }

    pub fn filled(dim: usize, value: S) -> Self {
        Vector(vec![value; dim])
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = S::one();
        v
    }

    pub fn from_ratios(pairs: &[(i64, i64)]) -> Self {
        Vector(pairs.iter().map(|&(n, d)| S::ratio(n, d)).collect())
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Vector(values.iter().map(|&n| S::from_int(n)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[S] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<S> {
        self.0
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub fn dot(&self, other: &Self) -> S {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn norm_inf(&self) -> S {
        self.0
            .iter()
            .fold(S::zero(), |acc, x| S::max_of(acc, x.abs()))
    }

    pub fn sum(&self) -> S {
        self.0.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    pub fn scale(&self, c: &S) -> Self {
        Vector(self.0.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: &S, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + c.clone() * b.clone())
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Vector(self.0.iter().map(|x| -x.clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    /// Index and value of the largest entry, lowest index on ties.
    pub fn argmax(&self) -> Option<(usize, S)> {
        let mut best: Option<(usize, S)> = None;
        for (i, x) in self.0.iter().enumerate() {
            match &best {
                Some((_, b)) if x <= b => {}
                _ => best = Some((i, x.clone())),
            }
        }
        best
    }

    /// Index and value of the smallest entry, lowest index on ties.
    pub fn argmin(&self) -> Option<(usize, S)> {
        let mut best: Option<(usize, S)> = None;
        for (i, x) in self.0.iter().enumerate() {
            match &best {
                Some((_, b)) if x >= b => {}
                _ => best = Some((i, x.clone())),
            }
        }
        best
    }

    pub fn to_canonical(&self) -> Vec<String> {
        self.0.iter().map(Scalar::to_canonical).collect()
    }

    pub fn parse_canonical(items: &[String]) -> Result<Self> {
        items
            .iter()
            .map(|s| S::parse_canonical(s))
            .collect::<Result<Vec<_>>>()
            .map(Vector)
    }

    pub fn map_mode<T: Scalar>(&self) -> Vector<T> {
        Vector(self.0.iter().map(super::scalar::convert).collect())
    }
}

impl<S> Deref for Vector<S> {
    type Target = [S];

    fn deref(&self) -> &[S] {
        &self.0
    }
}

impl<S> Index<usize> for Vector<S> {
    type Output = S;

    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S> IndexMut<usize> for Vector<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.0[i]
    }
}

impl<S> FromIterator<S> for Vector<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;

    #[test]
    fn ties_break_low() {
        let v = Vector::<Rational>::from_ints(&[1, 3, 3, 0, 0]);
        assert_eq!(v.argmax().unwrap().0, 1);
        assert_eq!(v.argmin().unwrap().0, 3);
    }

    #[test]
    fn norms() {
        let v = Vector::<Rational>::from_ratios(&[(1, 2), (-3, 4)]);
        assert_eq!(v.norm_sq(), Rational::ratio(13, 16));
        assert_eq!(v.norm_inf(), Rational::ratio(3, 4));
    }
}
