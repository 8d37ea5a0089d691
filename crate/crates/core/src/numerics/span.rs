//! Orthogonal bases of spans built by unnormalized Gram–Schmidt, so that
//! exact mode never needs a square root.

use super::scalar::Scalar;
use super::vector::Vector;
use crate::error::Result;

/// Mutually orthogonal nonzero vectors spanning a subspace of `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanBasis<S> {
    dim: usize,
    vectors: Vec<Vector<S>>,
    norms_sq: Vec<S>,
}

impl<S: Scalar> SpanBasis<S> {
    /// The span of nothing, `{0}`.
    pub fn empty(dim: usize) -> Self {
        SpanBasis {
            dim,
            vectors: Vec::new(),
            norms_sq: Vec::new(),
        }
    }

    /// Orthogonalizes `vectors` in order, dropping dependent ones.
    pub fn spanning(dim: usize, vectors: &[Vector<S>]) -> Result<Self> {
        vectors
            .iter()
            .try_fold(Self::empty(dim), |b, v| extend_span(&b, v))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vector<S>] {
        &self.vectors
    }

    /// Whether `v` lies in the span (exactly, or within the float tolerance).
    pub fn contains(&self, v: &Vector<S>) -> Result<bool> {
        let (_, residual) = project_onto_span(v, self)?;
        Ok(residual_is_negligible(&residual, v))
    }
}

fn residual_is_negligible<S: Scalar>(residual: &Vector<S>, v: &Vector<S>) -> bool {
    if S::is_exact() {
        residual.is_zero()
    } else {
        // Compare squared norms: |r| <= tol |v|  <=>  |r|^2 <= tol^2 |v|^2.
        let tol = super::scalar::FLOAT_TOLERANCE;
        residual.norm_sq().to_f64() <= tol * tol * v.norm_sq().to_f64()
    }
}

/// Splits `v` into its orthogonal projection on the span and the residual.
pub fn project_onto_span<S: Scalar>(
    v: &Vector<S>,
    basis: &SpanBasis<S>,
) -> Result<(Vector<S>, Vector<S>)> {
    v.check_dim(basis.dim)?;
    let mut projection = Vector::zeros(basis.dim);
    for (e, n2) in basis.vectors.iter().zip(&basis.norms_sq) {
        let c = v.dot(e) / n2.clone();
        if !c.is_zero() {
            projection = projection.axpy(&c, e);
        }
    }
    let residual = v.sub(&projection);
    Ok((projection, residual))
}

/// Adds the residual of `v` to the basis when it is nonzero.
pub fn extend_span<S: Scalar>(basis: &SpanBasis<S>, v: &Vector<S>) -> Result<SpanBasis<S>> {
    let (_, residual) = project_onto_span(v, basis)?;
    if residual_is_negligible(&residual, v) || v.is_zero() {
        return Ok(basis.clone());
    }
    let mut out = basis.clone();
    out.norms_sq.push(residual.norm_sq());
    out.vectors.push(residual);
    Ok(out)
}

/// Squared distance from `v` to the span.
pub fn span_distance_sq<S: Scalar>(v: &Vector<S>, basis: &SpanBasis<S>) -> Result<S> {
    let (_, residual) = project_onto_span(v, basis)?;
    Ok(residual.norm_sq())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;
    use num_traits::Zero;

    type V = Vector<Rational>;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn basis_of(vs: &[V]) -> SpanBasis<Rational> {
        SpanBasis::spanning(vs[0].dim(), vs).unwrap()
    }

    #[test]
    fn axis_projection() {
        let b = basis_of(&[V::from_ints(&[1, 0])]);
        let (p, res) = project_onto_span(&V::from_ints(&[1, 1]), &b).unwrap();
        assert_eq!(p, V::from_ints(&[1, 0]));
        assert_eq!(res, V::from_ints(&[0, 1]));
    }

    #[test]
    fn empty_span_projection() {
        let b = SpanBasis::<Rational>::empty(2);
        let (p, res) = project_onto_span(&V::from_ints(&[3, 4]), &b).unwrap();
        assert_eq!(p, V::zeros(2));
        assert_eq!(res, V::from_ints(&[3, 4]));
    }

    #[test]
    fn skew_projection() {
        let e = V::from_ratios(&[(1, 2), (1, 8), (-1, 8), (0, 1)]);
        let b = basis_of(std::slice::from_ref(&e));
        let v = V::ones(4);
        let (p, res) = project_onto_span(&v, &b).unwrap();
        // <v,e> = 1/2, <e,e> = 9/32.
        assert_eq!(p, e.scale(&(r(1, 2) / r(9, 32))));
        assert_eq!(res.norm_sq(), r(28, 9));
        assert_eq!(span_distance_sq(&v, &b).unwrap(), r(28, 9));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(
            span_distance_sq(&V::ones(4), &SpanBasis::empty(4)).unwrap(),
            r(4, 1)
        );
        let b = basis_of(&[V::from_ints(&[1, 0])]);
        assert!(span_distance_sq(&V::from_ints(&[1, 0]), &b)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn extend_examples() {
        let b = basis_of(&[V::from_ints(&[1, 0])]);
        assert_eq!(extend_span(&b, &V::from_ints(&[2, 0])).unwrap(), b);
        let b2 = extend_span(&b, &V::from_ints(&[1, 1])).unwrap();
        assert_eq!(
            b2.vectors(),
            &[V::from_ints(&[1, 0]), V::from_ints(&[0, 1])]
        );
        let empty = SpanBasis::<Rational>::empty(2);
        assert_eq!(extend_span(&empty, &V::zeros(2)).unwrap(), empty);
    }

    #[test]
    fn dimension_mismatch() {
        let b = SpanBasis::<Rational>::empty(3);
        assert!(project_onto_span(&V::ones(2), &b).is_err());
    }

    #[test]
    fn float_in_span_tolerance() {
        let b = SpanBasis::<f64>::spanning(2, &[Vector::new(vec![1.0, 0.0])]).unwrap();
        assert!(b.contains(&Vector::new(vec![1.0, 1e-12])).unwrap());
        assert!(!b.contains(&Vector::new(vec![1.0, 1e-6])).unwrap());
    }
}
