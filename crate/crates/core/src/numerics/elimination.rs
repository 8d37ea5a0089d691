//! Gaussian elimination: reduced row echelon form, null spaces and an
//! incremental rank tracker.

use super::scalar::Scalar;
use super::vector::Vector;
use crate::error::{Error, Result};

/// Reduced row echelon form of a stack of row vectors.
#[derive(Debug, Clone)]
pub struct Rref<S> {
    dim: usize,
    rows: Vec<Vector<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> Rref<S> {
    pub fn new(rows: &[Vector<S>], dim: usize) -> Result<Self> {
        for r in rows {
            r.check_dim(dim)?;
        }
        let scale = rows
            .iter()
            .fold(S::zero(), |acc, r| S::max_of(acc, r.norm_inf()));
        let mut work: Vec<Vector<S>> = rows.to_vec();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..dim {
            if next == work.len() {
                break;
            }
            // Exact mode: first nonzero. Float mode: largest magnitude.
            let candidate = if S::is_exact() {
                (next..work.len()).find(|&r| !work[r][col].is_zero())
            } else {
                (next..work.len())
                    .filter(|&r| !work[r][col].is_negligible(&scale))
                    .max_by(|&a, &b| {
                        work[a][col]
                            .abs()
                            .partial_cmp(&work[b][col].abs())
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
            };
            let Some(pr) = candidate else { continue };
            work.swap(next, pr);
            let inv = S::one() / work[next][col].clone();
            work[next] = work[next].scale(&inv);
            for r in 0..work.len() {
                if r != next && !work[r][col].is_zero() {
                    let f = -work[r][col].clone();
                    work[r] = work[r].axpy(&f, &work[next]);
                    work[r][col] = S::zero();
                }
            }
            pivots.push(col);
            next += 1;
        }
        work.truncate(next);
        Ok(Rref {
            dim,
            rows: work,
            pivots,
        })
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.dim).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Kernel basis vector attached to free column `free`: a one at `free`,
    /// zeros at the other free columns.
    pub fn kernel_vector(&self, free: usize) -> Vector<S> {
        let mut v = Vector::zeros(self.dim);
        v[free] = S::one();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            v[p] = -row[free].clone();
        }
        v
    }

    /// Kernel basis ordered by free column.
    pub fn kernel_basis(&self) -> Vec<Vector<S>> {
        self.free_columns()
            .into_iter()
            .map(|c| self.kernel_vector(c))
            .collect()
    }
}

/// Null space basis of the matrix whose rows are `rows`.
pub fn kernel_basis<S: Scalar>(rows: &[Vector<S>], dim: usize) -> Result<Vec<Vector<S>>> {
    Ok(Rref::new(rows, dim)?.kernel_basis())
}

/// A nonzero vector orthogonal to every input, chosen deterministically as the
/// kernel vector of the lowest-index free column of the RREF of the inputs.
pub fn orthogonal_complement_vector<S: Scalar>(
    vectors: &[Vector<S>],
    dim: usize,
) -> Result<Vector<S>> {
    let rref = Rref::new(vectors, dim)?;
    let free = rref.free_columns();
    let first = *free.first().ok_or(Error::NoComplement {
        count: vectors.len(),
        dim,
    })?;
    Ok(rref.kernel_vector(first))
}

/// Incremental echelon basis: insert rows one at a time and learn whether each
/// increased the rank.
#[derive(Debug, Clone)]
pub struct RankTracker<S> {
    dim: usize,
    // Each row is normalized to 1 at its pivot and zero at every other
    // pivot column.
    rows: Vec<(usize, Vector<S>)>,
}

impl<S: Scalar> RankTracker<S> {
    pub fn new(dim: usize) -> Self {
        RankTracker {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn nullity(&self) -> usize {
        self.dim - self.rows.len()
    }

    /// Reduces `v` against the current basis; returns `true` if it was
    /// independent (and stores it).
    pub fn insert(&mut self, v: &Vector<S>) -> Result<bool> {
        v.check_dim(self.dim)?;
        let scale = v.norm_inf();
        let mut w = v.clone();
        for (p, row) in &self.rows {
            if !w[*p].is_zero() {
                let f = -w[*p].clone();
                w = w.axpy(&f, row);
                w[*p] = S::zero();
            }
        }
        let pivot = (0..self.dim).find(|&c| !w[c].is_negligible(&scale));
        let Some(p) = pivot else { return Ok(false) };
        let inv = S::one() / w[p].clone();
        let w = w.scale(&inv);
        for (_, row) in &mut self.rows {
            if !row[p].is_zero() {
                let f = -row[p].clone();
                *row = row.axpy(&f, &w);
                row[p] = S::zero();
            }
        }
        self.rows.push((p, w));
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;
    use num_traits::Zero;

    type V = Vector<Rational>;

    #[test]
    fn complement_of_e1_and_ones() {
        let u = orthogonal_complement_vector(&[V::basis(4, 0), V::ones(4)], 4).unwrap();
        assert_eq!(u, V::from_ints(&[0, -1, 1, 0]));
    }

    #[test]
    fn complement_of_nothing() {
        let u = orthogonal_complement_vector::<Rational>(&[], 2).unwrap();
        assert_eq!(u, V::from_ints(&[1, 0]));
    }

    #[test]
    fn complement_of_diagonal() {
        let u = orthogonal_complement_vector(&[V::ones(2)], 2).unwrap();
        assert!(!u.is_zero());
        assert!(u.dot(&V::ones(2)).is_zero());
        assert_eq!(u, V::from_ints(&[-1, 1]));
    }

    #[test]
    fn complement_unavailable() {
        let err = orthogonal_complement_vector(&[V::basis(2, 0), V::basis(2, 1)], 2);
        assert!(matches!(err, Err(Error::NoComplement { .. })));
    }

    #[test]
    fn dependent_inputs_still_work() {
        let a = V::from_ints(&[1, 2, 3]);
        let b = a.scale(&Rational::from_int(2));
        let u = orthogonal_complement_vector(&[a.clone(), b], 3).unwrap();
        assert!(u.dot(&a).is_zero());
    }

    #[test]
    fn tracker_rank() {
        let mut t = RankTracker::<Rational>::new(3);
        assert!(t.insert(&V::from_ints(&[1, 1, 0])).unwrap());
        assert!(t.insert(&V::from_ints(&[0, 1, 1])).unwrap());
        assert!(!t.insert(&V::from_ints(&[1, 2, 1])).unwrap());
        assert!(!t.insert(&V::zeros(3)).unwrap());
        assert_eq!(t.nullity(), 1);
    }

    #[test]
    fn float_kernel() {
        let rows = vec![Vector::<f64>::new(vec![1.0, 1.0, 1.0])];
        let k = kernel_basis(&rows, 3).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(v.dot(&rows[0]).abs() < 1e-12);
        }
    }
}
