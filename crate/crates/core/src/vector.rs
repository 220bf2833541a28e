//! Dense vector arithmetic over slices.
//!
//! The checked functions return [`FedError::DimensionMismatch`] on length
//! disagreement. The `*_into` variants are used on hot paths and only
//! debug-assert their lengths.
//!
//! Averages over agents go through [`RunningMean`], which folds values in
//! the order they are pushed (ascending agent index everywhere in this
//! crate). Its update `mean += (v - mean) / (k + 1)` reproduces a value
//! exactly when every pushed vector is identical, so homogeneous
//! federations aggregate without rounding drift.

use crate::error::{check_dim, Result};
use crate::scalar::Scalar;

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    check_dim("add", a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(&u, &v)| u + v).collect())
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    check_dim("sub", a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(&u, &v)| u - v).collect())
}

pub fn scale<T: Scalar>(alpha: T, a: &[T]) -> Vec<T> {
    a.iter().map(|&u| alpha * u).collect()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    check_dim("dot", a.len(), b.len())?;
    Ok(dot_unchecked(a, b))
}

/// Squared Euclidean norm.
pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot_unchecked(a, a)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    norm2(a).sqrt()
}

/// Squared Euclidean distance.
pub fn dist2<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    check_dim("dist2", a.len(), b.len())?;
    Ok(a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&u, &v)| acc + (u - v) * (u - v)))
}

#[inline]
pub(crate) fn dot_unchecked<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&u, &v)| acc + u * v)
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy_into<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn all_finite<T: Scalar>(a: &[T]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Order-sensitive incremental mean of equal-length vectors.
#[derive(Debug, Clone)]
pub struct RunningMean<T> {
    mean: Vec<T>,
    count: usize,
}

impl<T: Scalar> RunningMean<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            mean: vec![T::zero(); dim],
            count: 0,
        }
    }

    pub fn push(&mut self, v: &[T]) {
        debug_assert_eq!(v.len(), self.mean.len());
        self.count += 1;
        let inv = T::one() / T::from_count(self.count);
        for (m, &x) in self.mean.iter_mut().zip(v) {
            *m += (x - *m) * inv;
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(self) -> Vec<T> {
        self.mean
    }

    pub fn reset(&mut self) {
        self.count = 0;
        self.mean.iter_mut().for_each(|m| *m = T::zero());
    }

    pub fn as_slice(&self) -> &[T] {
        &self.mean
    }
}
