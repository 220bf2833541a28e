use crate::error::{check_dim, FedError, Result};
use crate::scalar::Scalar;
use crate::vector::{all_finite, dist2, norm2};

/// Decision pair `z = (x, y)`: `x` for the min player, `y` for the max player.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Scalar> Iterate<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(FedError::InvalidInput(
                "iterate blocks must be non-empty".into(),
            ));
        }
        if !all_finite(&x) || !all_finite(&y) {
            return Err(FedError::NonFinite("iterate"));
        }
        Ok(Self { x, y })
    }

    pub fn zeros(p: usize, q: usize) -> Self {
        Self {
            x: vec![T::zero(); p],
            y: vec![T::zero(); q],
        }
    }

    pub fn filled(p: usize, q: usize, v: T) -> Self {
        Self {
            x: vec![v; p],
            y: vec![v; q],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    pub fn check_dims(&self, p: usize, q: usize) -> Result<()> {
        check_dim("iterate x-block", p, self.x.len())?;
        check_dim("iterate y-block", q, self.y.len())
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.x) && all_finite(&self.y)
    }

    /// `‖z‖²` over both blocks.
    pub fn norm2(&self) -> T {
        norm2(&self.x) + norm2(&self.y)
    }

    /// `‖x − x'‖² + ‖y − y'‖²`.
    pub fn dist2(&self, other: &Self) -> Result<T> {
        Ok(dist2(&self.x, &other.x)? + dist2(&self.y, &other.y)?)
    }

    /// Concatenation `(x, y)` as one vector of length `p + q`.
    pub fn concat(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.x.len() + self.y.len());
        v.extend_from_slice(&self.x);
        v.extend_from_slice(&self.y);
        v
    }

    pub fn from_concat(v: &[T], p: usize) -> Result<Self> {
        if p == 0 || p >= v.len() {
            return Err(FedError::InvalidInput(format!(
                "cannot split vector of length {} at {p}",
                v.len()
            )));
        }
        Self::new(v[..p].to_vec(), v[p..].to_vec())
    }

    /// Exact equality of every entry's bit pattern (after lossless widening to `f64`).
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        let eq = |a: &[T], b: &[T]| {
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|(&u, &v)| u.to_f64_lossy().to_bits() == v.to_f64_lossy().to_bits())
        };
        eq(&self.x, &other.x) && eq(&self.y, &other.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nan() {
        assert!(Iterate::<f64>::new(vec![], vec![1.0]).is_err());
        assert!(Iterate::new(vec![f64::INFINITY], vec![1.0]).is_err());
    }

    #[test]
    fn concat_round_trip() {
        let z = Iterate::new(vec![1.0, 2.0], vec![3.0]).unwrap();
        assert_eq!(z.concat(), vec![1.0, 2.0, 3.0]);
        assert_eq!(Iterate::from_concat(&z.concat(), 2).unwrap(), z);
        assert!(Iterate::from_concat(&z.concat(), 3).is_err());
    }

    #[test]
    fn dist_and_norm() {
        let a = Iterate::new(vec![1.0, 0.0], vec![2.0]).unwrap();
        let b = Iterate::zeros(2, 1);
        assert_eq!(a.norm2(), 5.0);
        assert_eq!(a.dist2(&b).unwrap(), 5.0);
        assert!(a.dist2(&Iterate::zeros(1, 1)).is_err());
    }
}
