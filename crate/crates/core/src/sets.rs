//! Feasible regions and their Euclidean projections.

use crate::error::{check_dim, FedError, Result};
use crate::scalar::Scalar;
use crate::vector::{all_finite, norm2};

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet<T> {
    Unconstrained,
    /// Closed Euclidean ball `{ v : ‖v − center‖ ≤ radius }`.
    Ball {
        center: Vec<T>,
        radius: T,
    },
}

impl<T: Scalar> FeasibleSet<T> {
    pub fn ball(center: Vec<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(FedError::InvalidInput(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        if !all_finite(&center) || center.is_empty() {
            return Err(FedError::InvalidInput(
                "ball center must be a non-empty finite vector".into(),
            ));
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    /// Ball of the given radius centered at the origin of `R^dim`.
    pub fn origin_ball(dim: usize, radius: T) -> Result<Self> {
        Self::ball(vec![T::zero(); dim], radius)
    }

    /// Dimension the set is tied to; `None` for the unconstrained set.
    pub fn dim(&self) -> Option<usize> {
        match self {
            FeasibleSet::Unconstrained => None,
            FeasibleSet::Ball { center, .. } => Some(center.len()),
        }
    }

    pub fn project(&self, v: &[T]) -> Result<Vec<T>> {
        let mut out = v.to_vec();
        self.project_in_place(&mut out)?;
        Ok(out)
    }

    pub fn project_in_place(&self, v: &mut [T]) -> Result<()> {
        if !all_finite(v) {
            return Err(FedError::NonFinite("projection input"));
        }
        match self {
            FeasibleSet::Unconstrained => Ok(()),
            FeasibleSet::Ball { center, radius } => {
                check_dim("ball projection", center.len(), v.len())?;
                let dist2 = v
                    .iter()
                    .zip(center)
                    .fold(T::zero(), |acc, (&a, &c)| acc + (a - c) * (a - c));
                if dist2 <= *radius * *radius {
                    return Ok(());
                }
                let shrink = *radius / dist2.sqrt();
                for (a, &c) in v.iter_mut().zip(center) {
                    *a = c + (*a - c) * shrink;
                }
                Ok(())
            }
        }
    }

    pub fn contains(&self, v: &[T], tol: T) -> bool {
        match self {
            FeasibleSet::Unconstrained => true,
            FeasibleSet::Ball { center, radius } => {
                center.len() == v.len() && {
                    let d: Vec<T> = v.iter().zip(center).map(|(&a, &c)| a - c).collect();
                    norm2(&d).sqrt() <= *radius + tol
                }
            }
        }
    }
}

/// `X × Y`; projection acts blockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSet<T> {
    pub set_x: FeasibleSet<T>,
    pub set_y: FeasibleSet<T>,
}

impl<T: Scalar> ProductSet<T> {
    pub fn new(set_x: FeasibleSet<T>, set_y: FeasibleSet<T>) -> Self {
        Self { set_x, set_y }
    }

    pub fn unconstrained() -> Self {
        Self::new(FeasibleSet::Unconstrained, FeasibleSet::Unconstrained)
    }

    pub fn is_unconstrained(&self) -> bool {
        matches!(
            (&self.set_x, &self.set_y),
            (FeasibleSet::Unconstrained, FeasibleSet::Unconstrained)
        )
    }

    pub fn project_in_place(&self, x: &mut [T], y: &mut [T]) -> Result<()> {
        self.set_x.project_in_place(x)?;
        self.set_y.project_in_place(y)
    }

    /// Checks that the set dimensions (where defined) agree with `(p, q)`.
    pub fn check_dims(&self, p: usize, q: usize) -> Result<()> {
        if let Some(d) = self.set_x.dim() {
            check_dim("feasible set X", p, d)?;
        }
        if let Some(d) = self.set_y.dim() {
            check_dim("feasible set Y", q, d)?;
        }
        Ok(())
    }
}
