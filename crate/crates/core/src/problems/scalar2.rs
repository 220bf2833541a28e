use super::{Constants, LocalObjective, MinimaxProblem};
use crate::iterate::Iterate;
use crate::scalar::Scalar;
use crate::sets::ProductSet;

/// Agent `i ∈ {1, 2}` of the two-agent scalar instance:
/// `f_i(x, y) = i²(x² − y²) − (31i − 30)(x − y)`.
#[derive(Debug, Clone, Copy)]
pub struct ScalarAgent {
    index: u32,
}

impl ScalarAgent {
    /// One-based agent number `i`.
    pub fn index(&self) -> u32 {
        self.index
    }

    /// Curvature `2i²` of the agent's objective in both blocks.
    pub fn curvature<T: Scalar>(&self) -> T {
        T::lit(2.0 * f64::from(self.index * self.index))
    }

    /// Linear coefficient `31i − 30`.
    pub fn offset<T: Scalar>(&self) -> T {
        T::lit(31.0 * f64::from(self.index) - 30.0)
    }
}

impl<T: Scalar> LocalObjective<T> for ScalarAgent {
    fn dims(&self) -> (usize, usize) {
        (1, 1)
    }

    fn value(&self, x: &[T], y: &[T]) -> T {
        let half_curv = self.curvature::<T>() / T::lit(2.0);
        half_curv * (x[0] * x[0] - y[0] * y[0]) - self.offset::<T>() * (x[0] - y[0])
    }

    fn grad_into(&self, x: &[T], y: &[T], gx: &mut [T], gy: &mut [T]) {
        gx[0] = self.curvature::<T>() * x[0] - self.offset::<T>();
        gy[0] = -self.curvature::<T>() * y[0] + self.offset::<T>();
    }
}

/// Two heterogeneous scalar agents whose Local SGDA fixed point drifts away
/// from the true minimax point `(3.3, 3.3)` as the local step count grows.
/// Unconstrained.
#[derive(Debug, Clone)]
pub struct ScalarTwoAgent<T> {
    agents: [ScalarAgent; 2],
    sets: ProductSet<T>,
}

impl<T: Scalar> Default for ScalarTwoAgent<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ScalarTwoAgent<T> {
    pub fn new() -> Self {
        Self {
            agents: [ScalarAgent { index: 1 }, ScalarAgent { index: 2 }],
            sets: ProductSet::unconstrained(),
        }
    }

    /// Same agents restricted to `sets` (both must be one-dimensional).
    pub fn with_sets(mut self, sets: ProductSet<T>) -> crate::error::Result<Self> {
        sets.check_dims(1, 1)?;
        self.sets = sets;
        Ok(self)
    }

    pub fn agents(&self) -> &[ScalarAgent; 2] {
        &self.agents
    }

    /// `x* = y* = (Σ 2i²)⁻¹ Σ (31i − 30) = 33 / 10`.
    pub fn closed_form_minimax(&self) -> Iterate<T> {
        let num = self
            .agents
            .iter()
            .fold(T::zero(), |acc, a| acc + a.offset::<T>());
        let den = self
            .agents
            .iter()
            .fold(T::zero(), |acc, a| acc + a.curvature::<T>());
        let v = num / den;
        Iterate {
            x: vec![v],
            y: vec![v],
        }
    }

    /// `(μ, L) = (min 2i², max 2i²) = (2, 8)`.
    pub fn constants(&self) -> Constants<T> {
        let c: Vec<T> = self.agents.iter().map(|a| a.curvature()).collect();
        Constants {
            mu: c.iter().copied().fold(T::infinity(), T::min),
            lipschitz: c.iter().copied().fold(T::neg_infinity(), T::max),
        }
    }
}

impl<T: Scalar> MinimaxProblem<T> for ScalarTwoAgent<T> {
    fn num_agents(&self) -> usize {
        2
    }
    fn dims(&self) -> (usize, usize) {
        (1, 1)
    }
    fn agent(&self, i: usize) -> &dyn LocalObjective<T> {
        &self.agents[i]
    }
    fn sets(&self) -> &ProductSet<T> {
        &self.sets
    }
}
