use super::{validate_agents, LocalObjective, MinimaxProblem};
use crate::error::{check_dim, FedError, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;
use crate::sets::{FeasibleSet, ProductSet};
use crate::vector::{all_finite, dot_unchecked};

/// Robust least squares on one agent's samples:
/// `f_i(x, y) = (1/n) Σ_j (xᵀ(a_j + y) − b_j)² + ½‖x‖²`,
/// where `y` is a shared perturbation of every feature vector.
#[derive(Debug, Clone)]
pub struct RlrAgent<T> {
    /// `n × d`, one sample per row.
    features: DenseMatrix<T>,
    targets: Vec<T>,
}

impl<T: Scalar> RlrAgent<T> {
    pub fn new(features: DenseMatrix<T>, targets: Vec<T>) -> Result<Self> {
        check_dim("rlr targets", features.rows(), targets.len())?;
        if features.rows() == 0 || features.cols() == 0 {
            return Err(FedError::InvalidInput(
                "rlr agent needs at least one sample of positive dimension".into(),
            ));
        }
        if !all_finite(features.as_slice()) || !all_finite(&targets) {
            return Err(FedError::NonFinite("rlr samples"));
        }
        Ok(Self { features, targets })
    }

    pub fn features(&self) -> &DenseMatrix<T> {
        &self.features
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    pub fn num_samples(&self) -> usize {
        self.targets.len()
    }

    /// Residuals `xᵀa_j − b_j` without the perturbation term.
    pub fn base_residuals(&self, x: &[T]) -> Vec<T> {
        self.features
            .matvec(x)
            .expect("x dimension")
            .into_iter()
            .zip(&self.targets)
            .map(|(ax, &b)| ax - b)
            .collect()
    }
}

impl<T: Scalar> LocalObjective<T> for RlrAgent<T> {
    fn dims(&self) -> (usize, usize) {
        (self.features.cols(), self.features.cols())
    }

    fn value(&self, x: &[T], y: &[T]) -> T {
        let xy = dot_unchecked(x, y);
        let n = T::from_count(self.num_samples());
        let sq = self
            .features
            .as_slice()
            .chunks_exact(self.features.cols())
            .zip(&self.targets)
            .fold(T::zero(), |acc, (a, &b)| {
                let r = dot_unchecked(a, x) + xy - b;
                acc + r * r
            });
        sq / n + T::lit(0.5) * dot_unchecked(x, x)
    }

    fn grad_into(&self, x: &[T], y: &[T], gx: &mut [T], gy: &mut [T]) {
        // r_j = xᵀ(a_j + y) − b_j
        // ∇_x = (2/n) Σ r_j (a_j + y) + x,  ∇_y = (2/n) (Σ r_j) x
        let xy = dot_unchecked(x, y);
        let d = self.features.cols();
        gx.iter_mut().for_each(|g| *g = T::zero());
        let mut sum_r = T::zero();
        for (a, &b) in self.features.as_slice().chunks_exact(d).zip(&self.targets) {
            let r = dot_unchecked(a, x) + xy - b;
            sum_r += r;
            crate::vector::axpy_into(r, a, gx);
        }
        let w = T::lit(2.0) / T::from_count(self.num_samples());
        for ((g, &yi), &xi) in gx.iter_mut().zip(y).zip(x) {
            *g = w * (*g + sum_r * yi) + xi;
        }
        for (g, &xi) in gy.iter_mut().zip(x) {
            *g = w * sum_r * xi;
        }
    }
}

/// Robust linear regression federation. `X` is unconstrained and `Y` the
/// unit ball unless overridden.
#[derive(Debug, Clone)]
pub struct RobustLinearRegression<T> {
    agents: Vec<RlrAgent<T>>,
    sets: ProductSet<T>,
}

impl<T: Scalar> RobustLinearRegression<T> {
    pub fn new(agents: Vec<RlrAgent<T>>) -> Result<Self> {
        let d = agents
            .first()
            .map(|a| a.features.cols())
            .ok_or_else(|| FedError::InvalidInput("rlr needs at least one agent".into()))?;
        let sets = ProductSet::new(
            FeasibleSet::Unconstrained,
            FeasibleSet::origin_ball(d, T::one())?,
        );
        Self::with_sets(agents, sets)
    }

    pub fn with_sets(agents: Vec<RlrAgent<T>>, sets: ProductSet<T>) -> Result<Self> {
        {
            let refs: Vec<&dyn LocalObjective<T>> =
                agents.iter().map(|a| a as &dyn LocalObjective<T>).collect();
            validate_agents(&refs, &sets)?;
        }
        Ok(Self { agents, sets })
    }

    pub fn agents(&self) -> &[RlrAgent<T>] {
        &self.agents
    }

    pub fn dim(&self) -> usize {
        self.agents[0].features.cols()
    }

    /// `max_i λ_max((2/n) A_iᵀA_i) + 1`: the x-curvature of the agents at
    /// `y = 0`, used to scale stepsizes.
    pub fn x_smoothness(&self) -> Result<T> {
        let mut best = T::zero();
        for a in &self.agents {
            let ev = crate::linalg::symmetric_eigenvalues(&a.features.gram())?;
            let top = *ev.last().expect("d >= 1");
            best = best.max(T::lit(2.0) * top / T::from_count(a.num_samples()) + T::one());
        }
        Ok(best)
    }
}

impl<T: Scalar> MinimaxProblem<T> for RobustLinearRegression<T> {
    fn num_agents(&self) -> usize {
        self.agents.len()
    }
    fn dims(&self) -> (usize, usize) {
        (self.dim(), self.dim())
    }
    fn agent(&self, i: usize) -> &dyn LocalObjective<T> {
        &self.agents[i]
    }
    fn sets(&self) -> &ProductSet<T> {
        &self.sets
    }
}
