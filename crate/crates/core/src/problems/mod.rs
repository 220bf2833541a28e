//! Local objective oracles and federated minimax problems.
//!
//! A federation of `m` agents jointly solves
//! `min_x max_y f(x, y) = (1/m) Σ_i f_i(x, y)` where each agent only
//! evaluates its own `f_i`. Agents are indexed from 0 in code; the
//! generated families use `i + 1` wherever the data recipe depends on the
//! agent number.

mod federation;
mod quadratic;
mod rlr;
mod scalar2;

pub use federation::Federation;
pub use quadratic::{QuadraticAgent, UncoupledQuadratic};
pub use rlr::{RlrAgent, RobustLinearRegression};
pub use scalar2::{ScalarAgent, ScalarTwoAgent};

use crate::error::{FedError, Result};
use crate::iterate::Iterate;
use crate::scalar::Scalar;
use crate::sets::ProductSet;
use crate::vector::RunningMean;

/// Value and partial-gradient oracle for one agent's `f_i`.
pub trait LocalObjective<T: Scalar>: Send + Sync {
    /// `(p, q)`: dimensions of the x- and y-blocks.
    fn dims(&self) -> (usize, usize);

    fn value(&self, x: &[T], y: &[T]) -> T;

    /// Overwrites `gx` with `∇_x f_i(x, y)` and `gy` with `∇_y f_i(x, y)`.
    fn grad_into(&self, x: &[T], y: &[T], gx: &mut [T], gy: &mut [T]);

    fn grad(&self, x: &[T], y: &[T]) -> (Vec<T>, Vec<T>) {
        let (p, q) = self.dims();
        let mut gx = vec![T::zero(); p];
        let mut gy = vec![T::zero(); q];
        self.grad_into(x, y, &mut gx, &mut gy);
        (gx, gy)
    }
}

/// A simulated federation: `m ≥ 1` agents sharing `(p, q)` and a feasible
/// product set.
pub trait MinimaxProblem<T: Scalar>: Send + Sync {
    fn num_agents(&self) -> usize;

    fn dims(&self) -> (usize, usize);

    /// Agent `i`, zero-based.
    fn agent(&self, i: usize) -> &dyn LocalObjective<T>;

    fn sets(&self) -> &ProductSet<T>;
}

/// `μ` (strong convexity-concavity) and `L` (smoothness) of a federation,
/// taken as the minimum / maximum over agents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants<T> {
    pub mu: T,
    pub lipschitz: T,
}

/// Global gradient `(∇_x f, ∇_y f)(z)`: mean of local gradients in
/// ascending agent order.
pub fn global_grad<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    z: &Iterate<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let (p, q) = problem.dims();
    z.check_dims(p, q)?;
    let mut ws = GradWorkspace::new(p, q);
    ws.global_grad(problem, &z.x, &z.y);
    Ok((ws.mean_x.finish(), ws.mean_y.finish()))
}

/// Global objective `f(z) = (1/m) Σ f_i(z)`.
pub fn global_value<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    z: &Iterate<T>,
) -> Result<T> {
    let (p, q) = problem.dims();
    z.check_dims(p, q)?;
    let m = problem.num_agents();
    let mut mean = T::zero();
    for i in 0..m {
        let v = problem.agent(i).value(&z.x, &z.y);
        mean += (v - mean) / T::from_count(i + 1);
    }
    Ok(mean)
}

/// Stacked monotone field `F(z) = (∇_x f(z), −∇_y f(z))`, concatenated.
pub fn monotone_field<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    z: &Iterate<T>,
) -> Result<Vec<T>> {
    let (gx, gy) = global_grad(problem, z)?;
    Ok(gx.into_iter().chain(gy.into_iter().map(|v| -v)).collect())
}

/// Same field for a single agent's `f_i`.
pub fn local_monotone_field<T: Scalar>(agent: &dyn LocalObjective<T>, z: &Iterate<T>) -> Vec<T> {
    let (gx, gy) = agent.grad(&z.x, &z.y);
    gx.into_iter().chain(gy.into_iter().map(|v| -v)).collect()
}

pub(crate) fn validate_agents<T: Scalar>(
    agents: &[&dyn LocalObjective<T>],
    sets: &ProductSet<T>,
) -> Result<(usize, usize)> {
    let first = agents
        .first()
        .ok_or_else(|| FedError::InvalidInput("a federation needs at least one agent".into()))?;
    let (p, q) = first.dims();
    if p == 0 || q == 0 {
        return Err(FedError::InvalidInput(
            "agent dimensions must be positive".into(),
        ));
    }
    for a in agents {
        let (pa, qa) = a.dims();
        crate::error::check_dim("agent x-dimension", p, pa)?;
        crate::error::check_dim("agent y-dimension", q, qa)?;
    }
    sets.check_dims(p, q)?;
    Ok((p, q))
}

/// Reusable buffers for repeated gradient evaluation.
#[derive(Debug, Clone)]
pub(crate) struct GradWorkspace<T> {
    pub gx: Vec<T>,
    pub gy: Vec<T>,
    pub mean_x: RunningMean<T>,
    pub mean_y: RunningMean<T>,
}

impl<T: Scalar> GradWorkspace<T> {
    pub fn new(p: usize, q: usize) -> Self {
        Self {
            gx: vec![T::zero(); p],
            gy: vec![T::zero(); q],
            mean_x: RunningMean::new(p),
            mean_y: RunningMean::new(q),
        }
    }

    /// Leaves the global gradient in `mean_x` / `mean_y`.
    pub fn global_grad<P: MinimaxProblem<T> + ?Sized>(&mut self, problem: &P, x: &[T], y: &[T]) {
        self.mean_x.reset();
        self.mean_y.reset();
        for i in 0..problem.num_agents() {
            problem.agent(i).grad_into(x, y, &mut self.gx, &mut self.gy);
            self.mean_x.push(&self.gx);
            self.mean_y.push(&self.gy);
        }
    }
}

/// Any of the built-in problem families, for callers that pick the family
/// at run time.
#[derive(Debug, Clone)]
pub enum ProblemInstance<T: Scalar> {
    ScalarTwoAgent(ScalarTwoAgent<T>),
    Quadratic(UncoupledQuadratic<T>),
    Rlr(RobustLinearRegression<T>),
}

impl<T: Scalar> ProblemInstance<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemInstance::ScalarTwoAgent(_) => "scalar2",
            ProblemInstance::Quadratic(_) => "quadratic",
            ProblemInstance::Rlr(_) => "rlr",
        }
    }

    /// Replaces the feasible sets.
    pub fn with_sets(self, sets: ProductSet<T>) -> Result<Self> {
        Ok(match self {
            ProblemInstance::ScalarTwoAgent(p) => {
                ProblemInstance::ScalarTwoAgent(p.with_sets(sets)?)
            }
            ProblemInstance::Quadratic(p) => ProblemInstance::Quadratic(p.with_sets(sets)?),
            ProblemInstance::Rlr(p) => ProblemInstance::Rlr(RobustLinearRegression::with_sets(
                p.agents().to_vec(),
                sets,
            )?),
        })
    }

    /// Unique stationary point, where one exists in closed form.
    pub fn closed_form_minimax(&self) -> Result<Iterate<T>> {
        match self {
            ProblemInstance::ScalarTwoAgent(p) => Ok(p.closed_form_minimax()),
            ProblemInstance::Quadratic(p) => p.closed_form_minimax(),
            ProblemInstance::Rlr(_) => Err(FedError::Unsupported(
                "robust linear regression has no closed-form minimax point".into(),
            )),
        }
    }

    pub fn estimate_constants(&self) -> Result<Constants<T>> {
        match self {
            ProblemInstance::ScalarTwoAgent(p) => Ok(p.constants()),
            ProblemInstance::Quadratic(p) => p.estimate_constants(),
            ProblemInstance::Rlr(_) => Err(FedError::Unsupported(
                "constants are not estimated for robust linear regression; supply stepsizes".into(),
            )),
        }
    }

    fn inner(&self) -> &dyn MinimaxProblem<T> {
        match self {
            ProblemInstance::ScalarTwoAgent(p) => p,
            ProblemInstance::Quadratic(p) => p,
            ProblemInstance::Rlr(p) => p,
        }
    }
}

impl<T: Scalar> MinimaxProblem<T> for ProblemInstance<T> {
    fn num_agents(&self) -> usize {
        self.inner().num_agents()
    }
    fn dims(&self) -> (usize, usize) {
        self.inner().dims()
    }
    fn agent(&self, i: usize) -> &dyn LocalObjective<T> {
        self.inner().agent(i)
    }
    fn sets(&self) -> &ProductSet<T> {
        self.inner().sets()
    }
}
