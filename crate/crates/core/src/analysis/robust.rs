//! Robust loss `f̃(x̂) = max_{‖y‖≤1} Σ_i f_i(x̂, y)` for robust linear
//! regression.
//!
//! The value is a SUM over agents, not the mean used by the training
//! objective, so it is `m` times larger than `max_y f(x̂, y)`.
//!
//! The objective depends on `y` only through `s = x̂ᵀy` and is a convex
//! quadratic in `s`, so its maximum over the ball sits at one of the two
//! boundary points `±x̂/‖x̂‖`. The evaluator runs warm-started projected
//! gradient ascent and then also scores both boundary points, returning the
//! largest value seen. Ascent alone can stall at `y = 0` when the
//! gradient there vanishes.

use crate::error::{FedError, Result};
use crate::problems::{LocalObjective, RobustLinearRegression};
use crate::scalar::Scalar;
use crate::vector::{all_finite, norm};

const ASCENT_TOL: f64 = 1e-10;
const ASCENT_CAP: usize = 10_000;
const POWER_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct RobustLoss<T> {
    pub value: T,
    /// Maximizer found.
    pub y: Vec<T>,
    /// Projected-ascent steps taken.
    pub steps: usize,
    /// `false` when ascent hit the step cap before the tolerance; `value`
    /// is then the best value seen.
    pub converged: bool,
}

pub fn robust_loss<T: Scalar>(
    problem: &RobustLinearRegression<T>,
    x_hat: &[T],
) -> Result<RobustLoss<T>> {
    let d = problem.dim();
    if x_hat.len() != d {
        return Err(FedError::DimensionMismatch {
            context: "robust loss",
            expected: d,
            actual: x_hat.len(),
        });
    }
    if !all_finite(x_hat) {
        return Err(FedError::NonFinite("robust loss point"));
    }
    let sum = SumObjective { problem, x: x_hat };
    let ball = &crate::MinimaxProblem::sets(problem).set_y;

    let mut y = vec![T::zero(); d];
    let mut best_value = sum.value(&y);
    let mut best_y = y.clone();
    let curvature = sum.curvature_estimate();
    let mut steps = 0;
    let mut converged = true;
    if curvature > T::zero() {
        let step = T::one() / curvature;
        converged = false;
        let mut g = vec![T::zero(); d];
        while steps < ASCENT_CAP {
            sum.grad_y(&y, &mut g);
            let mut next: Vec<T> = y.iter().zip(&g).map(|(&v, &gi)| v + step * gi).collect();
            ball.project_in_place(&mut next)?;
            steps += 1;
            let moved = norm(&crate::vector::sub(&next, &y)?);
            y = next;
            let v = sum.value(&y);
            if v > best_value {
                best_value = v;
                best_y.clone_from(&y);
            }
            if moved <= T::lit(ASCENT_TOL) {
                converged = true;
                break;
            }
        }
    }

    let x_norm = norm(x_hat);
    if x_norm > T::zero() {
        for sign in [T::one(), -T::one()] {
            let mut cand: Vec<T> = x_hat.iter().map(|&v| sign * v / x_norm).collect();
            ball.project_in_place(&mut cand)?;
            let v = sum.value(&cand);
            if v > best_value {
                best_value = v;
                best_y = cand;
            }
        }
    }
    Ok(RobustLoss {
        value: best_value,
        y: best_y,
        steps,
        converged,
    })
}

/// `y ↦ Σ_i f_i(x̂, y)` at a fixed `x̂`.
struct SumObjective<'a, T> {
    problem: &'a RobustLinearRegression<T>,
    x: &'a [T],
}

impl<T: Scalar> SumObjective<'_, T> {
    fn value(&self, y: &[T]) -> T {
        self.problem
            .agents()
            .iter()
            .map(|a| a.value(self.x, y))
            .fold(T::zero(), |acc, v| acc + v)
    }

    fn grad_y(&self, y: &[T], out: &mut [T]) {
        let d = out.len();
        let mut gx = vec![T::zero(); d];
        let mut gy = vec![T::zero(); d];
        out.iter_mut().for_each(|o| *o = T::zero());
        for a in self.problem.agents() {
            a.grad_into(self.x, y, &mut gx, &mut gy);
            for (o, &g) in out.iter_mut().zip(&gy) {
                *o += g;
            }
        }
    }

    /// Power iteration on the y-Hessian, applied through gradient
    /// differences (exact here since the objective is quadratic in y).
    fn curvature_estimate(&self) -> T {
        let d = self.x.len();
        let zero = vec![T::zero(); d];
        let mut g0 = vec![T::zero(); d];
        self.grad_y(&zero, &mut g0);
        // Start along x̂, the dominant direction for this objective.
        let x_norm = norm(self.x);
        let mut v: Vec<T> = if x_norm > T::zero() {
            self.x.iter().map(|&v| v / x_norm).collect()
        } else {
            vec![T::one() / T::from_count(d).sqrt(); d]
        };
        let mut hv = vec![T::zero(); d];
        let mut estimate = T::zero();
        for _ in 0..POWER_ITERS {
            self.grad_y(&v, &mut hv);
            for (h, &g) in hv.iter_mut().zip(&g0) {
                *h -= g;
            }
            let n = norm(&hv);
            if !(n > T::zero()) {
                return estimate;
            }
            // ‖Hv‖ with ‖v‖ = 1 approaches the spectral radius from below.
            estimate = n;
            for (vi, &h) in v.iter_mut().zip(&hv) {
                *vi = h / n;
            }
        }
        estimate
    }
}
