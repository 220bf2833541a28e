//! The k-step local operators `(D_i^k, A_i^k)` and the fixed-point
//! residual of Local SGDA built from them.

use crate::error::{FedError, Result};
use crate::iterate::Iterate;
use crate::problems::{LocalObjective, MinimaxProblem};
use crate::scalar::Scalar;
use crate::vector::RunningMean;

/// `(D_i^k(z), A_i^k(z))`: `k` joint GDA steps on one agent's objective.
/// `k = 0` returns `z` unchanged.
pub fn operator_compose<T: Scalar>(
    agent: &dyn LocalObjective<T>,
    k: usize,
    eta_x: T,
    eta_y: T,
    z: &Iterate<T>,
) -> Result<Iterate<T>> {
    let (p, q) = agent.dims();
    z.check_dims(p, q)?;
    let mut out = z.clone();
    let mut gx = vec![T::zero(); p];
    let mut gy = vec![T::zero(); q];
    for _ in 0..k {
        step(agent, &mut out, eta_x, eta_y, &mut gx, &mut gy);
    }
    Ok(out)
}

fn step<T: Scalar>(
    agent: &dyn LocalObjective<T>,
    z: &mut Iterate<T>,
    eta_x: T,
    eta_y: T,
    gx: &mut [T],
    gy: &mut [T],
) {
    agent.grad_into(&z.x, &z.y, gx, gy);
    for (x, &g) in z.x.iter_mut().zip(gx.iter()) {
        *x -= eta_x * g;
    }
    for (y, &g) in z.y.iter_mut().zip(gy.iter()) {
        *y += eta_y * g;
    }
}

/// `(1/m) Σ_i Σ_{k<K} ∇f_i(D_i^k(z), A_i^k(z))`, x-block then y-block.
///
/// A point is a Local SGDA fixed point (for unconstrained problems)
/// exactly when this vanishes. With `K = 1` it is the global gradient.
pub fn local_sgda_residual<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    z: &Iterate<T>,
    local_steps: usize,
    eta_x: T,
    eta_y: T,
) -> Result<Vec<T>> {
    if local_steps == 0 {
        return Err(FedError::InvalidInput("local steps K must be >= 1".into()));
    }
    let (p, q) = problem.dims();
    z.check_dims(p, q)?;
    let mut gx = vec![T::zero(); p];
    let mut gy = vec![T::zero(); q];
    let mut sum_x = vec![T::zero(); p];
    let mut sum_y = vec![T::zero(); q];
    let mut mean_x = RunningMean::new(p);
    let mut mean_y = RunningMean::new(q);
    for i in 0..problem.num_agents() {
        let agent = problem.agent(i);
        let mut zi = z.clone();
        sum_x.fill(T::zero());
        sum_y.fill(T::zero());
        for _ in 0..local_steps {
            agent.grad_into(&zi.x, &zi.y, &mut gx, &mut gy);
            for (s, &g) in sum_x.iter_mut().zip(&gx) {
                *s += g;
            }
            for (s, &g) in sum_y.iter_mut().zip(&gy) {
                *s += g;
            }
            for (x, &g) in zi.x.iter_mut().zip(&gx) {
                *x -= eta_x * g;
            }
            for (y, &g) in zi.y.iter_mut().zip(&gy) {
                *y += eta_y * g;
            }
        }
        mean_x.push(&sum_x);
        mean_y.push(&sum_y);
    }
    let mut out = mean_x.finish();
    out.extend(mean_y.finish());
    Ok(out)
}
