//! Centralized GDA, Local SGDA and FedGDA-GT.
//!
//! All three run synchronous communication rounds against a
//! [`MinimaxProblem`]. Agent loops execute sequentially in ascending index
//! and every server-side average goes through
//! [`RunningMean`](crate::vector::RunningMean), so traces are bitwise
//! reproducible.
//!
//! FedGDA-GT exchanges two messages per round (iterate and global
//! gradient); rounds are still counted once.

mod config;
mod operators;
mod rounds;
mod trace;

pub use config::{auto_stepsize, AlgoConfig, Algorithm, Stepsizes};
pub use operators::{local_sgda_residual, operator_compose};
pub use rounds::{fedgda_gt_round, gda_step, local_sgda_round};
pub use trace::{IterateMetric, Metrics, RoundRecord, RunTrace};

use std::time::Instant;

use crate::error::{FedError, Result};
use crate::iterate::Iterate;
use crate::problems::{GradWorkspace, MinimaxProblem};
use crate::scalar::Scalar;

use rounds::RoundWorkspace;

/// Runs abort once `‖z‖` exceeds this bound (or turns non-finite).
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Runs the algorithm selected in `config`.
pub fn run<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    config: &AlgoConfig<T>,
    metrics: &Metrics<'_, T>,
) -> Result<RunTrace<T>> {
    match config.algorithm {
        Algorithm::Gda => gda(problem, config, metrics),
        Algorithm::LocalSgda => local_sgda(problem, config, metrics),
        Algorithm::FedGdaGt => fedgda_gt(problem, config, metrics),
    }
}

/// Centralized gradient descent ascent; one step per round.
pub fn gda<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    config: &AlgoConfig<T>,
    metrics: &Metrics<'_, T>,
) -> Result<RunTrace<T>> {
    expect_algorithm(config, Algorithm::Gda)?;
    drive(problem, config, metrics, |ws, z| {
        ws.local_sgda(problem, z, config.eta_x(), config.eta_y(), 1)
    })
}

/// Local SGDA with full local gradients: `K` uncorrected local GDA steps
/// per agent, then server averaging.
pub fn local_sgda<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    config: &AlgoConfig<T>,
    metrics: &Metrics<'_, T>,
) -> Result<RunTrace<T>> {
    expect_algorithm(config, Algorithm::LocalSgda)?;
    drive(problem, config, metrics, |ws, z| {
        ws.local_sgda(
            problem,
            z,
            config.eta_x(),
            config.eta_y(),
            config.local_steps,
        )
    })
}

/// FedGDA-GT: `K` local steps per agent corrected by the gap between the
/// global and local gradients at the last synchronized iterate, then
/// averaging and projection onto `X × Y`.
pub fn fedgda_gt<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    config: &AlgoConfig<T>,
    metrics: &Metrics<'_, T>,
) -> Result<RunTrace<T>> {
    expect_algorithm(config, Algorithm::FedGdaGt)?;
    drive(problem, config, metrics, |ws, z| {
        ws.fedgda_gt(problem, z, config.eta_x(), config.local_steps)
    })
}

fn expect_algorithm<T: Scalar>(config: &AlgoConfig<T>, algo: Algorithm) -> Result<()> {
    if config.algorithm != algo {
        return Err(FedError::InvalidInput(format!(
            "configuration is for {}, not {algo}",
            config.algorithm
        )));
    }
    Ok(())
}

fn drive<T, P, F>(
    problem: &P,
    config: &AlgoConfig<T>,
    metrics: &Metrics<'_, T>,
    mut round: F,
) -> Result<RunTrace<T>>
where
    T: Scalar,
    P: MinimaxProblem<T> + ?Sized,
    F: FnMut(&mut RoundWorkspace<T>, &Iterate<T>) -> Result<Iterate<T>>,
{
    config.validate()?;
    let (p, q) = problem.dims();
    config.init.check_dims(p, q)?;
    if let Some(zs) = metrics.z_star {
        zs.check_dims(p, q)?;
    }
    let start = Instant::now();
    let mut ws = RoundWorkspace::new(p, q);
    let mut grad_ws = GradWorkspace::new(p, q);
    let mut records = Vec::with_capacity(config.rounds + 1);
    let mut z = config.init.clone();
    records.push(metrics.record(problem, 0, &z, &mut grad_ws, start));
    for t in 1..=config.rounds {
        z = round(&mut ws, &z)?;
        guard(&z, t)?;
        records.push(metrics.record(problem, t, &z, &mut grad_ws, start));
    }
    Ok(RunTrace {
        config: config.clone(),
        records,
        final_iterate: z,
    })
}

fn guard<T: Scalar>(z: &Iterate<T>, round: usize) -> Result<()> {
    let norm = z.norm2().sqrt().to_f64_lossy();
    if !z.is_finite() || !(norm <= DIVERGENCE_LIMIT) {
        return Err(FedError::Divergence {
            round,
            norm,
            limit: DIVERGENCE_LIMIT,
        });
    }
    Ok(())
}
