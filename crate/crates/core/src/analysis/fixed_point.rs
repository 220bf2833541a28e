use crate::algorithms::local_sgda_residual;
use crate::algorithms::local_sgda_round;
use crate::error::{FedError, Result};
use crate::iterate::Iterate;
use crate::problems::{MinimaxProblem, ScalarTwoAgent};
use crate::scalar::Scalar;
use crate::vector::norm;

/// Limit of Local SGDA on the two-agent scalar problem, from the geometric
/// sums
///
/// `x = (Σ_i Σ_{k<K} 2i² r_i^k)⁻¹ Σ_i Σ_{k<K} (31i − 30) r_i^k`, `r_i = 1 − 2η_x i²`,
///
/// and the same expression in `η_y` for `y`.
pub fn local_sgda_fixed_point_closed_form<T: Scalar>(
    local_steps: usize,
    eta_x: T,
    eta_y: T,
) -> Result<Iterate<T>> {
    if local_steps == 0 {
        return Err(FedError::InvalidInput("local steps K must be >= 1".into()));
    }
    let x = closed_form_coordinate(local_steps, eta_x)?;
    let y = closed_form_coordinate(local_steps, eta_y)?;
    Ok(Iterate {
        x: vec![x],
        y: vec![y],
    })
}

fn closed_form_coordinate<T: Scalar>(local_steps: usize, eta: T) -> Result<T> {
    if !(eta > T::zero()) || !eta.is_finite() {
        return Err(FedError::UnstableStepsize(format!(
            "stepsize must be positive and finite (got {eta})"
        )));
    }
    let problem = ScalarTwoAgent::<T>::new();
    let mut num = T::zero();
    let mut den = T::zero();
    for agent in problem.agents() {
        let a: T = agent.curvature();
        let b: T = agent.offset();
        let r = T::one() - eta * a;
        if !(r.abs() < T::one()) {
            return Err(FedError::UnstableStepsize(format!(
                "|1 - 2 eta i^2| = {} >= 1 for i = {}",
                r.abs(),
                agent.index()
            )));
        }
        let mut power = T::one();
        for _ in 0..local_steps {
            num += b * power;
            den += a * power;
            power *= r;
        }
    }
    if !(den > T::zero()) {
        return Err(FedError::UnstableStepsize(format!(
            "fixed-point denominator {den} is not positive"
        )));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedLimit<T> {
    pub z: Iterate<T>,
    /// Rounds executed.
    pub rounds: usize,
    /// Whether the last round moved the iterate by at most the tolerance.
    pub converged: bool,
}

/// Runs Local SGDA from `init` until one round moves the iterate by at most
/// `tol` (Euclidean) or `max_rounds` is reached.
pub fn simulate_local_sgda_limit<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    init: &Iterate<T>,
    local_steps: usize,
    eta_x: T,
    eta_y: T,
    tol: T,
    max_rounds: usize,
) -> Result<SimulatedLimit<T>> {
    if local_steps == 0 {
        return Err(FedError::InvalidInput("local steps K must be >= 1".into()));
    }
    let mut z = init.clone();
    for t in 1..=max_rounds {
        let next = local_sgda_round(problem, &z, eta_x, eta_y, local_steps)?;
        if !next.is_finite() {
            return Err(FedError::Divergence {
                round: t,
                norm: f64::INFINITY,
                limit: crate::algorithms::DIVERGENCE_LIMIT,
            });
        }
        let step = next.dist2(&z)?.sqrt();
        z = next;
        if step <= tol {
            return Ok(SimulatedLimit {
                z,
                rounds: t,
                converged: true,
            });
        }
    }
    Ok(SimulatedLimit {
        z,
        rounds: max_rounds,
        converged: false,
    })
}

/// Closed-form and simulated Local SGDA limits on the two-agent scalar
/// problem, compared against its minimax point `(3.3, 3.3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport<T> {
    pub local_steps: usize,
    pub eta_x: T,
    pub eta_y: T,
    /// Closed-form fixed point.
    pub z_fixed: Iterate<T>,
    pub z_star: Iterate<T>,
    /// `‖z_fixed − z_star‖²`.
    pub gap: T,
    /// Norm of the Local SGDA fixed-point residual at `z_fixed`.
    pub residual_norm: T,
    /// Global gradient norm at `z_fixed`.
    pub grad_norm: T,
    pub simulated: SimulatedLimit<T>,
    /// `‖z_simulated − z_fixed‖`.
    pub formula_vs_simulation: T,
}

/// Builds a [`FixedPointReport`] for the two-agent scalar problem,
/// simulating from the origin with a per-round tolerance of `1e-13`.
pub fn fixed_point_report<T: Scalar>(
    local_steps: usize,
    eta_x: T,
    eta_y: T,
    max_rounds: usize,
) -> Result<FixedPointReport<T>> {
    let problem = ScalarTwoAgent::<T>::new();
    let z_fixed = local_sgda_fixed_point_closed_form(local_steps, eta_x, eta_y)?;
    let z_star = problem.closed_form_minimax();
    let residual = local_sgda_residual(&problem, &z_fixed, local_steps, eta_x, eta_y)?;
    let (gx, gy) = crate::problems::global_grad(&problem, &z_fixed)?;
    let simulated = simulate_local_sgda_limit(
        &problem,
        &Iterate::zeros(1, 1),
        local_steps,
        eta_x,
        eta_y,
        T::lit(1e-13),
        max_rounds,
    )?;
    Ok(FixedPointReport {
        local_steps,
        eta_x,
        eta_y,
        gap: z_fixed.dist2(&z_star)?,
        formula_vs_simulation: simulated.z.dist2(&z_fixed)?.sqrt(),
        residual_norm: norm(&residual),
        grad_norm: (gx[0] * gx[0] + gy[0] * gy[0]).sqrt(),
        z_fixed,
        z_star,
        simulated,
    })
}
