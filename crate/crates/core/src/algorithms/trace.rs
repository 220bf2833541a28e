use std::time::Instant;

use super::config::AlgoConfig;
use crate::iterate::Iterate;
use crate::problems::{GradWorkspace, MinimaxProblem};
use crate::scalar::Scalar;
use crate::vector::norm2;

/// Optional per-round measurements.
/// Scalar metric evaluated at a synchronized iterate.
pub type IterateMetric<'a, T> = &'a (dyn Fn(&Iterate<T>) -> T + Sync);

#[derive(Default, Clone, Copy)]
pub struct Metrics<'a, T> {
    /// Reference point for the optimality gap.
    pub z_star: Option<&'a Iterate<T>>,
    /// Extra scalar metric evaluated at every synchronized iterate
    /// (the CLI plugs the robust loss in here).
    pub robust_loss: Option<IterateMetric<'a, T>>,
}

impl<'a, T: Scalar> Metrics<'a, T> {
    pub fn with_reference(z_star: &'a Iterate<T>) -> Self {
        Self {
            z_star: Some(z_star),
            robust_loss: None,
        }
    }

    pub(crate) fn record<P: MinimaxProblem<T> + ?Sized>(
        &self,
        problem: &P,
        round: usize,
        z: &Iterate<T>,
        ws: &mut GradWorkspace<T>,
        start: Instant,
    ) -> RoundRecord<T> {
        ws.global_grad(problem, &z.x, &z.y);
        let grad_norm = (norm2(ws.mean_x.as_slice()) + norm2(ws.mean_y.as_slice())).sqrt();
        RoundRecord {
            round,
            iterate: z.clone(),
            gap_sq: self
                .z_star
                .map(|zs| z.dist2(zs).expect("dims checked before the run")),
            grad_norm,
            robust_loss: self.robust_loss.map(|f| f(z)),
            elapsed_ns: start.elapsed().as_nanos() as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord<T> {
    pub round: usize,
    /// Synchronized server iterate `z^t`.
    pub iterate: Iterate<T>,
    /// `‖x^t − x*‖² + ‖y^t − y*‖²` when a reference point is known.
    pub gap_sq: Option<T>,
    /// `‖(∇_x f, ∇_y f)(z^t)‖`.
    pub grad_norm: T,
    pub robust_loss: Option<T>,
    /// Wall-clock time since the run started.
    pub elapsed_ns: u64,
}

/// Per-round history of one run; `records.len() == rounds + 1`.
#[derive(Debug, Clone)]
pub struct RunTrace<T> {
    pub config: AlgoConfig<T>,
    pub records: Vec<RoundRecord<T>>,
    pub final_iterate: Iterate<T>,
}

impl<T: Scalar> RunTrace<T> {
    pub fn gaps(&self) -> Option<Vec<T>> {
        self.records.iter().map(|r| r.gap_sq).collect()
    }

    pub fn final_record(&self) -> &RoundRecord<T> {
        self.records.last().expect("a trace always holds round 0")
    }

    /// Successive ratios `gap(t+1) / gap(t)` for `t ≥ 1`, stopping at the
    /// first zero gap.
    pub fn gap_ratios(&self) -> Option<Vec<T>> {
        let gaps = self.gaps()?;
        Some(
            gaps.windows(2)
                .skip(1)
                .take_while(|w| w[0] > T::zero())
                .map(|w| w[1] / w[0])
                .collect(),
        )
    }
}
