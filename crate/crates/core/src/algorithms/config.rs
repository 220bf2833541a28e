use std::fmt;
use std::str::FromStr;

use crate::error::{FedError, Result};
use crate::iterate::Iterate;
use crate::problems::Constants;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Gda,
    LocalSgda,
    FedGdaGt,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Gda => "GDA",
            Algorithm::LocalSgda => "LocalSGDA",
            Algorithm::FedGdaGt => "FedGDAGT",
        })
    }
}

impl FromStr for Algorithm {
    type Err = FedError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GDA" => Ok(Algorithm::Gda),
            "LocalSGDA" => Ok(Algorithm::LocalSgda),
            "FedGDAGT" => Ok(Algorithm::FedGdaGt),
            other => Err(FedError::InvalidInput(format!(
                "unknown algorithm {other:?} (expected GDA, LocalSGDA or FedGDAGT)"
            ))),
        }
    }
}

/// FedGDA-GT uses one stepsize for both players; the others may differ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stepsizes<T> {
    Separate { x: T, y: T },
    Shared(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoConfig<T> {
    pub algorithm: Algorithm,
    pub stepsizes: Stepsizes<T>,
    /// Local updates per round `K` (always 1 for GDA).
    pub local_steps: usize,
    /// Communication rounds `T`.
    pub rounds: usize,
    pub init: Iterate<T>,
}

impl<T: Scalar> AlgoConfig<T> {
    pub fn gda(eta_x: T, eta_y: T, rounds: usize, init: Iterate<T>) -> Self {
        Self {
            algorithm: Algorithm::Gda,
            stepsizes: Stepsizes::Separate { x: eta_x, y: eta_y },
            local_steps: 1,
            rounds,
            init,
        }
    }

    pub fn local_sgda(
        eta_x: T,
        eta_y: T,
        local_steps: usize,
        rounds: usize,
        init: Iterate<T>,
    ) -> Self {
        Self {
            algorithm: Algorithm::LocalSgda,
            stepsizes: Stepsizes::Separate { x: eta_x, y: eta_y },
            local_steps,
            rounds,
            init,
        }
    }

    pub fn fedgda_gt(eta: T, local_steps: usize, rounds: usize, init: Iterate<T>) -> Self {
        Self {
            algorithm: Algorithm::FedGdaGt,
            stepsizes: Stepsizes::Shared(eta),
            local_steps,
            rounds,
            init,
        }
    }

    pub fn eta_x(&self) -> T {
        match self.stepsizes {
            Stepsizes::Separate { x, .. } => x,
            Stepsizes::Shared(eta) => eta,
        }
    }

    pub fn eta_y(&self) -> T {
        match self.stepsizes {
            Stepsizes::Separate { y, .. } => y,
            Stepsizes::Shared(eta) => eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        match (self.algorithm, self.stepsizes) {
            (Algorithm::FedGdaGt, Stepsizes::Separate { .. }) => {
                return Err(FedError::InvalidInput(
                    "FedGDAGT takes a single shared stepsize".into(),
                ))
            }
            (_, s) => {
                let (x, y) = match s {
                    Stepsizes::Separate { x, y } => (x, y),
                    Stepsizes::Shared(e) => (e, e),
                };
                if !positive(x) || !positive(y) {
                    return Err(FedError::InvalidInput(format!(
                        "stepsizes must be positive and finite (got eta_x = {x}, eta_y = {y})"
                    )));
                }
            }
        }
        if self.local_steps == 0 {
            return Err(FedError::InvalidInput("local steps K must be >= 1".into()));
        }
        if self.algorithm == Algorithm::Gda && self.local_steps != 1 {
            return Err(FedError::InvalidInput(
                "GDA runs exactly one step per round".into(),
            ));
        }
        if !self.init.is_finite() {
            return Err(FedError::NonFinite("initial iterate"));
        }
        Ok(())
    }
}

/// Default FedGDA-GT stepsize `η = ½ · min{2μ/L², 1/(2μK)}`.
pub fn auto_stepsize<T: Scalar>(constants: Constants<T>, local_steps: usize) -> Result<T> {
    let Constants { mu, lipschitz } = constants;
    if !(mu > T::zero()) || !(lipschitz >= mu) || local_steps == 0 {
        return Err(FedError::InvalidInput(format!(
            "automatic stepsize needs 0 < mu <= L and K >= 1 (mu = {mu}, L = {lipschitz}, K = {local_steps})"
        )));
    }
    let two = T::lit(2.0);
    let a = two * mu / (lipschitz * lipschitz);
    let b = T::one() / (two * mu * T::from_count(local_steps));
    Ok(a.min(b) / two)
}
