use std::sync::Arc;

use super::{validate_agents, LocalObjective, MinimaxProblem};
use crate::error::{FedError, Result};
use crate::scalar::Scalar;
use crate::sets::ProductSet;

/// Federation assembled from arbitrary agent oracles.
#[derive(Clone)]
pub struct Federation<T: Scalar> {
    agents: Vec<Arc<dyn LocalObjective<T>>>,
    sets: ProductSet<T>,
    dims: (usize, usize),
}

impl<T: Scalar> Federation<T> {
    pub fn new(agents: Vec<Arc<dyn LocalObjective<T>>>, sets: ProductSet<T>) -> Result<Self> {
        let dims = {
            let refs: Vec<&dyn LocalObjective<T>> = agents.iter().map(|a| a.as_ref()).collect();
            validate_agents(&refs, &sets)?
        };
        Ok(Self { agents, sets, dims })
    }

    /// `m` agents that all hold the same objective.
    pub fn homogeneous(
        objective: Arc<dyn LocalObjective<T>>,
        m: usize,
        sets: ProductSet<T>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(FedError::InvalidInput(
                "a federation needs at least one agent".into(),
            ));
        }
        Self::new(vec![objective; m], sets)
    }
}

impl<T: Scalar> std::fmt::Debug for Federation<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Federation")
            .field("agents", &self.agents.len())
            .field("dims", &self.dims)
            .field("sets", &self.sets)
            .finish()
    }
}

impl<T: Scalar> MinimaxProblem<T> for Federation<T> {
    fn num_agents(&self) -> usize {
        self.agents.len()
    }
    fn dims(&self) -> (usize, usize) {
        self.dims
    }
    fn agent(&self, i: usize) -> &dyn LocalObjective<T> {
        self.agents[i].as_ref()
    }
    fn sets(&self) -> &ProductSet<T> {
        &self.sets
    }
}
