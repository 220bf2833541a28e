use super::{validate_agents, Constants, LocalObjective, MinimaxProblem};
use crate::error::{check_dim, FedError, Result};
use crate::iterate::Iterate;
use crate::linalg::{spd_solve, symmetric_eigenvalues, Cholesky, DenseMatrix};
use crate::scalar::Scalar;
use crate::sets::ProductSet;
use crate::vector::dot_unchecked;

/// `f_i(x, y) = ½ xᵀQx − ½ yᵀQy + cᵀ(2x − y)` with `Q` symmetric PSD.
#[derive(Debug, Clone)]
pub struct QuadraticAgent<T> {
    q: DenseMatrix<T>,
    c: Vec<T>,
}

impl<T: Scalar> QuadraticAgent<T> {
    pub fn new(q: DenseMatrix<T>, c: Vec<T>) -> Result<Self> {
        if !q.is_symmetric() {
            return Err(FedError::InvalidInput(
                "quadratic agent matrix must be symmetric".into(),
            ));
        }
        check_dim("quadratic agent linear term", q.rows(), c.len())?;
        if q.rows() == 0 {
            return Err(FedError::InvalidInput("empty quadratic agent".into()));
        }
        Ok(Self { q, c })
    }

    pub fn q(&self) -> &DenseMatrix<T> {
        &self.q
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }
}

impl<T: Scalar> LocalObjective<T> for QuadraticAgent<T> {
    fn dims(&self) -> (usize, usize) {
        (self.c.len(), self.c.len())
    }

    fn value(&self, x: &[T], y: &[T]) -> T {
        let half = T::lit(0.5);
        let qx = self.q.matvec(x).expect("x dimension");
        let qy = self.q.matvec(y).expect("y dimension");
        let two = T::lit(2.0);
        let lin = self
            .c
            .iter()
            .zip(x.iter().zip(y))
            .fold(T::zero(), |acc, (&c, (&xi, &yi))| acc + c * (two * xi - yi));
        half * dot_unchecked(x, &qx) - half * dot_unchecked(y, &qy) + lin
    }

    fn grad_into(&self, x: &[T], y: &[T], gx: &mut [T], gy: &mut [T]) {
        // ∇_x = Qx + 2c, ∇_y = −Qy − c
        let two = T::lit(2.0);
        for (g, &c) in gx.iter_mut().zip(&self.c) {
            *g = two * c;
        }
        self.q.t_matvec_acc(x, gx);
        gy.iter_mut().for_each(|g| *g = T::zero());
        self.q.t_matvec_acc(y, gy);
        for (g, &c) in gy.iter_mut().zip(&self.c) {
            *g = -*g - c;
        }
    }
}

/// Federation of uncoupled quadratic agents (`p = q = d`).
#[derive(Debug, Clone)]
pub struct UncoupledQuadratic<T> {
    agents: Vec<QuadraticAgent<T>>,
    sets: ProductSet<T>,
}

impl<T: Scalar> UncoupledQuadratic<T> {
    /// Validates shared dimensions and that `Σ Q_i` is positive definite.
    pub fn new(agents: Vec<QuadraticAgent<T>>, sets: ProductSet<T>) -> Result<Self> {
        {
            let refs: Vec<&dyn LocalObjective<T>> =
                agents.iter().map(|a| a as &dyn LocalObjective<T>).collect();
            validate_agents(&refs, &sets)?;
        }
        let problem = Self { agents, sets };
        Cholesky::factor(&problem.sum_q())?;
        Ok(problem)
    }

    pub fn unconstrained(agents: Vec<QuadraticAgent<T>>) -> Result<Self> {
        Self::new(agents, ProductSet::unconstrained())
    }

    pub fn agents(&self) -> &[QuadraticAgent<T>] {
        &self.agents
    }

    pub fn dim(&self) -> usize {
        self.agents[0].c.len()
    }

    pub fn with_sets(mut self, sets: ProductSet<T>) -> Result<Self> {
        sets.check_dims(self.dim(), self.dim())?;
        self.sets = sets;
        Ok(self)
    }

    pub fn sum_q(&self) -> DenseMatrix<T> {
        let d = self.dim();
        let mut s = DenseMatrix::zeros(d, d);
        for a in &self.agents {
            s.add_assign(&a.q).expect("validated dims");
        }
        s
    }

    pub fn sum_c(&self) -> Vec<T> {
        let mut s = vec![T::zero(); self.dim()];
        for a in &self.agents {
            s.iter_mut().zip(&a.c).for_each(|(si, &ci)| *si += ci);
        }
        s
    }

    /// `x* = −2(ΣQ_i)⁻¹Σc_i`, `y* = −(ΣQ_i)⁻¹Σc_i`.
    pub fn closed_form_minimax(&self) -> Result<Iterate<T>> {
        let v = spd_solve(&self.sum_q(), &self.sum_c())?;
        let two = T::lit(2.0);
        Ok(Iterate {
            x: v.iter().map(|&vi| -two * vi).collect(),
            y: v.iter().map(|&vi| -vi).collect(),
        })
    }

    /// `μ = min_i λ_min(Q_i)`, `L = max_i λ_max(Q_i)`.
    pub fn estimate_constants(&self) -> Result<Constants<T>> {
        let mut mu = T::infinity();
        let mut lipschitz = T::neg_infinity();
        for a in &self.agents {
            let eig = symmetric_eigenvalues(&a.q)?;
            mu = mu.min(eig[0]);
            lipschitz = lipschitz.max(eig[eig.len() - 1]);
        }
        Ok(Constants { mu, lipschitz })
    }
}

impl<T: Scalar> MinimaxProblem<T> for UncoupledQuadratic<T> {
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
