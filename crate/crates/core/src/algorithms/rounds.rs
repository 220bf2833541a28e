//! Single-round kernels.

use crate::error::Result;
use crate::iterate::Iterate;
use crate::problems::MinimaxProblem;
use crate::scalar::Scalar;
use crate::vector::RunningMean;

pub(crate) struct RoundWorkspace<T> {
    xi: Vec<T>,
    yi: Vec<T>,
    gx: Vec<T>,
    gy: Vec<T>,
    mean_x: RunningMean<T>,
    mean_y: RunningMean<T>,
    /// Per-agent gradients at the synchronized iterate (FedGDA-GT).
    anchor_x: Vec<Vec<T>>,
    anchor_y: Vec<Vec<T>>,
}

impl<T: Scalar> RoundWorkspace<T> {
    pub fn new(p: usize, q: usize) -> Self {
        Self {
            xi: vec![T::zero(); p],
            yi: vec![T::zero(); q],
            gx: vec![T::zero(); p],
            gy: vec![T::zero(); q],
            mean_x: RunningMean::new(p),
            mean_y: RunningMean::new(q),
            anchor_x: Vec::new(),
            anchor_y: Vec::new(),
        }
    }

    /// One Local SGDA round: every agent starts from `z`, takes `k`
    /// plain GDA steps on its own `f_i`, and the server averages and
    /// projects.
    pub fn local_sgda<P: MinimaxProblem<T> + ?Sized>(
        &mut self,
        problem: &P,
        z: &Iterate<T>,
        eta_x: T,
        eta_y: T,
        k: usize,
    ) -> Result<Iterate<T>> {
        self.mean_x.reset();
        self.mean_y.reset();
        for i in 0..problem.num_agents() {
            let agent = problem.agent(i);
            self.xi.copy_from_slice(&z.x);
            self.yi.copy_from_slice(&z.y);
            for _ in 0..k {
                agent.grad_into(&self.xi, &self.yi, &mut self.gx, &mut self.gy);
                for (x, &g) in self.xi.iter_mut().zip(&self.gx) {
                    *x -= eta_x * g;
                }
                for (y, &g) in self.yi.iter_mut().zip(&self.gy) {
                    *y += eta_y * g;
                }
            }
            self.mean_x.push(&self.xi);
            self.mean_y.push(&self.yi);
        }
        self.aggregate(problem)
    }

    /// One FedGDA-GT round with shared stepsize `eta`.
    pub fn fedgda_gt<P: MinimaxProblem<T> + ?Sized>(
        &mut self,
        problem: &P,
        z: &Iterate<T>,
        eta: T,
        k: usize,
    ) -> Result<Iterate<T>> {
        let m = problem.num_agents();
        let (p, q) = (z.x.len(), z.y.len());
        self.anchor_x.resize_with(m, || vec![T::zero(); p]);
        self.anchor_y.resize_with(m, || vec![T::zero(); q]);

        // Agents report ∇f_i(z^t); the server averages to ∇f(z^t).
        self.mean_x.reset();
        self.mean_y.reset();
        for i in 0..m {
            problem
                .agent(i)
                .grad_into(&z.x, &z.y, &mut self.anchor_x[i], &mut self.anchor_y[i]);
            self.mean_x.push(&self.anchor_x[i]);
            self.mean_y.push(&self.anchor_y[i]);
        }
        // Replace each anchor with its correction ∇f(z^t) − ∇f_i(z^t).
        for i in 0..m {
            for (a, &g) in self.anchor_x[i].iter_mut().zip(self.mean_x.as_slice()) {
                *a = g - *a;
            }
            for (a, &g) in self.anchor_y[i].iter_mut().zip(self.mean_y.as_slice()) {
                *a = g - *a;
            }
        }

        self.mean_x.reset();
        self.mean_y.reset();
        for i in 0..m {
            let agent = problem.agent(i);
            self.xi.copy_from_slice(&z.x);
            self.yi.copy_from_slice(&z.y);
            for _ in 0..k {
                agent.grad_into(&self.xi, &self.yi, &mut self.gx, &mut self.gy);
                for ((x, &g), &c) in self.xi.iter_mut().zip(&self.gx).zip(&self.anchor_x[i]) {
                    *x -= eta * (g + c);
                }
                for ((y, &g), &c) in self.yi.iter_mut().zip(&self.gy).zip(&self.anchor_y[i]) {
                    *y += eta * (g + c);
                }
            }
            self.mean_x.push(&self.xi);
            self.mean_y.push(&self.yi);
        }
        self.aggregate(problem)
    }

    fn aggregate<P: MinimaxProblem<T> + ?Sized>(&self, problem: &P) -> Result<Iterate<T>> {
        let mut x = self.mean_x.as_slice().to_vec();
        let mut y = self.mean_y.as_slice().to_vec();
        problem.sets().project_in_place(&mut x, &mut y)?;
        Ok(Iterate { x, y })
    }
}

/// One centralized GDA step `x' = x − η_x ∇_x f(z)`, `y' = y + η_y ∇_y f(z)`,
/// projected onto `X × Y`.
///
/// The step is evaluated as the ascending-order mean of the agents'
/// individual steps, which makes it bitwise identical to a Local SGDA
/// round with `K = 1`.
pub fn gda_step<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    z: &Iterate<T>,
    eta_x: T,
    eta_y: T,
) -> Result<Iterate<T>> {
    local_sgda_round(problem, z, eta_x, eta_y, 1)
}

/// One Local SGDA communication round from `z`.
pub fn local_sgda_round<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    z: &Iterate<T>,
    eta_x: T,
    eta_y: T,
    k: usize,
) -> Result<Iterate<T>> {
    let (p, q) = problem.dims();
    z.check_dims(p, q)?;
    RoundWorkspace::new(p, q).local_sgda(problem, z, eta_x, eta_y, k)
}

/// One FedGDA-GT communication round from `z`.
pub fn fedgda_gt_round<T: Scalar, P: MinimaxProblem<T> + ?Sized>(
    problem: &P,
    z: &Iterate<T>,
    eta: T,
    k: usize,
) -> Result<Iterate<T>> {
    let (p, q) = problem.dims();
    z.check_dims(p, q)?;
    RoundWorkspace::new(p, q).fedgda_gt(problem, z, eta, k)
}
